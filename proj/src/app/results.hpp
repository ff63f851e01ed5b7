#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/common.hpp"

namespace sglab::app {

struct ResultRow {
  std::string experiment;
  std::string quantity;
  std::string digest;
  double value = 0.0;
  double se = 0.0;
  double bias = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::optional<bool> pass;
  double wall_time = 0.0;
};

struct RunResult {
  std::string experiment;
  std::string digest;
  std::uint64_t seed = 0;
  nlohmann::json config;  // canonical form
  std::vector<ResultRow> rows;
  double wall_time = 0.0;

  bool all_passed() const;
};

extern const char* const kCsvHeader;

std::string csv_line(const ResultRow& r);
std::string to_csv(const RunResult& r);
nlohmann::json to_summary(const RunResult& r);

// write to a temporary in the same directory, then rename
void write_atomic(const std::string& path, const std::string& content);
// returns the two paths written
std::pair<std::string, std::string> write_results(const RunResult& r, const std::string& dir);

}  // namespace sglab::app
