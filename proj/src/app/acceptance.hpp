#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "app/results.hpp"

namespace sglab::app {

struct Criterion {
  int id = 0;
  std::string title;
  bool checks = false;  // numerical assertions only
  bool pass = false;    // checks and wall <= limit
  double wall = 0.0;
  double limit = 0.0;
  std::string detail;
  std::vector<ResultRow> rows;
};

struct AcceptanceOptions {
  std::uint64_t seed = 12345;
  int threads = 0;
  std::vector<int> only;  // empty: all thirteen
  std::function<void(const Criterion&)> on_done;
};

constexpr int kCriteria = 13;

std::vector<Criterion> run_acceptance(const AcceptanceOptions& opt);
std::string format_line(const Criterion& c);

}  // namespace sglab::app
