#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/cascade.hpp"
#include "core/estimate.hpp"
#include "core/model.hpp"
#include "core/order_param.hpp"

namespace sglab::app {

using json = nlohmann::json;

// A JSON object whose keys are checked against an allowed list on construction.
// Type errors and unknown keys raise ErrorCode::config with a dotted location.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> allowed);
  Section(const json& j, std::string path, const std::vector<std::string>& allowed);

  bool has(const char* key) const;
  double num(const char* key, double def) const;
  int integer(const char* key, int def) const;
  std::uint64_t u64(const char* key, std::uint64_t def) const;
  bool flag(const char* key, bool def) const;
  std::string str(const char* key, const std::string& def) const;
  // scalar or array
  std::vector<int> ints(const char* key, const std::vector<int>& def) const;
  std::vector<double> nums(const char* key, const std::vector<double>& def) const;
  std::vector<std::pair<int, double>> terms(const char* key) const;
  const json& raw(const char* key) const;
  std::string loc(const char* key) const { return path_ + "." + key; }

 private:
  const json* j_;
  std::string path_;
  json empty_ = json::object();
};

struct ModelSpec {
  bool sk = false;
  DilutedSpec diluted;
  SKSpec sk_spec;
};

struct McSection {
  std::uint64_t seed = 12345;
  int threads = 0;
  int outer = 2000;
  int inner = 128;
  int n_disorder = 400;
  int samples = 256;
  int sites = 32;
  bool use_chain = false;
  ChainConfig chain;
};

// expands "preset" and applies the remaining keys on top
json expand_model(const json& model, const std::string& default_preset);
json expand_sigma(const json& sigma, const std::string& default_preset);

ModelSpec model_from(const json& expanded);
McSection mc_from(const json& mc);
CascadeSpec cascade_from(const json& expanded_sigma);
OrderParameter sigma_from(const json& expanded_sigma, const ModelSpec& model);

const std::vector<std::string>& model_presets();
const std::vector<std::string>& sigma_presets();

std::string hex64(std::uint64_t x);

}  // namespace sglab::app
