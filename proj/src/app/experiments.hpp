#pragma once

#include <functional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/results.hpp"

namespace sglab::app {

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> params;
  std::string default_model;
  std::string default_sigma;  // empty: no order parameter
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& find_experiment(const std::string& name);  // resolves aliases

// Parses a config document and rejects unknown keys in every section.
json parse_config(const std::string& text);

struct RunOptions {
  int threads = -1;  // -1: take mc.threads
  std::function<void(const std::string&)> progress;
};

// doc.experiment selects the experiment; returns rows with pass flags where asserted
RunResult run_experiment(const json& doc, const RunOptions& opt = {});

// output directory: doc.output.dir, else SGLAB_OUT, else "sglab_out"
std::string output_dir(const json& doc);

}  // namespace sglab::app
