#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sglab/sglab.h"

using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

const char* kTableHelp =
    "Tabulated order parameters (sigma.kind = tabulated, sigma.path = FILE) read one grid cell per line:\n"
    "  w u v mean\n"
    "with 0-based integer cell indices w, u, v and the spin mean in [-1,1]. '#' starts a comment.\n"
    "Every cell of the w x u x v grid must appear exactly once.";

// "0.25,0.5" -> [0.25,0.5]; "6" -> 6; "r12" -> "r12"
json parse_value(const std::string& s) {
  auto one = [](const std::string& t) -> json {
    try {
      std::size_t pos = 0;
      long long i = std::stoll(t, &pos);
      if (pos == t.size()) return i;
    } catch (...) {
    }
    try {
      std::size_t pos = 0;
      double d = std::stod(t, &pos);
      if (pos == t.size()) return d;
    } catch (...) {
    }
    if (t == "true") return true;
    if (t == "false") return false;
    return t;
  };
  if (s.find(',') == std::string::npos) return one(s);
  json a = json::array();
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) a.push_back(one(t));
  return a;
}

int report_error(sglab_status code, const std::string& msg, const std::string& loc) {
  std::cerr << "error: " << (loc.empty() ? "" : loc + ": ") << msg << "\n";
  std::cerr << json{{"error", msg}, {"location", loc}, {"code", static_cast<int>(code)}}.dump() << "\n";
  return kExitError;
}

int last_error(sglab_status code) { return report_error(code, sglab_last_error(), sglab_last_error_location()); }

struct Flags {
  std::string config_path;
  std::string seed;
  int threads = -1;
  std::string out;
  bool quiet = false;

  std::string model, sigma;
  std::map<std::string, std::string> model_kv, sigma_kv, mc_kv, params;
};

void add_common(CLI::App* sub, Flags& f, const std::vector<std::string>& params) {
  sub->add_option("--config", f.config_path, "config document (JSON); flags override it")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "master seed (u64)");
  sub->add_option("--threads", f.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", f.out, "output directory (default $SGLAB_OUT, else ./sglab_out)");
  sub->add_flag("--quiet", f.quiet, "do not print result rows");

  sub->add_option("--model", f.model, "model preset: diluted-ksat, diluted-pspin, sk, sk-gg");
  for (auto [flag, key] : {std::pair{"--alpha", "alpha"}, {"--beta", "beta"}, {"--model-p", "p"}, {"--betas", "betas"}})
    sub->add_option_function<std::string>(flag, [&f, key = std::string(key)](const std::string& v) { f.model_kv[key] = v; },
                                          "model." + std::string(key));

  sub->add_option("--sigma", f.sigma, "order parameter preset: rs0, rs-fixed-point, cascade-1rsb, cascade-1rsb-sc, "
                                      "cascade-2rsb, two-state");
  for (auto [flag, key] : {std::pair{"--q", "q"}, {"--m", "m"}, {"--h-mean", "h_mean"}, {"--h-sd", "h_sd"},
                           {"--table", "path"}, {"--truncation", "truncation"}, {"--dust", "dust_chains"}})
    sub->add_option_function<std::string>(flag, [&f, key = std::string(key)](const std::string& v) { f.sigma_kv[key] = v; },
                                          "sigma." + std::string(key));

  for (auto [flag, key] : {std::pair{"--outer", "outer"}, {"--inner", "inner"}, {"--n-disorder", "n_disorder"},
                           {"--samples", "samples"}, {"--sites", "sites"}}) {
    // validate-theta has its own samples parameter
    if (std::string(key) == "samples" &&
        std::find(params.begin(), params.end(), "samples") != params.end())
      continue;
    sub->add_option_function<std::string>(flag, [&f, key = std::string(key)](const std::string& v) { f.mc_kv[key] = v; },
                                          "mc." + std::string(key));
  }
  sub->add_flag_function("--chain", [&f](std::int64_t) { f.mc_kv["use_chain"] = "true"; }, "use MCMC instead of enumeration");

  for (const auto& p : params) {
    std::string flag = "--" + p;
    std::replace(flag.begin(), flag.end(), '_', '-');
    sub->add_option_function<std::string>(flag, [&f, p](const std::string& v) { f.params[p] = v; },
                                          "params." + p + " (comma list allowed)");
  }
}

json build_config(const std::string& experiment, const Flags& f) {
  json doc = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error("config must be a JSON object");
  }
  doc["experiment"] = experiment;
  auto section = [&](const char* name) -> json& {
    if (!doc.contains(name) || doc[name].is_null()) doc[name] = json::object();
    return doc[name];
  };
  if (!f.model.empty()) section("model")["preset"] = f.model;
  for (auto& [k, v] : f.model_kv) section("model")[k] = k == "betas" ? json::parse(v) : parse_value(v);
  if (!f.sigma.empty()) section("sigma")["preset"] = f.sigma;
  for (auto& [k, v] : f.sigma_kv) {
    json x = k == "path" ? json(v) : parse_value(v);
    if ((k == "q" || k == "m") && !x.is_array()) x = json::array({x});
    section("sigma")[k] = x;
  }
  for (auto& [k, v] : f.mc_kv) section("mc")[k] = parse_value(v);
  if (!f.seed.empty()) {
    try {
      std::size_t pos = 0;
      const unsigned long long s = std::stoull(f.seed, &pos, 0);
      if (pos != f.seed.size()) throw std::invalid_argument("");
      section("mc")["seed"] = s;
    } catch (...) {
      throw std::runtime_error("--seed must be an unsigned 64-bit integer");
    }
  }
  for (auto& [k, v] : f.params) section("params")[k] = k == "preset" || k == "F" || k == "suite" ? json(v) : parse_value(v);
  if (!f.out.empty()) section("output")["dir"] = f.out;
  return doc;
}

void print_rows(const sglab_run* run) {
  const size_t n = sglab_run_row_count(run);
  for (size_t i = 0; i < n; ++i) {
    sglab_row r;
    if (sglab_run_row(run, i, &r) != SGLAB_OK) continue;
    std::printf("%-58s %+.6f  se %.6f", r.quantity, r.value, r.se);
    if (r.bias != 0.0) std::printf("  bias %.2g", r.bias);
    if (r.pass >= 0) std::printf("  %s", r.pass ? "ok" : "FAIL");
    std::printf("\n");
  }
}

int execute(const std::string& experiment, const Flags& f) {
  json doc;
  try {
    doc = build_config(experiment, f);
  } catch (const std::exception& e) {
    return report_error(SGLAB_CONFIG, e.what(), "config");
  }
  sglab_run* run = nullptr;
  if (auto s = sglab_run_create(doc.dump().c_str(), &run); s != SGLAB_OK) return last_error(s);
  auto progress = [](const char* line, void*) {
    std::fprintf(stderr, "%s\n", line);
    std::fflush(stderr);
  };
  if (auto s = sglab_run_execute(run, f.threads, progress, nullptr); s != SGLAB_OK) {
    const int rc = last_error(s);
    sglab_run_destroy(run);
    return rc;
  }
  if (!f.quiet) print_rows(run);
  if (auto s = sglab_run_write(run, nullptr); s != SGLAB_OK) {
    const int rc = last_error(s);
    sglab_run_destroy(run);
    return rc;
  }
  const bool ok = sglab_run_all_passed(run) == 1;
  std::fprintf(stderr, "%s: digest %s, results in %s\n", experiment.c_str(), sglab_run_digest(run),
               sglab_run_output_dir(run));
  sglab_run_destroy(run);
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sglab: spin-glass free energy, bound and identity checks"};
  app.footer(kTableHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", sglab_version());

  auto* list = app.add_subcommand("list", "list experiments and their parameters");
  auto* run = app.add_subcommand("run", "run one experiment");
  run->require_subcommand(1);

  Flags flags;
  std::string chosen;
  std::map<std::string, CLI::App*> groups;
  for (size_t i = 0; i < sglab_experiment_count(); ++i) {
    const std::string name = sglab_experiment_name(i);
    const auto params = json::parse(sglab_experiment_params(i)).get<std::vector<std::string>>();
    auto add_leaf = [&](CLI::App* parent, const std::string& leaf) {
      auto* sub = parent->add_subcommand(leaf, sglab_experiment_summary(i));
      add_common(sub, flags, params);
      sub->callback([&chosen, name] { chosen = name; });
      sub->footer(kTableHelp);
    };
    const auto dot = name.find('.');
    if (dot == std::string::npos) {
      add_leaf(run, name);
      continue;
    }
    const std::string group = name.substr(0, dot);
    if (!groups.count(group)) {
      groups[group] = run->add_subcommand(group, group + " experiments");
      groups[group]->require_subcommand(1);
    }
    add_leaf(groups[group], name.substr(dot + 1));
    if (name == "gg.gss") add_leaf(run, "gss");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  if (list->parsed()) {
    for (size_t i = 0; i < sglab_experiment_count(); ++i) {
      const auto params = json::parse(sglab_experiment_params(i));
      std::printf("%-22s %s", sglab_experiment_name(i), sglab_experiment_summary(i));
      if (!params.empty()) std::printf("  [%s]", params.dump().c_str());
      std::printf("\n");
    }
    return 0;
  }
  return execute(chosen, flags);
}
