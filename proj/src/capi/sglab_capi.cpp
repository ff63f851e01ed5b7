#include "sglab/sglab.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "app/experiments.hpp"
#include "app/results.hpp"
#include "core/bounds.hpp"
#include "core/rng.hpp"

using namespace sglab;

struct sglab_run {
  nlohmann::json doc;
  app::RunResult res;
  bool done = false;
  std::string out_dir;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_location;

sglab_status set_error(sglab_status s, std::string msg, std::string loc = {}) {
  g_error = std::move(msg);
  g_location = std::move(loc);
  return s;
}

template <class F>
sglab_status guard(F&& f) {
  try {
    f();
    return SGLAB_OK;
  } catch (const Error& e) {
    return set_error(static_cast<sglab_status>(e.code()), e.what(), e.location());
  } catch (const std::bad_alloc&) {
    return set_error(SGLAB_LIMIT, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SGLAB_INTERNAL, e.what());
  } catch (...) {
    return set_error(SGLAB_INTERNAL, "unknown error");
  }
}

const std::vector<std::string>& params_json() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& e : app::experiments()) out.push_back(nlohmann::json(e.params).dump());
    return out;
  }();
  return v;
}

}  // namespace

extern "C" {

const char* sglab_last_error(void) { return g_error.c_str(); }
const char* sglab_last_error_location(void) { return g_location.c_str(); }
const char* sglab_version(void) { return "0.1.0"; }

size_t sglab_experiment_count(void) { return app::experiments().size(); }

const char* sglab_experiment_name(size_t i) {
  return i < app::experiments().size() ? app::experiments()[i].name.c_str() : nullptr;
}

const char* sglab_experiment_summary(size_t i) {
  return i < app::experiments().size() ? app::experiments()[i].summary.c_str() : nullptr;
}

const char* sglab_experiment_params(size_t i) { return i < params_json().size() ? params_json()[i].c_str() : nullptr; }

sglab_status sglab_run_create(const char* config_json, sglab_run** out) {
  if (!out) return set_error(SGLAB_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  if (!config_json) return set_error(SGLAB_INVALID_ARGUMENT, "config is null");
  return guard([&] {
    auto r = std::make_unique<sglab_run>();
    r->doc = app::parse_config(config_json);
    r->out_dir = app::output_dir(r->doc);
    *out = r.release();
  });
}

void sglab_run_destroy(sglab_run* run) { delete run; }

sglab_status sglab_run_execute(sglab_run* run, int threads, sglab_progress_fn progress, void* user) {
  if (!run) return set_error(SGLAB_INVALID_ARGUMENT, "run is null");
  return guard([&] {
    app::RunOptions o;
    o.threads = threads;
    if (progress) o.progress = [=](const std::string& s) { progress(s.c_str(), user); };
    run->res = app::run_experiment(run->doc, o);
    run->done = true;
  });
}

size_t sglab_run_row_count(const sglab_run* run) { return run ? run->res.rows.size() : 0; }

sglab_status sglab_run_row(const sglab_run* run, size_t i, sglab_row* out) {
  if (!run || !out) return set_error(SGLAB_INVALID_ARGUMENT, "null argument");
  if (i >= run->res.rows.size()) return set_error(SGLAB_INVALID_ARGUMENT, "row index out of range");
  const auto& r = run->res.rows[i];
  *out = {r.experiment.c_str(), r.quantity.c_str(), r.digest.c_str(), r.value, r.se, r.bias, r.n_samples, r.seed,
          r.pass ? (*r.pass ? 1 : 0) : -1, r.wall_time};
  return SGLAB_OK;
}

int sglab_run_all_passed(const sglab_run* run) {
  if (!run || !run->done) return -1;
  return run->res.all_passed() ? 1 : 0;
}

const char* sglab_run_digest(const sglab_run* run) { return run && run->done ? run->res.digest.c_str() : ""; }
const char* sglab_run_output_dir(const sglab_run* run) { return run ? run->out_dir.c_str() : ""; }

sglab_status sglab_run_write(const sglab_run* run, const char* dir) {
  if (!run) return set_error(SGLAB_INVALID_ARGUMENT, "run is null");
  if (!run->done) return set_error(SGLAB_INVALID_ARGUMENT, "run has not been executed");
  return guard([&] {
    const std::string d = dir ? dir : run->out_dir;
    std::error_code ec;
    std::filesystem::create_directories(d, ec);
    if (ec) throw Error(ErrorCode::config, "cannot create output directory: " + ec.message(), "output.dir");
    app::write_results(run->res, d);
  });
}

sglab_status sglab_seed_derive(uint64_t master, const char* const* labels, size_t n, uint64_t* out) {
  if (!out || (n > 0 && !labels)) return set_error(SGLAB_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    std::vector<std::string> v;
    for (size_t i = 0; i < n; ++i) {
      if (!labels[i]) throw Error(ErrorCode::invalid_argument, "null label");
      v.emplace_back(labels[i]);
    }
    *out = seed_derive(master, v);
  });
}

double sglab_convexity_term(double x, double y, int p) {
  try {
    return convexity_term(x, y, p);
  } catch (...) {
    return std::nan("");
  }
}

}  // extern "C"
