#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "app/config.hpp"
#include "app/experiments.hpp"
#include "app/results.hpp"

using namespace sglab;
using namespace sglab::app;

namespace {

json run_doc(const std::string& text) { return parse_config(text); }

ErrorCode code_of(const std::string& text) {
  try {
    run_experiment(parse_config(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

std::string location_of(const std::string& text) {
  try {
    run_experiment(parse_config(text));
  } catch (const Error& e) {
    return e.location();
  }
  return "";
}

}  // namespace

TEST_CASE("free-energy run with zero clause density") {
  auto r = run_experiment(run_doc(R"({"experiment":"free-energy","model":{"preset":"diluted-ksat","alpha":0},
                                      "params":{"N":6}})"));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(r.rows[0].se == 0.0);
  CHECK(r.rows[0].pass.value_or(false));
  CHECK(r.all_passed());
}

TEST_CASE("unknown keys are rejected with their location") {
  CHECK(code_of(R"({"experiment":"free-energy","bogus":1})") == ErrorCode::config);
  CHECK(location_of(R"({"experiment":"free-energy","mc":{"outr":5}})") == "mc.outr");
  CHECK(location_of(R"({"experiment":"free-energy","model":{"preset":"sk","alpha":1}})") == "model.alpha");
  CHECK(location_of(R"({"experiment":"free-energy","params":{"M":3}})") == "params.M");
  CHECK(location_of(R"({"experiment":"nope"})") == "experiment");
  CHECK(code_of("{not json") == ErrorCode::config);
}

TEST_CASE("digest ignores thread count and output directory") {
  auto a = run_experiment(run_doc(R"({"experiment":"free-energy","params":{"N":4},"mc":{"n_disorder":20,"threads":1}})"));
  auto b = run_experiment(run_doc(
      R"({"experiment":"free-energy","params":{"N":4},"mc":{"n_disorder":20,"threads":2},"output":{"dir":"x"}})"));
  CHECK(a.digest == b.digest);
  CHECK(a.rows[0].value == b.rows[0].value);
  CHECK(a.rows[0].seed == b.rows[0].seed);
  auto c = run_experiment(run_doc(R"({"experiment":"free-energy","params":{"N":4},"mc":{"n_disorder":20,"seed":1}})"));
  CHECK(a.digest != c.digest);
}

TEST_CASE("presets expand and accept overrides") {
  json m = expand_model(json{{"preset", "sk"}, {"beta", 0.4}}, "diluted-ksat");
  auto spec = model_from(m);
  REQUIRE(spec.sk);
  CHECK(spec.sk_spec.betas[0].second == doctest::Approx(0.4));
  CHECK_THROWS_AS(expand_model(json{{"preset", "no-such"}}, "sk"), Error);
}

TEST_CASE("result files are written with the fixed header") {
  auto r = run_experiment(run_doc(R"({"experiment":"free-energy","params":{"N":4},"mc":{"n_disorder":10}})"));
  const auto dir = std::filesystem::temp_directory_path() / "sglab_app_test";
  std::filesystem::create_directories(dir);
  auto [csv, summary] = write_results(r, dir.string());
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  CHECK(header == "experiment,quantity,digest,value,se,bias,n_samples,seed,pass,wall_time");
  std::ifstream s(summary);
  json j = json::parse(s);
  CHECK(j["digest"] == r.digest);
  std::filesystem::remove_all(dir);
}

TEST_CASE("output directory falls back to the environment") {
  CHECK(output_dir(json{{"output", {{"dir", "a"}}}}) == "a");
  setenv("SGLAB_OUT", "from_env", 1);
  CHECK(output_dir(json::object()) == "from_env");
  unsetenv("SGLAB_OUT");
  CHECK(output_dir(json::object()) == "sglab_out");
}

TEST_CASE("gss alias runs the variance experiment") {
  auto r = run_experiment(run_doc(R"({"experiment":"gss","sigma":{"preset":"cascade-1rsb"},"params":{"t":[0.5]},
                                      "mc":{"outer":300}})"));
  CHECK(r.experiment == "gg.gss");
  bool seen = false;
  for (const auto& row : r.rows)
    if (row.pass) {
      seen = true;
      CHECK(*row.pass);
    }
  CHECK(seen);
}
