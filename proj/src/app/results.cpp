#include "app/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/rng.hpp"

namespace sglab::app {

namespace fs = std::filesystem;

const char* const kCsvHeader = "experiment,quantity,digest,value,se,bias,n_samples,seed,pass,wall_time";

bool RunResult::all_passed() const {
  for (const auto& r : rows)
    if (r.pass && !*r.pass) return false;
  return true;
}

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  return out;
}

}  // namespace

std::string csv_line(const ResultRow& r) {
  std::string s = quoted(r.experiment) + "," + quoted(r.quantity) + "," + r.digest + "," + g17(r.value) + "," +
                  g17(r.se) + "," + g17(r.bias) + "," + std::to_string(r.n_samples) + "," + std::to_string(r.seed) +
                  ",";
  if (r.pass) s += *r.pass ? "true" : "false";
  char w[32];
  std::snprintf(w, sizeof w, "%.3f", r.wall_time);
  return s + "," + w;
}

std::string to_csv(const RunResult& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) out += csv_line(row) + "\n";
  return out;
}

nlohmann::json to_summary(const RunResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows) {
    nlohmann::json j = {{"quantity", x.quantity}, {"digest", x.digest},     {"value", x.value},
                        {"se", x.se},             {"bias", x.bias},         {"n_samples", x.n_samples},
                        {"seed", x.seed},         {"wall_time", x.wall_time}};
    j["pass"] = x.pass ? nlohmann::json(*x.pass) : nlohmann::json();
    rows.push_back(std::move(j));
  }
  return {{"experiment", r.experiment}, {"digest", r.digest},     {"seed", r.seed},
          {"config", r.config},         {"rows", rows},           {"all_passed", r.all_passed()},
          {"wall_time", r.wall_time}};
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::config, "cannot write " + tmp.string(), "output.dir");
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::config, "write failed for " + tmp.string(), "output.dir");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::config, "cannot rename into " + target.string() + ": " + ec.message(), "output.dir");
}

std::pair<std::string, std::string> write_results(const RunResult& r, const std::string& dir) {
  const std::string base = (fs::path(dir) / slug(r.experiment)).string();
  const std::string csv = base + ".csv", summary = base + ".summary.json";
  write_atomic(csv, to_csv(r));
  write_atomic(summary, to_summary(r).dump(2) + "\n");
  return {csv, summary};
}

}  // namespace sglab::app
