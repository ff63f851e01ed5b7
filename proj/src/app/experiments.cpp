#include "app/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "app/acceptance.hpp"
#include "core/bounds.hpp"
#include "core/functional.hpp"
#include "core/invariance.hpp"

namespace sglab::app {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

[[noreturn]] void bad(const std::string& msg, const std::string& loc) { throw Error(ErrorCode::config, msg, loc); }

struct Ctx {
  const ExperimentInfo* info = nullptr;
  json params_doc;
  std::unique_ptr<Section> params;
  ModelSpec model;
  json sigma_doc;
  McSection mc;
  RunResult res;
  const RunOptions* opt = nullptr;

  const Section& p() const { return *params; }
  std::uint64_t seed_for(const std::string& label) const { return seed_derive(mc.seed, {info->name, label}); }
  OrderParameter sigma() const { return sigma_from(sigma_doc, model); }

  void say(const std::string& s) const {
    if (opt->progress) opt->progress(s);
  }

  ResultRow& row(const std::string& quantity, const Estimate& e, std::uint64_t seed, double wall) {
    ResultRow r;
    r.experiment = info->name;
    r.quantity = quantity;
    r.digest = hex64(fnv1a64(res.config.dump() + "\n" + quantity));
    r.value = e.value;
    r.se = e.se;
    r.bias = e.bias;
    r.n_samples = e.n;
    r.seed = seed;
    r.wall_time = wall;
    res.rows.push_back(r);
    say(quantity + " = " + std::to_string(e.value) + " (se " + std::to_string(e.se) + ")");
    return res.rows.back();
  }
  ResultRow& scalar(const std::string& quantity, double v, std::uint64_t seed, double wall) {
    Estimate e;
    e.value = v;
    e.n = 1;
    return row(quantity, e, seed, wall);
  }

  const DilutedSpec& diluted() const {
    if (model.sk) bad("this experiment needs a diluted model", "model.type");
    return model.diluted;
  }
  const SKSpec& sk() const {
    if (!model.sk) bad("this experiment needs an SK model", "model.type");
    return model.sk_spec;
  }
  FunctionalParams fparams() const { return {mc.outer, std::max(mc.inner, 100), mc.threads}; }
  InvarianceParams iparams() const { return {mc.outer, std::max(mc.inner, 100), mc.threads}; }
  BoundParams bparams() const { return {mc.outer, std::max(mc.inner, 100), mc.n_disorder, mc.threads}; }
  McParams cparams() const { return {mc.outer, mc.inner, mc.threads}; }
  EstimateParams eparams() const {
    EstimateParams e;
    e.n_disorder = mc.n_disorder;
    e.samples = mc.samples;
    e.use_chain = mc.use_chain;
    e.chain = mc.chain;
    e.threads = mc.threads;
    return e;
  }
};

bool within3(const Estimate& e, double target) {
  return std::abs(e.value - target) <= std::max(3.0 * e.se, 1e-12);
}

std::string tag(const char* k, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s=%g", k, v);
  return buf;
}

std::string point(std::initializer_list<std::string> parts) {
  std::string s = "[";
  for (const auto& p : parts) s += (s.size() > 1 ? "," : "") + p;
  return s + "]";
}

// ---- experiments ----

bool trivial_model(const ModelSpec& m) {
  if (m.sk) {
    for (auto [p, b] : m.sk_spec.betas)
      if (b != 0.0) return false;
    return !m.sk_spec.perturbation && !m.sk_spec.gg;
  }
  return m.diluted.alpha == 0.0 && !m.diluted.perturbation;
}

void run_free_energy(Ctx& c) {
  const auto Ns = c.p().ints("N", {8});
  const bool exact = trivial_model(c.model);
  for (int N : Ns) {
    const auto t0 = Clock::now();
    const std::uint64_t s = c.seed_for("F_N/" + std::to_string(N));
    Estimate e = c.model.sk ? free_energy_quenched(c.model.sk_spec, N, c.mc.n_disorder, s, c.mc.threads)
                            : free_energy_quenched(c.model.diluted, N, c.mc.n_disorder, s, c.mc.threads);
    auto& r = c.row("F_N" + point({tag("N", N)}), e, s, since(t0));
    if (exact) r.pass = std::abs(e.value - std::log(2.0)) <= 1e-12;
  }
}

void run_enumerate(Ctx& c) {
  const int N = c.p().integer("N", 8);
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("disorder");
  GibbsTable t;
  if (c.model.sk)
    t = enumerate_gibbs(sample_sk_disorder(c.model.sk_spec, N, s));
  else
    t = enumerate_gibbs(sample_diluted_disorder(c.model.diluted, N, s));
  const double w = since(t0);
  c.scalar("log_Z" + point({tag("N", N)}), t.log_Z, s, w);
  c.scalar("F" + point({tag("N", N)}), t.log_Z / N, s, w);
  if (N >= 2) {
    c.scalar("s1s2" + point({tag("N", N)}),
             t.average([](std::uint64_t x) { return spin_of(x, 0) * spin_of(x, 1); }), s, w);
  }
}

void slack_rows(Ctx& c, const BoundReport& r, int N, std::uint64_t s, double w) {
  const std::string pt = point({tag("N", N)});
  c.row("F_N" + pt, r.F_N, s, w);
  c.row("bound" + pt, r.bound, s, w);
  c.row("slack" + pt, r.slack, s, w).pass = r.slack.value >= -3.0 * r.slack.se;
}

void run_franz_leone(Ctx& c) {
  const int N = c.p().integer("N", 8);
  const auto& spec = c.diluted();
  auto sigma = c.sigma();
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("bound");
  slack_rows(c, franz_leone_upper(sigma, spec, N, c.bparams(), s), N, s, since(t0));
}

void run_guerra(Ctx& c) {
  const int N = c.p().integer("N", 10);
  const auto& spec = c.sk();
  auto sigma = c.sigma();
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("bound");
  slack_rows(c, guerra_upper_sk(sigma, spec, N, c.bparams(), s), N, s, since(t0));
}

void run_ass_lower(Ctx& c) {
  for (int N : c.p().ints("N", {8})) {
    const auto t0 = Clock::now();
    const std::uint64_t s = c.seed_for("ass/" + std::to_string(N));
    Estimate e = c.model.sk ? ass_lower(c.model.sk_spec, N, c.mc.n_disorder, s, c.mc.threads)
                            : ass_lower(c.model.diluted, N, c.mc.n_disorder, s, c.mc.threads);
    c.row("ass_lower" + point({tag("N", N)}), e, s, since(t0));
  }
}

void run_cavity(Ctx& c) {
  const auto Ns = c.p().ints("N", {6, 10});
  const auto& spec = c.diluted();
  std::vector<Estimate> first;
  for (int N : Ns) {
    const auto t0 = Clock::now();
    const std::uint64_t s = c.seed_for("cavity/" + std::to_string(N));
    auto r = cavity_decomposition_check(spec, N, c.mc.n_disorder, s, c.mc.threads);
    const double w = since(t0);
    c.row("cavity_first" + point({tag("N", N)}), r.first.residual, s, w);
    c.row("cavity_second" + point({tag("N", N)}), r.second.residual, s, w);
    first.push_back(r.first.residual);
  }
  if (first.size() >= 2) {
    const auto& a = first.front();
    const auto& b = first.back();
    Estimate d;
    d.value = std::abs(b.value) - std::abs(a.value);
    d.se = std::hypot(a.se, b.se);
    d.n = std::min(a.n, b.n);
    c.row("cavity_shrinkage", d, c.mc.seed, 0.0).pass = d.value <= 3.0 * d.se;
  }
}

Estimate eval_pn(Ctx& c, const OrderParameter& sigma, int n, std::uint64_t s) {
  if (c.model.sk) return eval_Pn_sk(sigma, c.model.sk_spec, n, c.fparams(), s);
  return eval_Pn_diluted(sigma, c.model.diluted, n, c.fparams(), s);
}

void run_functional_p(Ctx& c) {
  auto sigma = c.sigma();
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("P");
  c.row("P", eval_pn(c, sigma, 1, s), s, since(t0));
}

void run_functional_pn(Ctx& c) {
  const auto ns = c.p().ints("n", {1, 2, 3});
  auto sigma = c.sigma();
  std::vector<Estimate> vals;
  for (int n : ns) {
    if (n < 1) bad("n must be >= 1", "params.n");
    const auto t0 = Clock::now();
    const std::uint64_t s = c.seed_for("P_n/" + std::to_string(n));
    vals.push_back(eval_pn(c, sigma, n, s));
    c.row("P_n" + point({tag("n", n)}), vals.back(), s, since(t0));
  }
  for (std::size_t i = 1; i < ns.size(); ++i) {
    auto d = minus(vals[i], vals[0]);
    c.row("P_n-P_first" + point({tag("n", ns[i])}), d, c.mc.seed, 0.0).pass = within3(d, 0.0);
  }
}

void run_plast(Ctx& c) {
  auto sigma = c.sigma();
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("plast");
  c.row("plast", plast_check(sigma, c.diluted(), c.fparams(), s), s, since(t0));
}

void run_gss_rows(Ctx& c, const OrderParameter& sigma, const std::vector<double>& ts, int p);

void run_invariance(Ctx& c) {
  const std::string preset = c.p().str("preset", "");
  if (preset.empty()) bad("missing preset", "params.preset");
  const double t = c.p().num("t", 0.5);
  const int ptilt = c.p().integer("p", 1);
  auto sigma = c.sigma();
  auto res_row = [&](const std::string& label, const Residual& r, std::uint64_t s, double w) {
    c.row("lhs" + point({label}), r.lhs, s, w);
    c.row("rhs" + point({label}), r.rhs, s, w);
    c.row("residual" + point({label}), r.residual, s, w).pass = within3(r.residual, 0.0);
  };
  if (preset == "sk-gss") {
    run_gss_rows(c, sigma, {t}, ptilt);
    return;
  }
  if (preset == "sk-overlap-only") {
    const auto& spec = c.sk();
    for (const auto& oc : overlap_only_cases()) {
      const std::string label = to_string(oc.F) + "/n" + std::to_string(oc.n) + "r" + std::to_string(oc.r);
      const auto t0 = Clock::now();
      const std::uint64_t s = c.seed_for(label);
      res_row(label, overlap_invariance_sk(sigma, spec, oc.F, oc.n, oc.r, c.iparams(), s), s, since(t0));
    }
    return;
  }
  std::vector<InvarianceCase> cases;
  try {
    cases = preset_cases(preset);
  } catch (const Error& e) {
    bad(e.what(), "params.preset");
  }
  for (const auto& ic : cases) {
    const std::string label = ic.label();
    const auto t0 = Clock::now();
    const std::uint64_t s = c.seed_for(label);
    Residual r;
    if (preset == "sk-ss")
      r = stochastic_stability_sk(sigma, ptilt, t, ic, c.iparams(), s);
    else if (preset.rfind("sk-", 0) == 0)
      r = invariance_sk(sigma, c.sk(), ic, c.iparams(), s);
    else
      r = invariance_diluted(sigma, c.diluted(), ic, c.iparams(), s);
    res_row(label, r, s, since(t0));
  }
}

int f_power(const std::string& f, const std::string& loc) {
  if (f == "1") return 0;
  if (f == "r12") return 1;
  if (f == "r12^2") return 2;
  bad("F must be one of 1, r12, r12^2", loc);
}

std::vector<std::string> f_list(const Section& s, const char* key, const std::vector<std::string>& def) {
  if (!s.has(key)) return def;
  const json& v = s.raw(key);
  std::vector<std::string> out;
  if (v.is_string()) out.push_back(v.get<std::string>());
  else if (v.is_array())
    for (const auto& x : v) {
      if (!x.is_string()) bad("expected strings", s.loc(key));
      out.push_back(x.get<std::string>());
    }
  else
    bad("expected a string or a list of strings", s.loc(key));
  for (const auto& f : out) f_power(f, s.loc(key));
  return out;
}

void run_gg_cascade(Ctx& c) {
  const auto ps = c.p().ints("p", {1, 2, 3});
  const auto ns = c.p().ints("n", {2, 3});
  const auto Fs = f_list(c.p(), "F", {"1", "r12", "r12^2"});
  const auto spec = cascade_from(c.sigma_doc);
  for (int p : ps)
    for (int n : ns)
      for (const auto& F : Fs) {
        if (p < 1) bad("p must be >= 1", "params.p");
        if (n < 2) bad("n must be >= 2", "params.n");
        const std::string pt = point({tag("p", p), tag("n", n), "F=" + F});
        const auto t0 = Clock::now();
        const std::uint64_t s = c.seed_for("gg" + pt);
        auto e = gg_on_cascade(spec, p, n, GGFunction{f_power(F, "params.F")}, c.cparams(), s);
        c.row("gg_residual" + pt, e, s, since(t0)).pass = within3(e, 0.0);
      }
}

OverlapFunction overlap_function(const std::string& F) {
  const int a = f_power(F, "params.F");
  return [a](std::span<const double> R, int) { return std::pow(R[1], a); };
}

void run_gg_finite(Ctx& c) {
  const auto Ns = c.p().ints("N", {8, 12, 16});
  const int p = c.p().integer("p", 1);
  const int n = c.p().integer("n", 2);
  const std::string F = c.p().str("F", "r12");
  const auto& spec = c.sk();
  if (!spec.gg) bad("finite-N GG needs model.gg", "model.gg");
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("gg-finite");
  auto r = gg_finite_N(spec, Ns, p, n, overlap_function(F), c.eparams(), s);
  const double w = since(t0);
  for (auto [q, b] : r.beta_N) c.scalar("beta_N" + point({tag("p", q)}), b, s, 0.0);
  for (const auto& row : r.rows) c.row("gg_residual" + point({tag("N", row.N)}), row.residual, s, w / r.rows.size());
  if (r.rows.size() >= 2) c.scalar("monotone", r.monotone ? 1.0 : 0.0, s, 0.0).pass = r.monotone;
}

void run_gss_rows(Ctx& c, const OrderParameter& sigma, const std::vector<double>& ts, int p) {
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("gss");
  auto v = gg_variance(sigma, p, ts, c.iparams(), s);
  const double w = since(t0) / std::max<std::size_t>(1, v.size());
  for (const auto& g : v) {
    const std::string pt = point({tag("t", g.t)});
    c.row("gg_variance" + pt, g.direct, s, w).pass = within3(g.direct, 1.0);
    c.row("bracket" + pt, g.bracket, s, 0.0);
    c.row("algebraic" + pt, g.algebraic, s, 0.0);
  }
}

void run_gss(Ctx& c) {
  const auto ts = c.p().nums("t", {0.25, 0.5, 1.0});
  const int p = c.p().integer("p", 1);
  run_gss_rows(c, c.sigma(), ts, p);
}

void run_cascade_sample(Ctx& c) {
  const auto spec = cascade_from(c.sigma_doc);
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("cascade");
  auto r = sample_cascade(spec, s);
  const double w = since(t0);
  double sum = 0.0, sum2 = 0.0, mx = 0.0;
  for (double x : r.weights) sum += x, sum2 += x * x, mx = std::max(mx, x);
  c.scalar("leaves", static_cast<double>(r.size()), s, w);
  c.scalar("weight_sum", sum, s, w).pass = std::abs(sum - 1.0) <= 1e-9;
  c.scalar("max_weight", mx, s, w);
  c.scalar("sum_w2", sum2, s, w);
}

void run_overlap_law(Ctx& c) {
  const auto spec = cascade_from(c.sigma_doc);
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("overlap-law");
  auto law = overlap_law(spec, c.cparams(), s);
  const double w = since(t0);
  for (int l = 1; l <= spec.k(); ++l) {
    const double expect = (l < spec.k() ? spec.m[l] : 1.0) - spec.m[l - 1];
    const auto& e = law.prob[l - 1];
    c.row("P(R=q" + std::to_string(l) + ")", e, s, w).pass = std::abs(e.value - expect) <= 4.0 * e.se;
  }
  c.scalar("triples_checked", static_cast<double>(law.triples_checked), s, w);
  c.scalar("ultrametric_violations", static_cast<double>(law.ultrametric_violations), s, w).pass =
      law.ultrametric_violations == 0;
}

void run_validate_theta(Ctx& c) {
  const int n_max = c.p().integer("n_max", 4);
  const int samples = c.p().integer("samples", 10000);
  const auto& spec = c.diluted();
  const auto t0 = Clock::now();
  const std::uint64_t s = c.seed_for("theta");
  auto rep = validate_theta(spec.theta, n_max, samples, s);
  const double w = since(t0);
  for (std::size_t i = 0; i < rep.moments.size(); ++i)
    c.row("moment_E(-b)^n" + point({tag("n", static_cast<double>(i + 1))}), rep.moments[i], s, w);
  c.scalar("bounded", rep.bounded, s, w);
  c.scalar("finite", rep.finite, s, w);
  c.scalar("ok", rep.ok, s, w).pass = rep.ok;
}

void run_verify_all(Ctx& c) {
  const std::string suite = c.p().str("suite", "desk");
  if (suite != "desk") bad("only the 'desk' suite exists", "params.suite");
  AcceptanceOptions o;
  o.seed = c.mc.seed;
  o.threads = c.mc.threads;
  o.only = c.p().ints("criteria", {});
  for (int k : o.only)
    if (k < 1 || k > kCriteria) bad("criteria are numbered 1.." + std::to_string(kCriteria), "params.criteria");
  o.on_done = [&](const Criterion& k) { c.say(format_line(k)); };
  for (auto& k : run_acceptance(o)) {
    for (auto& r : k.rows) {
      r.experiment = c.info->name;
      r.digest = hex64(fnv1a64(c.res.config.dump() + "\n" + r.quantity));
      c.res.rows.push_back(r);
    }
    c.scalar("criterion" + point({std::to_string(k.id)}), k.pass ? 1.0 : 0.0, o.seed, k.wall).pass = k.pass;
  }
}

using Runner = void (*)(Ctx&);

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& table() {
  static const std::vector<Entry> t = {
      {{"free-energy", "quenched F_N = E log Z_N / N by enumeration", {"N"}, "diluted-ksat", ""}, run_free_energy},
      {{"enumerate", "exact Gibbs table of one disorder draw", {"N"}, "diluted-ksat", ""}, run_enumerate},
      {{"bounds.franz-leone", "diluted interpolation upper bound", {"N"}, "diluted-ksat", "rs0"}, run_franz_leone},
      {{"bounds.guerra", "SK interpolation upper bound", {"N"}, "sk", "rs0"}, run_guerra},
      {{"bounds.ass-lower", "E log Z_{N+1}/Z_N", {"N"}, "diluted-ksat", ""}, run_ass_lower},
      {{"bounds.cavity", "cavity decomposition residuals", {"N"}, "diluted-pspin", ""}, run_cavity},
      {{"functional.p", "P(sigma)", {}, "diluted-ksat", "rs0"}, run_functional_p},
      {{"functional.pn", "P_n(sigma) for several n", {"n"}, "diluted-ksat", "rs0"}, run_functional_pn},
      {{"functional.plast", "last-term check of P", {}, "diluted-ksat", "rs0"}, run_plast},
      {{"invariance", "invariance residuals for a preset battery", {"preset", "t", "p"}, "sk", "cascade-1rsb-sc"},
       run_invariance},
      {{"gg.cascade", "GG identities on a cascade", {"p", "n", "F"}, "sk", "cascade-1rsb"}, run_gg_cascade},
      {{"gg.finite-N", "finite-N GG residuals", {"N", "p", "n", "F"}, "sk-gg", ""}, run_gg_finite},
      {{"gg.gss", "Gaussian stochastic stability variance", {"t", "p"}, "sk", "cascade-1rsb"}, run_gss},
      {{"cascade.sample", "one cascade realization", {}, "sk", "cascade-1rsb"}, run_cascade_sample},
      {{"cascade.overlap-law", "overlap law and ultrametricity", {}, "sk", "cascade-1rsb"}, run_overlap_law},
      {{"validate-theta", "theta moment and boundedness checks", {"n_max", "samples"}, "diluted-ksat", ""},
       run_validate_theta},
      {{"verify-all", "acceptance battery", {"suite", "criteria"}, "diluted-ksat", ""}, run_verify_all},
  };
  return t;
}

const Entry& find_entry(const std::string& name) {
  const std::string n = name == "gss" ? "gg.gss" : name;
  for (const auto& e : table())
    if (e.info.name == n) return e;
  bad("unknown experiment '" + name + "'", "experiment");
}

// diluted presets of the invariance battery default to a diluted model and RS sigma
std::pair<std::string, std::string> defaults_for(const ExperimentInfo& info, const json& doc) {
  if (info.name == "invariance" && doc.contains("params") && doc["params"].is_object()) {
    const json& p = doc["params"].value("preset", json());
    if (p.is_string() && p.get<std::string>().rfind("sc-", 0) == 0) return {"diluted-ksat", "rs0"};
  }
  return {info.default_model, info.default_sigma};
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> v = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : table()) out.push_back(e.info);
    return out;
  }();
  return v;
}

const ExperimentInfo& find_experiment(const std::string& name) { return find_entry(name).info; }

json parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what(), "config");
  }
  Section top(doc, "config", {"experiment", "model", "sigma", "mc", "output", "params"});
  const auto& e = find_entry(top.str("experiment", ""));
  // eager key checks so a bad config fails before any work starts
  if (doc.contains("output")) Section(doc["output"], "output", {"dir"});
  mc_from(doc.value("mc", json()));
  const auto [def_model, def_sigma] = defaults_for(e.info, doc);
  json m = expand_model(doc.value("model", json()), def_model);
  const ModelSpec spec = model_from(m);
  if (!def_sigma.empty()) {
    Section(expand_sigma(doc.value("sigma", json()), def_sigma), "sigma",
            {"kind", "h_mean", "h_sd", "fixed_point", "path", "two_state", "q", "m", "truncation", "dust_chains",
             "self_consistent"});
  } else if (doc.contains("sigma")) {
    bad("this experiment takes no order parameter", "sigma");
  }
  Section(doc.value("params", json()), "params", e.info.params);
  (void)spec;
  return doc;
}

std::string output_dir(const json& doc) {
  if (doc.contains("output") && doc["output"].contains("dir")) {
    const json& d = doc["output"]["dir"];
    if (!d.is_string()) bad("expected a string", "output.dir");
    return d.get<std::string>();
  }
  if (const char* env = std::getenv("SGLAB_OUT"); env && *env) return env;
  return "sglab_out";
}

RunResult run_experiment(const json& raw, const RunOptions& opt) {
  const json doc = parse_config(raw.dump());
  const Entry& e = find_entry(doc["experiment"].get<std::string>());
  Ctx c;
  c.info = &e.info;
  c.opt = &opt;
  c.mc = mc_from(doc.value("mc", json()));
  if (opt.threads >= 0) c.mc.threads = opt.threads;
  const auto [def_model, def_sigma] = defaults_for(e.info, doc);
  json model = expand_model(doc.value("model", json()), def_model);
  c.model = model_from(model);
  if (!def_sigma.empty()) c.sigma_doc = expand_sigma(doc.value("sigma", json()), def_sigma);
  c.params_doc = doc.value("params", json::object());
  c.params = std::make_unique<Section>(c.params_doc, "params", e.info.params);

  // canonical config: presets expanded, no output or thread settings
  json mc = doc.value("mc", json::object());
  mc.erase("threads");
  c.res.config = {{"experiment", e.info.name}, {"model", model}, {"mc", mc}, {"params", c.params_doc}};
  if (!c.sigma_doc.is_null()) c.res.config["sigma"] = c.sigma_doc;
  c.res.experiment = e.info.name;
  c.res.digest = hex64(fnv1a64(c.res.config.dump()));
  c.res.seed = c.mc.seed;

  const auto t0 = Clock::now();
  try {
    e.run(c);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(ErrorCode::internal, ex.what(), e.info.name);
  }
  c.res.wall_time = since(t0);
  return std::move(c.res);
}

}  // namespace sglab::app
