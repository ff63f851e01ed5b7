#include "app/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>

namespace sglab::app {

namespace {

[[noreturn]] void bad(const std::string& msg, const std::string& loc) { throw Error(ErrorCode::config, msg, loc); }

const std::map<std::string, json>& model_table() {
  static const std::map<std::string, json> t = {
      {"diluted-ksat", {{"type", "diluted"}, {"p", 2}, {"alpha", 0.5}, {"theta", {{"family", "ksat"}, {"beta", 1.0}}}}},
      {"diluted-pspin",
       {{"type", "diluted"}, {"p", 2}, {"alpha", 0.5}, {"theta", {{"family", "pspin"}, {"beta", 1.0}}}}},
      {"sk", {{"type", "sk"}, {"betas", json::array({json::array({2, 0.8})})}}},
      {"sk-gg", {{"type", "sk"}, {"betas", json::array({json::array({2, 0.8})})}, {"gg", json::object()}}},
  };
  return t;
}

const std::map<std::string, json>& sigma_table() {
  static const std::map<std::string, json> t = {
      {"rs0", {{"kind", "rs"}, {"h_mean", 0.0}, {"h_sd", 0.0}}},
      {"rs-fixed-point", {{"kind", "rs"}, {"fixed_point", true}}},
      {"cascade-1rsb", {{"kind", "cascade_sk"}, {"q", {0.2, 0.6}}, {"m", {0.0, 0.4}}, {"self_consistent", false}}},
      {"cascade-1rsb-sc", {{"kind", "cascade_sk"}, {"q", {0.0, 0.5}}, {"m", {0.0, 0.4}}, {"self_consistent", true}}},
      {"cascade-2rsb",
       {{"kind", "cascade_sk"}, {"q", {0.1, 0.4, 0.8}}, {"m", {0.0, 0.3, 0.6}}, {"self_consistent", false}}},
      {"two-state", {{"kind", "tabulated"}, {"two_state", 0.8}}},
  };
  return t;
}

json expand(const json& in, const std::string& def, const std::map<std::string, json>& table, const char* where) {
  if (!in.is_null() && !in.is_object()) bad("section must be an object", where);
  std::string name = def;
  json user = in.is_null() ? json::object() : in;
  if (user.contains("preset")) {
    if (!user["preset"].is_string()) bad("preset must be a string", std::string(where) + ".preset");
    name = user["preset"].get<std::string>();
    user.erase("preset");
  }
  auto it = table.find(name);
  if (it == table.end()) bad("unknown preset '" + name + "'", std::string(where) + ".preset");
  json out = it->second;
  // an explicit type/kind replaces the preset wholesale
  if ((user.contains("type") && user["type"] != out.value("type", json())) ||
      (user.contains("kind") && user["kind"] != out.value("kind", json())))
    out = json::object();
  out.merge_patch(user);
  return out;
}

JLaw jlaw_from(const std::string& s, const std::string& loc) {
  if (s == "rademacher") return JLaw::rademacher;
  if (s == "gaussian") return JLaw::gaussian;
  if (s == "plus_one") return JLaw::plus_one;
  bad("unknown j_law '" + s + "'", loc);
}

}  // namespace

Section::Section(const json& j, std::string path, std::initializer_list<const char*> allowed)
    : Section(j, std::move(path), std::vector<std::string>(allowed.begin(), allowed.end())) {}

Section::Section(const json& j, std::string path, const std::vector<std::string>& allowed)
    : j_(&j), path_(std::move(path)) {
  if (j.is_null()) {
    j_ = &empty_;
    return;
  }
  if (!j.is_object()) bad("expected an object", path_);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || it.key() == a;
    if (!ok) bad("unknown key '" + it.key() + "'", path_ + "." + it.key());
  }
}

bool Section::has(const char* key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

const json& Section::raw(const char* key) const {
  if (!has(key)) bad("missing key", loc(key));
  return (*j_)[key];
}

double Section::num(const char* key, double def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (!v.is_number()) bad("expected a number", loc(key));
  return v.get<double>();
}

int Section::integer(const char* key, int def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (!v.is_number_integer()) bad("expected an integer", loc(key));
  return v.get<int>();
}

std::uint64_t Section::u64(const char* key, std::uint64_t def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  bad("expected a non-negative integer", loc(key));
}

bool Section::flag(const char* key, bool def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (!v.is_boolean()) bad("expected true or false", loc(key));
  return v.get<bool>();
}

std::string Section::str(const char* key, const std::string& def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (!v.is_string()) bad("expected a string", loc(key));
  return v.get<std::string>();
}

std::vector<int> Section::ints(const char* key, const std::vector<int>& def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array() || v.empty()) bad("expected an integer or a nonempty list", loc(key));
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) bad("expected integers", loc(key));
    out.push_back(x.get<int>());
  }
  return out;
}

std::vector<double> Section::nums(const char* key, const std::vector<double>& def) const {
  if (!has(key)) return def;
  const json& v = (*j_)[key];
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) bad("expected a number or a nonempty list", loc(key));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad("expected numbers", loc(key));
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::pair<int, double>> Section::terms(const char* key) const {
  std::vector<std::pair<int, double>> out;
  if (!has(key)) return out;
  const json& v = (*j_)[key];
  if (!v.is_array()) bad("expected a list of [p, beta] pairs", loc(key));
  for (const auto& t : v) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number())
      bad("expected [p, beta] pairs", loc(key));
    out.push_back({t[0].get<int>(), t[1].get<double>()});
  }
  return out;
}

json expand_model(const json& model, const std::string& default_preset) {
  return expand(model, default_preset, model_table(), "model");
}

json expand_sigma(const json& sigma, const std::string& default_preset) {
  return expand(sigma, default_preset, sigma_table(), "sigma");
}

const std::vector<std::string>& model_presets() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : model_table()) out.push_back(k);
    return out;
  }();
  return v;
}

const std::vector<std::string>& sigma_presets() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : sigma_table()) out.push_back(k);
    return out;
  }();
  return v;
}

ModelSpec model_from(const json& m) {
  Section s(m, "model", {"type", "p", "alpha", "beta", "theta", "perturbation", "betas", "gg"});
  ModelSpec out;
  const std::string type = s.str("type", "diluted");
  if (type == "diluted") {
    for (const char* k : {"betas", "gg"})
      if (s.has(k)) bad("not a diluted-model key", s.loc(k));
    auto& d = out.diluted;
    d.p = s.integer("p", 2);
    d.alpha = s.num("alpha", 0.5);
    d.perturbation = s.flag("perturbation", false);
    Section th(s.has("theta") ? s.raw("theta") : json(), "model.theta", {"family", "p", "beta", "j_law", "draws"});
    const std::string fam = th.str("family", "ksat");
    const int p = th.integer("p", d.p);
    const double beta = s.has("beta") ? s.num("beta", 1.0) : th.num("beta", 1.0);
    if (fam == "ksat") {
      d.theta = ThetaFamily::ksat(p, beta);
    } else if (fam == "pspin") {
      d.theta = ThetaFamily::pspin(p, beta, jlaw_from(th.str("j_law", "rademacher"), th.loc("j_law")));
    } else if (fam == "custom") {
      d.theta.kind = ThetaFamily::Kind::custom;
      d.theta.p = p;
      d.theta.beta = beta;
      const json& draws = th.raw("draws");
      if (!draws.is_array() || draws.empty()) bad("expected a nonempty list", th.loc("draws"));
      for (std::size_t i = 0; i < draws.size(); ++i) {
        const std::string at = "model.theta.draws[" + std::to_string(i) + "]";
        Section c(draws[i], at, {"a", "b", "f"});
        CustomDraw cd;
        cd.a = c.num("a", 1.0);
        cd.b = c.num("b", 0.0);
        const json& f = c.raw("f");
        if (!f.is_array()) bad("expected a list of [f(-1), f(+1)] pairs", c.loc("f"));
        for (const auto& pr : f) {
          if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number())
            bad("expected [f(-1), f(+1)] pairs", c.loc("f"));
          cd.f.push_back({pr[0].get<double>(), pr[1].get<double>()});
        }
        d.theta.custom.push_back(std::move(cd));
      }
    } else {
      bad("unknown theta family '" + fam + "'", th.loc("family"));
    }
    try {
      d.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::config, e.what(), e.location());
    }
  } else if (type == "sk") {
    for (const char* k : {"alpha", "theta", "p"})
      if (s.has(k)) bad("not an SK-model key", s.loc(k));
    out.sk = true;
    auto& k = out.sk_spec;
    k.betas = s.terms("betas");
    if (s.has("beta")) {
      // shorthand for the p = 2 coefficient
      const double b = s.num("beta", 0.0);
      bool set = false;
      for (auto& [p, v] : k.betas)
        if (p == 2) v = b, set = true;
      if (!set) k.betas.push_back({2, b});
    }
    if (k.betas.empty()) bad("SK model needs betas", s.loc("betas"));
    k.perturbation = s.flag("perturbation", false);
    if (s.has("gg")) {
      Section g(s.raw("gg"), "model.gg", {"delta_exponent", "beta_n"});
      SKSpec::GG gg;
      gg.delta_exponent = g.num("delta_exponent", gg.delta_exponent);
      gg.beta_N = g.terms("beta_n");
      k.gg = gg;
    }
    try {
      k.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::config, e.what(), e.location());
    }
  } else {
    bad("model type must be 'diluted' or 'sk'", s.loc("type"));
  }
  return out;
}

McSection mc_from(const json& mc) {
  Section s(mc, "mc", {"seed", "threads", "outer", "inner", "n_disorder", "samples", "sites", "use_chain", "chain"});
  McSection out;
  out.seed = s.u64("seed", out.seed);
  out.threads = s.integer("threads", out.threads);
  out.outer = s.integer("outer", out.outer);
  out.inner = s.integer("inner", out.inner);
  out.n_disorder = s.integer("n_disorder", out.n_disorder);
  out.samples = s.integer("samples", out.samples);
  out.sites = s.integer("sites", out.sites);
  out.use_chain = s.flag("use_chain", out.use_chain);
  if (out.threads < 0) bad("threads must be >= 0", s.loc("threads"));
  const std::pair<const char*, int> counts[] = {
      {"outer", out.outer}, {"inner", out.inner}, {"n_disorder", out.n_disorder}, {"samples", out.samples},
      {"sites", out.sites}};
  for (auto [k, v] : counts)
    if (v < 1) bad("must be >= 1", s.loc(k));
  if (s.has("chain")) {
    Section c(s.raw("chain"), "mc.chain", {"kernel", "sweeps", "burn_in", "thinning", "n_replicas"});
    auto& ch = out.chain;
    const std::string k = c.str("kernel", "glauber");
    if (k == "glauber")
      ch.kernel = ChainConfig::Kernel::glauber;
    else if (k == "metropolis")
      ch.kernel = ChainConfig::Kernel::metropolis;
    else
      bad("kernel must be 'glauber' or 'metropolis'", c.loc("kernel"));
    ch.sweeps = c.integer("sweeps", ch.sweeps);
    ch.burn_in = c.integer("burn_in", ch.burn_in);
    ch.thinning = c.integer("thinning", ch.thinning);
    ch.n_replicas = c.integer("n_replicas", ch.n_replicas);
    try {
      ch.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::config, e.what(), e.location());
    }
  }
  return out;
}

namespace {
const std::initializer_list<const char*> kSigmaKeys = {
    "kind", "h_mean", "h_sd", "fixed_point", "path", "two_state", "q", "m", "truncation", "dust_chains",
    "self_consistent"};
}

CascadeSpec cascade_from(const json& sg) {
  Section s(sg, "sigma", kSigmaKeys);
  if (s.str("kind", "") != "cascade_sk") bad("a cascade order parameter is required here", s.loc("kind"));
  CascadeSpec c;
  c.q = s.nums("q", {});
  c.m = s.nums("m", {});
  if (c.q.empty()) bad("missing q", s.loc("q"));
  c.truncation = s.integer("truncation", c.truncation);
  c.dust_chains = s.integer("dust_chains", c.dust_chains);
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config, e.what(), e.location().empty() ? "sigma" : e.location());
  }
  return c;
}

OrderParameter sigma_from(const json& sg, const ModelSpec& model) {
  Section s(sg, "sigma", kSigmaKeys);
  const std::string kind = s.str("kind", "rs");
  if (kind == "rs") {
    RSParams p;
    p.h_mean = s.num("h_mean", 0.0);
    p.h_sd = s.num("h_sd", 0.0);
    if (s.flag("fixed_point", false)) {
      if (!model.sk) bad("the RS fixed point is defined for SK models", s.loc("fixed_point"));
      CascadeSpec rs;
      rs.q = {0.5};
      rs.m = {0.0};
      auto sol = solve_parisi_q(rs, model.sk_spec);
      p.h_mean = 0.0;
      p.h_sd = std::sqrt(model.sk_spec.dxi(sol.q[0]));
    }
    if (!(p.h_sd >= 0.0) || !std::isfinite(p.h_mean)) bad("need finite h_mean and h_sd >= 0", s.loc("h_sd"));
    return OrderParameter::rs(p);
  }
  if (kind == "tabulated") {
    if (s.has("two_state")) return OrderParameter::tabulated(TabulatedParams::two_state(s.num("two_state", 0.8)));
    const std::string path = s.str("path", "");
    if (path.empty()) bad("tabulated sigma needs a path or two_state", s.loc("path"));
    return OrderParameter::tabulated(TabulatedParams::load(path));
  }
  if (kind == "cascade_sk") {
    if (!model.sk) bad("cascade_sk needs an SK model", "sigma.kind");
    return OrderParameter::cascade_sk({cascade_from(sg), model.sk_spec, s.flag("self_consistent", true)});
  }
  bad("sigma kind must be rs, tabulated or cascade_sk", s.loc("kind"));
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

}  // namespace sglab::app
