#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace sglab {

// ---- spins ----

struct SpinConfig {
  std::vector<std::int8_t> spins;

  SpinConfig() = default;
  explicit SpinConfig(std::vector<std::int8_t> s);
  // canonical enumeration order: bit b of i is the spin at site b
  static SpinConfig from_index(std::uint64_t i, int N);
  std::uint64_t index() const;
  int size() const { return static_cast<int>(spins.size()); }
};

// ---- theta ----

enum class JLaw { rademacher, gaussian, plus_one };

struct CustomDraw {
  double a = 1.0;
  double b = 0.0;
  // f[j] = {f_j(-1), f_j(+1)}
  std::vector<std::array<double, 2>> f;
};

struct ThetaFamily {
  enum class Kind { pspin, ksat, custom };
  Kind kind = Kind::pspin;
  int p = 2;
  double beta = 1.0;
  JLaw jlaw = JLaw::rademacher;
  std::vector<CustomDraw> custom;  // drawn uniformly

  static ThetaFamily pspin(int p, double beta, JLaw law = JLaw::rademacher);
  static ThetaFamily ksat(int p, double beta);
};

// One frozen draw of theta as a table over {-1,+1}^p; bit j of the table
// index set means argument j is +1.
struct ThetaDraw {
  int p = 0;
  double a = 1.0;
  double b = 0.0;
  double fprod_max = 0.0;  // max |f_1 ... f_p| over arguments
  std::vector<double> table;

  double operator()(unsigned idx) const { return table[idx]; }
};

ThetaDraw draw_theta(const ThetaFamily& fam, Rng& rng);

struct ThetaReport {
  bool ok = false;
  std::vector<Estimate> moments;  // E(-b)^n for n = 1..n_max
  bool bounded = true;            // |b f1..fp| < 1 on all draws
  bool finite = true;
};

ThetaReport validate_theta(const ThetaFamily& fam, int n_max, int samples, std::uint64_t seed);

// ---- diluted ----

struct DilutedSpec {
  int p = 2;
  double alpha = 0.5;
  ThetaFamily theta;
  bool perturbation = false;

  void validate() const;
  static int c_N(int N);
};

struct Clause {
  std::vector<int> idx;  // 0-based sites, one per theta argument
  ThetaDraw theta;
};

struct ClauseSet {
  int N = 0;
  std::vector<Clause> clauses;
  // block terms take epsilon as argument 0; idx holds the remaining p-1 sites
  std::vector<std::vector<Clause>> blocks;

  double log_weight(std::uint64_t config) const;
  double log_weight(const SpinConfig& s) const;
};

ClauseSet sample_diluted_disorder(const DilutedSpec& spec, int N, std::uint64_t seed);
double energy_diluted(const ClauseSet& cs, const SpinConfig& config);

// ---- SK ----

struct SKSpec {
  std::vector<std::pair<int, double>> betas;
  bool perturbation = false;
  struct GG {
    double delta_exponent = 1.0 / 16.0;
    std::vector<std::pair<int, double>> beta_N;
  };
  std::optional<GG> gg;

  double xi(double x) const;
  double dxi(double x) const;
  double theta(double x) const;
  int max_p() const;
  void validate() const;
};

// coef * sum over all index tuples of g[i_1..i_p] s_{i_1}..s_{i_p}
struct SKTensor {
  int p = 0;
  double coef = 0.0;
  std::vector<double> g;
  double eval(std::span<const std::int8_t> s) const;
};

struct SKDisorder {
  int N = 0;
  std::vector<SKTensor> terms;  // main Hamiltonian plus gg perturbation
  // c_N perturbation: sum_k log ch(G_k) + sum_k G'_k
  std::vector<std::vector<SKTensor>> logch_terms;
  std::vector<std::vector<SKTensor>> lin_terms;

  double log_weight(const SpinConfig& s) const;
  bool quadratic() const;  // no perturbation processes, all p <= 2
  // -H = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + c
  void quadratic_form(std::vector<double>& J, std::vector<double>& h, double& c) const;
};

SKDisorder sample_sk_disorder(const SKSpec& spec, int N, std::uint64_t seed);
double energy_sk(const SKDisorder& d, const SpinConfig& config);

// ---- Gibbs ----

struct GibbsTable {
  int N = 0;
  double log_Z = 0.0;
  std::vector<double> probabilities;

  double average(const std::function<double(std::uint64_t)>& f) const;
  std::uint64_t sample(double u) const;  // inverse CDF
  std::vector<double> cdf() const;
};

constexpr int kMaxEnumerate = 24;

GibbsTable enumerate_gibbs(const std::function<double(std::uint64_t)>& log_weight, int N);
GibbsTable enumerate_gibbs(const ClauseSet& cs);
GibbsTable enumerate_gibbs(const SKDisorder& d);

double log_partition(const ClauseSet& cs);
double log_partition(const SKDisorder& d);

Estimate free_energy_quenched(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed,
                              int threads = 0);
Estimate free_energy_quenched(const SKSpec& spec, int N, int n_disorder, std::uint64_t seed,
                              int threads = 0);

}  // namespace sglab
