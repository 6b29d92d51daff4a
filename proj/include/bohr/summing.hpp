#pragma once

// Orbit-supported probability measures mu_T: the image of
// Haar x (Lebesgue / T) x Haar under (k, t, k2) -> k exp(tH) k2 v, their
// Fourier transforms, and the phase functions F(t) = <u, k exp(tH) k2 v>.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bohr/matcore.hpp"
#include "bohr/rep.hpp"
#include "bohr/vdc.hpp"

namespace bohr {

/// Quadrature: K = SO(2) angle grids with n_k nodes per factor (starting at
/// angle 0) and n_t midpoint nodes on [0, T]. Monte Carlo: n_k^2 Haar pairs,
/// each with n_t uniform times. Both use n_k^2 * n_t points.
enum class SamplingMode { quadrature, monte_carlo };

const char* to_string(SamplingMode m);

struct OrbitMeasureParams {
  Representation rep;
  Vector v;
  Vector h;
  double horizon = 1.0;
  int n_k = 1;
  int n_t = 1;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::quadrature;

  void validate() const;
};

struct OrbitPoint {
  Vector w;
  Matrix k;
  double t;
  Matrix k2;
};

/// rho(k) rho(exp(tH)) rho(k2) v
Vector orbit_point(const Representation& rep, std::span<const double> h, const Matrix& k, double t,
                   const Matrix& k2, std::span<const double> v);

/// Materializes every point of the discretized measure. Deterministic in
/// the seed; Monte Carlo pair p draws from split_rng(seed, p).
std::vector<OrbitPoint> sample_orbit(const OrbitMeasureParams& params);

struct FourierEstimate {
  Vector u;
  double horizon = 0.0;
  std::complex<double> value;
  double std_error = 0.0;
  /// Midpoint-rule error estimate (quadrature mode only), capped at 2.
  std::optional<double> quadrature_error;
  std::size_t n_points = 0;
};

/// Mean of e^{i<u, w>} over the points. std_error is the sample standard
/// deviation over sqrt(N) in Monte Carlo mode and 0 in quadrature mode.
FourierEstimate empirical_fourier(std::span<const OrbitPoint> points, std::span<const double> u,
                                  SamplingMode mode = SamplingMode::monte_carlo);

/// Same quantity as empirical_fourier(sample_orbit(params), u) without
/// materializing points: each (k, k2) pair is reduced to its weight
/// coefficients. Pairs are split across `workers` threads and combined by
/// a fixed pairwise tree, so the result does not depend on `workers`.
FourierEstimate fourier_estimate(const OrbitMeasureParams& params, std::span<const double> u, int workers = 1);

enum class Verdict { decays, inconclusive, fails };

const char* to_string(Verdict v);

struct SweepBudget {
  SamplingMode mode = SamplingMode::quadrature;
  int n_k = 64;
  double nodes_per_unit_time = 200.0;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ConvergenceReport {
  Vector u;
  std::vector<double> schedule;
  std::vector<FourierEstimate> estimates;
  Verdict verdict = Verdict::inconclusive;
  double fitted_rate = 0.0;
  bool control = false;  // u = 0
};

inline constexpr double kDecayThreshold = 0.1;

/// Runs fourier_estimate at every horizon with n_t = ceil(nodes_per_unit_time * T).
/// DECAYS when the last modulus is below the first and below
/// 0.1 + 3 std_error; FAILS when it is not below the first (this includes
/// the u = 0 control); INCONCLUSIVE otherwise.
ConvergenceReport convergence_sweep(const Representation& rep, std::span<const double> v, std::span<const double> h,
                                    std::span<const double> u, std::span<const double> schedule,
                                    const SweepBudget& budget);

struct PhaseTerm {
  Vector weight;
  double coefficient;
  double rate;  // <weight, H>
};

inline constexpr double kNonzeroCutoff = 1e-8;

struct PhaseProfile {
  std::optional<Matrix> k;
  std::optional<Matrix> k2;
  Vector u;
  Vector v;
  std::vector<PhaseTerm> terms;
  std::optional<std::size_t> dominant;  // index into terms
  std::optional<double> t0;

  bool degenerate() const { return !dominant.has_value(); }
  const PhaseTerm& lambda0() const { return terms.at(dominant.value()); }

  /// n-th derivative of F at t.
  double evaluate(double t, int order = 0) const;

  /// Picks the dominant term among nonzero weights with |f| > cutoff.
  static PhaseProfile from_terms(std::vector<PhaseTerm> terms);
};

/// F(t) = sum_lambda f_lambda(k, k2) e^{<lambda, H> t} with
/// f_lambda = <u, rho(k) E_lambda rho(k2) v>. Fills t0 when a threshold
/// exists. Throws std::invalid_argument unless k, k2 are in SO(n).
PhaseProfile phase_profile(const Representation& rep, const Matrix& k, const Matrix& k2, std::span<const double> u,
                           std::span<const double> v);

/// Least T0 >= 0 (grid 0.01, bisection to 1e-6) such that |F'| >= 1 and
/// |F''| >= 1 at every grid point of [T0, T0 + 50], with F'' of constant
/// sign there. Throws std::domain_error for degenerate profiles and
/// std::runtime_error when no T0 exists below 10^4.
double find_t0(const PhaseProfile& profile);

PhaseFn phase_fn(const PhaseProfile& profile, double a, double b);

}  // namespace bohr
