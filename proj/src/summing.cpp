#include "bohr/summing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace bohr {

namespace {

struct PairSums {
  double re = 0.0;
  double im = 0.0;
  double curvature = 0.0;  // max over nodes of |F''| + F'^2
};

PairSums tree_reduce(const std::vector<PairSums>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  const PairSums a = tree_reduce(parts, lo, mid);
  const PairSums b = tree_reduce(parts, mid, hi);
  return {a.re + b.re, a.im + b.im, a.curvature + b.curvature};
}

bool is_rotation(const Matrix& k) {
  if (!k.is_square()) return false;
  return distance_to_identity(k.transpose() * k) <= 1e-10 && std::abs(determinant(k) - 1.0) <= 1e-10;
}

double midpoint(double horizon, int n_t, int i) { return (i + 0.5) * horizon / n_t; }

// (k, k2) for pair index p. Quadrature pairs run over the angle grid,
// Monte Carlo pairs draw from their own stream, which is left positioned
// for the time draws.
std::pair<Matrix, Matrix> pair_elements(const OrbitMeasureParams& params, std::size_t p, Rng& rng) {
  if (params.mode == SamplingMode::quadrature) {
    const double step = 2.0 * std::numbers::pi / params.n_k;
    const auto nk = static_cast<std::size_t>(params.n_k);
    return {Matrix::rotation(static_cast<double>(p / nk) * step), Matrix::rotation(static_cast<double>(p % nk) * step)};
  }
  const int n = params.rep.spec().group_dim();
  Matrix k = sample_haar_rotation(n, rng);
  Matrix k2 = sample_haar_rotation(n, rng);
  return {std::move(k), std::move(k2)};
}

void require_dim(std::span<const double> x, std::size_t d, const char* what) {
  if (x.size() != d)
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                                std::to_string(x.size()));
}

}  // namespace

const char* to_string(SamplingMode m) { return m == SamplingMode::quadrature ? "quadrature" : "montecarlo"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::decays: return "DECAYS";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::fails: return "FAILS";
  }
  return "UNKNOWN";
}

void OrbitMeasureParams::validate() const {
  require_dim(v, rep.dim(), "OrbitMeasureParams v");
  require_dim(h, static_cast<std::size_t>(rep.spec().group_dim() - 1), "OrbitMeasureParams h");
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    throw std::invalid_argument("OrbitMeasureParams: v must be nonzero");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("OrbitMeasureParams: T must be positive");
  if (n_k < 1 || n_t < 1) throw std::invalid_argument("OrbitMeasureParams: n_k and n_t must be >= 1");
  if (mode == SamplingMode::quadrature && rep.spec().group_dim() != 2)
    throw std::invalid_argument("OrbitMeasureParams: quadrature mode needs K = SO(2); use monte carlo");
}

Vector orbit_point(const Representation& rep, std::span<const double> h, const Matrix& k, double t,
                   const Matrix& k2, std::span<const double> v) {
  Vector diag = cartan_diagonal(h);
  for (double& x : diag) x *= t;
  const Matrix g = k * mat_exp(Matrix::diagonal(diag)) * k2;
  return rep.act(g) * v;
}

std::vector<OrbitPoint> sample_orbit(const OrbitMeasureParams& params) {
  params.validate();
  const auto pairs = static_cast<std::size_t>(params.n_k) * static_cast<std::size_t>(params.n_k);
  std::vector<OrbitPoint> points;
  points.reserve(pairs * static_cast<std::size_t>(params.n_t));
  std::uniform_real_distribution<double> time(0.0, params.horizon);
  for (std::size_t p = 0; p < pairs; ++p) {
    Rng rng = split_rng(params.seed, p);
    auto [k, k2] = pair_elements(params, p, rng);
    for (int i = 0; i < params.n_t; ++i) {
      const double t = params.mode == SamplingMode::quadrature ? midpoint(params.horizon, params.n_t, i) : time(rng);
      points.push_back({orbit_point(params.rep, params.h, k, t, k2, params.v), k, t, k2});
    }
  }
  return points;
}

FourierEstimate empirical_fourier(std::span<const OrbitPoint> points, std::span<const double> u, SamplingMode mode) {
  if (points.empty()) throw std::invalid_argument("empirical_fourier: empty point set");
  FourierEstimate est;
  est.u.assign(u.begin(), u.end());
  est.n_points = points.size();
  double re = 0.0, im = 0.0;
  for (const OrbitPoint& p : points) {
    require_dim(u, p.w.size(), "empirical_fourier u");
    const double phase = dot(u, p.w);
    if (!std::isfinite(phase)) throw std::overflow_error("empirical_fourier: non-finite phase");
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double n = static_cast<double>(points.size());
  est.value = {re / n, im / n};
  if (mode == SamplingMode::monte_carlo && points.size() > 1) {
    const double spread = std::max(0.0, 1.0 - std::norm(est.value)) * n / (n - 1.0);
    est.std_error = std::sqrt(spread / n);
  }
  return est;
}

FourierEstimate fourier_estimate(const OrbitMeasureParams& params, std::span<const double> u, int workers) {
  params.validate();
  const Representation& rep = params.rep;
  require_dim(u, rep.dim(), "fourier_estimate u");
  const auto& weights = rep.weight_system().weights;
  Vector rates(weights.size());
  for (std::size_t l = 0; l < weights.size(); ++l) rates[l] = pairing(weights[l], params.h);

  const auto n_t = static_cast<std::size_t>(params.n_t);
  const auto pairs = static_cast<std::size_t>(params.n_k) * static_cast<std::size_t>(params.n_k);
  const bool quad = params.mode == SamplingMode::quadrature;

  // e^{rate_l t_i} on the midpoint nodes, shared by every pair.
  std::vector<double> growth;
  if (quad) {
    growth.resize(weights.size() * n_t);
    for (std::size_t l = 0; l < weights.size(); ++l)
      for (std::size_t i = 0; i < n_t; ++i)
        growth[l * n_t + i] = std::exp(rates[l] * midpoint(params.horizon, params.n_t, static_cast<int>(i)));
  }

  std::vector<PairSums> parts(pairs);
  auto work = [&](std::size_t first, std::size_t stride) {
    std::uniform_real_distribution<double> time(0.0, params.horizon);
    Vector e(weights.size());
    for (std::size_t p = first; p < pairs; p += stride) {
      Rng rng = split_rng(params.seed, p);
      const auto [k, k2] = pair_elements(params, p, rng);
      const Vector f = weight_coefficients(rep, u, params.v, k, k2);
      PairSums s;
      for (std::size_t i = 0; i < n_t; ++i) {
        if (quad) {
          for (std::size_t l = 0; l < e.size(); ++l) e[l] = growth[l * n_t + i];
        } else {
          const double t = time(rng);
          for (std::size_t l = 0; l < e.size(); ++l) e[l] = std::exp(rates[l] * t);
        }
        double phase = 0.0, d1 = 0.0, d2 = 0.0;
        for (std::size_t l = 0; l < e.size(); ++l) {
          const double term = f[l] * e[l];
          phase += term;
          d1 += rates[l] * term;
          d2 += rates[l] * rates[l] * term;
        }
        if (!std::isfinite(phase))
          throw std::overflow_error("fourier_estimate: phase overflow at T = " + std::to_string(params.horizon));
        s.re += std::cos(phase);
        s.im += std::sin(phase);
        s.curvature = std::max(s.curvature, std::abs(d2) + d1 * d1);
      }
      parts[p] = s;
    }
  };

  const auto nworkers = static_cast<std::size_t>(std::clamp(workers, 1, 256));
  if (nworkers == 1 || pairs < 2) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(nworkers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < nworkers; ++w)
        pool.emplace_back([&, w] {
          try {
            work(w, nworkers);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  const PairSums total = tree_reduce(parts, 0, pairs);
  FourierEstimate est;
  est.u.assign(u.begin(), u.end());
  est.horizon = params.horizon;
  est.n_points = pairs * n_t;
  const double n = static_cast<double>(est.n_points);
  est.value = {total.re / n, total.im / n};
  if (quad) {
    const double dt = params.horizon / static_cast<double>(n_t);
    const double bound = dt * dt / 24.0 * total.curvature / static_cast<double>(pairs);
    est.quadrature_error = std::isfinite(bound) ? std::min(2.0, bound) : 2.0;
  } else if (est.n_points > 1) {
    const double spread = std::max(0.0, 1.0 - std::norm(est.value)) * n / (n - 1.0);
    est.std_error = std::sqrt(spread / n);
  }
  return est;
}

ConvergenceReport convergence_sweep(const Representation& rep, std::span<const double> v, std::span<const double> h,
                                    std::span<const double> u, std::span<const double> schedule,
                                    const SweepBudget& budget) {
  if (schedule.empty()) throw std::invalid_argument("convergence_sweep: empty schedule");
  if (!(budget.nodes_per_unit_time > 0.0)) throw std::invalid_argument("convergence_sweep: nodes_per_unit_time must be positive");
  ConvergenceReport report;
  report.u.assign(u.begin(), u.end());
  report.schedule.assign(schedule.begin(), schedule.end());
  report.control = std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; });

  for (double horizon : schedule) {
    const double nodes = std::ceil(budget.nodes_per_unit_time * horizon);
    if (!(nodes >= 1.0) || nodes > 1e9) throw std::invalid_argument("convergence_sweep: bad node count");
    OrbitMeasureParams params{rep,
                              Vector(v.begin(), v.end()),
                              Vector(h.begin(), h.end()),
                              horizon,
                              budget.n_k,
                              static_cast<int>(nodes),
                              budget.seed,
                              budget.mode};
    report.estimates.push_back(fourier_estimate(params, u, budget.workers));
  }

  const FourierEstimate& first = report.estimates.front();
  const FourierEstimate& last = report.estimates.back();
  const double m_first = std::abs(first.value), m_last = std::abs(last.value);
  if (m_last < m_first && m_last < kDecayThreshold + 3.0 * last.std_error)
    report.verdict = Verdict::decays;
  else if (m_last >= m_first)
    report.verdict = Verdict::fails;
  else
    report.verdict = Verdict::inconclusive;

  std::vector<std::pair<double, double>> xy;
  for (const FourierEstimate& e : report.estimates)
    if (std::abs(e.value) > 0.0) xy.emplace_back(std::log(e.horizon), std::log(std::abs(e.value)));
  if (xy.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : xy) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : xy) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    report.fitted_rate = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return report;
}

// ---------------------------------------------------------------- phase profiles

double PhaseProfile::evaluate(double t, int order) const {
  double s = 0.0;
  for (const PhaseTerm& term : terms) s += term.coefficient * std::pow(term.rate, order) * std::exp(term.rate * t);
  return s;
}

PhaseProfile PhaseProfile::from_terms(std::vector<PhaseTerm> terms) {
  PhaseProfile p;
  p.terms = std::move(terms);
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const PhaseTerm& t = p.terms[i];
    const bool nonzero_weight = std::any_of(t.weight.begin(), t.weight.end(), [](double x) { return std::abs(x) > 1e-12; });
    if (!nonzero_weight || std::abs(t.coefficient) <= kNonzeroCutoff) continue;
    if (!p.dominant || t.rate > p.terms[*p.dominant].rate) p.dominant = i;
  }
  return p;
}

PhaseProfile phase_profile(const Representation& rep, const Matrix& k, const Matrix& k2, std::span<const double> u,
                           std::span<const double> v) {
  if (!is_rotation(k) || !is_rotation(k2)) throw std::invalid_argument("phase_profile: k and k2 must lie in SO(n)");
  const WeightSystem& ws = rep.weight_system();
  const Vector f = weight_coefficients(rep, u, v, k, k2);
  std::vector<PhaseTerm> terms;
  for (std::size_t l = 0; l < f.size(); ++l) terms.push_back({ws.weights[l], f[l], pairing(ws.weights[l], ws.h)});
  PhaseProfile p = PhaseProfile::from_terms(std::move(terms));
  p.k = k;
  p.k2 = k2;
  p.u.assign(u.begin(), u.end());
  p.v.assign(v.begin(), v.end());
  if (!p.degenerate()) {
    try {
      p.t0 = find_t0(p);
    } catch (const std::runtime_error&) {
      // No threshold: the dominant rate is not positive or the cap was hit.
    }
  }
  return p;
}

double find_t0(const PhaseProfile& profile) {
  if (profile.degenerate()) throw std::domain_error("find_t0: degenerate profile");
  const PhaseTerm& top = profile.lambda0();
  const double r0 = top.rate;
  if (!(r0 > 0.0)) throw std::runtime_error("find_t0: dominant rate is not positive, derivatives stay bounded");

  std::vector<PhaseTerm> active;
  for (const PhaseTerm& t : profile.terms)
    if (std::abs(t.coefficient) > kNonzeroCutoff && t.rate != 0.0) active.push_back(t);
  const double sign = top.coefficient > 0.0 ? 1.0 : -1.0;

  // Derivatives are compared after dividing by e^{r0 t}.
  auto good = [&](double t) {
    double s1 = 0.0, s2 = 0.0;
    for (const PhaseTerm& term : active) {
      const double e = term.coefficient * std::exp((term.rate - r0) * t);
      s1 += term.rate * e;
      s2 += term.rate * term.rate * e;
    }
    const double floor = std::exp(-r0 * t);
    return std::abs(s1) >= floor && std::abs(s2) >= floor && s2 * sign > 0.0;
  };

  constexpr double step = 0.01;
  constexpr long window = 5000;
  constexpr double cap = 1e4;
  long start = 0;
  for (long j = 0;; ++j) {
    if (static_cast<double>(start) * step > cap)
      throw std::runtime_error("find_t0: no threshold below 1e4 (genericity failure)");
    if (!good(static_cast<double>(j) * step)) {
      start = j + 1;
      continue;
    }
    if (j - start >= window) break;
  }
  if (start == 0) return 0.0;
  double lo = static_cast<double>(start - 1) * step, hi = static_cast<double>(start) * step;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (good(mid) ? hi : lo) = mid;
  }
  return hi;
}

PhaseFn phase_fn(const PhaseProfile& profile, double a, double b) {
  std::vector<ExpTerm> terms;
  for (const PhaseTerm& t : profile.terms) terms.push_back({t.coefficient, t.rate});
  return PhaseFn::exp_sum(std::move(terms), a, b);
}

}  // namespace bohr
