#include "bohr/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace bohr {

namespace {

constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;
constexpr double kInvTwoPiHi = 0.15915494309189535;
constexpr double kInvTwoPiLo = -9.839338337591243e-18;

// frac(n * (hi + lo)) keeping the rounding error of n * hi.
double frac_product(std::int64_t n, double hi, double lo) {
  const auto x = static_cast<double>(n);
  const double p = x * hi;
  const double err = std::fma(x, hi, -p);
  const double head = p - std::floor(p);
  return frac(head + (err + x * lo));
}

std::complex<double> unit(double turns) {
  const double a = 2.0 * std::numbers::pi * turns;
  return {std::cos(a), std::sin(a)};
}

// (1/(2N+1)) sum_{n=-N}^{N} z^n with z^n = unit(reduce(j n)).
template <class Reduce>
std::complex<double> symmetric_geometric(std::int64_t j, std::int64_t n, Reduce reduce) {
  const std::complex<double> z = unit(reduce(j));
  const std::complex<double> num = unit(reduce(j * (n + 1))) - unit(reduce(-j * n));
  return num / (z - 1.0) / static_cast<double>(2 * n + 1);
}

void check_frequency(const PointCloud& pts, std::span<const std::int64_t> m) {
  if (m.size() != pts.dim())
    throw std::invalid_argument("frequency has " + std::to_string(m.size()) + " entries, points have dimension " +
                                std::to_string(pts.dim()));
}

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) throw std::invalid_argument("PointCloud: size is not a multiple of dim");
}

void PointCloud::push_back(std::span<const double> x) {
  if (x.size() != dim_) throw std::invalid_argument("PointCloud::push_back: dimension mismatch");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

double frac(double x) {
  const double r = x - std::floor(x);
  return r < 1.0 ? r : 0.0;
}

TorusQuotient::TorusQuotient(Matrix lattice_basis) : basis_(std::move(lattice_basis)), inverse_(1, 1), condition_(1.0) {
  if (!basis_.is_square() || basis_.rows() == 0) throw std::invalid_argument("TorusQuotient: basis must be square");
  if (!basis_.all_finite()) throw std::invalid_argument("TorusQuotient: non-finite basis");
  const Svd s = svd(basis_);
  if (!(s.sigma.back() > 1e-14 * s.sigma.front())) throw std::domain_error("TorusQuotient: singular lattice");
  condition_ = s.sigma.front() / s.sigma.back();
  inverse_ = inverse(basis_);
}

TorusQuotient TorusQuotient::standard(std::size_t d) { return TorusQuotient(Matrix::identity(d)); }

TorusQuotient TorusQuotient::scaled(std::span<const double> scales) { return TorusQuotient(Matrix::diagonal(scales)); }

Vector TorusQuotient::reduce(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("torus_reduce: dimension mismatch");
  Vector y = inverse_ * x;
  for (double& c : y) c = frac(c);
  return y;
}

Vector TorusQuotient::character_frequency(std::span<const std::int64_t> m) const {
  if (m.size() != dim()) throw std::invalid_argument("character_frequency: dimension mismatch");
  Vector md(m.begin(), m.end());
  Vector u = inverse_.transpose() * md;
  for (double& c : u) c *= 2.0 * std::numbers::pi;
  return u;
}

PointCloud torus_reduce(const PointCloud& points, const TorusQuotient& q) {
  PointCloud out(q.dim());
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out.push_back(q.reduce(points.point(i)));
  return out;
}

TorusQuotient random_lattice(std::size_t d, double max_condition, Rng& rng) {
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Matrix b(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) b(i, j) = gauss(rng);
    const Svd s = svd(b);
    if (s.sigma.back() > 0.0 && s.sigma.front() / s.sigma.back() <= max_condition) return TorusQuotient(b);
  }
  throw std::runtime_error("random_lattice: no basis within the condition bound");
}

WeylSumReport weyl_sum(const PointCloud& reduced, std::span<const std::int64_t> m) {
  if (reduced.empty()) throw std::invalid_argument("weyl_sum: empty point set");
  check_frequency(reduced, m);
  std::vector<double> theta(reduced.size());
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    const auto x = reduced.point(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += static_cast<double>(m[i]) * frac(x[i]);
    theta[j] = frac(s);
  }
  std::sort(theta.begin(), theta.end());
  double re = 0.0, im = 0.0;
  for (double th : theta) {
    re += std::cos(2.0 * std::numbers::pi * th);
    im += std::sin(2.0 * std::numbers::pi * th);
  }
  WeylSumReport r;
  r.m.assign(m.begin(), m.end());
  r.n_points = reduced.size();
  const auto n = static_cast<double>(reduced.size());
  r.value = {re / n, im / n};
  r.modulus = std::abs(r.value);
  return r;
}

std::vector<WeylSumReport> weyl_sums(const PointCloud& reduced, std::span<const std::vector<std::int64_t>> frequencies,
                                     int workers) {
  std::vector<WeylSumReport> out(frequencies.size());
  const auto nw = std::min<std::size_t>(static_cast<std::size_t>(std::clamp(workers, 1, 256)), frequencies.size());
  if (nw <= 1) {
    for (std::size_t i = 0; i < frequencies.size(); ++i) out[i] = weyl_sum(reduced, frequencies[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(nw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nw; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < frequencies.size(); i += nw) out[i] = weyl_sum(reduced, frequencies[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double frac_over_two_pi(std::int64_t n) { return frac_product(n, kInvTwoPiHi, kInvTwoPiLo); }

double frac_two_pi_times(std::int64_t n) { return frac_product(n, kTwoPiHi, kTwoPiLo); }

Remark1Report remark1_experiment(std::int64_t n) {
  if (n < 100) throw std::invalid_argument("remark1_experiment: N must be at least 100");
  if (n > 10'000'000) throw std::invalid_argument("remark1_experiment: N must be at most 1e7");

  // Torus coordinates in turns: v in Z maps to (v / 2pi, v), v = 2pi m to (m, 2pi m).
  PointCloud integer_part(2), two_pi_part(2), all(2);
  Remark1Report rep;
  rep.n = n;
  std::complex<double> witness = 0.0;
  for (std::int64_t v = -n; v <= n; ++v) {
    const double a[2] = {frac_over_two_pi(v), frac(static_cast<double>(v))};
    const double b[2] = {frac(static_cast<double>(v)), frac_two_pi_times(v)};
    integer_part.push_back(a);
    two_pi_part.push_back(b);
    rep.max_circle_deviation = std::max({rep.max_circle_deviation, std::abs(unit(a[1]) - 1.0), std::abs(unit(b[0]) - 1.0)});
  }
  for (const PointCloud* part : {&integer_part, &two_pi_part})
    for (std::size_t i = 0; i < part->size(); ++i) {
      all.push_back(part->point(i));
      const auto x = part->point(i);
      witness += (1.0 - unit(x[0])) * (1.0 - unit(x[1]));
    }
  rep.n_points = all.size();
  rep.witness_average = std::abs(witness) / static_cast<double>(all.size());

  for (std::int64_t j = 1; j <= 3; ++j) {
    const std::int64_t m1[2] = {j, 0}, m2[2] = {0, j};
    const auto e1 = weyl_sum(integer_part, m1).value;
    const auto c1 = symmetric_geometric(j, n, frac_over_two_pi);
    rep.integer_circle.push_back({j, e1, c1, std::abs(e1)});
    const auto e2 = weyl_sum(two_pi_part, m2).value;
    const auto c2 = symmetric_geometric(j, n, frac_two_pi_times);
    rep.two_pi_circle.push_back({j, e2, c2, std::abs(e2)});
  }
  for (std::vector<std::int64_t> m : {std::vector<std::int64_t>{1, 0}, {0, 1}, {1, 1}}) {
    rep.joint.push_back(
        {m, weyl_sum(integer_part, m).value, weyl_sum(two_pi_part, m).value, weyl_sum(all, m).value});
  }

  bool ok = rep.max_circle_deviation <= 1e-12 && rep.witness_average <= 1e-12;
  for (const auto* circle : {&rep.integer_circle, &rep.two_pi_circle})
    for (const CircleSum& c : *circle) ok = ok && c.modulus < 0.01 && std::abs(c.empirical - c.closed_form) <= 1e-9;
  rep.verdict = ok ? "CLOSURE_IS_CIRCLE_PAIR" : "INCONCLUSIVE";
  return rep;
}

Vector nilpotent_orbit(const Matrix& z, std::span<const double> v, double t) {
  const std::size_t d = z.rows();
  if (!z.is_square() || v.size() != d) throw std::invalid_argument("nilpotent_orbit: dimension mismatch");
  Matrix p = z;
  double scale = std::max(1.0, frobenius_norm(z));
  for (std::size_t k = 1; k < d; ++k) p = p * z;
  if (frobenius_norm(p) > 1e-12 * std::pow(scale, static_cast<double>(d)))
    throw std::domain_error("nilpotent_orbit: generator is not nilpotent, the series does not terminate");
  Vector out(v.begin(), v.end());
  Vector term = out;
  for (std::size_t k = 1; k < d; ++k) {
    term = z * term;
    for (double& c : term) c *= t / static_cast<double>(k);
    for (std::size_t i = 0; i < d; ++i) out[i] += term[i];
  }
  return out;
}

AffineHull affine_hull(const PointCloud& samples, double rel_tol) {
  if (samples.empty()) throw std::invalid_argument("affine_hull: no samples");
  const std::size_t d = samples.dim();
  AffineHull hull;
  hull.base.assign(d, 0.0);
  for (std::size_t j = 0; j < samples.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) hull.base[i] += samples.point(j)[i];
  for (double& c : hull.base) c /= static_cast<double>(samples.size());

  Matrix scatter(d, d);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto x = samples.point(j);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) scatter(a, b) += (x[a] - hull.base[a]) * (x[b] - hull.base[b]);
  }
  const SymEigen eig = sym_eigen(scatter);
  const double top = std::sqrt(std::max(0.0, eig.d.front()));
  for (std::size_t i = 0; i < d; ++i) {
    Vector col = eig.q.column(i);
    if (top > 0.0 && std::sqrt(std::max(0.0, eig.d[i])) > rel_tol * top) {
      hull.directions.push_back(std::move(col));
      continue;
    }
    const auto big = std::max_element(col.begin(), col.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (*big < 0.0)
      for (double& c : col) c = -c;
    hull.offsets.push_back(dot(col, hull.base));
    hull.normals.push_back(std::move(col));
  }
  return hull;
}

UnipotentReport unipotent_orbit_experiment(const UnipotentSpec& spec, int workers) {
  if (spec.n < 1 || spec.n > 10'000'000) throw std::invalid_argument("unipotent experiment: N must be in [1, 1e7]");
  if (!(spec.step > 0.0) || !std::isfinite(spec.step)) throw std::invalid_argument("unipotent experiment: step must be positive");
  if (spec.frequencies.empty() || spec.frequencies.size() > kMaxFrequencies)
    throw std::invalid_argument("unipotent experiment: between 1 and 10 frequencies are required");

  const std::size_t d = spec.z.rows();
  UnipotentReport rep;
  PointCloud hull_samples(d);
  const std::int64_t n_hull = std::min<std::int64_t>(spec.n, 256);
  for (std::int64_t j = 1; j <= n_hull; ++j)
    hull_samples.push_back(nilpotent_orbit(spec.z, spec.v, static_cast<double>(j) * spec.step));
  rep.hull = affine_hull(hull_samples);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 1; j < hull_samples.size(); ++j)
      if (hull_samples.point(j)[i] != hull_samples.point(0)[i]) {
        rep.moving.push_back(i);
        break;
      }

  if (spec.scaling.size() != rep.moving.size())
    throw std::invalid_argument("unipotent experiment: expected " + std::to_string(rep.moving.size()) +
                                " scaling parameters, one per moving coordinate");
  for (const auto& m : spec.frequencies)
    if (m.size() != rep.moving.size()) throw std::invalid_argument("unipotent experiment: frequency dimension mismatch");

  Vector inv_scale(spec.scaling.size());
  for (std::size_t i = 0; i < inv_scale.size(); ++i) {
    if (!(spec.scaling[i] != 0.0) || !std::isfinite(spec.scaling[i]))
      throw std::invalid_argument("unipotent experiment: scalings must be finite and nonzero");
    inv_scale[i] = 1.0 / spec.scaling[i];
  }
  const TorusQuotient q = TorusQuotient::scaled(inv_scale);

  PointCloud reduced(rep.moving.size());
  reduced.reserve(static_cast<std::size_t>(spec.n));
  Vector y(rep.moving.size());
  for (std::int64_t j = 1; j <= spec.n; ++j) {
    const Vector x = nilpotent_orbit(spec.z, spec.v, static_cast<double>(j) * spec.step);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[rep.moving[i]];
    reduced.push_back(q.reduce(y));
  }
  rep.sums = weyl_sums(reduced, spec.frequencies, workers);

  bool dense = true;
  for (const WeylSumReport& s : rep.sums) {
    const bool zero = std::all_of(s.m.begin(), s.m.end(), [](std::int64_t c) { return c == 0; });
    if (!zero && !(s.modulus < kDenseThreshold)) dense = false;
  }
  rep.verdict = dense ? "DENSE_IN_HULL" : "NOT_DENSE";
  return rep;
}

}  // namespace bohr
