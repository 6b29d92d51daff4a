#include "bohr/vdc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace bohr {

namespace {

using cplx = std::complex<double>;

constexpr int kNodes = 16;
constexpr std::size_t kPanelBudget = 1'000'000;

struct GaussTable {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
  // legendre[l][k] = P_l(x_k)
  std::array<std::array<double, kNodes>, kNodes> legendre{};
};

const GaussTable& gauss_table() {
  static const GaussTable table = [] {
    GaussTable t;
    for (int i = 0; i < kNodes; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int l = 2; l <= kNodes; ++l) {
          const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
          p0 = p1;
          p1 = p2;
        }
        const double dp = kNodes * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          double q0 = 1.0, q1 = x;
          for (int l = 2; l <= kNodes; ++l) {
            const double q2 = ((2.0 * l - 1.0) * x * q1 - (l - 1.0) * q0) / l;
            q0 = q1;
            q1 = q2;
          }
          const double dq = kNodes * (x * q1 - q0) / (x * x - 1.0);
          t.x[static_cast<std::size_t>(i)] = x;
          t.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dq * dq);
          break;
        }
      }
    }
    for (std::size_t k = 0; k < kNodes; ++k) {
      double p0 = 1.0, p1 = t.x[k];
      t.legendre[0][k] = p0;
      t.legendre[1][k] = p1;
      for (std::size_t l = 2; l < kNodes; ++l) {
        const double p2 = ((2.0 * l - 1.0) * t.x[k] * p1 - (l - 1.0) * p0) / static_cast<double>(l);
        t.legendre[l][k] = p2;
        p0 = p1;
        p1 = p2;
      }
    }
    return t;
  }();
  return table;
}

// Spherical Bessel functions j_0..j_{kNodes-1} at w.
std::array<double, kNodes> spherical_bessel(double w) {
  std::array<double, kNodes> j{};
  const double a = std::abs(w);
  if (a == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (a < 1e-3) {
    double dfact = 1.0;  // (2l+1)!!
    double pw = 1.0;
    for (int l = 0; l < kNodes; ++l) {
      dfact *= (2.0 * l + 1.0);
      j[static_cast<std::size_t>(l)] = pw / dfact * (1.0 - a * a / (2.0 * (2.0 * l + 3.0)));
      pw *= a;
    }
  } else if (a > kNodes) {
    j[0] = std::sin(a) / a;
    j[1] = std::sin(a) / (a * a) - std::cos(a) / a;
    for (int l = 1; l + 1 < kNodes; ++l)
      j[static_cast<std::size_t>(l + 1)] =
          (2.0 * l + 1.0) / a * j[static_cast<std::size_t>(l)] - j[static_cast<std::size_t>(l - 1)];
  } else {
    // Miller's downward recurrence, normalized by j_0.
    const int start = kNodes + 40 + static_cast<int>(a);
    double next = 0.0, cur = 1e-30;
    for (int l = start; l > 0; --l) {
      const double prev = (2.0 * l + 1.0) / a * cur - next;
      next = cur;
      cur = prev;
      if (l - 1 < kNodes) j[static_cast<std::size_t>(l - 1)] = cur;
      if (std::abs(cur) > 1e200) {
        cur *= 1e-200;
        next *= 1e-200;
        for (double& v : j) v *= 1e-200;
      }
    }
    const double scale = (std::sin(a) / a) / j[0];
    for (double& v : j) v *= scale;
  }
  if (w < 0.0)
    for (std::size_t l = 1; l < kNodes; l += 2) j[l] = -j[l];
  return j;
}

double checked(double v) {
  if (!std::isfinite(v)) throw std::domain_error("oscillatory_integral: non-finite phase value");
  return v;
}

// resolved: across the nodes, half * |F' - F'(mid)| is either below
// kMaxResidual or below half the linear frequency.
struct PanelValue {
  cplx value;
  bool resolved;
};

constexpr double kMaxResidual = 4.0;

PanelValue panel_rule(const PhaseFn& phase, double left, double right) {
  const GaussTable& g = gauss_table();
  const double half = 0.5 * (right - left);
  const double mid = left + half;
  const double f_mid = checked(phase.value(mid));
  const double omega = checked(phase.first(mid)) * half;

  std::array<cplx, kNodes> amp{};
  double drift = 0.0;
  for (std::size_t k = 0; k < kNodes; ++k) {
    const double t = mid + half * g.x[k];
    const double rest = checked(phase.value(t)) - f_mid - omega * g.x[k];
    drift = std::max(drift, std::abs(phase.first(t) * half - omega));
    amp[k] = std::polar(1.0, rest);
  }
  const bool resolved = drift <= kMaxResidual || drift <= 0.5 * std::abs(omega);
  const std::array<double, kNodes> jl = spherical_bessel(omega);
  // i^l cycles through 1, i, -1, -i.
  static const std::array<cplx, 4> ipow{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  cplx integral(0.0, 0.0);
  for (std::size_t l = 0; l < kNodes; ++l) {
    cplx c(0.0, 0.0);
    for (std::size_t k = 0; k < kNodes; ++k) c += g.w[k] * g.legendre[l][k] * amp[k];
    c *= (2.0 * l + 1.0) / 2.0;
    integral += c * (2.0 * jl[l]) * ipow[l % 4];
  }
  return {std::polar(half, f_mid) * integral, resolved};
}

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
  static void add(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  void operator+=(cplx z) {
    add(re, cre, z.real());
    add(im, cim, z.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

}  // namespace

PhaseFn PhaseFn::linear(double slope, double intercept, double a, double b) {
  return {[=](double t) { return slope * t + intercept; }, [=](double) { return slope; },
          [](double) { return 0.0; }, a, b, "linear"};
}

PhaseFn PhaseFn::quadratic(double c, double a, double b) {
  return {[=](double t) { return 0.5 * c * t * t; }, [=](double t) { return c * t; }, [=](double) { return c; },
          a, b, "quadratic"};
}

PhaseFn PhaseFn::exp_sum(std::vector<ExpTerm> terms, double a, double b) {
  auto sum = [terms](int order) {
    return [terms, order](double t) {
      double s = 0.0;
      for (const ExpTerm& e : terms) s += e.coefficient * std::pow(e.rate, order) * std::exp(e.rate * t);
      return s;
    };
  };
  return {sum(0), sum(1), sum(2), a, b, "exp_sum"};
}

PhaseFn PhaseFn::shifted(double constant) const {
  PhaseFn out = *this;
  out.value = [f = value, constant](double t) { return f(t) + constant; };
  return out;
}

PhaseFn PhaseFn::negated() const {
  PhaseFn out = *this;
  out.value = [f = value](double t) { return -f(t); };
  out.first = [f = first](double t) { return -f(t); };
  out.second = [f = second](double t) { return -f(t); };
  return out;
}

OscillatoryResult oscillatory_integral(const PhaseFn& phase, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("oscillatory_integral: tol must be positive");
  if (!(phase.a < phase.b) || !std::isfinite(phase.a) || !std::isfinite(phase.b))
    throw std::invalid_argument("oscillatory_integral: need a finite interval with a < b");

  const double length = phase.b - phase.a;
  struct Panel {
    double left, right;
    cplx coarse;
  };
  std::vector<Panel> stack;
  constexpr int initial = 4;
  for (int i = initial - 1; i >= 0; --i) {
    const double l = phase.a + length * i / initial;
    const double r = (i == initial - 1) ? phase.b : phase.a + length * (i + 1) / initial;
    stack.push_back({l, r, panel_rule(phase, l, r).value});
  }
  std::size_t panels = initial;
  CompensatedSum total;
  double error = 0.0;

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.left + p.right);
    const PanelValue lp = panel_rule(phase, p.left, mid);
    const PanelValue rp = panel_rule(phase, mid, p.right);
    const cplx lv = lp.value, rv = rp.value;
    panels += 2;
    const double diff = std::abs(p.coarse - (lv + rv));
    const double local_tol = tol * (p.right - p.left) / length;
    const bool resolved = lp.resolved && rp.resolved;
    if (resolved && (diff <= local_tol || (p.right - p.left) <= 1e-13 * length)) {
      total += lv;
      total += rv;
      error += diff;
      continue;
    }
    if (panels >= kPanelBudget) {
      double pending = diff;
      for (const Panel& q : stack) pending += std::abs(q.coarse) ;
      throw TooOscillatory(error + pending, panels);
    }
    stack.push_back({mid, p.right, rv});
    stack.push_back({p.left, mid, lv});
  }
  return {total.value(), error, panels};
}

const char* to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::holds: return "HOLDS";
    case CertificateStatus::hypotheses_unmet: return "HYPOTHESES_UNMET";
    case CertificateStatus::unverified: return "UNVERIFIED";
  }
  return "UNKNOWN";
}

VdcCertificate vdc_certify(const PhaseFn& phase) {
  if (!(phase.a < phase.b)) throw std::invalid_argument("vdc_certify: need a < b");
  constexpr int grid = 10'000;
  const double step = (phase.b - phase.a) / grid;
  auto node = [&](int i) { return i == grid ? phase.b : phase.a + step * i; };

  std::vector<double> d1(grid + 1), d2(grid + 1);
  double max_d2 = 0.0;
  for (int i = 0; i <= grid; ++i) {
    d1[static_cast<std::size_t>(i)] = phase.first(node(i));
    d2[static_cast<std::size_t>(i)] = phase.second(node(i));
    if (!std::isfinite(d1[static_cast<std::size_t>(i)]) || !std::isfinite(d2[static_cast<std::size_t>(i)]))
      throw std::domain_error("vdc_certify: non-finite derivative");
    max_d2 = std::max(max_d2, std::abs(d2[static_cast<std::size_t>(i)]));
  }

  // Monotonicity of F': F'' must not take both signs. A sign change whose
  // smaller side stays at roundoff level is inconclusive.
  double max_pos = 0.0, max_neg = 0.0;
  auto note = [&](double v) {
    if (v > 0.0) max_pos = std::max(max_pos, v);
    if (v < 0.0) max_neg = std::max(max_neg, -v);
  };
  for (double v : d2) note(v);
  for (int i = 1; i < grid; ++i) {
    const double here = std::abs(d2[static_cast<std::size_t>(i)]);
    const bool local_min = here <= std::abs(d2[static_cast<std::size_t>(i - 1)]) &&
                           here <= std::abs(d2[static_cast<std::size_t>(i + 1)]);
    if (!local_min || here > 1e-3 * max_d2) continue;
    for (int s = 0; s <= 1000; ++s) note(phase.second(node(i - 1) + 2.0 * step * s / 1000.0));
  }
  const double noise = 1e-12 * max_d2;
  const bool monotone_ok = max_pos == 0.0 || max_neg == 0.0;
  const bool monotone_known = monotone_ok || std::min(max_pos, max_neg) > noise;

  bool magnitude_ok = false;
  bool magnitude_known = true;
  if (monotone_ok) {
    // |F'| is minimized at an endpoint when F' is monotone.
    const double fa = d1.front(), fb = d1.back();
    magnitude_ok = (fa > 0.0) == (fb > 0.0) && std::min(std::abs(fa), std::abs(fb)) >= 1.0;
  } else {
    double min_d1 = std::abs(d1.front());
    for (double v : d1) min_d1 = std::min(min_d1, std::abs(v));
    if (min_d1 < 1.0)
      magnitude_ok = false;
    else if (min_d1 - 0.5 * step * max_d2 >= 1.0)
      magnitude_ok = true;
    else
      magnitude_known = false;
  }

  const OscillatoryResult r = oscillatory_integral(phase, 1e-8);
  VdcCertificate cert{phase.a, phase.b, monotone_ok, magnitude_ok, r.value, std::abs(r.value), false, false,
                      r.error_bound, CertificateStatus::hypotheses_unmet};
  if (monotone_ok && magnitude_ok) {
    // 1e-12 absorbs roundoff in the modulus itself.
    const double slack = cert.quadrature_error + 1e-12;
    cert.bound_3_ok = cert.modulus <= 3.0 + slack;
    cert.bound_2_ok = cert.modulus <= 2.0 + slack;
    if (!cert.bound_3_ok)
      throw std::logic_error("vdc_certify: hypotheses hold but |integral| = " + std::to_string(cert.modulus) +
                             " exceeds 3");
    cert.status = CertificateStatus::holds;
  } else {
    const bool definitely_unmet = (monotone_known && !monotone_ok) || (magnitude_known && !magnitude_ok);
    if (!definitely_unmet) cert.status = CertificateStatus::unverified;
  }
  return cert;
}

TwoTermPhase random_two_term_phase(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  for (;;) {
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    TwoTermPhase p{{sign * range(0.2, 2.0), range(-1.5, 1.5)}, {sign * range(0.2, 2.0), range(-1.5, 1.5)}, 0.0, 0.0};
    if (std::abs(p.first.rate) < 0.1 || std::abs(p.second.rate) < 0.1) continue;
    p.a = range(0.0, 2.0);
    p.b = p.a + range(0.5, 4.0);
    auto slope = [&](double t) {
      return p.first.coefficient * p.first.rate * std::exp(p.first.rate * t) +
             p.second.coefficient * p.second.rate * std::exp(p.second.rate * t);
    };
    const double da = slope(p.a), db = slope(p.b);
    if (da * db <= 0.0) continue;
    const double scale = range(1.0, 3.0) / std::min(std::abs(da), std::abs(db));
    if (scale > 1e3) continue;
    p.first.coefficient *= scale;
    p.second.coefficient *= scale;
    return p;
  }
}

}  // namespace bohr
