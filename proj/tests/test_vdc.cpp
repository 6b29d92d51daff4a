#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "bohr/vdc.hpp"

using namespace bohr;

namespace {

// Composite Simpson rule in long double; fine enough for moderate phases.
std::complex<double> simpson(const PhaseFn& f, long n) {
  const long double h = (static_cast<long double>(f.b) - f.a) / n;
  long double re = 0.0L, im = 0.0L;
  for (long i = 0; i <= n; ++i) {
    const long double w = (i == 0 || i == n) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
    const long double phase = f.value(static_cast<double>(f.a + i * h));
    re += w * std::cos(phase);
    im += w * std::sin(phase);
  }
  return {static_cast<double>(re * h / 3), static_cast<double>(im * h / 3)};
}

}  // namespace

TEST_CASE("linear phases integrate in closed form") {
  const double pi = std::numbers::pi;
  const OscillatoryResult r = oscillatory_integral(PhaseFn::linear(1.0, 0.0, 0.0, pi), 1e-12);
  CHECK(std::abs(r.value - std::complex<double>(0.0, 2.0)) <= 1e-12);
  for (double slope : {1.0, 3.5, 40.0, -7.0})
    for (double len : {0.3, 2.0, 11.0}) {
      const OscillatoryResult s = oscillatory_integral(PhaseFn::linear(slope, 0.4, 1.0, 1.0 + len), 1e-12);
      const std::complex<double> i(0.0, 1.0);
      const std::complex<double> exact = (std::exp(i * (slope * (1.0 + len) + 0.4)) - std::exp(i * (slope + 0.4))) / (i * slope);
      CHECK(std::abs(s.value - exact) <= 1e-11);
      CHECK(s.error_bound <= 1e-10);
    }
}

TEST_CASE("nonlinear phases match a brute-force Simpson rule") {
  const PhaseFn phases[] = {PhaseFn::quadratic(1.0, 0.0, 6.0), PhaseFn::quadratic(-2.5, 1.0, 4.0),
                            PhaseFn::exp_sum({{1.0, 1.0}, {1.0, -1.0}}, 0.0, 2.0),
                            PhaseFn::exp_sum({{0.3, 1.5}, {2.0, 0.5}}, -1.0, 3.0),
                            PhaseFn::exp_sum({{-1.0, 2.0}}, 0.0, 2.5)};
  for (const PhaseFn& f : phases) {
    const OscillatoryResult r = oscillatory_integral(f, 1e-10);
    const std::complex<double> ref = simpson(f, 2'000'000);
    CHECK(std::abs(r.value - ref) <= 1e-8);
  }
}

TEST_CASE("Fresnel integral on a long interval") {
  // int_0^L e^{i t^2 / 2} dt -> (sqrt(pi) / 2) (1 + i), with tail of size about 1 / L.
  const OscillatoryResult r = oscillatory_integral(PhaseFn::quadratic(1.0, 0.0, 200.0), 1e-10);
  const double s = std::sqrt(std::numbers::pi) / 2;
  CHECK(std::abs(r.value - std::complex<double>(s, s)) <= 1.0 / 200.0 + 1e-6);
}

TEST_CASE("fast growth does not hide the slow part of the interval") {
  // Simpson with 2e8 nodes on [0, 15] for F = e^t; the tail beyond 15 is below 2 e^{-15}.
  const std::complex<double> head(-0.33740362043, 0.624713302159);
  for (double len : {15.0, 20.0, 24.0}) {
    const OscillatoryResult r = oscillatory_integral(PhaseFn::exp_sum({{1.0, 1.0}}, 0.0, len), 1e-8);
    CHECK(std::abs(r.value - head) <= 2 * std::exp(-15.0) + 1e-8);
  }
}

TEST_CASE("property: shift and negation act on the integral") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const PhaseFn f = random_two_term_phase(rng).fn();
    const std::complex<double> base = oscillatory_integral(f, 1e-10).value;
    const std::complex<double> shifted = oscillatory_integral(f.shifted(0.75), 1e-10).value;
    CHECK(std::abs(shifted - std::polar(1.0, 0.75) * base) <= 1e-8);
    CHECK(std::abs(oscillatory_integral(f.negated(), 1e-10).value - std::conj(base)) <= 1e-8);
  }
}

TEST_CASE("argument and overflow errors") {
  CHECK_THROWS_AS(oscillatory_integral(PhaseFn::linear(1, 0, 1, 1), 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(oscillatory_integral(PhaseFn::linear(1, 0, 0, 1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(oscillatory_integral(PhaseFn::exp_sum({{1.0, 1.0}}, 0.0, 800.0), 1e-8), std::domain_error);
  CHECK_THROWS_AS(oscillatory_integral(PhaseFn::exp_sum({{1.0, 1.0}}, 0.0, 700.0), 1e-8), TooOscillatory);
  CHECK_THROWS_AS(vdc_certify(PhaseFn::linear(1, 0, 2, 1)), std::invalid_argument);
}

TEST_CASE("certificate examples") {
  const VdcCertificate lin = vdc_certify(PhaseFn::linear(1.0, 0.0, 0.0, std::numbers::pi));
  CHECK(lin.status == CertificateStatus::holds);
  CHECK(lin.modulus == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(lin.bound_3_ok);
  CHECK(lin.bound_2_ok);

  const VdcCertificate slow = vdc_certify(PhaseFn::linear(0.5, 0.0, 0.0, 1.0));
  CHECK(slow.status == CertificateStatus::hypotheses_unmet);
  CHECK(slow.monotone_ok);
  CHECK_FALSE(slow.magnitude_ok);

  const VdcCertificate straddle = vdc_certify(PhaseFn::quadratic(1.0, -3.0, 3.0));
  CHECK(straddle.status == CertificateStatus::hypotheses_unmet);
  CHECK_FALSE(straddle.magnitude_ok);

  const VdcCertificate quad = vdc_certify(PhaseFn::quadratic(1.0, 1.0, 3.0));
  CHECK(quad.status == CertificateStatus::holds);
  CHECK(quad.modulus <= 2.0);

  // F' = -sin t + 2.5 on [0, 2 pi] has |F'| >= 1 but F'' changes sign.
  PhaseFn wobble;
  wobble.value = [](double t) { return std::cos(t) + 2.5 * t; };
  wobble.first = [](double t) { return -std::sin(t) + 2.5; };
  wobble.second = [](double t) { return -std::cos(t); };
  wobble.a = 0.0;
  wobble.b = 2 * std::numbers::pi;
  const VdcCertificate w = vdc_certify(wobble);
  CHECK_FALSE(w.monotone_ok);
  CHECK(w.magnitude_ok);
  CHECK(w.status == CertificateStatus::hypotheses_unmet);

  const VdcCertificate e = vdc_certify(PhaseFn::exp_sum({{1.0, 1.0}, {-1.0, -1.0}}, 0.0, 2.0));
  CHECK(e.status == CertificateStatus::holds);
  CHECK(e.modulus == doctest::Approx(0.4986).epsilon(1e-3));
}

TEST_CASE("property: random two-term phases satisfy both bounds") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const TwoTermPhase p = random_two_term_phase(rng);
    CHECK(p.first.coefficient * p.second.coefficient > 0.0);
    CHECK(p.a < p.b);
    const VdcCertificate c = vdc_certify(p.fn());
    CHECK(c.status == CertificateStatus::holds);
    CHECK(c.bound_3_ok);
    CHECK(c.bound_2_ok);
    CHECK(c.modulus <= 2.0 + c.quadrature_error);
    CHECK(c.quadrature_error <= 1e-6);
    worst = std::max(worst, c.modulus);
  }
  CHECK(worst > 0.5);
}
