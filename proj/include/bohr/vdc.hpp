#pragma once

// Oscillatory integrals of e^{iF} and Van der Corput certificates.

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohr {

struct ExpTerm {
  double coefficient;
  double rate;
};

/// Real phase F on [a, b] with closed-form first and second derivatives.
struct PhaseFn {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
  double a = 0.0;
  double b = 1.0;
  std::string name;

  static PhaseFn linear(double slope, double intercept, double a, double b);
  /// F(t) = c t^2 / 2
  static PhaseFn quadratic(double c, double a, double b);
  /// F(t) = sum_j c_j e^{r_j t}
  static PhaseFn exp_sum(std::vector<ExpTerm> terms, double a, double b);

  PhaseFn shifted(double constant) const;
  PhaseFn negated() const;
};

struct OscillatoryResult {
  std::complex<double> value;
  double error_bound;
  std::size_t panels;
};

class TooOscillatory : public std::runtime_error {
 public:
  TooOscillatory(double achieved, std::size_t panels)
      : std::runtime_error("oscillatory_integral: panel budget exhausted with error bound " +
                           std::to_string(achieved)),
        achieved_bound(achieved),
        panel_count(panels) {}
  double achieved_bound;
  std::size_t panel_count;
};

/// Adaptive Filon-type quadrature of int_a^b e^{iF(t)} dt. On each panel
/// the phase is linearized at the midpoint; the remaining factor
/// e^{i(F - linear)} is interpolated in Legendre polynomials at 16 Gauss
/// nodes and integrated exactly against the linear phase. Panels are
/// bisected until coarse and refined values agree to tol * width / (b - a).
/// Throws TooOscillatory after 10^6 panels and std::domain_error on a
/// non-finite phase value.
OscillatoryResult oscillatory_integral(const PhaseFn& phase, double tol);

enum class CertificateStatus { holds, hypotheses_unmet, unverified };

const char* to_string(CertificateStatus s);

struct VdcCertificate {
  double a;
  double b;
  bool monotone_ok;
  bool magnitude_ok;
  std::complex<double> integral;
  double modulus;
  bool bound_3_ok;
  bool bound_2_ok;
  double quadrature_error;
  CertificateStatus status;
};

/// Checks that F' is monotone (F'' keeps its sign on a 10^4-node grid with
/// local refinement where |F''| nearly vanishes) and |F'| >= 1, then
/// integrates e^{iF} at tolerance 1e-8. The bounds 3 and 2 are only
/// evaluated when both hypotheses hold. Throws std::logic_error if the
/// hypotheses hold but the modulus exceeds 3 + quadrature error.
VdcCertificate vdc_certify(const PhaseFn& phase);

struct TwoTermPhase {
  ExpTerm first;
  ExpTerm second;
  double a;
  double b;

  PhaseFn fn() const { return PhaseFn::exp_sum({first, second}, a, b); }
};

/// c1 e^{r1 t} + c2 e^{r2 t} on [a, b] with c1, c2 of one sign (so F' is
/// monotone) rescaled until min |F'| on [a, b] lies in [1, 3].
TwoTermPhase random_two_term_phase(std::mt19937_64& rng);

}  // namespace bohr
