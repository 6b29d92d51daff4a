#pragma once

// Concrete irreducible representations of SL(2,R) on Sym^k(R^2) and of
// SL(n,R) on R^n, their restricted-weight decompositions and matrix
// coefficients.
//
// The Cartan subalgebra is the traceless diagonal algebra with basis
// B_j = E_jj - E_{j+1,j+1}. An element H is stored by its coordinates c
// in that basis, a weight by its values on the basis (lambda(B_j)), so
// that <lambda, H> = sum_j c_j lambda_j.

#include <optional>
#include <span>
#include <vector>

#include "bohr/matcore.hpp"

namespace bohr {

enum class Family { sl2_sym, sln_standard };

struct GroupRepSpec {
  Family family;
  int level;  // k for sl2_sym, n for sln_standard

  static GroupRepSpec sl2_sym(int k) { return {Family::sl2_sym, k}; }
  static GroupRepSpec sln_standard(int n) { return {Family::sln_standard, n}; }

  int group_dim() const { return family == Family::sl2_sym ? 2 : level; }
  int rep_dim() const { return family == Family::sl2_sym ? level + 1 : level; }
  void validate() const;
};

struct WeightSystem {
  std::vector<Matrix> cartan_basis;
  std::vector<Vector> weights;
  std::vector<Matrix> projectors;
  Vector h;  // coordinates of the generic element H
};

double pairing(std::span<const double> weight, std::span<const double> h);

/// Diagonal entries of sum_j c_j B_j.
Vector cartan_diagonal(std::span<const double> h);
/// Inverse of cartan_diagonal; the input must be traceless.
Vector cartan_coords(std::span<const double> diagonal);

class Representation {
 public:
  const GroupRepSpec& spec() const { return spec_; }
  const WeightSystem& weight_system() const { return weights_; }
  std::size_t dim() const { return static_cast<std::size_t>(spec_.rep_dim()); }

  /// rho(g) for g in GL(group_dim).
  Matrix act(const Matrix& g) const;
  /// Contragredient action rho(g)^{-T} on V*.
  Matrix act_dual(const Matrix& g) const;
  /// Differential d rho(x) for x in gl(group_dim).
  Matrix differential(const Matrix& x) const;
  /// rho(exp(t H)) for the stored generic H.
  Matrix flow(double t) const;

 private:
  friend Representation build_representation(GroupRepSpec spec);
  explicit Representation(GroupRepSpec spec) : spec_(spec) {}
  GroupRepSpec spec_;
  WeightSystem weights_;
};

/// Builds the module with its weights, projectors and a generic H. The
/// Sym^k action is on coefficients in the monomial basis x^k, x^{k-1}y, ..., y^k.
Representation build_representation(GroupRepSpec spec);

/// Joint eigen-decomposition of the Cartan action. Fills cartan_basis,
/// weights and projectors (h is left empty). Throws std::runtime_error if
/// the Cartan basis does not act diagonally.
WeightSystem weight_decomposition(const Representation& rep);

/// True when every pairwise weight difference pairs with h to at least
/// `margin` in absolute value and h lies in the open dominant chamber
/// (diagonal strictly decreasing, again by `margin`).
bool is_generic(std::span<const Vector> weights, std::span<const double> h, double margin = 1e-6);

/// Deterministic generic H. Tries `candidate` (default: the doubled
/// half-sum of positive coroots, diag(n-1, n-3, ..., 1-n)) and then
/// candidate + 2^{-m} * default for m = 0, 1, ...
Vector choose_generic_h(int group_dim, std::span<const Vector> weights,
                        std::optional<Vector> candidate = std::nullopt);

double matrix_coefficient(const Representation& rep, std::span<const double> u, std::span<const double> v,
                          const Matrix& g);

struct TranslateTerm {
  double coefficient;  // alpha_i * beta_j
  Matrix left;         // g_i
  Matrix right;        // g_j
};

struct TranslateExpansion {
  std::vector<TranslateTerm> terms;
  double max_residual;  // certification residual over random g

  /// sum_ij alpha_i beta_j <u, rho(g_i^{-1} g g_j) v>
  double evaluate(const Representation& rep, std::span<const double> u, std::span<const double> v,
                  const Matrix& g) const;
};

/// Writes psi(g) = <x, rho(g) y> as a combination of translates of
/// phi(g) = <u, rho(g) v>. Certified at 100 random group elements to 1e-8;
/// throws std::runtime_error if certification or the span search fails and
/// std::invalid_argument for zero or mismatched vectors.
TranslateExpansion translate_expansion(const Representation& rep, std::span<const double> u,
                                       std::span<const double> v, std::span<const double> x,
                                       std::span<const double> y);

/// Random SL(n) element k exp(diag(log_a)) k2 with log_a traceless and
/// entries bounded by `spread`.
Matrix random_sl(int n, double spread, Rng& rng);

/// f_lambda(k, k2) = <u, rho(k) E_lambda rho(k2) v> for every weight.
Vector weight_coefficients(const Representation& rep, std::span<const double> u, std::span<const double> v,
                           const Matrix& k, const Matrix& k2);

/// Index set of weights whose coefficient f_lambda is not identically zero
/// on K x K, detected as |f_lambda| > cutoff somewhere on a deterministic
/// 32 x 32 grid. For SO(2) the grid is the angle grid; for SO(n), n >= 3,
/// it runs over the one-parameter subgroups exp(theta X), exp(phi Y) for
/// fixed generic skew X, Y, followed by 1024 seeded Haar pairs.
std::vector<bool> nonvanishing_weights(const Representation& rep, std::span<const double> u,
                                       std::span<const double> v, double cutoff = 1e-8);

}  // namespace bohr
