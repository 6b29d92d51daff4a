#pragma once

// Dense real matrix kernel: exponential, symmetric eigensolver, SVD, KAK
// factorization of SL(n,R) and Haar sampling on SO(n).

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace bohr {

using Vector = std::vector<double>;
using Rng = std::mt19937_64;

/// Row-major dense real matrix with at least one row and one column.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix rotation(double theta);  // 2x2, counterclockwise

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool all_finite() const;

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> entries() const { return data_; }

  Vector column(std::size_t j) const;
  Vector diag() const;
  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
/// max |a_ij - delta_ij|
double distance_to_identity(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol);

// LU with partial pivoting. `determinant` returns 0 for exactly singular
// input; `inverse` and `solve` throw std::domain_error on singular input.
double determinant(const Matrix& a);
Matrix inverse(const Matrix& a);
Vector solve(const Matrix& a, std::span<const double> b);

/// e^A. Diagonal inputs are exponentiated entrywise, symmetric inputs go
/// through sym_eigen, everything else uses scaling and squaring with a
/// [6/6] Pade approximant.
Matrix mat_exp(const Matrix& a);

struct SymEigen {
  Matrix q;  // orthogonal, columns are eigenvectors
  Vector d;  // non-increasing
};

/// Cyclic Jacobi eigensolver. Throws std::invalid_argument if `s` is not
/// symmetric to within 1e-10 relative to its largest entry.
SymEigen sym_eigen(const Matrix& s);

struct Svd {
  Matrix u;
  Vector sigma;  // non-increasing, non-negative
  Matrix vt;
};

/// One-sided Jacobi SVD of a square matrix.
Svd svd(const Matrix& g);

struct KakFactors {
  Matrix k;       // SO(n)
  Matrix a;       // positive diagonal, non-increasing, det 1
  Matrix k2;      // SO(n)
  Vector log_a;   // log of diag(a), an element of the Cartan subalgebra
};

/// g = k a k2 with k, k2 in SO(n). Requires |det g - 1| <= 1e-8.
KakFactors kak_decompose(const Matrix& g);

/// Haar-distributed element of SO(n): QR of a Gaussian matrix with the
/// sign of R's diagonal absorbed into Q, then the first column flipped if
/// det Q = -1.
Matrix sample_haar_rotation(int n, Rng& rng);

/// Independent stream for (seed, stream index).
Rng split_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace bohr
