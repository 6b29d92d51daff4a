#include "bohr/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bohr {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

Lu lu_factor(const Matrix& a) {
  const std::size_t n = a.rows();
  Lu out{a, std::vector<std::size_t>(n), 1, false};
  std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
  Matrix& m = out.lu;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
    if (m(p, c) == 0.0) {
      out.singular = true;
      continue;
    }
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      std::swap(out.perm[p], out.perm[c]);
      out.sign = -out.sign;
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      m(r, c) = f;
      for (std::size_t j = c + 1; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return out;
}

Vector lu_solve(const Lu& f, std::span<const double> b) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

double norm_one(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

bool is_diagonal(const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) != 0.0) return false;
  return true;
}

Matrix exp_pade(const Matrix& a) {
  const std::size_t n = a.rows();
  const double norm = norm_one(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = a * std::ldexp(1.0, -squarings);

  constexpr int q = 6;
  Matrix num = Matrix::identity(n);
  Matrix den = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double c = 1.0;
  for (int j = 1; j <= q; ++j) {
    c *= static_cast<double>(q - j + 1) / static_cast<double>(j * (2 * q - j + 1));
    power = power * x;
    num += power * c;
    den += power * ((j % 2 == 0) ? c : -c);
  }

  const Lu f = lu_factor(den);
  if (f.singular) throw std::domain_error("mat_exp: singular Pade denominator");
  Matrix result(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector col = lu_solve(f, num.column(j));
    for (std::size_t i = 0; i < n; ++i) result(i, j) = col[i];
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Gram-Schmidt (two passes) of column j of q against columns [0, j).
// Returns the norm before normalization.
double orthonormalize_column(Matrix& q, std::size_t j) {
  const std::size_t n = q.rows();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
    }
  }
  double nrm = 0.0;
  for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  return nrm;
}

}  // namespace

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: entry count does not match rows*cols");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()), cols_(0) {
  if (rows_ == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  cols_ = rows.begin()->size();
  if (cols_ == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Matrix{{c, -s}, {s, c}};
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vector Matrix::diag() const {
  Vector d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix +: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("Matrix -: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Matrix *: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("Matrix * vector: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.entries()) s += x * x;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double distance_to_identity(const Matrix& a) {
  require_square(a, "distance_to_identity");
  return max_abs_diff(a, Matrix::identity(a.rows()));
}

bool is_symmetric(const Matrix& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

double determinant(const Matrix& a) {
  require_square(a, "determinant");
  const Lu f = lu_factor(a);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

Matrix inverse(const Matrix& a) {
  require_square(a, "inverse");
  const Lu f = lu_factor(a);
  if (f.singular) throw std::domain_error("inverse: singular matrix");
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = lu_solve(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Vector solve(const Matrix& a, std::span<const double> b) {
  require_square(a, "solve");
  if (b.size() != a.rows()) throw std::invalid_argument("solve: dimension mismatch");
  const Lu f = lu_factor(a);
  if (f.singular) throw std::domain_error("solve: singular matrix");
  return lu_solve(f, b);
}

// ---------------------------------------------------------------- exp

Matrix mat_exp(const Matrix& a) {
  require_square(a, "mat_exp");
  require_finite(a, "mat_exp");
  const std::size_t n = a.rows();
  if (is_diagonal(a)) {
    Matrix e(n, n);
    for (std::size_t i = 0; i < n; ++i) e(i, i) = std::exp(a(i, i));
    return e;
  }
  if (is_symmetric(a, 0.0)) {
    const SymEigen eig = sym_eigen(a);
    Vector ed(n);
    for (std::size_t i = 0; i < n; ++i) ed[i] = std::exp(eig.d[i]);
    return eig.q * Matrix::diagonal(ed) * eig.q.transpose();
  }
  return exp_pade(a);
}

// ---------------------------------------------------------------- eigen

SymEigen sym_eigen(const Matrix& s) {
  require_square(s, "sym_eigen");
  require_finite(s, "sym_eigen");
  double scale = 0.0;
  for (double x : s.entries()) scale = std::max(scale, std::abs(x));
  if (!is_symmetric(s, 1e-10 * std::max(1.0, scale)))
    throw std::invalid_argument("sym_eigen: matrix is not symmetric");

  const std::size_t n = s.rows();
  Matrix a = s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
  Matrix q = Matrix::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off == 0.0) break;
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (std::abs(apr) <= 1e-300) continue;
        const double app = a(p, p), arr = a(r, r);
        if (std::abs(apr) <= 1e-17 * std::sqrt(std::abs(app * arr)) && sweep > 3) {
          a(p, r) = a(r, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (arr - app) / (2.0 * apr);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akr = a(k, r);
          a(k, p) = c * akp - sn * akr;
          a(k, r) = sn * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), ark = a(r, k);
          a(p, k) = c * apk - sn * ark;
          a(r, k) = sn * apk + c * ark;
        }
        a(p, r) = a(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p), qkr = q(k, r);
          q(k, p) = c * qkp - sn * qkr;
          q(k, r) = sn * qkp + c * qkr;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymEigen out{Matrix(n, n), Vector(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.d[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.q(i, j) = q(i, order[j]);
  }
  return out;
}

// ---------------------------------------------------------------- SVD

Svd svd(const Matrix& g) {
  require_square(g, "svd");
  require_finite(g, "svd");
  const std::size_t n = g.rows();
  Matrix w = g;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(n, n), Vector(n), Matrix(n, n)};
  double smax = sigma[order[0]];
  std::vector<std::size_t> null_cols;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) out.vt(j, i) = v(i, src);
    if (sigma[src] > 1e-300 && sigma[src] > 1e-15 * smax) {
      for (std::size_t i = 0; i < n; ++i) out.u(i, j) = w(i, src) / sigma[src];
    } else {
      null_cols.push_back(j);
    }
  }
  // Complete U with an orthonormal basis of the complement: for each missing
  // column pick the coordinate vector with the largest residual.
  std::vector<bool> filled(n, true);
  for (std::size_t j : null_cols) filled[j] = false;
  for (std::size_t j : null_cols) {
    double best_norm = -1.0;
    Vector best;
    for (std::size_t c = 0; c < n; ++c) {
      Vector e(n, 0.0);
      e[c] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < n; ++k) {
          if (!filled[k]) continue;
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += out.u(i, k) * e[i];
          for (std::size_t i = 0; i < n; ++i) e[i] -= proj * out.u(i, k);
        }
      const double nrm = norm2(e);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(e);
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.u(i, j) = best[i] / best_norm;
    filled[j] = true;
  }
  return out;
}

// ---------------------------------------------------------------- KAK

KakFactors kak_decompose(const Matrix& g) {
  require_square(g, "kak_decompose");
  require_finite(g, "kak_decompose");
  const double det = determinant(g);
  if (det == 0.0) throw std::domain_error("kak_decompose: singular input");
  if (std::abs(det - 1.0) > 1e-8)
    throw std::domain_error("kak_decompose: det g = " + std::to_string(det) + " is not 1");

  Svd s = svd(g);
  const std::size_t n = g.rows();
  if (determinant(s.u) < 0.0) {
    // det U = det Vt here since det g > 0; flip the last singular pair.
    for (std::size_t i = 0; i < n; ++i) s.u(i, n - 1) = -s.u(i, n - 1);
    for (std::size_t j = 0; j < n; ++j) s.vt(n - 1, j) = -s.vt(n - 1, j);
  }
  KakFactors out{std::move(s.u), Matrix::diagonal(s.sigma), std::move(s.vt), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) out.log_a[i] = std::log(s.sigma[i]);
  return out;
}

// ---------------------------------------------------------------- Haar

Matrix sample_haar_rotation(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_haar_rotation: n must be >= 2");
  const auto dim = static_cast<std::size_t>(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix q(dim, dim);
  for (;;) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) q(i, j) = normal(rng);
    // Gram-Schmidt leaves R with a positive diagonal, so Q is Haar on O(n).
    bool ok = true;
    for (std::size_t j = 0; j < dim && ok; ++j) ok = orthonormalize_column(q, j) > 1e-10;
    if (ok) break;
  }
  if (determinant(q) < 0.0)
    for (std::size_t i = 0; i < dim; ++i) q(i, 0) = -q(i, 0);
  return q;
}

Rng split_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace bohr
