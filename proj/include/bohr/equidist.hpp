#pragma once

// Compact torus quotients V / Lambda, Weyl sums of reduced point sets,
// the Z u 2piZ circle-pair example and polynomial (unipotent) orbits.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohr/matcore.hpp"

namespace bohr {

/// Row-major cloud of `dim`-dimensional points.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim) : dim_(dim) {}
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }
  void push_back(std::span<const double> x);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// x - floor(x), mapped into [0, 1).
double frac(double x);

/// V / Lambda where the columns of lattice_basis span Lambda.
class TorusQuotient {
 public:
  explicit TorusQuotient(Matrix lattice_basis);

  static TorusQuotient standard(std::size_t d);
  /// Lambda = diag(scales) Z^d.
  static TorusQuotient scaled(std::span<const double> scales);

  std::size_t dim() const { return basis_.rows(); }
  const Matrix& lattice_basis() const { return basis_; }
  const Matrix& reduction() const { return inverse_; }
  double condition_number() const { return condition_; }

  /// frac(B^{-1} x) coordinatewise.
  Vector reduce(std::span<const double> x) const;

  /// Frequency u in V* with e^{i<u, x>} = e^{2 pi i <m, B^{-1} x>}, i.e. 2 pi B^{-T} m.
  Vector character_frequency(std::span<const std::int64_t> m) const;

 private:
  Matrix basis_;
  Matrix inverse_;
  double condition_;
};

PointCloud torus_reduce(const PointCloud& points, const TorusQuotient& q);

/// Random lattice basis with condition number at most max_condition.
TorusQuotient random_lattice(std::size_t d, double max_condition, Rng& rng);

struct WeylSumReport {
  std::vector<std::int64_t> m;
  std::size_t n_points = 0;
  std::complex<double> value;
  double modulus = 0.0;
};

/// (1/N) sum_j e^{2 pi i <m, x_j>} over reduced points. The angles are
/// reduced mod 1 and sorted before summation, so the result does not
/// depend on the order of the points or on integer shifts of dyadic points.
WeylSumReport weyl_sum(const PointCloud& reduced, std::span<const std::int64_t> m);

/// One report per frequency, computed on up to `workers` threads.
std::vector<WeylSumReport> weyl_sums(const PointCloud& reduced, std::span<const std::vector<std::int64_t>> frequencies,
                                     int workers = 1);

// ---------------------------------------------------------------- circle pair

/// frac(n / (2 pi)) and frac(2 pi n) through double-double products.
double frac_over_two_pi(std::int64_t n);
double frac_two_pi_times(std::int64_t n);

struct CircleSum {
  std::int64_t frequency;
  std::complex<double> empirical;
  std::complex<double> closed_form;
  double modulus;
};

struct JointSum {
  std::vector<std::int64_t> m;
  std::complex<double> integer_part;
  std::complex<double> two_pi_part;
  std::complex<double> union_value;
};

struct Remark1Report {
  std::int64_t n = 0;
  std::size_t n_points = 0;
  /// Largest |z2 - 1| on the Z part and |z1 - 1| on the 2piZ part.
  double max_circle_deviation = 0.0;
  std::vector<CircleSum> integer_circle;  // first circle, Z part
  std::vector<CircleSum> two_pi_circle;   // second circle, 2piZ part
  std::vector<JointSum> joint;
  /// Average of (1 - z1)(1 - z2) over the union; its Haar average is 1.
  double witness_average = 0.0;
  double witness_haar = 1.0;
  std::string verdict;
};

/// Images (e^{iv}, e^{2 pi i v}) of {-N..N} u 2pi{-N..N}.
/// Throws std::invalid_argument for N < 100.
Remark1Report remark1_experiment(std::int64_t n);

// ---------------------------------------------------------------- unipotent orbits

/// exp(tZ) v by the terminating series. Throws std::domain_error unless Z is nilpotent.
Vector nilpotent_orbit(const Matrix& z, std::span<const double> v, double t);

struct AffineHull {
  Vector base;                      // centroid of the samples
  std::vector<Vector> directions;   // orthonormal
  std::vector<Vector> normals;      // orthonormal complement
  std::vector<double> offsets;      // <normal, x> = offset on the hull
  std::size_t dimension() const { return directions.size(); }
};

/// Hull of a sample set from the SVD of the centered samples; singular
/// values below rel_tol * max are treated as zero.
AffineHull affine_hull(const PointCloud& samples, double rel_tol = 1e-9);

struct UnipotentSpec {
  Matrix z = Matrix::identity(1);
  Vector v;
  Vector scaling;   // one scale per moving coordinate
  double step = 1.0;
  std::int64_t n = 100000;
  std::vector<std::vector<std::int64_t>> frequencies;
};

inline constexpr double kDenseThreshold = 0.1;
inline constexpr std::size_t kMaxFrequencies = 10;

struct UnipotentReport {
  AffineHull hull;
  std::vector<std::size_t> moving;  // coordinates not constant on the hull
  std::vector<WeylSumReport> sums;
  std::string verdict;              // DENSE_IN_HULL or NOT_DENSE
};

/// Samples t = j * step, j = 1..N, reduces the moving coordinates x_i to
/// frac(scaling_i * x_i) and takes Weyl sums at the given frequencies.
UnipotentReport unipotent_orbit_experiment(const UnipotentSpec& spec, int workers = 1);

}  // namespace bohr
