#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "bohr/equidist.hpp"
#include "bohr/summing.hpp"

using namespace bohr;

namespace {

constexpr long double kPiL = std::numbers::pi_v<long double>;

// Distance on R / Z.
double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

// (1 / (2N + 1)) sum_{n=-N}^{N} e^{i theta n}, the Dirichlet kernel.
double dirichlet(long double theta, long n) {
  const long double s = std::sin(theta / 2);
  if (std::abs(s) < 1e-30L) return 1.0;
  return static_cast<double>(std::sin((2 * n + 1) * theta / 2) / ((2 * n + 1) * s));
}

// (1/N) sum_{j=1}^{N} e^{2 pi i m frac(scale * j^2 / 2)} in long double with exact j^2.
std::complex<double> quadratic_weyl_oracle(long double scale, long n, int m_quad, int m_lin, long double scale_lin) {
  long double re = 0.0L, im = 0.0L;
  for (long j = 1; j <= n; ++j) {
    const long double half_sq = static_cast<long double>(j) * j / 2;
    long double turns = m_quad * (scale * half_sq - std::floor(scale * half_sq));
    turns += m_lin * (scale_lin * j - std::floor(scale_lin * j));
    re += std::cos(2 * kPiL * turns);
    im += std::sin(2 * kPiL * turns);
  }
  return {static_cast<double>(re / n), static_cast<double>(im / n)};
}

PointCloud random_cloud(std::size_t dim, std::size_t n, double spread, Rng& rng) {
  std::uniform_real_distribution<double> u(-spread, spread);
  PointCloud c(dim);
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = u(rng);
    c.push_back(x);
  }
  return c;
}

}  // namespace

TEST_CASE("frac stays in [0, 1)") {
  CHECK(frac(0.25) == 0.25);
  CHECK(frac(-0.25) == 0.75);
  CHECK(frac(3.0) == 0.0);
  CHECK(frac(-3.0) == 0.0);
  CHECK(frac(-1e-20) < 1.0);
  CHECK(frac(-1e-20) >= 0.0);
}

TEST_CASE("torus quotient construction") {
  CHECK_THROWS_AS(TorusQuotient(Matrix{{1, 2}, {2, 4}}), std::domain_error);
  const TorusQuotient std2 = TorusQuotient::standard(2);
  CHECK(std2.reduce(Vector{1.25, -0.5}) == Vector{0.25, 0.5});
  const double scales[] = {2.0, 0.5};
  const TorusQuotient sc = TorusQuotient::scaled(scales);
  const Vector r = sc.reduce(Vector{3.0, 0.75});
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(0.5));
  const std::int64_t m[] = {1, 0};
  const Vector u = sc.character_frequency(m);
  CHECK(u[0] == doctest::Approx(std::numbers::pi));
  CHECK(u[1] == doctest::Approx(0.0));
}

TEST_CASE("property: reduction is a morphism modulo 1") {
  Rng rng(31);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (std::size_t d : {1u, 2u, 3u, 5u}) {
    const TorusQuotient q = random_lattice(d, 10.0, rng);
    CHECK(q.condition_number() <= 10.0 + 1e-9);
    for (int i = 0; i < 200; ++i) {
      Vector x(d), y(d), xy(d);
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = u(rng);
        y[k] = u(rng);
        xy[k] = x[k] + y[k];
      }
      const Vector rx = q.reduce(x), ry = q.reduce(y), rxy = q.reduce(xy);
      for (std::size_t k = 0; k < d; ++k) {
        CHECK(rxy[k] >= 0.0);
        CHECK(rxy[k] < 1.0);
        CHECK(circle_distance(rxy[k], frac(rx[k] + ry[k])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: character frequencies reproduce the torus characters") {
  Rng rng(32);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> mi(-3, 3);
  const TorusQuotient q = random_lattice(3, 5.0, rng);
  for (int i = 0; i < 200; ++i) {
    const Vector x{u(rng), u(rng), u(rng)};
    const std::int64_t m[] = {mi(rng), mi(rng), mi(rng)};
    const Vector freq = q.character_frequency(m);
    const Vector r = q.reduce(x);
    double turns = 0.0;
    for (std::size_t k = 0; k < 3; ++k) turns += static_cast<double>(m[k]) * r[k];
    CHECK(std::abs(std::polar(1.0, dot(freq, x)) - std::polar(1.0, 2 * std::numbers::pi * turns)) <= 1e-10);
  }
}

TEST_CASE("Weyl sums of j alpha match the geometric series") {
  const TorusQuotient q = TorusQuotient::standard(1);
  for (double alpha : {std::sqrt(2.0), std::numbers::pi, 0.5}) {
    PointCloud pts(1);
    const long n = 5000;
    for (long j = 1; j <= n; ++j) {
      const double x = static_cast<double>(j) * alpha;
      pts.push_back(std::span<const double>(&x, 1));
    }
    const PointCloud red = torus_reduce(pts, q);
    for (std::int64_t m : {1, 2, 5}) {
      const std::int64_t mm[] = {m};
      const WeylSumReport w = weyl_sum(red, mm);
      long double re = 0.0L, im = 0.0L;
      for (long j = 1; j <= n; ++j) {
        re += std::cos(2 * kPiL * m * j * static_cast<long double>(alpha));
        im += std::sin(2 * kPiL * m * j * static_cast<long double>(alpha));
      }
      const std::complex<double> ref(static_cast<double>(re / n), static_cast<double>(im / n));
      CHECK(std::abs(w.value - ref) <= 1e-9);
      CHECK(w.n_points == static_cast<std::size_t>(n));
      CHECK(w.modulus == doctest::Approx(std::abs(w.value)));
    }
  }
}

TEST_CASE("property: Weyl sums are invariant under relabeling and integer shifts") {
  Rng rng(33);
  std::uniform_int_distribution<int> num(0, 1 << 20);
  std::uniform_int_distribution<int> shift(-1000, 1000);
  for (int trial = 0; trial < 10; ++trial) {
    PointCloud pts(2);
    for (int i = 0; i < 500; ++i) {
      const double x[2] = {num(rng) / double(1 << 20), num(rng) / double(1 << 20)};
      pts.push_back(x);
    }
    PointCloud permuted(2), shifted(2);
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) permuted.push_back(pts.point(i));
    const double s[2] = {static_cast<double>(shift(rng)), static_cast<double>(shift(rng))};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double x[2] = {pts.point(i)[0] + s[0], pts.point(i)[1] + s[1]};
      shifted.push_back(x);
    }
    for (const std::vector<std::int64_t>& m : {std::vector<std::int64_t>{1, 0}, {2, -3}, {7, 5}}) {
      const WeylSumReport a = weyl_sum(pts, m);
      CHECK(weyl_sum(permuted, m).modulus == a.modulus);
      CHECK(weyl_sum(shifted, m).modulus == a.modulus);
    }
  }

  // Relabeling is exact for arbitrary (non-dyadic) points as well.
  const PointCloud cloud = random_cloud(3, 400, 10.0, rng);
  PointCloud reversed(3);
  for (std::size_t i = cloud.size(); i-- > 0;) reversed.push_back(cloud.point(i));
  const std::int64_t m[] = {1, 2, 3};
  CHECK(weyl_sum(cloud, m).value == weyl_sum(reversed, m).value);
}

TEST_CASE("property: weyl_sums does not depend on the worker count") {
  Rng rng(34);
  const PointCloud cloud = random_cloud(2, 3000, 1.0, rng);
  std::vector<std::vector<std::int64_t>> freqs;
  for (int a = -2; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) freqs.push_back({a, b});
  const auto one = weyl_sums(cloud, freqs, 1);
  for (int w : {2, 4, 16}) {
    const auto many = weyl_sums(cloud, freqs, w);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(many[i].value == one[i].value);
      CHECK(many[i].m == one[i].m);
    }
  }
}

TEST_CASE("argument reduction modulo 2 pi") {
  // Quad precision keeps about 1e-26 turns of accuracy at n = 1e7.
  const __float128 two_pi = 6.283185307179586476925286766559005768Q;
  const __float128 inv_two_pi = 0.159154943091895335768883763372514362Q;
  const auto frac_q = [](__float128 y) {
    __float128 r = y - static_cast<__float128>(static_cast<long long>(y));
    if (r < 0) r += 1;
    return static_cast<double>(r);
  };
  std::vector<std::int64_t> ns{0, 1, -1, 355, 1'000'000, -9'999'999, 10'000'000, 9'876'543};
  Rng rng(38);
  std::uniform_int_distribution<std::int64_t> pick(-10'000'000, 10'000'000);
  for (int i = 0; i < 2000; ++i) ns.push_back(pick(rng));
  for (std::int64_t n : ns) {
    CHECK(circle_distance(frac_over_two_pi(n), frac_q(static_cast<__float128>(n) * inv_two_pi)) <= 1e-12);
    CHECK(circle_distance(frac_two_pi_times(n), frac_q(static_cast<__float128>(n) * two_pi)) <= 1e-12);
  }
}

TEST_CASE("circle-pair experiment") {
  CHECK_THROWS_AS(remark1_experiment(99), std::invalid_argument);
  CHECK_THROWS_AS(remark1_experiment(10'000'001), std::invalid_argument);

  const long n = 100'000;
  const Remark1Report rep = remark1_experiment(n);
  CHECK(rep.n_points == static_cast<std::size_t>(2 * (2 * n + 1)));
  CHECK(rep.max_circle_deviation <= 1e-12);
  REQUIRE(rep.integer_circle.size() == 3);
  REQUIRE(rep.two_pi_circle.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const long j = static_cast<long>(i + 1);
    const double ref1 = dirichlet(static_cast<long double>(j), n);
    const double ref2 = dirichlet(4 * kPiL * kPiL * j, n);
    CHECK(std::abs(rep.integer_circle[i].empirical - std::complex<double>(ref1, 0.0)) <= 1e-9);
    CHECK(std::abs(rep.integer_circle[i].closed_form - std::complex<double>(ref1, 0.0)) <= 1e-9);
    CHECK(std::abs(rep.two_pi_circle[i].empirical - std::complex<double>(ref2, 0.0)) <= 1e-9);
    CHECK(rep.integer_circle[i].modulus < 0.01);
    CHECK(rep.two_pi_circle[i].modulus < 0.01);
  }
  // The joint frequency (1, 0) sees the trivial coordinate on the 2 pi Z half.
  REQUIRE(rep.joint.size() == 3);
  CHECK(std::abs(rep.joint[0].two_pi_part - 1.0) <= 1e-12);
  CHECK(std::abs(rep.joint[0].union_value) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(rep.joint[1].integer_part - 1.0) <= 1e-12);
  CHECK(rep.witness_average <= 1e-12);
  CHECK(rep.witness_haar == 1.0);
  CHECK(rep.verdict == "CLOSURE_IS_CIRCLE_PAIR");
}

TEST_CASE("nilpotent orbit examples") {
  const Matrix z{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  for (double t : {0.0, 1.5, -3.0, 1e4}) {
    const Vector w = nilpotent_orbit(z, Vector{0, 0, 1}, t);
    CHECK(w[0] == t * t / 2);
    CHECK(w[1] == t);
    CHECK(w[2] == 1.0);
  }
  CHECK_THROWS_AS(nilpotent_orbit(Matrix{{0, 1}, {1, 0}}, Vector{1, 0}, 1.0), std::domain_error);
  CHECK_THROWS_AS(nilpotent_orbit(z, Vector{1, 0}, 1.0), std::invalid_argument);

  // Compare against the matrix exponential for a random strictly upper-triangular generator.
  Rng rng(35);
  std::normal_distribution<double> g;
  Matrix y(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) y(i, j) = g(rng);
  const Vector v{0.3, -1, 2, 0.5};
  const Vector a = nilpotent_orbit(y, v, 0.7);
  const Vector b = mat_exp(0.7 * y) * v;
  for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("affine hull detection") {
  const Matrix z{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  PointCloud curve(3);
  for (int j = 1; j <= 256; ++j) curve.push_back(nilpotent_orbit(z, Vector{0, 0, 1}, j));
  const AffineHull plane = affine_hull(curve);
  CHECK(plane.dimension() == 2);
  REQUIRE(plane.normals.size() == 1);
  CHECK(std::abs(plane.normals[0][2]) == doctest::Approx(1.0));
  CHECK(plane.offsets[0] * plane.normals[0][2] == doctest::Approx(1.0));

  PointCloud line(3);
  for (int j = 0; j < 20; ++j) {
    const double x[3] = {1.0 + j, 2.0 - 2.0 * j, 5.0};
    line.push_back(x);
  }
  CHECK(affine_hull(line).dimension() == 1);

  PointCloud single(2);
  single.push_back(Vector{3, 4});
  CHECK(affine_hull(single).dimension() == 0);

  Rng rng(36);
  CHECK(affine_hull(random_cloud(4, 50, 1.0, rng)).dimension() == 4);
}

TEST_CASE("unipotent orbit in its affine hull") {
  UnipotentSpec spec;
  spec.z = Matrix{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  spec.v = Vector{0, 0, 1};
  spec.scaling = Vector{std::sqrt(2.0), std::sqrt(3.0)};
  spec.step = 1.0;
  spec.n = 100'000;
  spec.frequencies = {{1, 0}, {0, 1}, {1, 1}};
  const UnipotentReport rep = unipotent_orbit_experiment(spec);
  CHECK(rep.hull.dimension() == 2);
  CHECK(rep.moving == std::vector<std::size_t>{0, 1});
  REQUIRE(rep.sums.size() == 3);
  const long double s2 = std::sqrt(2.0L), s3 = std::sqrt(3.0L);
  const int mq[] = {1, 0, 1}, ml[] = {0, 1, 1};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.sums[i].modulus < kDenseThreshold);
    // Exact-j^2 long double sum; t^2 / 2 reaches 5e9 at N = 1e5.
    const std::complex<double> ref = quadratic_weyl_oracle(s2, spec.n, mq[i], ml[i], s3);
    CHECK(std::abs(rep.sums[i].value - ref) <= 1e-3);
  }
  CHECK(rep.verdict == "DENSE_IN_HULL");

  // Oracle at ten times the length.
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(quadratic_weyl_oracle(s2, 10 * spec.n, mq[i], ml[i], s3)) < kDenseThreshold);

  spec.scaling = Vector{2.0, 3.0};
  spec.frequencies = {{1, 0}};
  CHECK(unipotent_orbit_experiment(spec).verdict == "NOT_DENSE");

  spec.frequencies.assign(kMaxFrequencies + 1, {1, 0});
  CHECK_THROWS_AS(unipotent_orbit_experiment(spec), std::invalid_argument);
}

TEST_CASE("property: orbit measures equidistribute in a random torus quotient") {
  // Weyl sums of the reduced mu_T averages are Fourier coefficients of mu_T at
  // the character frequencies 2 pi B^{-T} m.
  Rng rng(37);
  const TorusQuotient q = random_lattice(2, 4.0, rng);
  const Representation rep = build_representation(GroupRepSpec::sl2_sym(1));
  const OrbitMeasureParams params{rep, Vector{1, 0}, rep.weight_system().h, 80.0, 64, 16000, 0, SamplingMode::quadrature};
  for (const std::vector<std::int64_t>& m : {std::vector<std::int64_t>{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}}) {
    const Vector freq = q.character_frequency(m);
    const FourierEstimate est = fourier_estimate(params, freq);
    CAPTURE(m[0]);
    CAPTURE(m[1]);
    CHECK(std::abs(est.value) < 0.1);
  }
}
