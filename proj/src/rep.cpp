#include "bohr/rep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bohr {

namespace {

constexpr double kWeightTol = 1e-9;

// Coefficients (in powers of y) of the product of two polynomials.
Vector poly_mul(const Vector& p, const Vector& q) {
  Vector r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

Vector poly_pow(const Vector& p, int e) {
  Vector r{1.0};
  for (int i = 0; i < e; ++i) r = poly_mul(r, p);
  return r;
}

void require_dim(std::span<const double> x, std::size_t d, const char* what) {
  if (x.size() != d)
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                                std::to_string(x.size()));
}

bool is_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

Vector default_h(int n) {
  Vector diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = n - 1 - 2 * i;
  return cartan_coords(diag);
}

Matrix plane_rotation(int n, int p, int q, double theta) {
  Matrix r = Matrix::identity(static_cast<std::size_t>(n));
  const auto pp = static_cast<std::size_t>(p), qq = static_cast<std::size_t>(q);
  r(pp, pp) = std::cos(theta);
  r(qq, qq) = std::cos(theta);
  r(pp, qq) = -std::sin(theta);
  r(qq, pp) = std::sin(theta);
  return r;
}

Matrix cartan_exp(int n, std::size_t j, double s) {
  Vector d(static_cast<std::size_t>(n), 0.0);
  d[j] = s;
  d[j + 1] = -s;
  return mat_exp(Matrix::diagonal(d));
}

// Deterministic list of group elements used to generate spans in
// translate_expansion. Starts with the identity.
std::vector<Matrix> span_candidates(int n) {
  std::vector<Matrix> out{Matrix::identity(static_cast<std::size_t>(n))};
  const double pi = std::numbers::pi;
  for (double angle : {pi / 2, pi / 3, pi / 5, 2 * pi / 7, 3 * pi / 11})
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) out.push_back(plane_rotation(n, p, q, angle));
  for (double s : {0.5, -0.5, 1.0, -1.0})
    for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(n); ++j) out.push_back(cartan_exp(n, j, s));
  for (double s : {0.7, -0.3})
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(n); ++j)
          out.push_back(plane_rotation(n, p, q, pi / 5) * cartan_exp(n, j, s));
  return out;
}

// Greedily picks candidates whose images extend the span. Returns indices.
std::vector<std::size_t> spanning_subset(const std::vector<Vector>& images, std::size_t d) {
  std::vector<Vector> basis;
  std::vector<std::size_t> picked;
  for (std::size_t c = 0; c < images.size() && basis.size() < d; ++c) {
    Vector w = images[c];
    const double scale = norm2(w);
    if (scale == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) {
        const double p = dot(b, w);
        for (std::size_t i = 0; i < d; ++i) w[i] -= p * b[i];
      }
    const double r = norm2(w);
    if (r > 1e-6 * scale) {
      for (double& x : w) x /= r;
      basis.push_back(std::move(w));
      picked.push_back(c);
    }
  }
  if (basis.size() < d) throw std::runtime_error("translate_expansion: orbit does not span within the search budget");
  return picked;
}

}  // namespace

void GroupRepSpec::validate() const {
  if (family == Family::sl2_sym && level < 1)
    throw std::invalid_argument("sl2_sym: level k must be >= 1 (k = 0 is the trivial module)");
  if (family == Family::sln_standard && level < 2) throw std::invalid_argument("sln_standard: n must be >= 2");
  if (group_dim() > 12) throw std::invalid_argument("group dimension above 12 is not supported");
}

double pairing(std::span<const double> weight, std::span<const double> h) { return dot(weight, h); }

Vector cartan_diagonal(std::span<const double> h) {
  const std::size_t n = h.size() + 1;
  Vector d(n, 0.0);
  for (std::size_t j = 0; j < h.size(); ++j) {
    d[j] += h[j];
    d[j + 1] -= h[j];
  }
  return d;
}

Vector cartan_coords(std::span<const double> diagonal) {
  if (diagonal.size() < 2) throw std::invalid_argument("cartan_coords: need at least 2 diagonal entries");
  double trace = 0.0, scale = 0.0;
  for (double x : diagonal) {
    trace += x;
    scale = std::max(scale, std::abs(x));
  }
  if (std::abs(trace) > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("cartan_coords: diagonal is not traceless");
  Vector c(diagonal.size() - 1);
  double run = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = (run += diagonal[j]);
  return c;
}

// ---------------------------------------------------------------- actions

Matrix Representation::act(const Matrix& g) const {
  const auto n = static_cast<std::size_t>(spec_.group_dim());
  if (g.rows() != n || g.cols() != n)
    throw std::invalid_argument("act: expected a " + std::to_string(n) + "x" + std::to_string(n) + " group element");
  if (spec_.family == Family::sln_standard) return g;

  const int k = spec_.level;
  const Vector img_x{g(0, 0), g(1, 0)};  // g.x = a x + c y
  const Vector img_y{g(0, 1), g(1, 1)};  // g.y = b x + d y
  const auto d = static_cast<std::size_t>(k + 1);
  Matrix rho(d, d);
  for (int i = 0; i <= k; ++i) {
    const Vector col = poly_mul(poly_pow(img_x, k - i), poly_pow(img_y, i));
    for (std::size_t r = 0; r < d; ++r) rho(r, static_cast<std::size_t>(i)) = col[r];
  }
  return rho;
}

Matrix Representation::act_dual(const Matrix& g) const { return inverse(act(g)).transpose(); }

Matrix Representation::differential(const Matrix& x) const {
  const auto n = static_cast<std::size_t>(spec_.group_dim());
  if (x.rows() != n || x.cols() != n) throw std::invalid_argument("differential: shape mismatch");
  if (spec_.family == Family::sln_standard) return x;

  const int k = spec_.level;
  const auto d = static_cast<std::size_t>(k + 1);
  Matrix dr(d, d);
  for (int i = 0; i <= k; ++i) {
    const auto c = static_cast<std::size_t>(i);
    dr(c, c) = (k - i) * x(0, 0) + i * x(1, 1);
    if (i < k) dr(c + 1, c) = (k - i) * x(1, 0);
    if (i > 0) dr(c - 1, c) = i * x(0, 1);
  }
  return dr;
}

Matrix Representation::flow(double t) const {
  Vector d = cartan_diagonal(weights_.h);
  for (double& x : d) x *= t;
  return act(mat_exp(Matrix::diagonal(d)));
}

// ---------------------------------------------------------------- weights

WeightSystem weight_decomposition(const Representation& rep) {
  const int n = rep.spec().group_dim();
  const std::size_t d = rep.dim();
  WeightSystem ws;
  std::vector<Matrix> actions;
  for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(n); ++j) {
    Vector diag(static_cast<std::size_t>(n), 0.0);
    diag[j] = 1.0;
    diag[j + 1] = -1.0;
    ws.cartan_basis.push_back(Matrix::diagonal(diag));
    actions.push_back(rep.differential(ws.cartan_basis.back()));
  }
  for (const Matrix& a : actions)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (r != c && std::abs(a(r, c)) > 1e-12)
          throw std::runtime_error("weight_decomposition: Cartan basis does not act diagonally");

  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < d; ++i) {
    Vector w(actions.size());
    for (std::size_t j = 0; j < actions.size(); ++j) w[j] = actions[j](i, i);
    auto same = [&](const Vector& other) {
      for (std::size_t j = 0; j < w.size(); ++j)
        if (std::abs(w[j] - other[j]) > kWeightTol) return false;
      return true;
    };
    auto it = std::find_if(ws.weights.begin(), ws.weights.end(), same);
    if (it == ws.weights.end()) {
      ws.weights.push_back(std::move(w));
      blocks.push_back({i});
    } else {
      blocks[static_cast<std::size_t>(it - ws.weights.begin())].push_back(i);
    }
  }
  for (const auto& block : blocks) {
    Matrix e(d, d);
    for (std::size_t i : block) e(i, i) = 1.0;
    ws.projectors.push_back(std::move(e));
  }
  return ws;
}

bool is_generic(std::span<const Vector> weights, std::span<const double> h, double margin) {
  const Vector diag = cartan_diagonal(h);
  for (std::size_t i = 0; i + 1 < diag.size(); ++i)
    if (diag[i] - diag[i + 1] < margin) return false;
  for (std::size_t a = 0; a < weights.size(); ++a)
    for (std::size_t b = a + 1; b < weights.size(); ++b)
      if (std::abs(pairing(weights[a], h) - pairing(weights[b], h)) < margin) return false;
  return true;
}

Vector choose_generic_h(int group_dim, std::span<const Vector> weights, std::optional<Vector> candidate) {
  if (group_dim < 2) throw std::invalid_argument("choose_generic_h: group_dim must be >= 2");
  const Vector base = default_h(group_dim);
  const Vector start = candidate.value_or(base);
  require_dim(start, base.size(), "choose_generic_h");
  for (const Vector& w : weights) require_dim(w, base.size(), "choose_generic_h weight");
  if (is_generic(weights, start)) return start;
  for (int m = 0; m <= 60; ++m) {
    Vector h = start;
    const double step = std::ldexp(1.0, -m);
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += step * base[j];
    if (is_generic(weights, h)) return h;
  }
  throw std::runtime_error("choose_generic_h: no generic element found after bounded perturbation");
}

Representation build_representation(GroupRepSpec spec) {
  spec.validate();
  Representation rep(spec);
  rep.weights_ = weight_decomposition(rep);
  rep.weights_.h = choose_generic_h(spec.group_dim(), rep.weights_.weights);
  return rep;
}

// ---------------------------------------------------------------- coefficients

double matrix_coefficient(const Representation& rep, std::span<const double> u, std::span<const double> v,
                          const Matrix& g) {
  require_dim(u, rep.dim(), "matrix_coefficient u");
  require_dim(v, rep.dim(), "matrix_coefficient v");
  return dot(u, rep.act(g) * v);
}

double TranslateExpansion::evaluate(const Representation& rep, std::span<const double> u,
                                    std::span<const double> v, const Matrix& g) const {
  double s = 0.0;
  for (const TranslateTerm& t : terms)
    s += t.coefficient * matrix_coefficient(rep, u, v, inverse(t.left) * g * t.right);
  return s;
}

TranslateExpansion translate_expansion(const Representation& rep, std::span<const double> u,
                                       std::span<const double> v, std::span<const double> x,
                                       std::span<const double> y) {
  const std::size_t d = rep.dim();
  require_dim(u, d, "translate_expansion u");
  require_dim(v, d, "translate_expansion v");
  require_dim(x, d, "translate_expansion x");
  require_dim(y, d, "translate_expansion y");
  if (is_zero(u) || is_zero(v)) throw std::invalid_argument("translate_expansion: u and v must be nonzero (cyclic)");

  const int n = rep.spec().group_dim();
  const std::vector<Matrix> candidates = span_candidates(n);
  std::vector<Vector> left_images, right_images;
  for (const Matrix& g : candidates) {
    left_images.push_back(rep.act_dual(g) * u);
    right_images.push_back(rep.act(g) * v);
  }
  const auto left = spanning_subset(left_images, d);
  const auto right = spanning_subset(right_images, d);

  Matrix wl(d, d), wr(d, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r) {
      wl(r, c) = left_images[left[c]][r];
      wr(r, c) = right_images[right[c]][r];
    }
  const Vector alpha = solve(wl, x);
  const Vector beta = solve(wr, y);

  double biggest = 0.0;
  for (double a : alpha)
    for (double b : beta) biggest = std::max(biggest, std::abs(a * b));

  TranslateExpansion out{{}, 0.0};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = alpha[i] * beta[j];
      if (std::abs(c) <= 1e-13 * biggest || c == 0.0) continue;
      out.terms.push_back({c, candidates[left[i]], candidates[right[j]]});
    }

  Rng rng = split_rng(0x7a11a7e5, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix g = random_sl(n, 0.5, rng);
    const double target = matrix_coefficient(rep, x, y, g);
    out.max_residual = std::max(out.max_residual, std::abs(target - out.evaluate(rep, u, v, g)));
  }
  if (!(out.max_residual <= 1e-8))
    throw std::runtime_error("translate_expansion: certification residual " + std::to_string(out.max_residual) +
                             " exceeds 1e-8");
  return out;
}

Matrix random_sl(int n, double spread, Rng& rng) {
  std::uniform_real_distribution<double> unif(-spread, spread);
  Vector log_a(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (double& x : log_a) mean += (x = unif(rng));
  mean /= n;
  for (double& x : log_a) x -= mean;
  const Matrix k = sample_haar_rotation(n, rng);
  const Matrix k2 = sample_haar_rotation(n, rng);
  return k * mat_exp(Matrix::diagonal(log_a)) * k2;
}

Vector weight_coefficients(const Representation& rep, std::span<const double> u, std::span<const double> v,
                           const Matrix& k, const Matrix& k2) {
  require_dim(u, rep.dim(), "weight_coefficients u");
  require_dim(v, rep.dim(), "weight_coefficients v");
  const Vector left = rep.act(k).transpose() * u;
  const Vector right = rep.act(k2) * v;
  const auto& projectors = rep.weight_system().projectors;
  Vector f(projectors.size());
  for (std::size_t l = 0; l < projectors.size(); ++l) f[l] = dot(left, projectors[l] * right);
  return f;
}

std::vector<bool> nonvanishing_weights(const Representation& rep, std::span<const double> u,
                                       std::span<const double> v, double cutoff) {
  const int n = rep.spec().group_dim();
  const std::size_t count = rep.weight_system().weights.size();
  std::vector<bool> seen(count, false);
  auto record = [&](const Matrix& k, const Matrix& k2) {
    const Vector f = weight_coefficients(rep, u, v, k, k2);
    for (std::size_t l = 0; l < count; ++l)
      if (std::abs(f[l]) > cutoff) seen[l] = true;
  };
  constexpr int grid = 32;
  const double step = 2.0 * std::numbers::pi / grid;
  if (n == 2) {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) record(Matrix::rotation(i * step), Matrix::rotation(j * step));
    return seen;
  }
  const auto dim = static_cast<std::size_t>(n);
  Matrix x(dim, dim), y(dim, dim);
  for (std::size_t p = 0; p < dim; ++p)
    for (std::size_t q = p + 1; q < dim; ++q) {
      x(p, q) = 0.37 * static_cast<double>(p + 1) + 0.11 * static_cast<double>(q * q + 1);
      y(p, q) = 0.23 * static_cast<double>(q + 1) - 0.17 * static_cast<double>(p * p + 1);
      x(q, p) = -x(p, q);
      y(q, p) = -y(p, q);
    }
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) record(mat_exp(x * (i * step)), mat_exp(y * (j * step)));
  Rng rng = split_rng(0x6e0d, 0);
  for (int s = 0; s < 1024; ++s) {
    const Matrix k = sample_haar_rotation(n, rng);
    record(k, sample_haar_rotation(n, rng));
  }
  return seen;
}

}  // namespace bohr
