#include "bohr/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "bohr/equidist.hpp"
#include "bohr/matcore.hpp"
#include "bohr/rep.hpp"
#include "bohr/summing.hpp"
#include "bohr/vdc.hpp"

namespace bohr {

namespace {

using K = ParamKind;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

// Reads parameters of one command, applying defaults and range checks,
// and records the effective values for the report.
class Params {
 public:
  Params(const std::string& command, const Json& in) : command_(command), in_(in), out_(Json::object()) {
    if (!in_.is_object()) bad("parameters must be a JSON object");
    const auto& known = command_params(command);
    for (auto it = in_.begin(); it != in_.end(); ++it) {
      const bool ok = std::any_of(known.begin(), known.end(), [&](const ParamInfo& p) { return p.key == it.key(); });
      if (!ok) bad("unknown parameter '" + it.key() + "' for command " + command);
    }
  }

  bool has(const std::string& key) const { return in_.contains(key) && !in_[key].is_null(); }

  std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    std::int64_t v = def;
    if (has(key)) v = as_integer(key, in_[key]);
    if (v < lo || v > hi) bad(key + " = " + std::to_string(v) + " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out_[key] = v;
    return v;
  }

  std::uint64_t seed(const std::string& key) {
    std::uint64_t v = 0;
    if (has(key)) {
      const Json& j = in_[key];
      if (j.is_number_unsigned()) v = j.get<std::uint64_t>();
      else if (j.is_number_integer() && j.get<std::int64_t>() >= 0) v = static_cast<std::uint64_t>(j.get<std::int64_t>());
      else bad(key + " must be a non-negative integer");
    }
    out_[key] = v;
    return v;
  }

  double real(const std::string& key, std::optional<double> def, double lo, double hi) {
    if (!has(key) && !def) bad("missing required parameter " + key);
    const double v = has(key) ? as_real(key, in_[key]) : *def;
    if (!(v >= lo && v <= hi)) bad(key + " = " + format_double(v) + " is outside [" + format_double(lo) + ", " + format_double(hi) + "]");
    out_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    std::string v = def;
    if (has(key)) {
      if (!in_[key].is_string()) bad(key + " must be a string");
      v = in_[key].get<std::string>();
    }
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return v == a; })) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      bad(key + " must be one of: " + list);
    }
    out_[key] = v;
    return v;
  }

  Vector reals(const std::string& key, std::optional<Vector> def, std::size_t min_len, std::size_t max_len) {
    if (!has(key) && !def) bad("missing required parameter " + key);
    Vector v;
    if (has(key)) {
      const Json& j = in_[key];
      if (!j.is_array()) bad(key + " must be a list of numbers");
      for (const Json& x : j) v.push_back(as_real(key, x));
    } else {
      v = *def;
    }
    if (v.size() < min_len || v.size() > max_len)
      bad(key + " must have between " + std::to_string(min_len) + " and " + std::to_string(max_len) + " entries");
    out_[key] = v;
    return v;
  }

  std::vector<Vector> real_rows(const std::string& key, std::optional<std::vector<Vector>> def) {
    if (!has(key) && !def) bad("missing required parameter " + key);
    std::vector<Vector> rows;
    if (has(key)) {
      const Json& j = in_[key];
      if (!j.is_array()) bad(key + " must be a list of rows");
      for (const Json& r : j) {
        if (!r.is_array()) bad(key + " must be a list of rows");
        Vector row;
        for (const Json& x : r) row.push_back(as_real(key, x));
        rows.push_back(std::move(row));
      }
    } else {
      rows = *def;
    }
    out_[key] = rows;
    return rows;
  }

  std::vector<std::vector<std::int64_t>> integer_rows(const std::string& key,
                                                      std::optional<std::vector<std::vector<std::int64_t>>> def) {
    if (!has(key) && !def) bad("missing required parameter " + key);
    std::vector<std::vector<std::int64_t>> rows;
    if (has(key)) {
      const Json& j = in_[key];
      if (!j.is_array()) bad(key + " must be a list of integer rows");
      for (const Json& r : j) {
        if (!r.is_array()) bad(key + " must be a list of integer rows");
        std::vector<std::int64_t> row;
        for (const Json& x : r) row.push_back(as_integer(key, x));
        rows.push_back(std::move(row));
      }
    } else {
      rows = *def;
    }
    out_[key] = rows;
    return rows;
  }

  void forbid(const std::string& key, const std::string& why) {
    if (has(key)) bad(key + " " + why);
  }

  const Json& effective() const { return out_; }

 private:
  static std::int64_t as_integer(const std::string& key, const Json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
      const double d = j.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    bad(key + " must be an integer");
  }
  static double as_real(const std::string& key, const Json& j) {
    if (!j.is_number()) bad(key + " must be numeric");
    const double d = j.get<double>();
    if (!std::isfinite(d)) bad(key + " must be finite");
    return d;
  }

  std::string command_;
  const Json& in_;
  Json out_;
};

Matrix rows_to_matrix(const std::string& key, const std::vector<Vector>& rows) {
  if (rows.empty()) bad(key + " must have at least one row");
  for (const Vector& r : rows)
    if (r.size() != rows.size()) bad(key + " must be a square matrix");
  Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

bool all_zero(std::span<const std::int64_t> m) {
  return std::all_of(m.begin(), m.end(), [](std::int64_t x) { return x == 0; });
}

std::string join_m(std::span<const std::int64_t> m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? ";" : "") + std::to_string(m[i]);
  return s;
}

Json weyl_json(const WeylSumReport& w) {
  return {{"m", w.m}, {"n_points", w.n_points}, {"re", w.value.real()}, {"im", w.value.imag()}, {"modulus", w.modulus}};
}

std::string weyl_csv(const std::vector<WeylSumReport>& sums) {
  std::string csv = csv_record({"m", "n_points", "re", "im", "modulus"});
  for (const auto& w : sums)
    csv += csv_record({join_m(w.m), std::to_string(w.n_points), format_double(w.value.real()),
                       format_double(w.value.imag()), format_double(w.modulus)});
  return csv;
}

struct Outcome {
  Json result;
  std::string csv;
  std::string verdict;
  int exit_code = 0;
  std::string message;
};

// ---------------------------------------------------------------- sweep

Outcome run_sweep(Params& p, int workers) {
  const std::string family = p.text("family", "sl2-sym", {"sl2-sym", "sln-standard"});
  GroupRepSpec gs{};
  if (family == "sl2-sym") {
    p.forbid("n", "applies to --family sln-standard only");
    gs = GroupRepSpec::sl2_sym(static_cast<int>(p.integer("k", 1, 1, 8)));
  } else {
    p.forbid("k", "applies to --family sl2-sym only");
    gs = GroupRepSpec::sln_standard(static_cast<int>(p.integer("n", 2, 2, 6)));
  }
  const Representation rep = build_representation(gs);
  const std::size_t d = rep.dim();
  Vector e0(d, 0.0);
  e0[0] = 1.0;
  const Vector v = p.reals("v", e0, d, d);
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) bad("v must be nonzero");
  const Vector u = p.reals("u", std::nullopt, d, d);
  Vector h = rep.weight_system().h;
  if (p.has("h")) {
    const Vector cand = p.reals("h", std::nullopt, h.size(), h.size());
    h = choose_generic_h(gs.group_dim(), rep.weight_system().weights, cand);
  }
  const Vector schedule = p.reals("schedule", Vector{5, 10, 20, 40, 80}, 1, 32);
  for (double t : schedule)
    if (!(t > 0.0 && t <= 200.0)) bad("schedule entries must lie in (0, 200]");
  SweepBudget budget;
  budget.mode = p.text("mode", gs.group_dim() == 2 ? "quadrature" : "montecarlo", {"quadrature", "montecarlo"}) == "quadrature"
                    ? SamplingMode::quadrature
                    : SamplingMode::monte_carlo;
  if (budget.mode == SamplingMode::quadrature && gs.group_dim() != 2)
    bad("mode quadrature needs a group of rank one (SL2); use --mode montecarlo");
  budget.n_k = static_cast<int>(p.integer("n_k", 64, 1, 1024));
  budget.nodes_per_unit_time = p.real("nodes_per_unit_time", 200.0, 1e-3, 1e4);
  budget.seed = p.seed("seed");
  budget.workers = workers;

  const ConvergenceReport r = convergence_sweep(rep, v, h, u, schedule, budget);
  Outcome o;
  Json est = Json::array();
  o.csv = csv_record({"T", "re", "im", "modulus", "std_error"});
  for (const FourierEstimate& e : r.estimates) {
    Json row = {{"T", e.horizon},        {"re", e.value.real()},    {"im", e.value.imag()},
                {"modulus", std::abs(e.value)}, {"std_error", e.std_error}, {"n_points", e.n_points}};
    row["quadrature_error"] = e.quadrature_error ? Json(*e.quadrature_error) : Json(nullptr);
    est.push_back(row);
    o.csv += csv_record({format_double(e.horizon), format_double(e.value.real()), format_double(e.value.imag()),
                         format_double(std::abs(e.value)), format_double(e.std_error)});
  }
  o.verdict = to_string(r.verdict);
  o.result = {{"estimates", est},  {"verdict", o.verdict},         {"fitted_rate", r.fitted_rate},
              {"control", r.control}, {"h", h}, {"mode", to_string(budget.mode)}};
  if (r.control) {
    o.exit_code = 2;
    o.message = "u = 0 is the control case: the Fourier transform at 0 is 1 for every T (modulus 1 expected), so no decay is tested";
  } else if (r.verdict != Verdict::decays) {
    o.exit_code = 2;
    o.message = std::string("sweep verdict ") + o.verdict + ": decay below 0.1 was not established on this schedule";
  }
  return o;
}

// ---------------------------------------------------------------- vdc

Json certificate_json(const VdcCertificate& c) {
  return {{"a", c.a},
          {"b", c.b},
          {"monotone_ok", c.monotone_ok},
          {"magnitude_ok", c.magnitude_ok},
          {"re", c.integral.real()},
          {"im", c.integral.imag()},
          {"modulus", c.modulus},
          {"bound_3_ok", c.bound_3_ok},
          {"bound_2_ok", c.bound_2_ok},
          {"quadrature_error", c.quadrature_error},
          {"status", to_string(c.status)}};
}

Outcome run_vdc(Params& p) {
  const std::string kind = p.text("phase", "linear", {"linear", "quadratic", "exp", "random"});
  std::vector<VdcCertificate> certs;
  Json phases = Json::array();
  if (kind == "random") {
    const auto count = p.integer("count", 1000, 1, 100000);
    const std::uint64_t seed = p.seed("seed");
    for (std::int64_t i = 0; i < count; ++i) {
      Rng rng = split_rng(seed, static_cast<std::uint64_t>(i));
      const TwoTermPhase ph = random_two_term_phase(rng);
      certs.push_back(vdc_certify(ph.fn()));
      phases.push_back({{"coefficients", {ph.first.coefficient, ph.second.coefficient}},
                        {"rates", {ph.first.rate, ph.second.rate}}});
    }
  } else {
    const double a = p.real("a", 0.0, -1e6, 1e6);
    const double b = p.real("b", std::numbers::pi, -1e6, 1e6);
    if (!(a < b)) bad("need a < b");
    PhaseFn f;
    if (kind == "linear") {
      f = PhaseFn::linear(p.real("slope", 1.0, -1e8, 1e8), p.real("intercept", 0.0, -1e8, 1e8), a, b);
    } else if (kind == "quadratic") {
      f = PhaseFn::quadratic(p.real("c", 1.0, -1e8, 1e8), a, b);
    } else {
      const Vector c = p.reals("coefficients", std::nullopt, 1, 16);
      const Vector r = p.reals("rates", std::nullopt, 1, 16);
      if (c.size() != r.size()) bad("coefficients and rates must have the same length");
      std::vector<ExpTerm> terms;
      for (std::size_t i = 0; i < c.size(); ++i) terms.push_back({c[i], r[i]});
      f = PhaseFn::exp_sum(terms, a, b);
    }
    certs.push_back(vdc_certify(f));
  }

  Outcome o;
  Json list = Json::array();
  o.csv = csv_record({"a", "b", "monotone_ok", "magnitude_ok", "re", "im", "modulus", "bound_3_ok", "bound_2_ok",
                      "quadrature_error", "status"});
  std::size_t unverified = 0, unmet = 0;
  double max_modulus = 0.0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const VdcCertificate& c = certs[i];
    Json cj = certificate_json(c);
    if (kind == "random") cj["phase"] = phases[i];
    list.push_back(cj);
    auto flag = [](bool x) { return std::string(x ? "true" : "false"); };
    o.csv += csv_record({format_double(c.a), format_double(c.b), flag(c.monotone_ok), flag(c.magnitude_ok),
                         format_double(c.integral.real()), format_double(c.integral.imag()), format_double(c.modulus),
                         flag(c.bound_3_ok), flag(c.bound_2_ok), format_double(c.quadrature_error), to_string(c.status)});
    unverified += c.status == CertificateStatus::unverified;
    unmet += c.status == CertificateStatus::hypotheses_unmet;
    if (c.status == CertificateStatus::holds) max_modulus = std::max(max_modulus, c.modulus);
  }
  if (unverified) {
    o.verdict = "UNVERIFIED";
    o.exit_code = 2;
    o.message = std::to_string(unverified) + " certificate(s) could not decide the hypotheses";
  } else if (unmet) {
    o.verdict = "HYPOTHESES_UNMET";
    o.exit_code = 2;
    o.message = std::to_string(unmet) + " phase(s) violate monotonicity of F' or |F'| >= 1; no bound is claimed";
  } else {
    o.verdict = "HOLDS";
  }
  o.result = {{"certificates", list}, {"verdict", o.verdict}, {"max_modulus", max_modulus}, {"phase", kind}};
  return o;
}

// ---------------------------------------------------------------- weyl

Outcome run_weyl(Params& p, int workers) {
  const Vector alpha = p.reals("alpha", std::nullopt, 1, 6);
  const std::size_t d = alpha.size();
  const auto n = p.integer("N", 100000, 1, 10'000'000);
  std::vector<Vector> id_rows(d, Vector(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) id_rows[i][i] = 1.0;
  const TorusQuotient q(rows_to_matrix("lattice", p.real_rows("lattice", id_rows)));
  if (q.dim() != d) bad("lattice dimension must match alpha");
  const auto freqs = p.integer_rows("frequencies", std::nullopt);
  if (freqs.empty() || freqs.size() > kMaxFrequencies) bad("between 1 and 10 frequencies are required");
  for (const auto& m : freqs)
    if (m.size() != d) bad("each frequency needs " + std::to_string(d) + " entries");

  PointCloud pts(d);
  pts.reserve(static_cast<std::size_t>(n));
  Vector x(d);
  for (std::int64_t j = 1; j <= n; ++j) {
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(j) * alpha[i];
    pts.push_back(q.reduce(x));
  }
  const auto sums = weyl_sums(pts, freqs, workers);
  Outcome o;
  Json list = Json::array();
  bool small = true;
  for (const auto& w : sums) {
    list.push_back(weyl_json(w));
    if (!all_zero(w.m) && !(w.modulus < kDenseThreshold)) small = false;
  }
  o.verdict = small ? "EQUIDISTRIBUTED" : "INCONCLUSIVE";
  if (!small) {
    o.exit_code = 2;
    o.message = "some nonzero-frequency Weyl modulus is not below 0.1";
  }
  o.result = {{"sums", list}, {"verdict", o.verdict}, {"condition_number", q.condition_number()}};
  o.csv = weyl_csv(sums);
  return o;
}

// ---------------------------------------------------------------- kak

Outcome run_kak(Params& p) {
  const int n = static_cast<int>(p.integer("n", 2, 2, 6));
  const auto count = p.integer("count", 1000, 1, 1'000'000);
  const std::uint64_t seed = p.seed("seed");
  const double spread = p.real("spread", 1.0, 0.0, 5.0);
  double recon = 0.0, orth = 0.0, det_err = 0.0;
  bool positive_sorted = true;
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng = split_rng(seed, static_cast<std::uint64_t>(i));
    const Matrix g = random_sl(n, spread, rng);
    const KakFactors f = kak_decompose(g);
    recon = std::max(recon, max_abs_diff(f.k * f.a * f.k2, g));
    orth = std::max({orth, distance_to_identity(f.k.transpose() * f.k), distance_to_identity(f.k2.transpose() * f.k2)});
    det_err = std::max({det_err, std::abs(determinant(f.k) - 1.0), std::abs(determinant(f.k2) - 1.0),
                        std::abs(determinant(f.a) - 1.0)});
    const Vector a = f.a.diag();
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (!(a[j] > 0.0)) positive_sorted = false;
      if (j && a[j] > a[j - 1]) positive_sorted = false;
    }
  }
  Outcome o;
  const bool pass = recon <= 1e-9 && orth <= 1e-9 && det_err <= 1e-9 && positive_sorted;
  o.verdict = pass ? "RECONSTRUCTION_PASSES" : "RECONSTRUCTION_FAILS";
  if (!pass) {
    o.exit_code = 2;
    o.message = "KAK reconstruction exceeded the 1e-9 tolerance";
  }
  o.result = {{"n", n},
              {"count", count},
              {"max_reconstruction_error", recon},
              {"max_orthogonality_error", orth},
              {"max_det_error", det_err},
              {"a_positive_sorted", positive_sorted},
              {"verdict", o.verdict}};
  o.csv = csv_record({"n", "count", "max_reconstruction_error", "max_orthogonality_error", "max_det_error",
                      "a_positive_sorted", "verdict"}) +
          csv_record({std::to_string(n), std::to_string(count), format_double(recon), format_double(orth),
                      format_double(det_err), positive_sorted ? "true" : "false", o.verdict});
  return o;
}

// ---------------------------------------------------------------- remark1

Outcome run_remark1(Params& p) {
  const auto n = p.integer("N", 100000, 100, 10'000'000);
  const Remark1Report r = remark1_experiment(n);
  auto circle = [](const std::vector<CircleSum>& cs) {
    Json out = Json::array();
    for (const CircleSum& c : cs)
      out.push_back({{"frequency", c.frequency},
                     {"re", c.empirical.real()},
                     {"im", c.empirical.imag()},
                     {"closed_form_re", c.closed_form.real()},
                     {"closed_form_im", c.closed_form.imag()},
                     {"modulus", c.modulus}});
    return out;
  };
  Json joint = Json::array();
  std::vector<WeylSumReport> union_sums;
  for (const JointSum& j : r.joint) {
    joint.push_back({{"m", j.m},
                     {"integer_part", {j.integer_part.real(), j.integer_part.imag()}},
                     {"two_pi_part", {j.two_pi_part.real(), j.two_pi_part.imag()}},
                     {"union", {j.union_value.real(), j.union_value.imag()}}});
    union_sums.push_back({j.m, r.n_points, j.union_value, std::abs(j.union_value)});
  }
  Outcome o;
  o.verdict = r.verdict;
  if (r.verdict != "CLOSURE_IS_CIRCLE_PAIR") {
    o.exit_code = 2;
    o.message = "circle-pair checks did not all pass";
  }
  o.result = {{"N", n},
              {"n_points", r.n_points},
              {"max_circle_deviation", r.max_circle_deviation},
              {"integer_circle", circle(r.integer_circle)},
              {"two_pi_circle", circle(r.two_pi_circle)},
              {"joint", joint},
              {"witness_average", r.witness_average},
              {"witness_haar", r.witness_haar},
              {"verdict", r.verdict}};
  o.csv = weyl_csv(union_sums);
  return o;
}

// ---------------------------------------------------------------- nilpotent

Outcome run_nilpotent(Params& p, int workers) {
  UnipotentSpec s;
  s.z = rows_to_matrix("z", p.real_rows("z", std::vector<Vector>{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}));
  if (s.z.rows() > 6) bad("z must be at most 6 x 6");
  Vector e_last(s.z.rows(), 0.0);
  e_last.back() = 1.0;
  s.v = p.reals("v", e_last, s.z.rows(), s.z.rows());
  s.scaling = p.reals("scaling", Vector{std::sqrt(2.0), std::sqrt(3.0)}, 1, 6);
  s.step = p.real("step", 1.0, 1e-9, 1e6);
  s.n = p.integer("N", 100000, 1, 10'000'000);
  s.frequencies = p.integer_rows("frequencies", std::vector<std::vector<std::int64_t>>{{1, 0}, {0, 1}, {1, 1}});
  const UnipotentReport r = unipotent_orbit_experiment(s, workers);

  Outcome o;
  Json sums = Json::array();
  for (const auto& w : r.sums) sums.push_back(weyl_json(w));
  Json hull = {{"dimension", r.hull.dimension()}, {"base", r.hull.base}, {"normals", r.hull.normals},
               {"offsets", r.hull.offsets}};
  o.verdict = r.verdict;
  if (r.verdict != "DENSE_IN_HULL") {
    o.exit_code = 2;
    o.message = "some nonzero-frequency Weyl modulus is not below 0.1";
  }
  o.result = {{"hull", hull}, {"moving", r.moving}, {"sums", sums}, {"verdict", r.verdict}};
  o.csv = weyl_csv(r.sums);
  return o;
}

const std::vector<ParamInfo> kSweep = {
    {"family", K::text, "sl2-sym or sln-standard"},
    {"k", K::integer, "symmetric power (sl2-sym), 1..8"},
    {"n", K::integer, "matrix size (sln-standard), 2..6"},
    {"v", K::reals, "base vector v"},
    {"u", K::reals, "frequency u (u = 0 is the control)"},
    {"h", K::reals, "Cartan element in the basis E_jj - E_(j+1)(j+1)"},
    {"schedule", K::reals, "horizons T, each in (0, 200]"},
    {"mode", K::text, "quadrature or montecarlo"},
    {"n_k", K::integer, "angle nodes (quadrature) or sqrt of the pair count"},
    {"nodes_per_unit_time", K::real, "time nodes per unit of T"},
    {"seed", K::integer, "random seed"},
};
const std::vector<ParamInfo> kVdc = {
    {"phase", K::text, "linear, quadratic, exp or random"},
    {"a", K::real, "left end"},
    {"b", K::real, "right end"},
    {"slope", K::real, "linear phase slope"},
    {"intercept", K::real, "linear phase intercept"},
    {"c", K::real, "quadratic phase c t^2 / 2"},
    {"coefficients", K::reals, "exp phase coefficients"},
    {"rates", K::reals, "exp phase rates"},
    {"count", K::integer, "number of random phases"},
    {"seed", K::integer, "random seed"},
};
const std::vector<ParamInfo> kWeyl = {
    {"alpha", K::reals, "points x_j = j alpha"},
    {"N", K::integer, "number of points"},
    {"lattice", K::real_rows, "lattice basis (columns span the lattice)"},
    {"frequencies", K::integer_rows, "frequencies m"},
};
const std::vector<ParamInfo> kKak = {
    {"n", K::integer, "matrix size 2..6"},
    {"count", K::integer, "number of random elements"},
    {"seed", K::integer, "random seed"},
    {"spread", K::real, "bound on log singular values"},
};
const std::vector<ParamInfo> kRemark1 = {
    {"N", K::integer, "range -N..N"},
};
const std::vector<ParamInfo> kNilpotent = {
    {"z", K::real_rows, "nilpotent generator"},
    {"v", K::reals, "base vector"},
    {"scaling", K::reals, "scales of the moving coordinates"},
    {"step", K::real, "time step h"},
    {"N", K::integer, "number of samples"},
    {"frequencies", K::integer_rows, "frequencies m"},
};

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"sweep", "vdc", "weyl", "kak", "remark1", "nilpotent"};
  return c;
}

const std::vector<ParamInfo>& command_params(const std::string& command) {
  if (command == "sweep") return kSweep;
  if (command == "vdc") return kVdc;
  if (command == "weyl") return kWeyl;
  if (command == "kak") return kKak;
  if (command == "remark1") return kRemark1;
  if (command == "nilpotent") return kNilpotent;
  bad("unknown command '" + command + "'");
}

Json parse_param(ParamKind kind, const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(s, &used);
    } catch (const std::exception&) {
      bad("not a number: '" + s + "'");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size() || !std::isfinite(d)) bad("not a finite number: '" + s + "'");
    return d;
  };
  auto integer = [&](const std::string& s) {
    const double d = number(s);
    if (d != std::floor(d) || std::abs(d) > 9e15) bad("not an integer: '" + s + "'");
    return static_cast<std::int64_t>(d);
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  switch (kind) {
    case K::integer: return integer(text);
    case K::real: return number(text);
    case K::text: return text;
    case K::reals: {
      Json a = Json::array();
      for (const auto& s : split(text, ',')) a.push_back(number(s));
      return a;
    }
    case K::integers: {
      Json a = Json::array();
      for (const auto& s : split(text, ',')) a.push_back(integer(s));
      return a;
    }
    case K::real_rows:
    case K::integer_rows: {
      Json rows = Json::array();
      for (const auto& r : split(text, ';'))
        rows.push_back(parse_param(kind == K::real_rows ? K::reals : K::integers, r));
      return rows;
    }
  }
  return nullptr;
}

RunResult run(const RunSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.format != "json" && spec.format != "csv") bad("format must be json or csv");
  if (spec.workers < 1 || spec.workers > 256) bad("workers must be in [1, 256]");
  Params p(spec.command, spec.params);
  Outcome o;
  if (spec.command == "sweep") o = run_sweep(p, spec.workers);
  else if (spec.command == "vdc") o = run_vdc(p);
  else if (spec.command == "weyl") o = run_weyl(p, spec.workers);
  else if (spec.command == "kak") o = run_kak(p);
  else if (spec.command == "remark1") o = run_remark1(p);
  else o = run_nilpotent(p, spec.workers);

  RunResult r;
  r.exit_code = o.exit_code;
  r.verdict = o.verdict;
  r.message = o.message;
  r.csv = std::move(o.csv);
  const Json echo = {{"command", spec.command}, {"format", spec.format}, {"params", p.effective()}};
  r.report = {{"schema_version", kSchemaVersion},
              {"spec", echo},
              {"input_hash", git_blob_sha1(canonical_json(echo))},
              {"result", std::move(o.result)},
              {"verdict", r.verdict},
              {"exit_code", r.exit_code},
              {"message", r.message}};
  if (spec.timings) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.report["timings"] = {{"total_seconds", secs}, {"workers", spec.workers}};
  }
  return r;
}

std::string render(const RunResult& result, const std::string& format) {
  if (format == "csv") return result.csv;
  return canonical_json(result.report);
}

int workers_from_env() {
  const char* env = std::getenv("BOHR_LAB_WORKERS");
  if (!env || !*env) return 1;
  try {
    const Json j = parse_param(ParamKind::integer, env);
    const auto w = j.get<std::int64_t>();
    if (w < 1 || w > 256) bad("");
    return static_cast<int>(w);
  } catch (const std::invalid_argument&) {
    bad(std::string("BOHR_LAB_WORKERS must be an integer in [1, 256], got '") + env + "'");
  }
}

}  // namespace bohr
