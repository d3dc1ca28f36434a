#include "getzler/verify.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "getzler/asymptotics.hpp"
#include "getzler/heat_jets.hpp"
#include "getzler/oracle.hpp"
#include "getzler/random_inputs.hpp"

namespace getzler::verify {

namespace {

using CM = Matrix<Complex>;
using Q = ComplexRational;
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

double field_strength(const ModelData& m) { return std::abs(m.R(0, 1)) / 2.0; }

/// Fiber endomorphism for the lattice: must be diagonal so each fiber is its own component.
CM diagonal_fiber(const CM& f) {
  CM k(f.rows(), f.cols());
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) {
      if (i == j) k(i, i) = f(i, i).real();
      else if (std::abs(f(i, j)) > 1e-13) throw std::logic_error("lattice fiber endomorphism is not diagonal");
      if (i == j && std::abs(f(i, i).imag()) > 1e-13) throw std::logic_error("lattice fiber endomorphism is not Hermitian");
    }
  return k;
}

LatticeSpec torus_for_field(int L, long quanta, double field) {
  LatticeSpec s;
  s.n = 2;
  s.L = L;
  s.flux = mpq_class(quanta, static_cast<long>(L) * L);
  s.h = std::sqrt(2.0 * kPi * s.flux.get_d() / field);
  return s;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

/// Max relative error per distinct parameter value, in row order.
std::vector<double> error_by_parameter(const std::vector<SweepRow>& rows) {
  std::vector<double> params, errors;
  for (const auto& r : rows) {
    if (params.empty() || params.back() != r.parameter) {
      params.push_back(r.parameter);
      errors.push_back(0.0);
    }
    errors.back() = std::max(errors.back(), r.relative_error());
  }
  return errors;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt(100 * x, 3) + "%";
  return s;
}

}  // namespace

double SweepRow::relative_error() const {
  const double scale = std::abs(oracle);
  return scale == 0.0 ? std::abs(predicted) : std::abs(predicted - oracle) / scale;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "tag,label,parameter,t,predicted,oracle,relative_error\n";
  for (const auto& r : rows)
    os << r.tag << ',' << r.label << ',' << format_double(r.parameter) << ',' << format_double(r.t) << ','
       << format_double(r.predicted) << ',' << format_double(r.oracle) << ',' << format_double(r.relative_error())
       << '\n';
}

// ---------------------------------------------------------------------------------------------

std::vector<SweepRow> bergman_sweep(const BergmanSweep& cfg) {
  if (cfg.p.empty()) throw InputError("bergman sweep needs at least one p");
  const auto c = ComplexCurvature::diagonal({cfg.a}, {cfg.e});
  const auto full = bergman_operator(c);
  std::vector<SweepRow> rows;
  for (long p : cfg.p) {
    if (p <= 0) throw InputError("p must be positive");
    const ModelData m = extract_model_data(full, Complex(static_cast<double>(p)));
    LatticeSpec s = torus_for_field(cfg.L, p, field_strength(m));
    s.fiber = diagonal_fiber(m.F);
    const auto spectrum = lattice_spectrum(s, cfg.jobs);
    const double t = cfg.u / static_cast<double>(p);
    const auto traces = fiber_heat_traces(spectrum, t);
    const CM leading = bergman_leading(c, cfg.u, p);
    const double scale = 1.0 / static_cast<double>(p);  // p^{−n/2}, n = 2
    for (std::size_t w = 0; w < traces.size(); ++w)
      rows.push_back({"imp", w == 0 ? "word=0" : "word=1", static_cast<double>(p), cfg.u,
                      scale * leading(w, w).real(), scale * traces[w] / spectrum.volume});
  }
  return rows;
}

std::vector<SweepRow> odd_sweep(const OddSweep& cfg) {
  if (cfg.r.empty()) throw InputError("odd sweep needs at least one r");
  const auto o = OddCurvature::plane(3, cfg.b);
  const auto a0 = OddCurvature::plane(3, cfg.f0).A;
  const auto full = odd_operator(o, a0);
  std::vector<SweepRow> rows;
  for (long r : cfg.r) {
    if (r <= 0) throw InputError("r must be positive");
    const double rd = static_cast<double>(r);
    const ModelData m = extract_model_data(full, Complex(rd));
    LatticeSpec s = torus_for_field(cfg.L, r, field_strength(m));
    s.n = 3;
    s.circle_sites = cfg.circle_sites;
    s.fiber = diagonal_fiber(m.F);
    const auto spectrum = lattice_spectrum(s, cfg.jobs);
    const double rank = static_cast<double>(s.fibers());
    const double oracle = std::pow(rd, -1.5) * heat_trace(spectrum, cfg.t / rd) / rank;
    const double predicted = integrate_odd({{o, spectrum.volume}}, cfg.t);
    rows.push_back({"limit", "trace", rd, cfg.t, predicted, oracle});
  }
  return rows;
}

std::vector<SweepRow> lattice_sweep(const LatticeSweep& cfg) {
  if (cfg.t.empty()) throw InputError("lattice sweep needs at least one t");
  const LatticeSpec s = torus_for_field(cfg.L, cfg.flux_quanta, cfg.b / 2.0);
  const auto spectrum = lattice_spectrum(s, cfg.jobs);
  ModelData m;
  m.n = 2;
  m.R = Complex(0.0, cfg.b) * CM(2, 2, {0.0, 1.0, -1.0, 0.0});
  m.F = CM(1, 1);
  std::vector<SweepRow> rows;
  for (double t : cfg.t) {
    m.t = t;
    const double lattice = heat_trace(spectrum, t) / spectrum.volume;
    rows.push_back({"mehler", "mehler_kernel", cfg.b, t, mehler_kernel(m, {0.0, 0.0})(0, 0).real(), lattice});
    rows.push_back({"mehler", "landau_trace", cfg.b, t, landau_trace(cfg.b, t), lattice});
  }
  return rows;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
  std::vector<SweepRow> rows;
};

Outcome ac1_supertrace(const Options&) {
  Outcome out;
  long words = 0;
  for (int n : {2, 4, 6}) {
    const Q expected = volume_supertrace<Q>(n);
    const auto rep = spin_representation<Q>(n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const auto e = CliffordElement<Q>::basis(n, 1, CliffordWord{mask}, Matrix<Q>::identity(1));
      const Q value = supertrace(e);
      const bool full = mask == CliffordWord::full(n).mask;
      const Q target = full ? expected : Q(0);
      // cross-check through the chirality-weighted trace of the matrix representation
      const Q via_rep = (rep.grading * rep.word(CliffordWord{mask})).trace();
      if (!(value == target) || !(via_rep == target)) out.passed = false;
      ++words;
    }
  }
  out.detail = std::to_string(words) + " words over n = 2, 4, 6 (exact)";
  return out;
}

Outcome ac2_filtration(const Options& opt) {
  Outcome out;
  std::mt19937 rng(opt.seed);
  long pairs = 0, violations = 0;
  for (const auto& w : {GradingWeights::cG(), GradingWeights::pG(), GradingWeights::rG()})
    for (int trial = 0; trial < 1000; ++trial) {
      random_inputs::RandomOperatorShape shape;
      shape.n = 1 + trial % 4;
      shape.twist = 1 + trial % 2;
      shape.monomials = 1 + trial % 5;
      shape.clifford_words = trial % 3 != 0;
      const auto a = random_inputs::random_operator(rng, shape);
      const auto b = random_inputs::random_operator(rng, shape);
      const auto oa = grading_order(a, w), ob = grading_order(b, w), oab = grading_order(compose(a, b), w);
      ++pairs;
      if (oab && (!oa || !ob || *oab > *oa + *ob)) ++violations;
    }
  long runs = 0, bound_failures = 0;
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 2; ++k) {
      const int twist = 1 + k;
      const auto r = random_inputs::random_curvature(rng, n, 1);
      const auto f = random_inputs::random_twist_curvature(rng, n, twist);
      const int J = 2, D = 4;
      const auto geo = GeometryJets<Q>::from_riemann(r, f, D);
      try {
        const auto h = theta_recursion(lichnerowicz_operator(geo), geo, J, D);
        for (int j = 0; j <= J; ++j)
          if (grading_order(h.theta[j].poly(), GradingWeights::cG()).value_or(0) > 2 * j) ++bound_failures;
      } catch (const std::logic_error&) {
        ++bound_failures;
      }
      ++runs;
    }
  out.passed = violations == 0 && bound_failures == 0;
  out.detail = std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations; " + std::to_string(runs) +
               " recursion runs, " + std::to_string(bound_failures) + " with ord(Θ_j) > 2j";
  return out;
}

Outcome ac3_theta(const Options& opt) {
  Outcome out;
  std::mt19937 rng(opt.seed + 3);
  int checked = 0;
  for (int n = 1; n <= 3; ++n) {
    const int twist = 2, J = 6;
    const auto v = random_inputs::random_matrix(rng, twist, 2);
    GradedOperator<Q> d2 = GradedOperator<Q>::constant(n, v);
    for (int i = 1; i <= n; ++i) {
      const auto d = GradedOperator<Q>::derivative(n, twist, i);
      d2 -= d * d;
    }
    const auto geo = GeometryJets<Q>::flat(n, twist, 2 * J);
    const auto h = theta_recursion(d2, geo, J, 2 * J);
    // exact kernel (4πt)^{−n/2} e^{−|x|²/4t} e^{−tV}: Θ(t) = e^{−tV} = Σ t^j (−V)^j / j!
    Matrix<Q> target = Matrix<Q>::identity(twist);
    for (int j = 0; j <= J; ++j) {
      if (j > 0) target = Q(mpq_class(1, j)) * (target * (-v));
      if (!(h.theta[j].poly() == GradedOperator<Q>::constant(n, target))) out.passed = false;
      if (j > 0 && !transport_residual(d2, geo, h, j).poly().is_zero()) out.passed = false;
      ++checked;
    }
  }
  out.detail = std::to_string(checked) + " coefficients Θ_0..Θ_6 for n = 1, 2, 3 equal (−V)^j/j! exactly";
  return out;
}

Outcome ac4_fd(const Options&) {
  Outcome out;
  std::vector<ModelData> cases(3);
  cases[0] = {2, Complex(0.0, 1.0) * CM(2, 2, {0.0, 1.0, -1.0, 0.0}), CM(1, 1, {0.3}), 0.5};
  cases[1] = {3, kI * CM(3, 3, {0.0, 0.8, -0.3, -0.8, 0.0, 0.5, 0.3, -0.5, 0.0}), CM(2, 2, {0.4, 0.1, 0.1, -0.2}), 0.5};
  CM r4(4, 4);
  r4(0, 1) = kI * 0.9, r4(1, 0) = -kI * 0.9, r4(2, 3) = kI * 0.4, r4(3, 2) = -kI * 0.4;
  cases[2] = {4, r4, CM(1, 1, {-0.1}), 0.5};
  std::vector<double> ratios;
  for (const auto& m : cases) {
    FdGrid grid;
    grid.center.assign(m.n, 0.1);
    grid.half_width = 0.4;
    grid.points_per_axis = 3;
    grid.t = m.t;
    grid.h = 0.02;
    auto kernel = [m = ModelData(m)](double t, const std::vector<double>& x) mutable {
      m.t = t;
      return mehler_kernel(m, x);
    };
    const auto r = fd_residual(kernel, model_operator(m), grid);
    ratios.push_back(r.ratio);
    if (!(r.ratio >= 3.0 && r.ratio <= 5.0)) out.passed = false;
    out.rows.push_back({"mehler", "fd_ratio_n" + std::to_string(m.n), static_cast<double>(m.n), m.t, 4.0, r.ratio});
  }
  out.detail = "residual ratios h/(h/2): " + fmt(ratios[0]) + ", " + fmt(ratios[1]) + ", " + fmt(ratios[2]) + " (n = 2, 3, 4)";
  return out;
}

Outcome ac5_lattice(const Options& opt) {
  Outcome out;
  LatticeSweep cfg;
  cfg.jobs = opt.jobs;
  out.rows = lattice_sweep(cfg);
  double worst_mehler = 0.0, worst_landau = 0.0;
  for (const auto& r : out.rows) {
    if (r.label == "mehler_kernel") worst_mehler = std::max(worst_mehler, r.relative_error());
    else worst_landau = std::max(worst_landau, r.relative_error());
  }
  out.passed = worst_mehler <= 0.02 && worst_landau <= 0.01;
  out.detail = "L = 64, B = 0.5: max error vs Mehler " + fmt(100 * worst_mehler, 3) + "% (≤ 2%), vs Landau " +
               fmt(100 * worst_landau, 3) + "% (≤ 1%)";
  return out;
}

Outcome ac6_bergman(const Options& opt) {
  Outcome out;
  BergmanSweep cfg;
  cfg.jobs = opt.jobs;
  out.rows = bergman_sweep(cfg);
  const auto errors = error_by_parameter(out.rows);
  out.passed = strictly_decreasing(errors) && errors.back() <= 0.05;
  out.detail = "p = 4, 8, 16 errors " + join(errors) + " (strictly decreasing, ≤ 5% at p = 16)";
  return out;
}

Outcome ac7_odd(const Options& opt) {
  Outcome out;
  OddSweep cfg;
  cfg.jobs = opt.jobs;
  out.rows = odd_sweep(cfg);
  const auto errors = error_by_parameter(out.rows);
  out.passed = strictly_decreasing(errors) && errors.back() <= 0.08;
  // the literal reading tA (instead of itA) would give tb/tan(tb)
  const double tb = cfg.t * cfg.b;
  const double literal = out.rows.back().predicted * (tb / std::tan(tb)) / (tb / std::tanh(tb));
  const double literal_error = std::abs(literal - out.rows.back().oracle) / out.rows.back().oracle;
  out.detail = "r = 4, 8, 16 errors " + join(errors) + " (strictly decreasing, ≤ 8% at r = 16); tb/tan(tb) reading: " +
               fmt(100 * literal_error, 3) + "%";
  return out;
}

Outcome ac8_index(const Options& opt) {
  Outcome out;
  std::mt19937 rng(opt.seed + 8);
  using Form = FormScalar<Q>;
  int symbolic = 0;
  for (int k = 0; k < 5; ++k) {
    const Q f = random_inputs::random_rational(rng);
    IndexDensityInput<Q> in{2, Matrix<Form>(2, 2), Matrix<Form>(1, 1, {Form::two_form(1, 2, f)})};
    const auto d = index_density(in);
    // (4π)^{−1}·(2i f) = (i/2π) f
    if (!(d.power == 1 && d.coefficient == Q(0, 2) * f)) out.passed = false;
    ++symbolic;
  }
  const mpq_class l2 = series_oracle("log_half_x_over_sinh_half_x", 2)[2];
  const auto top = CliffordWord::full(4).mask;
  for (int k = 0; k < 5; ++k) {
    Matrix<Form> r(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        Form e;
        for (int a = 1; a <= 4; ++a)
          for (int b = a + 1; b <= 4; ++b) e += Form::two_form(a, b, random_inputs::random_rational(rng));
        r(i, j) = e;
        r(j, i) = -e;
      }
    const auto d = index_density(IndexDensityInput<Q>{4, r, Matrix<Form>(1, 1)});
    const Q expected = volume_supertrace<Q>(4) * Q(l2 / 2) * (r * r).trace().coefficient(top);
    if (!(d.power == 2 && d.coefficient == expected)) out.passed = false;
    ++symbolic;
  }
  double worst = 0.0;
  const int grid = 16;
  for (int k = -2; k <= 3; ++k) {
    std::vector<IndexDensityInput<Complex>> samples;
    std::vector<double> weights;
    for (int ix = 0; ix < grid; ++ix)
      for (int iy = 0; iy < grid; ++iy) {
        const double x = (ix + 0.5) / grid, y = (iy + 0.5) / grid;
        const Complex f = -2.0 * kPi * kI * static_cast<double>(k) *
                          (1.0 + 0.5 * std::cos(2 * kPi * x) + 0.3 * std::sin(2 * kPi * (x + y)));
        samples.push_back({2, Matrix<FormScalar<Complex>>(2, 2),
                           Matrix<FormScalar<Complex>>(1, 1, {FormScalar<Complex>::two_form(1, 2, f)})});
        weights.push_back(1.0 / (grid * grid));
      }
    const Complex total = integrate_index_density(samples, weights);
    worst = std::max(worst, std::abs(total - static_cast<double>(k)));
    out.rows.push_back({"index", "flux_integral", static_cast<double>(k), 0.0, total.real(), static_cast<double>(k)});
  }
  if (worst > 1e-10) out.passed = false;
  out.detail = std::to_string(symbolic) + " exact density checks; flux-k integrals off by at most " + fmt(worst, 3);
  return out;
}

Outcome ac9_model(const Options& opt) {
  Outcome out;
  std::mt19937 rng(opt.seed + 9);
  int cases = 0;
  for (int n : {2, 3, 4}) {
    const int twist = 1 + n % 2;
    const auto r = random_inputs::random_curvature(rng, n);
    const auto f = random_inputs::random_twist_curvature(rng, n, twist);
    const auto geo = GeometryJets<Q>::from_riemann(r, f, 4);
    if (!(model_operator(lichnerowicz_operator(geo), GradingWeights::cG()) == purified_model(r, f, twist))) out.passed = false;
    ++cases;
  }
  out.detail = std::to_string(cases) + " random curvature instances (n = 2, 3, 4), exact equality";
  return out;
}

Outcome ac10_chain(const Options&) {
  Outcome out;
  double worst_b = 0.0, worst_o = 0.0;
  const long p = 8;
  const double r = 8.0;
  for (double a : {0.5, 1.0, 2.0})
    for (double u : {0.25, 0.5, 1.0}) {
      const auto c = ComplexCurvature::diagonal({a, 0.5 * a}, {0.2, -0.1});
      const auto chain = bergman_chain(c, u, p);
      const CM closed = bergman_leading(c, u, p);
      double scale = 0.0;
      for (const auto& v : closed.data()) scale = std::max(scale, std::abs(v));
      const double err = max_abs_diff(chain.kernel, closed) / scale;
      worst_b = std::max(worst_b, err);
      out.rows.push_back({"imp", "chain_a=" + fmt(a), static_cast<double>(p), u, closed(0, 0).real(), chain.kernel(0, 0).real()});
    }
  for (double b : {0.5, 1.0, 2.0})
    for (double t : {0.25, 0.5, 1.0}) {
      const auto o = OddCurvature::plane(3, b);
      const auto chain = odd_chain(o, OddCurvature::plane(3, 0.3).A, t, r);
      const double closed = odd_leading(o, t);
      worst_o = std::max(worst_o, std::abs(chain.density - closed) / closed);
      out.rows.push_back({"limit", "chain_b=" + fmt(b), r, t, closed, chain.density});
    }
  out.passed = worst_b <= 1e-10 && worst_o <= 1e-10;
  out.detail = "max relative deviation: Bergman " + fmt(worst_b, 3) + ", odd " + fmt(worst_o, 3) + " (≤ 1e-10)";
  return out;
}

struct Criterion {
  const char* title;
  double limit_seconds;
  Outcome (*run)(const Options&);
};

const Criterion kTable[kCriteria] = {
    {"supertrace identities", 1.0, ac1_supertrace},
    {"filtration inequality and ord(Θ_j) ≤ 2j", 30.0, ac2_filtration},
    {"Θ-recursion vs exact constant-potential kernel", 5.0, ac3_theta},
    {"Mehler heat-equation residual ratio", 30.0, ac4_fd},
    {"Mehler vs lattice and Landau levels", 120.0, ac5_lattice},
    {"Bergman leading-term trend", 300.0, ac6_bergman},
    {"odd-dimensional leading-trace trend", 300.0, ac7_odd},
    {"index density", 10.0, ac8_index},
    {"model-operator extraction", 1.0, ac9_model},
    {"chain vs closed form", 30.0, ac10_chain},
};

}  // namespace

CriterionResult run_criterion(int id, const Options& opt) {
  if (id < 1 || id > kCriteria) throw InputError("criterion id must lie in 1..10");
  const Criterion& c = kTable[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = c.title;
  r.limit_seconds = c.limit_seconds;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o = c.run(opt);
    r.passed = o.passed;
    r.detail = std::move(o.detail);
    r.rows = std::move(o.rows);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > r.limit_seconds) {
    r.passed = false;
    r.detail += " [runtime limit exceeded]";
  }
  return r;
}

std::vector<CriterionResult> run_all(const Options& opt, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) {
    out.push_back(run_criterion(id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "AC" << r.id << ' ' << (r.passed ? "PASS" : "FAIL") << "  " << r.title << "  (" << fmt(r.seconds, 3) << " s / limit "
     << fmt(r.limit_seconds, 3) << " s)  " << r.detail;
  return os.str();
}

}  // namespace getzler::verify
