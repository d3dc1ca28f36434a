#include <chrono>
#include <numbers>

#include "doctest.h"
#include "getzler/mehler.hpp"
#include "getzler/oracle.hpp"

using namespace getzler;
using CM = Matrix<Complex>;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// L×L torus with N_Φ flux quanta and spacing chosen so that the continuum field is B.
LatticeSpec magnetic_torus(int L, long quanta, double field) {
  LatticeSpec s;
  s.n = 2;
  s.L = L;
  s.flux = mpq_class(quanta, static_cast<long>(L) * L);
  s.h = std::sqrt(2.0 * kPi * s.flux.get_d() / field);
  return s;
}

GradedOperator<Complex> laplacian(int n) {
  GradedOperator<Complex> op(n, 1);
  for (int i = 1; i <= n; ++i) {
    auto d = GradedOperator<Complex>::derivative(n, 1, i);
    op -= d * d;
  }
  return op;
}

}  // namespace

TEST_CASE("series oracle") {
  auto r = series_oracle("x_over_one_minus_exp_neg_2x", 1);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == mpq_class(1, 2));
  CHECK(r[1] == mpq_class(1, 2));
  CHECK(series_oracle("x_over_one_minus_exp_neg_2x", 2)[2] == mpq_class(1, 6));
  CHECK(series_oracle("sqrt_x_over_sinh_x", 0) == std::vector<mpq_class>{1});
  CHECK(series_oracle("log_half_x_over_sinh_half_x", 2)[2] == mpq_class(-1, 24));
  CHECK(series_oracle("sqrt_x_over_sinh_x", 2)[2] == mpq_class(-1, 12));

  // independent agreement with the Bernoulli-number coefficients (even series in x)
  for (auto [oracle_name, name] : {std::pair{"x_over_sinh_x", SeriesName::x_over_sinh_x},
                                   std::pair{"x_coth_x", SeriesName::x_coth_x},
                                   std::pair{"half_x_over_sinh_half_x", SeriesName::half_x_over_sinh_half_x}}) {
    auto full = series_oracle(oracle_name, 6);
    auto even = series_coefficients(name, 4);
    for (int k = 0; k <= 3; ++k) CHECK(full[2 * k] == even[k]);
    for (int k = 0; k < 3; ++k) CHECK(full[2 * k + 1] == 0);
  }
  auto literal = series_oracle("half_x_over_exp_half_diff", 4);
  auto sinh_form = series_oracle("half_x_over_sinh_half_x", 4);
  for (int k = 0; k <= 4; ++k) CHECK(literal[k] * 2 == sinh_form[k]);

  CHECK_THROWS_AS(series_oracle("x_over_sinh_x", 7), InputError);
  CHECK_THROWS_AS(series_oracle("nope", 2), InputError);
  CHECK(series_oracle_names().size() == 8);
}

TEST_CASE("power series arithmetic") {
  const int o = 6;
  PowerSeries x = PowerSeries::x(o);
  PowerSeries e = x.exp();
  CHECK(e[3] == mpq_class(1, 6));
  PowerSeries back = (e - PowerSeries::constant(o, 1)).compose(x);
  CHECK((PowerSeries::constant(o, 1) + back).log() == x);
  PowerSeries one_plus = PowerSeries::constant(o, 1) + x;
  CHECK(one_plus.sqrt() * one_plus.sqrt() == one_plus);
  CHECK(one_plus / one_plus == PowerSeries::constant(o, 1));
  CHECK_THROWS(x.inverse());
  CHECK_THROWS(one_plus.exp());
}

TEST_CASE("landau_trace") {
  CHECK(rel(landau_trace(1e-4, 0.5), 1.0 / (4 * kPi * 0.5)) < 1e-4);
  double prev = landau_trace(1.0, 0.05);
  for (double t = 0.1; t < 3.0; t += 0.1) {
    double v = landau_trace(1.0, t);
    CHECK(v < prev);
    prev = v;
  }
  for (double b : {0.5, 1.0, 3.0})
    for (double t : {0.25, 1.0}) {
      const double B = b / 2;
      CHECK(rel(landau_trace(b, t), B / (4 * kPi * std::sinh(t * B))) < 1e-10);
    }
  CHECK_THROWS_AS(landau_trace(0.0, 1.0), InputError);
  CHECK_THROWS_AS(landau_trace(1.0, -1.0), InputError);
  CHECK_THROWS_AS(landau_trace(1e-9, 1e-3), InputError);
}

TEST_CASE("lattice: 1D free chain and constant potential") {
  LatticeSpec s;
  s.n = 1;
  s.L = 200;
  s.h = 0.05;
  const double t = 0.05;
  const double free = lattice_heat_trace(s, t);
  CHECK(rel(free, s.L * s.h / std::sqrt(4 * kPi * t)) < 0.01);

  s.potential.assign(s.L, 0.7);
  CHECK(rel(lattice_heat_trace(s, t), std::exp(-t * 0.7) * free) < 1e-10);

  LatticeSpec bad = s;
  bad.flux = mpq_class(1, 2);
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = s;
  bad.potential.resize(3);
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("lattice: invariants and Bloch reduction") {
  LatticeSpec s = magnetic_torus(8, 2, 1.0);
  auto reduced = lattice_spectrum(s);
  CHECK(reduced.blocks == 2);
  CHECK(reduced.adjointness_defect <= 1e-12);
  CHECK(reduced.scalar_minimum >= -1e-9);
  CHECK(std::is_sorted(reduced.eigenvalues.begin(), reduced.eigenvalues.end()));
  CHECK(reduced.eigenvalues.size() == 64);

  LatticeSpec full = s;
  full.potential.assign(64, 0.0);  // a potential disables the magnetic-translation reduction
  auto unreduced = lattice_spectrum(full);
  CHECK(unreduced.blocks == 1);
  REQUIRE(unreduced.eigenvalues.size() == reduced.eigenvalues.size());
  for (std::size_t k = 0; k < reduced.eigenvalues.size(); ++k)
    CHECK(reduced.eigenvalues[k] == doctest::Approx(unreduced.eigenvalues[k]).epsilon(1e-10));
  CHECK(heat_trace(lattice_spectrum(s, 2), 0.3) == doctest::Approx(heat_trace(reduced, 0.3)).epsilon(1e-12));

  LatticeSpec bad = s;
  bad.flux = mpq_class(1, 3);
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = s;
  bad.fiber = CM(2, 2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(lattice_spectrum(bad), std::runtime_error);
}

TEST_CASE("lattice: fiber blocks and product circle") {
  LatticeSpec s = magnetic_torus(16, 4, 1.0);
  const double t = 0.4;
  const double scalar = lattice_heat_trace(s, t);
  LatticeSpec twisted = s;
  twisted.fiber = CM(2, 2, {-1.0, 0.0, 0.0, 1.0});
  auto spec = lattice_spectrum(twisted);
  auto per_fiber = fiber_heat_traces(spec, t);
  CHECK(spec.components == 2 * spec.blocks);
  CHECK(rel(per_fiber[0], scalar * std::exp(t)) < 1e-10);
  CHECK(rel(per_fiber[1], scalar * std::exp(-t)) < 1e-10);
  CHECK(rel(heat_trace(spec, t), per_fiber[0] + per_fiber[1]) < 1e-12);
  CHECK(spec.scalar_minimum >= -1e-9);

  LatticeSpec chain;
  chain.n = 1;
  chain.L = 12;
  chain.h = s.h;
  LatticeSpec product = s;
  product.n = 3;
  product.circle_sites = 12;
  CHECK(rel(lattice_heat_trace(product, t), scalar * lattice_heat_trace(chain, t)) < 1e-10);
  CHECK(product.volume() == doctest::Approx(s.volume() * 12 * s.h));
}

TEST_CASE("lattice: trace converges under refinement") {
  // fixed physical torus (side 4) and flux: the per-area trace differences shrink
  std::vector<double> values;
  for (int L : {8, 16, 32}) {
    LatticeSpec s;
    s.L = L;
    s.h = 4.0 / L;
    s.flux = mpq_class(2, L * L);
    values.push_back(lattice_heat_trace(s, 0.5) / s.volume());
  }
  CHECK(std::abs(values[2] - values[1]) < std::abs(values[1] - values[0]));
}

TEST_CASE("lattice vs Landau levels and Mehler at L = 64") {
  const auto start = std::chrono::steady_clock::now();
  const double b = 1.0;
  LatticeSpec s = magnetic_torus(64, 4, b / 2);
  CHECK(s.field() == doctest::Approx(0.5));
  auto spec = lattice_spectrum(s);
  CHECK(spec.adjointness_defect <= 1e-12);
  CHECK(spec.scalar_minimum >= -1e-9);

  ModelData m;
  m.n = 2;
  m.R = Complex(0, b) * CM(2, 2, {0.0, 1.0, -1.0, 0.0});
  m.F = CM(1, 1);
  for (double t : {0.25, 0.5, 1.0}) {
    const double per_area = heat_trace(spec, t) / spec.volume;
    m.t = t;
    const double mehler = mehler_kernel(m, {0.0, 0.0})(0, 0).real();
    CHECK(rel(per_area, mehler) < 0.02);
    if (t == 0.5) CHECK(rel(per_area, landau_trace(b, t)) < 0.01);
  }
  MESSAGE("L=64 lattice oracle: "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s");
}

TEST_CASE("fd_residual") {
  FdGrid grid;
  grid.center = {0.1, -0.2};
  grid.t = 0.5;
  grid.h = 0.02;
  auto euclid = [](double t, const std::vector<double>& x) {
    return CM(1, 1, {std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4 * t)) / (4 * kPi * t)});
  };
  auto r = fd_residual(euclid, laplacian(2), grid);
  CHECK(r.residual_h < 1e-3);
  CHECK(r.ratio == doctest::Approx(4.0).epsilon(0.05));

  ModelData m;
  m.n = 2;
  m.R = Complex(0, 1.0) * CM(2, 2, {0.0, 1.0, -1.0, 0.0});
  m.F = CM(1, 1, {0.3});
  m.t = grid.t;
  auto mehler = [m](double t, const std::vector<double>& x) mutable {
    m.t = t;
    return mehler_kernel(m, x);
  };
  auto rm = fd_residual(mehler, model_operator(m), grid);
  CHECK(rm.ratio >= 3.0);
  CHECK(rm.ratio <= 5.0);

  auto shifted = [&](double t, const std::vector<double>& x) { return euclid(t + 0.1, x) * Complex(1.3); };
  auto wrong = fd_residual([&](double t, const std::vector<double>& x) { return euclid(t, x) + shifted(t, {0, 0}); },
                           laplacian(2), grid);
  CHECK(wrong.residual_h2 > 0.01);
  CHECK(wrong.ratio < 1.5);

  CHECK_THROWS_AS(fd_residual(euclid, laplacian(3), grid), InputError);
}
