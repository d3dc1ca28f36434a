#include <numbers>
#include <random>

#include "doctest.h"
#include "getzler/asymptotics.hpp"
#include "getzler/oracle.hpp"
#include "test_helpers.hpp"

using namespace getzler;
using getzler::testing::Q;
using CM = Matrix<Complex>;
using Op = GradedOperator<Complex>;
using Form = FormScalar<Q>;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

double op_distance(const Op& a, const Op& b) {
  double d = 0.0;
  const Op diff = a - b;
  for (const auto& [k, c] : diff.terms())
    for (const auto& v : c.data()) d = std::max(d, std::abs(v));
  return d;
}

double rel_matrix(const CM& a, const CM& b) {
  double scale = 0.0;
  for (const auto& v : b.data()) scale = std::max(scale, std::abs(v));
  return max_abs_diff(a, b) / scale;
}

CM random_hermitian(std::mt19937& rng, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CM h(m, m);
  for (int i = 0; i < m; ++i) {
    h(i, i) = 0.5 + std::abs(u(rng));
    for (int j = i + 1; j < m; ++j) {
      h(i, j) = Complex(u(rng), u(rng)) * 0.3;
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

Matrix<Form> random_form_curvature(std::mt19937& rng, int n) {
  Matrix<Form> r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Form f;
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) f += Form::two_form(a, b, getzler::testing::random_rational(rng));
      r(i, j) = f;
      r(j, i) = -f;
    }
  return r;
}

Q from_mpq(const mpq_class& q) { return Q(q, 0); }

}  // namespace

TEST_CASE("index density: low-degree cases") {
  IndexDensityInput<Q> zero{2, Matrix<Form>(2, 2), Matrix<Form>(1, 1)};
  CHECK(index_density(zero).coefficient == Q(0));

  const Q f(mpq_class(3, 5), mpq_class(2, 7));
  IndexDensityInput<Q> abelian{2, Matrix<Form>(2, 2), Matrix<Form>(1, 1, {Form::two_form(1, 2, f)})};
  auto d = index_density(abelian);
  CHECK(d.power == 1);
  CHECK(d.coefficient == Q(0, 2) * f);  // (4π)^{-1}·2i·f = (i/2π)·f
  const Complex expected = kI / (2 * kPi) * f.to_complex();
  CHECK(std::abs(d.numeric() - expected) < 1e-15);

  IndexDensityInput<Q> odd{3, Matrix<Form>(3, 3), Matrix<Form>(1, 1)};
  CHECK_THROWS_AS(index_density(odd), InputError);
}

TEST_CASE("index density: degree-4 curvature term matches the series oracle") {
  std::mt19937 rng(11);
  const mpq_class l2 = series_oracle("log_half_x_over_sinh_half_x", 2)[2];
  const auto top = CliffordWord::full(4).mask;
  for (int trial = 0; trial < 5; ++trial) {
    const auto r = random_form_curvature(rng, 4);
    IndexDensityInput<Q> in{4, r, Matrix<Form>(1, 1)};
    auto d = index_density(in);
    // √det = exp(½ Σ_k ℓ_k tr R^{2k}); only ½ℓ_2 tr R² reaches degree 4
    const Q a_hat = from_mpq(l2 / 2) * (r * r).trace().coefficient(top);
    CHECK(d.power == 2);
    CHECK(d.coefficient == Q(-4) * a_hat);

    // with a twist: top = Â_4·N + ½ tr F²
    Matrix<Form> f(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        f(i, j) = Form::two_form(1, 2, getzler::testing::random_rational(rng)) +
                  Form::two_form(3, 4, getzler::testing::random_rational(rng));
    IndexDensityInput<Q> twisted{4, r, f};
    const Q expected = Q(-4) * (Q(2) * a_hat + Q::ratio(1, 2) * (f * f).trace().coefficient(top));
    CHECK(index_density(twisted).coefficient == expected);
  }
}

TEST_CASE("index density: flux-k integrates to k") {
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
    CHECK(std::abs(total - static_cast<double>(k)) < 1e-10);
  }
}

TEST_CASE("Λ^{0,*} Clifford module and the ω_d kernel") {
  std::mt19937 rng(5);
  for (int m = 1; m <= 3; ++m) {
    const AntiHolomorphicModule lam(m);
    for (int i = 1; i <= 2 * m; ++i)
      for (int j = 1; j <= 2 * m; ++j) {
        CM anti = lam.clifford(i) * lam.clifford(j) + lam.clifford(j) * lam.clifford(i);
        CHECK(max_abs_diff(anti, CM::scalar(lam.size(), i == j ? -2.0 : 0.0)) < 1e-14);
      }
    ComplexCurvature c;
    c.m = m;
    c.Fdot = random_hermitian(rng, m);
    c.FEdot = CM(m, m);
    const CM f = real_form(c.Fdot);
    CHECK(max_abs_diff(f, -f.transpose()) < 1e-14);
    // c(F^L) = −(2ω_d + τ)
    CHECK(max_abs_diff(lam.clifford_curvature(f), -(2.0 * omega_d(c) + CM::scalar(lam.size(), c.tau()))) < 1e-13);
    // det(iF^L) = det²(Ḟ^L) (F^L is imaginary: det F^L = (−1)^m det²Ḟ^L)
    const Complex dF = determinant(kI * f), dFdot = determinant(c.Fdot);
    CHECK(std::abs(dF - dFdot * dFdot) < 1e-12);
    // τ-cancellation, numeric
    for (double tp : {0.3, 1.7}) {
      const Complex prod = determinant(matrix_exp((-tp) * c.Fdot)) * std::exp(tp * c.tau());
      CHECK(std::abs(prod - 1.0) < 1e-12);
    }
  }
  // m = 1 conventions and the ω_d action on words
  auto c1 = ComplexCurvature::diagonal({2.0});
  CHECK(std::abs(real_form(c1.Fdot)(0, 1) - Complex(0.0, -2.0)) < 1e-15);
  auto w = omega_d(ComplexCurvature::diagonal({1.0, 3.0}));
  for (std::size_t s = 0; s < 4; ++s) CHECK(w(s, s) == Complex(-((s & 1) ? 1.0 : 0.0) - ((s & 2) ? 3.0 : 0.0)));
}

TEST_CASE("τ-cancellation and scaling identities, exact") {
  std::mt19937 rng(3);
  // nilpotent Ḟ: det(e^{−X})·e^{tr X} = 1 exactly
  Matrix<Form> x(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      x(i, j) = Form::two_form(1, 2, getzler::testing::random_rational(rng)) +
                Form::two_form(3, 4, getzler::testing::random_rational(rng));
  const auto e_minus = matrix_fn_terminating(SeriesName::exp, Form(-1) * x);
  const auto e_tr = matrix_fn_terminating(SeriesName::exp, Matrix<Form>(1, 1, {x.trace()}));
  CHECK(det_expansion(e_minus) * e_tr(0, 0) == Form(1));
  // det(uḞ) = u^m det Ḟ
  for (int m = 1; m <= 3; ++m) {
    const auto fdot = getzler::testing::random_matrix(rng, m);
    const Q u = getzler::testing::random_rational(rng) + Q(5);
    CHECK(determinant(u * fdot) == pow_int(u, m) * determinant(fdot));
  }
}

TEST_CASE("bergman_leading closed form") {
  const double a = 1.0, u = 0.5;
  const long p = 7;
  auto v = bergman_leading(ComplexCurvature::diagonal({a}), u, p);
  const double scalar_word = p / (2 * kPi) * a / (1 - std::exp(-2 * u * a));
  CHECK(v(0, 0).real() == doctest::Approx(scalar_word).epsilon(1e-14));
  CHECK(v(1, 1).real() == doctest::Approx(scalar_word * std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(v(0, 1)) == 0.0);
  // a → 0: p/(4πu)
  auto z = bergman_leading(ComplexCurvature::diagonal({0.0}), u, p);
  CHECK(z(0, 0).real() == doctest::Approx(p / (4 * kPi * u)).epsilon(1e-14));
  auto tiny = bergman_leading(ComplexCurvature::diagonal({1e-6}), u, p);
  CHECK(tiny(0, 0).real() == doctest::Approx(p / (4 * kPi * u)).epsilon(1e-5));

  ComplexCurvature bad;
  bad.m = 1;
  bad.Fdot = CM(1, 1, {Complex(0.0, kPi / u)});
  bad.FEdot = CM(1, 1);
  CHECK_THROWS_AS(bergman_leading(bad, u, p), std::domain_error);
  ComplexCurvature wrong_shape = ComplexCurvature::diagonal({1.0, 2.0});
  wrong_shape.Fdot = CM(1, 1, {1.0});
  CHECK_THROWS_AS(bergman_leading(wrong_shape, u, p), InputError);
}

TEST_CASE("Bergman chain: grading, Q_p, and Mehler reproduce the closed form") {
  std::mt19937 rng(17);
  std::vector<ComplexCurvature> cases = {ComplexCurvature::diagonal({1.0}, {1.0}),
                                         ComplexCurvature::diagonal({0.7, 1.9}, {0.3, -0.4})};
  ComplexCurvature general;
  general.m = 2;
  general.Fdot = random_hermitian(rng, 2);
  general.FEdot = random_hermitian(rng, 2);
  cases.push_back(general);

  for (const auto& c : cases) {
    const Op q = bergman_model(c);
    CHECK(grading_order(q, GradingWeights::pG()) == 2);
    for (int i = 1; i <= c.n(); ++i) {
      auto lower = grading_order(bergman_lower_connection(c, i), GradingWeights::pG());
      CHECK((!lower || *lower <= -1));
    }
    for (long p : {1L, 4L, 16L}) {
      const double u = 0.5;
      auto chain = bergman_chain(c, u, p);
      CHECK(chain.order_full == 2);
      CHECK(op_distance(chain.top, q) < 1e-13);
      CHECK(rel_matrix(chain.kernel, bergman_leading(c, u, p)) < 1e-10);
    }
  }
}

TEST_CASE("Q_p applied to the constant section") {
  auto c = ComplexCurvature::diagonal({0.6, 1.3});
  const int n = c.n(), tw = 1 << c.m;
  const Op q = bergman_model(c);
  auto out = getzler::apply(q, JetSection<Complex>::one(n, tw, 4));
  CHECK(out.bound() == 2);
  const CM f = real_form(c.Fdot);
  Op expected(n, tw);
  const Op p = Op::parameter(n, tw);
  for (int i = 1; i <= n; ++i) {
    Op a(n, tw);
    for (int j = 1; j <= n; ++j) a += f(i - 1, j - 1) * Op::coordinate(n, tw, j);
    expected -= Complex(0.25) * (p * p * a * a);
  }
  expected -= p * Op::constant(n, 2.0 * omega_d(c) + CM::scalar(tw, c.tau()));
  CHECK(op_distance(out.poly(), expected) < 1e-14);
}

TEST_CASE("extract_model_data") {
  ModelData m;
  m.n = 3;
  m.R = CM(3, 3, {0.0, 0.4, -0.1, -0.4, 0.0, 0.7, 0.1, -0.7, 0.0});
  m.F = CM(2, 2, {0.3, 0.1, 0.1, -0.2});
  m.t = 1.0;
  auto back = extract_model_data(model_operator(m));
  CHECK(max_abs_diff(back.R, m.R) < 1e-14);
  CHECK(max_abs_diff(back.F, m.F) < 1e-14);
  // a constant gauge term is removed
  auto gauged = gauge_shift(model_operator(m), {Complex(0.0, 0.8), 0.0, Complex(0.0, -0.3)});
  auto g = extract_model_data(gauged);
  CHECK(max_abs_diff(g.R, m.R) < 1e-13);
  CHECK(max_abs_diff(g.F, m.F) < 1e-13);
  // shapes outside the model family are rejected
  CHECK_THROWS_AS(extract_model_data(model_operator(m) + Op::coordinate(3, 2, 1)), InputError);
  CHECK_THROWS_AS(extract_model_data(Op::parameter(3, 2) * model_operator(m)), InputError);
}

TEST_CASE("odd_leading") {
  const double t = 0.5;
  CHECK(odd_leading(OddCurvature::plane(3, 0.0), t) == doctest::Approx(std::pow(4 * kPi * t, -1.5)));
  for (double b : {0.3, 1.0, 2.5}) {
    const double expected = std::pow(4 * kPi * t, -1.5) * (t * b / std::tanh(t * b));
    CHECK(odd_leading(OddCurvature::plane(3, b), t) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(odd_leading(OddCurvature::plane(3, -b), t) == doctest::Approx(expected).epsilon(1e-13));
  }
  OddCurvature five;
  five.n = 5;
  five.A = CM(5, 5);
  five.A(0, 1) = 1.0, five.A(1, 0) = -1.0, five.A(2, 3) = 0.5, five.A(3, 2) = -0.5;
  CHECK(odd_leading(five, t) ==
        doctest::Approx(std::pow(4 * kPi * t, -2.5) * (t / std::tanh(t)) * (0.5 * t / std::tanh(0.5 * t))));
  CHECK(integrate_odd({{OddCurvature::plane(3, 1.0), 2.0}, {OddCurvature::plane(3, 0.0), 3.0}}, t) ==
        doctest::Approx(2 * odd_leading(OddCurvature::plane(3, 1.0), t) + 3 * std::pow(4 * kPi * t, -1.5)));

  OddCurvature bad = OddCurvature::plane(3, 1.0);
  bad.A(0, 1) = Complex(1.0, 0.1);
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("odd chain: H_r through Mehler gives the tanh density per spinor rank") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<OddCurvature> cases = {OddCurvature::plane(3, 1.0)};
  OddCurvature generic;
  generic.n = 3;
  generic.A = CM(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      generic.A(i, j) = u(rng);
      generic.A(j, i) = -generic.A(i, j);
    }
  cases.push_back(generic);
  CM a0(3, 3);
  a0(0, 2) = 0.4, a0(2, 0) = -0.4;
  for (const auto& o : cases)
    for (double r : {1.0, 4.0, 16.0}) {
      auto chain = odd_chain(o, a0, 0.5, r);
      CHECK(chain.order_rg == 2);
      CHECK(op_distance(chain.top, odd_model(o)) < 1e-14);
      CHECK(chain.density == doctest::Approx(odd_leading(o, 0.5)).epsilon(1e-10));
    }
  CHECK(grading_order(odd_model(cases[0]), GradingWeights::rG()) == 2);
}
