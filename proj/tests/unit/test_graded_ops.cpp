#include "doctest.h"
#include "test_helpers.hpp"

using namespace getzler;
using getzler::testing::Q;
using Op = GradedOperator<Q>;

namespace {

Op x(int n, int i) { return Op::coordinate(n, 1, i); }
Op d(int n, int i) { return Op::derivative(n, 1, i); }
Op one(int n) { return Op::identity(n, 1); }
Op num(int n, long v) { return Q(v) * one(n); }
JetSection<Q> jet(const Op& p, int bound = 6) { return JetSection<Q>(p, bound); }

}  // namespace

TEST_CASE("compose: Leibniz examples") {
  CHECK(d(1, 1) * x(1, 1) == x(1, 1) * d(1, 1) + one(1));
  auto x2 = x(1, 1) * x(1, 1);
  CHECK(d(1, 1) * x2 == x2 * d(1, 1) + num(1, 2) * x(1, 1));

  // (x1 ∂2)(x2 ∂1) = x1 x2 ∂1 ∂2 + x1 ∂1, confirmed on the monomial basis.
  auto lhs = (x(2, 1) * d(2, 2)) * (x(2, 2) * d(2, 1));
  auto rhs = x(2, 1) * x(2, 2) * d(2, 1) * d(2, 2) + x(2, 1) * d(2, 1);
  CHECK(lhs == rhs);
  for (auto basis : {one(2), x(2, 1), x(2, 2), x(2, 1) * x(2, 2), x(2, 1) * x(2, 1)}) {
    auto s = jet(basis);
    auto staged = apply(x(2, 1) * d(2, 2), apply(x(2, 2) * d(2, 1), s));
    CHECK(apply(lhs, s).poly() == staged.poly());
  }
}

TEST_CASE("compose keeps Clifford factors through the Leibniz rule") {
  auto c1 = Op::constant(CliffordElement<Q>::generator(2, 1, 1));
  auto c2 = Op::constant(CliffordElement<Q>::generator(2, 1, 2));
  CHECK((c1 * d(2, 1)) * (x(2, 1) * c2) == x(2, 1) * c1 * c2 * d(2, 1) + c1 * c2);
  CHECK(c1 * c1 == num(2, -1));
}

TEST_CASE("grading_order examples") {
  auto c2 = Op::constant(CliffordElement<Q>::generator(3, 1, 2));
  CHECK(grading_order(x(3, 1) * c2 * d(3, 3), GradingWeights::cG()) == 1);
  CHECK(grading_order(Op::parameter(1, 1) * x(1, 1), GradingWeights::pG()) == 1);
  // r·a_k with a_k a constant endomorphism
  auto ra = Op::parameter(3, 2) * Op::constant(3, Matrix<Q>(2, 2, {Q(1), Q(2), Q(0), Q(-1)}));
  CHECK(grading_order(ra, GradingWeights::rG()) == 1);
  CHECK_FALSE(grading_order(Op(2, 1), GradingWeights::cG()).has_value());
}

TEST_CASE("top_part examples") {
  CHECK(top_part(d(1, 1) + x(1, 1), GradingWeights::cG()) == d(1, 1));
  auto xd = x(1, 1) * d(1, 1);
  CHECK(top_part(xd, GradingWeights::cG()) == xd);
  CHECK(top_part(Op(2, 1), GradingWeights::cG()).is_zero());

  // Connection ∂_i + pΓ^L_i + lower-order pieces: the pG top part keeps ∂_1 and the p-linear term.
  auto p = Op::parameter(2, 1);
  auto conn = d(2, 1) + Q(mpq_class(-1, 2)) * p * x(2, 2) + x(2, 2) * x(2, 1) + Q(3) * x(2, 2);
  CHECK(top_part(conn, GradingWeights::pG()) == d(2, 1) + Q(mpq_class(-1, 2)) * p * x(2, 2));
}

TEST_CASE("model_operator examples") {
  auto c12 = Op::constant(CliffordElement<Q>::basis(2, 1, CliffordWord::from_indices({1, 2}), Matrix<Q>::identity(1)));
  auto m = model_operator(c12 * d(2, 1), GradingWeights::cG());
  CHECK(m.kind() == AlgebraKind::exterior);
  auto e12 = Op::constant(ExteriorElement<Q>::basis(2, 1, CliffordWord::from_indices({1, 2}), Matrix<Q>::identity(1)));
  CHECK(m == e12 * d(2, 1).with_kind(AlgebraKind::exterior));

  auto lap = d(2, 1) * d(2, 1) + d(2, 2) * d(2, 2);
  CHECK(model_operator(lap, GradingWeights::cG()) == lap.with_kind(AlgebraKind::exterior));
  CHECK_THROWS_AS(model_operator(lap, GradingWeights::pG()), InputError);
}

TEST_CASE("apply examples and truncation bookkeeping") {
  auto x1sq = jet(x(1, 1) * x(1, 1), 4);
  CHECK(apply(d(1, 1), x1sq).poly() == num(1, 2) * x(1, 1));
  CHECK(apply(d(1, 1), x1sq).bound() == 3);
  CHECK(apply(x(1, 1) * d(1, 1), jet(x(1, 1), 3)).poly() == x(1, 1));

  auto lap = d(2, 1) * d(2, 1);
  CHECK_THROWS_AS(apply(lap, jet(x(2, 1), 1)), TruncationOverflow);

  // Multiplying a full-bound jet by x pushes the top terms past the bound: they are counted, not kept.
  auto s = jet(x(1, 1) * x(1, 1) + one(1), 2);
  auto xs = jet(x(1, 1), 2) * s;
  CHECK(xs.poly() == x(1, 1));
  CHECK(xs.dropped() == 1);

  // Parameter substitution.
  auto p = Op::parameter(1, 1);
  auto out = apply(p * d(1, 1), x1sq, std::optional<Q>(Q(3)));
  CHECK(out.poly() == num(1, 6) * x(1, 1));
  CHECK(apply(p * d(1, 1), x1sq).poly() == num(1, 2) * p * x(1, 1));
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(d(2, 1) * d(3, 1), InputError);
  CHECK_THROWS_AS(d(2, 1) + Op::derivative(2, 2, 1), InputError);
  CHECK_THROWS_AS(Op::derivative(2, 1, 3), InputError);
}

TEST_CASE("ray integration and jet inverse") {
  auto s = jet(one(2) + x(2, 1) * x(2, 2), 4);
  auto r = ray_integrate(s, 2);
  CHECK(r.poly() == Q(mpq_class(1, 2)) * one(2) + Q(mpq_class(1, 4)) * x(2, 1) * x(2, 2));
  CHECK_THROWS_AS(ray_integrate(s, 0), InputError);

  auto g = jet(one(2) - Q(mpq_class(1, 12)) * x(2, 1) * x(2, 1), 6);
  auto inv = jet_inverse(g);
  CHECK((g * inv).poly() == one(2));
}

namespace {

const GradingWeights kPresets[] = {GradingWeights::cG(), GradingWeights::pG(), GradingWeights::rG()};

}  // namespace

TEST_CASE("property: filtration inequality under all presets (Clifford and plain coefficients)") {
  std::mt19937 rng(17);
  for (const auto& w : kPresets)
    for (int trial = 0; trial < 150; ++trial) {
      getzler::testing::RandomOperatorShape shape;
      shape.n = 1 + trial % 4;
      shape.twist = 1 + trial % 2;
      shape.monomials = 1 + trial % 6;
      shape.clifford_words = trial % 3 != 0;
      auto a = getzler::testing::random_operator(rng, shape);
      auto b = getzler::testing::random_operator(rng, shape);
      auto ab = compose(a, b);
      auto oa = grading_order(a, w), ob = grading_order(b, w), oab = grading_order(ab, w);
      if (oab) CHECK(*oab <= *oa + *ob);
    }
}

TEST_CASE("property: composition is associative") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    getzler::testing::RandomOperatorShape shape;
    shape.n = 1 + trial % 3;
    shape.twist = 1 + trial % 2;
    shape.monomials = 3;
    shape.kind = trial % 4 == 0 ? AlgebraKind::exterior : AlgebraKind::clifford;
    auto a = getzler::testing::random_operator(rng, shape);
    auto b = getzler::testing::random_operator(rng, shape);
    auto c = getzler::testing::random_operator(rng, shape);
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
  }
}

TEST_CASE("property: apply is a homomorphism within the truncation bound") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    getzler::testing::RandomOperatorShape shape;
    shape.n = 1 + trial % 3;
    shape.twist = 1 + trial % 2;
    shape.monomials = 3;
    auto a = getzler::testing::random_operator(rng, shape);
    auto b = getzler::testing::random_operator(rng, shape);
    auto s = getzler::testing::random_jet(rng, shape, 6);
    auto lhs = apply(compose(a, b), s);
    auto rhs = apply(a, apply(b, s));
    const int bound = std::min(lhs.bound(), rhs.bound());
    CHECK(lhs.restricted(bound).poly() == rhs.restricted(bound).poly());
  }
}

TEST_CASE("property: top_part is idempotent") {
  std::mt19937 rng(31);
  for (const auto& w : kPresets)
    for (int trial = 0; trial < 30; ++trial) {
      getzler::testing::RandomOperatorShape shape;
      shape.n = 1 + trial % 4;
      auto a = getzler::testing::random_operator(rng, shape);
      CHECK(top_part(top_part(a, w), w) == top_part(a, w));
    }
}
