#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "getzler/graded_ops.hpp"

namespace getzler {

/// Rank-4 tensor R_{ijkl} over axes 1..n (curvature at the base point).
template <Scalar S>
class RiemannTensor {
 public:
  RiemannTensor() = default;
  explicit RiemannTensor(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), S(0)) {}

  /// R_{ijkl} = K(δ_ik δ_jl − δ_il δ_jk): the round sphere of sectional curvature K.
  static RiemannTensor constant_curvature(int n, const S& k) {
    RiemannTensor r(n);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j) {
          r.at(i, j, i, j) = k;
          r.at(i, j, j, i) = S(0) - k;
        }
    return r;
  }

  int dimension() const { return n_; }
  S& at(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  const S& operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  /// Antisymmetry in each pair and pair symmetry.
  bool has_curvature_symmetries() const {
    for (int i = 1; i <= n_; ++i)
      for (int j = 1; j <= n_; ++j)
        for (int k = 1; k <= n_; ++k)
          for (int l = 1; l <= n_; ++l) {
            const S& v = (*this)(i, j, k, l);
            if (!(v == S(0) - (*this)(j, i, k, l)) || !(v == S(0) - (*this)(i, j, l, k)) || !(v == (*this)(k, l, i, j)))
              return false;
          }
    return true;
  }

  S ricci(int j, int l) const {
    S s(0);
    for (int i = 1; i <= n_; ++i) s = s + (*this)(i, j, i, l);
    return s;
  }
  S scalar_curvature() const {
    S s(0);
    for (int j = 1; j <= n_; ++j) s = s + ricci(j, j);
    return s;
  }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>((((i - 1) * n_ + (j - 1)) * n_ + (k - 1)) * n_ + (l - 1));
  }
  int n_ = 0;
  std::vector<S> data_;
};

/// Polynomial jets of the local geometry in normal coordinates and a synchronous frame:
///   ∇_i = ∂_i + ¼ Γ_ij^k c(e_j) c(e_k) + h_i,
/// with |g|^{1/4}, g^{ij}, the Levi-Civita symbols Γ^k_ij and Scal. All jets are multiplication
/// operators (twist identity times a scalar polynomial, except h_i, which may carry twist matrices
/// and the formal parameter). `clifford` holds the images c(e_1)..c(e_n): abstract generators by
/// default, or explicit twist matrices for a concrete Clifford module.
template <Scalar S>
struct GeometryJets {
  int n = 0;
  int twist = 1;
  int bound = 0;
  GradedOperator<S> g4jet;
  std::vector<GradedOperator<S>> inverse_metric;  // [i][j]
  std::vector<GradedOperator<S>> levi_civita;     // [k][i][j]: Γ^k_ij
  std::vector<GradedOperator<S>> christoffel;     // [i][j][k]: Γ_ij^k of the spin connection
  GradedOperator<S> scal;
  std::vector<GradedOperator<S>> h;               // [i]
  std::vector<CliffordElement<S>> clifford;       // [i]: c(e_i)

  const GradedOperator<S>& ginv(int i, int j) const { return inverse_metric[idx2(i, j)]; }
  const GradedOperator<S>& gamma(int k, int i, int j) const { return levi_civita[idx3(k, i, j)]; }
  const GradedOperator<S>& spin(int i, int j, int k) const { return christoffel[idx3(i, j, k)]; }

  std::size_t idx2(int i, int j) const { return static_cast<std::size_t>((i - 1) * n + (j - 1)); }
  std::size_t idx3(int a, int b, int c) const { return static_cast<std::size_t>(((a - 1) * n + (b - 1)) * n + (c - 1)); }

  GradedOperator<S> zero() const { return GradedOperator<S>(n, twist); }
  GradedOperator<S> scalar_poly(const S& c) const { return GradedOperator<S>::constant(n, Matrix<S>::scalar(twist, c)); }
  GradedOperator<S> x(int i) const { return GradedOperator<S>::coordinate(n, twist, i); }

  static GeometryJets flat(int n, int twist, int bound) {
    GeometryJets g;
    g.n = n;
    g.twist = twist;
    g.bound = bound;
    g.g4jet = GradedOperator<S>::identity(n, twist);
    g.inverse_metric.assign(static_cast<std::size_t>(n * n), g.zero());
    for (int i = 1; i <= n; ++i) g.inverse_metric[g.idx2(i, i)] = GradedOperator<S>::identity(n, twist);
    g.levi_civita.assign(static_cast<std::size_t>(n * n * n), g.zero());
    g.christoffel.assign(static_cast<std::size_t>(n * n * n), g.zero());
    g.scal = g.zero();
    g.h.assign(static_cast<std::size_t>(n), g.zero());
    for (int i = 1; i <= n; ++i) g.clifford.push_back(CliffordElement<S>::generator(n, twist, i));
    return g;
  }

  /// Second-order normal-coordinate jets determined by a constant curvature tensor R and a constant
  /// twist curvature F (n×n antisymmetric array of twist matrices, F[i][j] at index (i−1)n+(j−1)):
  ///   g_ij = δ_ij − ⅓ R_ikjl x_k x_l,   g^ij = δ_ij + ⅓ R_ikjl x_k x_l,
  ///   |g|^{1/4} = 1 − (1/12) Ric_kl x_k x_l,   Scal = Σ R_ijij,
  ///   Γ_ij^k = −½ R_kjil x_l (spin connection),   h_i = −½ F_ij x_j,
  /// and Γ^k_ij computed from g by the Koszul formula.
  static GeometryJets from_riemann(const RiemannTensor<S>& r, const std::vector<Matrix<S>>& f, int bound) {
    const int n = r.dimension();
    if (!r.has_curvature_symmetries()) throw InputError("curvature tensor lacks the Riemann symmetries");
    const int twist = f.empty() ? 1 : static_cast<int>(f.front().rows());
    if (!f.empty() && f.size() != static_cast<std::size_t>(n * n)) throw InputError("twist curvature must be n×n");
    if (bound < 2) throw InputError("curvature jets need truncation bound ≥ 2");
    GeometryJets g = flat(n, twist, bound);
    const S third = ScalarTraits<S>::ratio(1, 3);

    std::vector<GradedOperator<S>> metric(static_cast<std::size_t>(n * n), g.zero());
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        GradedOperator<S> quad = g.zero();
        for (int k = 1; k <= n; ++k)
          for (int l = 1; l <= n; ++l)
            if (!(r(i, k, j, l) == S(0))) quad += r(i, k, j, l) * (g.x(k) * g.x(l));
        auto delta = i == j ? GradedOperator<S>::identity(n, twist) : g.zero();
        metric[g.idx2(i, j)] = delta - third * quad;
        g.inverse_metric[g.idx2(i, j)] = delta + third * quad;
      }

    GradedOperator<S> ric = g.zero();
    for (int k = 1; k <= n; ++k)
      for (int l = 1; l <= n; ++l)
        if (!(r.ricci(k, l) == S(0))) ric += r.ricci(k, l) * (g.x(k) * g.x(l));
    g.g4jet = GradedOperator<S>::identity(n, twist) - ScalarTraits<S>::ratio(1, 12) * ric;
    g.scal = g.scalar_poly(r.scalar_curvature());

    auto deriv = [&](int a, const GradedOperator<S>& p) {
      return apply(GradedOperator<S>::derivative(n, twist, a), JetSection<S>(p, bound)).poly();
    };
    const S half = ScalarTraits<S>::ratio(1, 2);
    for (int k = 1; k <= n; ++k)
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          GradedOperator<S> acc = g.zero();
          for (int l = 1; l <= n; ++l) {
            auto koszul = deriv(i, metric[g.idx2(j, l)]) + deriv(j, metric[g.idx2(i, l)]) - deriv(l, metric[g.idx2(i, j)]);
            if (koszul.is_zero()) continue;
            acc += compose(g.inverse_metric[g.idx2(k, l)], koszul);
          }
          g.levi_civita[g.idx3(k, i, j)] = JetSection<S>(half * acc, bound).poly();
        }

    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k) {
          GradedOperator<S> acc = g.zero();
          for (int l = 1; l <= n; ++l)
            if (!(r(k, j, i, l) == S(0))) acc += r(k, j, i, l) * g.x(l);
          g.christoffel[g.idx3(i, j, k)] = (S(0) - half) * acc;
        }

    if (!f.empty())
      for (int i = 1; i <= n; ++i) {
        GradedOperator<S> acc = g.zero();
        for (int j = 1; j <= n; ++j)
          if (!f[g.idx2(i, j)].is_zero()) acc += compose(GradedOperator<S>::constant(n, f[g.idx2(i, j)]), g.x(j));
        g.h[static_cast<std::size_t>(i - 1)] = (S(0) - half) * acc;
      }
    return g;
  }
};

/// ∂_i + ¼ Σ Γ_ij^k c_j c_k + h_i.
template <Scalar S>
GradedOperator<S> connection_operator(const GeometryJets<S>& g, int i) {
  auto op = GradedOperator<S>::derivative(g.n, g.twist, i) + g.h[static_cast<std::size_t>(i - 1)];
  const S quarter = ScalarTraits<S>::ratio(1, 4);
  for (int j = 1; j <= g.n; ++j)
    for (int k = 1; k <= g.n; ++k) {
      const auto& gam = g.spin(i, j, k);
      if (gam.is_zero()) continue;
      op += quarter * compose(gam, GradedOperator<S>::constant(g.clifford[j - 1] * g.clifford[k - 1]));
    }
  return op;
}

/// Twist curvature F_ij = [∂_i + h_i, ∂_j + h_j] as a multiplication operator.
template <Scalar S>
GradedOperator<S> twist_curvature(const GeometryJets<S>& g, int i, int j) {
  auto a = GradedOperator<S>::derivative(g.n, g.twist, i) + g.h[static_cast<std::size_t>(i - 1)];
  auto b = GradedOperator<S>::derivative(g.n, g.twist, j) + g.h[static_cast<std::size_t>(j - 1)];
  return compose(a, b) - compose(b, a);
}

/// c(F) = ½ Σ F_ij c(e_i) c(e_j).
template <Scalar S>
GradedOperator<S> clifford_curvature(const GeometryJets<S>& g) {
  GradedOperator<S> out = g.zero();
  for (int i = 1; i <= g.n; ++i)
    for (int j = 1; j <= g.n; ++j) {
      if (i == j) continue;
      auto f = twist_curvature(g, i, j);
      if (f.is_zero()) continue;
      out += ScalarTraits<S>::ratio(1, 2) * compose(f, GradedOperator<S>::constant(g.clifford[i - 1] * g.clifford[j - 1]));
    }
  return out;
}

/// Lichnerowicz form of the squared Dirac operator in normal coordinates:
///   D² = −g^{ij}(∇_i∇_j − Γ^k_ij ∇_k) + Scal/4 + c(F).
template <Scalar S>
GradedOperator<S> lichnerowicz_operator(const GeometryJets<S>& g) {
  std::vector<GradedOperator<S>> nabla;
  for (int i = 1; i <= g.n; ++i) nabla.push_back(connection_operator(g, i));
  GradedOperator<S> lap = g.zero();
  for (int i = 1; i <= g.n; ++i)
    for (int j = 1; j <= g.n; ++j) {
      const auto& gij = g.ginv(i, j);
      if (gij.is_zero()) continue;
      auto inner = compose(nabla[i - 1], nabla[j - 1]);
      for (int k = 1; k <= g.n; ++k)
        if (!g.gamma(k, i, j).is_zero()) inner -= compose(g.gamma(k, i, j), nabla[k - 1]);
      lap += compose(gij, inner);
    }
  return ScalarTraits<S>::ratio(1, 4) * g.scal + clifford_curvature(g) - lap;
}

/// Model operator −Σ_i (∂_i + ¼ x_j Ω_ij)² + F with exterior-algebra coefficients,
/// Ω_ij = ½ Σ R_ijab e^a∧e^b and F = ½ Σ F_ab e^a∧e^b.
template <Scalar S>
GradedOperator<S> purified_model(const RiemannTensor<S>& r, const std::vector<Matrix<S>>& f, int twist) {
  const int n = r.dimension();
  const auto ext = AlgebraKind::exterior;
  const S half = ScalarTraits<S>::ratio(1, 2), quarter = ScalarTraits<S>::ratio(1, 4);
  auto two_form = [&](int a, int b) {
    return GradedOperator<S>::constant(
        ExteriorElement<S>::generator(n, twist, a) * ExteriorElement<S>::generator(n, twist, b));
  };
  GradedOperator<S> out(n, twist, ext);
  for (int i = 1; i <= n; ++i) {
    auto conn = GradedOperator<S>::derivative(n, twist, i, ext);
    for (int j = 1; j <= n; ++j)
      for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
          if (!(r(i, j, a, b) == S(0)))
            conn += (quarter * half * r(i, j, a, b)) * compose(GradedOperator<S>::coordinate(n, twist, j, ext), two_form(a, b));
    out -= compose(conn, conn);
  }
  if (!f.empty())
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b) {
        const auto& fab = f[static_cast<std::size_t>((a - 1) * n + (b - 1))];
        if (!fab.is_zero()) out += half * compose(GradedOperator<S>::constant(n, fab, ext), two_form(a, b));
      }
  return out;
}

template <Scalar S>
struct HeatCoefficients {
  int n = 0;
  std::vector<JetSection<S>> theta;
};

/// Θ_0 = |g|^{−1/4};  Θ_j = −|g|^{−1/4} · Ray_j(|g|^{1/4} · D2 Θ_{j−1}), where Ray_j maps
/// x^I ↦ x^I/(j+|I|). The radial derivative of the transport equation is the plain ∂_r: in a
/// synchronous frame x^i h_i = 0, so the connection terms drop out along rays. Each step consumes
/// reach(D2) degrees of the truncation bound D. For every preset under which ord(D2) ≤ 2 the
/// bound ord(Θ_j) ≤ 2j is asserted.
template <Scalar S>
HeatCoefficients<S> theta_recursion(const GradedOperator<S>& d2, const GeometryJets<S>& geo, int J, int D) {
  if (J < 0) throw InputError("theta_recursion: J must be non-negative");
  if (D < 0) throw InputError("theta_recursion: truncation bound must be non-negative");
  if (geo.n != d2.dimension() || geo.twist != d2.twist()) throw InputError("theta_recursion: geometry and operator disagree");
  const AlgebraKind kind = d2.kind();
  JetSection<S> g4(geo.g4jet.with_kind(kind), D);
  const auto c0 = g4.value_at_origin();
  if (!(c0 == CliffordElement<S>::unit(geo.n, geo.twist))) throw InputError("|g|^{1/4} jet must equal 1 at the origin");
  const JetSection<S> g4inv = jet_inverse(g4);

  std::vector<GradingWeights> checked;
  for (auto w : {GradingWeights::cG(), GradingWeights::pG(), GradingWeights::rG()})
    if (auto o = grading_order(d2, w); !o || *o <= 2) checked.push_back(w);

  HeatCoefficients<S> out{geo.n, {g4inv}};
  for (int j = 1; j <= J; ++j) {
    auto step = g4 * apply(d2, out.theta.back());
    out.theta.push_back(S(-1) * (g4inv * ray_integrate(step, j)));
  }
  for (std::size_t j = 0; j < out.theta.size(); ++j)
    for (const auto& w : checked)
      if (auto o = grading_order(out.theta[j].poly(), w); o && *o > 2 * static_cast<int>(j))
        throw std::logic_error("theta_recursion: grading bound ord(Θ_j) ≤ 2j violated at j = " + std::to_string(j));
  return out;
}

/// (j + x·∂)(|g|^{1/4}Θ_j) + |g|^{1/4} D2 Θ_{j−1}: the transport equation residual, zero within the bound.
template <Scalar S>
JetSection<S> transport_residual(const GradedOperator<S>& d2, const GeometryJets<S>& geo, const HeatCoefficients<S>& h, int j) {
  if (j < 1 || j >= static_cast<int>(h.theta.size())) throw InputError("transport_residual: j out of range");
  JetSection<S> g4(geo.g4jet.with_kind(d2.kind()), h.theta[0].bound());
  auto euler = S(j) * GradedOperator<S>::identity(geo.n, geo.twist, d2.kind());
  for (int i = 1; i <= geo.n; ++i)
    euler += compose(GradedOperator<S>::coordinate(geo.n, geo.twist, i, d2.kind()),
                     GradedOperator<S>::derivative(geo.n, geo.twist, i, d2.kind()));
  auto lhs = apply(euler, g4 * h.theta[j]);
  auto rhs = g4 * apply(d2, h.theta[j - 1]);
  return lhs + rhs;
}

/// (4πt)^{−d/2} Σ_j t^j Θ_j(0), numerically.
template <Scalar S>
CliffordElement<Complex> diagonal_value(const HeatCoefficients<S>& h, double t, int prefactor_dim,
                                        const std::optional<S>& param_value = std::nullopt) {
  if (!(t > 0)) throw InputError("diagonal_value: t must be positive");
  const int n = h.n;
  const int twist = h.theta.front().twist();
  CliffordElement<Complex> out(n, twist);
  double tj = 1.0;
  for (const auto& th : h.theta) {
    auto jet = param_value ? th.substitute_param(*param_value) : th;
    const auto origin = jet.value_at_origin();
    for (const auto& [w, c] : origin.terms()) out.add_term(w, Complex(tj) * to_numeric(c));
    tj *= t;
  }
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * prefactor_dim) * out;
}

/// (4π)^{−n/2} str Θ_{n/2}(0), with the power of 4π kept symbolic.
template <Scalar S>
FourPiScaled<S> supertrace_density(const HeatCoefficients<S>& h) {
  if (h.n % 2) throw InputError("supertrace_density: odd dimension has no supertrace");
  const int m = h.n / 2;
  if (static_cast<int>(h.theta.size()) <= m) throw InputError("supertrace_density: need J ≥ n/2");
  return {supertrace(h.theta[static_cast<std::size_t>(m)].value_at_origin()), m};
}

}  // namespace getzler
