#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "getzler/algebra.hpp"
#include "getzler/multi_index.hpp"

namespace getzler {

/// Normal-ordered monomial label x^I c^J ∂^K · param^a.
struct MonomialKey {
  MultiIndex x;
  CliffordWord word;
  MultiIndex d;
  int param = 0;

  friend bool operator==(const MonomialKey&, const MonomialKey&) = default;
  friend auto operator<=>(const MonomialKey&, const MonomialKey&) = default;
};

/// Weights of a filtration: ord(x^I c^J ∂^K p^a) = w_x|I| + w_c|J| + w_d|K| + w_param·a.
struct GradingWeights {
  int w_x = -1;
  int w_d = 1;
  int w_c = 0;
  int w_param = 0;

  static constexpr GradingWeights cG() { return {-1, 1, 1, 0}; }
  static constexpr GradingWeights pG() { return {-1, 1, 0, 2}; }
  static constexpr GradingWeights rG() { return {-1, 1, 0, 1}; }

  int weight(const MonomialKey& k) const {
    return w_x * k.x.degree() + w_c * k.word.length() + w_d * k.d.degree() + w_param * k.param;
  }
  friend bool operator==(const GradingWeights&, const GradingWeights&) = default;
};

class TruncationOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite sum of monomials a · x^I c^J ∂^K · param^k, a an N×N matrix over S. The Clifford words
/// multiply with Clifford or exterior semantics according to `kind`.
template <Scalar S>
class GradedOperator {
 public:
  using Coefficient = Matrix<S>;
  using Terms = std::map<MonomialKey, Coefficient>;

  GradedOperator() = default;
  GradedOperator(int n, int twist, AlgebraKind kind = AlgebraKind::clifford) : n_(n), twist_(twist), kind_(kind) {
    if (n < 0 || n > kMaxDimension) throw InputError("operator dimension must lie in 0..16");
    if (twist < 1) throw InputError("twist size must be positive");
  }

  static GradedOperator identity(int n, int twist, AlgebraKind kind = AlgebraKind::clifford) {
    return monomial(n, twist, {}, Coefficient::identity(twist), kind);
  }
  static GradedOperator monomial(int n, int twist, const MonomialKey& k, const Coefficient& c,
                                 AlgebraKind kind = AlgebraKind::clifford) {
    GradedOperator op(n, twist, kind);
    op.add_term(k, c);
    return op;
  }
  static GradedOperator coordinate(int n, int twist, int i, AlgebraKind kind = AlgebraKind::clifford) {
    check_axis(n, i);
    return monomial(n, twist, {MultiIndex::axis(i), {}, {}, 0}, Coefficient::identity(twist), kind);
  }
  static GradedOperator derivative(int n, int twist, int i, AlgebraKind kind = AlgebraKind::clifford) {
    check_axis(n, i);
    return monomial(n, twist, {{}, {}, MultiIndex::axis(i), 0}, Coefficient::identity(twist), kind);
  }
  static GradedOperator parameter(int n, int twist, AlgebraKind kind = AlgebraKind::clifford) {
    return monomial(n, twist, {{}, {}, {}, 1}, Coefficient::identity(twist), kind);
  }
  /// Constant twist matrix (no Clifford factor).
  static GradedOperator constant(int n, const Coefficient& c, AlgebraKind kind = AlgebraKind::clifford) {
    return monomial(n, static_cast<int>(c.rows()), {}, c, kind);
  }
  /// Constant algebra element; the element's word semantics must match `Kind`.
  template <AlgebraKind Kind>
  static GradedOperator constant(const WordAlgebraElement<S, Kind>& e) {
    GradedOperator op(e.dimension(), e.twist(), Kind);
    for (const auto& [w, c] : e.terms()) op.add_term({{}, w, {}, 0}, c);
    return op;
  }

  int dimension() const { return n_; }
  int twist() const { return twist_; }
  AlgebraKind kind() const { return kind_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MonomialKey& k, const Coefficient& c) {
    if (k.word.mask >> n_ || k.x.max_axis() > n_ || k.d.max_axis() > n_)
      throw InputError("monomial uses axes or generators beyond the operator dimension");
    if (k.param < 0) throw InputError("parameter exponent must be non-negative");
    if (c.rows() != static_cast<std::size_t>(twist_) || !c.square()) throw InputError("coefficient must be twist×twist");
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  GradedOperator& operator+=(const GradedOperator& o) {
    check_compatible(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  GradedOperator& operator-=(const GradedOperator& o) {
    check_compatible(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  friend GradedOperator operator+(GradedOperator a, const GradedOperator& b) { return a += b; }
  friend GradedOperator operator-(GradedOperator a, const GradedOperator& b) { return a -= b; }
  friend GradedOperator operator-(const GradedOperator& a) { return S(-1) * a; }
  friend GradedOperator operator*(const S& s, const GradedOperator& a) {
    GradedOperator r(a.n_, a.twist_, a.kind_);
    for (const auto& [k, c] : a.terms_) r.add_term(k, s * c);
    return r;
  }
  /// Composition A∘B.
  friend GradedOperator operator*(const GradedOperator& a, const GradedOperator& b) { return compose(a, b); }

  friend bool operator==(const GradedOperator& a, const GradedOperator& b) {
    return a.n_ == b.n_ && a.twist_ == b.twist_ && a.kind_ == b.kind_ && a.terms_ == b.terms_;
  }

  /// Normal-ordered product by the Leibniz rule ∂^K x^S = Σ_{L≤K} C(K,L) ∂^L(x^S) ∂^{K−L}.
  friend GradedOperator compose(const GradedOperator& a, const GradedOperator& b) {
    a.check_compatible(b);
    GradedOperator r(a.n_, a.twist_, a.kind_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        auto [sign, w] = word_product(a.kind_, ka.word, kb.word);
        if (sign == 0) continue;
        Coefficient prod = ca * cb;
        if (sign < 0) prod = -prod;
        for_each_divisor(ka.d, [&](const MultiIndex& l) {
          const long f = falling_factorial(kb.x, l);
          if (f == 0) return;
          const long coef = multi_binomial(ka.d, l) * f;
          MonomialKey k{ka.x + (kb.x - l), w, (ka.d - l) + kb.d, ka.param + kb.param};
          r.add_term(k, coef == 1 ? prod : S(coef) * prod);
        });
      }
    return r;
  }

  /// Largest |K| − |I| over monomials: how many degrees an application can lose (0 for the zero operator).
  int reach() const {
    if (terms_.empty()) return 0;
    int best = std::numeric_limits<int>::min();
    for (const auto& [k, c] : terms_) best = std::max(best, k.d.degree() - k.x.degree());
    return best;
  }
  int max_param_exponent() const {
    int best = 0;
    for (const auto& [k, c] : terms_) best = std::max(best, k.param);
    return best;
  }
  bool is_multiplication() const {
    for (const auto& [k, c] : terms_)
      if (!k.d.is_unit()) return false;
    return true;
  }

  /// Replace the formal parameter by a value.
  GradedOperator substitute_param(const S& value) const {
    GradedOperator r(n_, twist_, kind_);
    for (const auto& [k, c] : terms_) {
      MonomialKey k2 = k;
      k2.param = 0;
      r.add_term(k2, k.param ? pow_int(value, static_cast<unsigned>(k.param)) * c : c);
    }
    return r;
  }

  /// Same monomials with the other word semantics (Clifford → exterior is the symbol map).
  GradedOperator with_kind(AlgebraKind kind) const {
    GradedOperator r = *this;
    r.kind_ = kind;
    return r;
  }

  /// Sub-sum of monomials satisfying pred(key).
  template <typename Pred>
  GradedOperator filter(Pred&& pred) const {
    GradedOperator r(n_, twist_, kind_);
    for (const auto& [k, c] : terms_)
      if (pred(k)) r.terms_.emplace(k, c);
    return r;
  }

  void check_compatible(const GradedOperator& o) const {
    if (n_ != o.n_ || twist_ != o.twist_) throw InputError("operators differ in dimension or twist size");
    if (kind_ != o.kind_) throw InputError("operators mix Clifford and exterior semantics");
  }

 private:
  static void check_axis(int n, int i) {
    if (i < 1 || i > n) throw InputError("axis index out of range");
  }

  int n_ = 0;
  int twist_ = 1;
  AlgebraKind kind_ = AlgebraKind::clifford;
  Terms terms_;
};

/// Maximum weight over monomials; nullopt stands for −∞ (zero operator).
template <Scalar S>
std::optional<int> grading_order(const GradedOperator<S>& a, const GradingWeights& w) {
  std::optional<int> best;
  for (const auto& [k, c] : a.terms()) {
    const int o = w.weight(k);
    if (!best || o > *best) best = o;
  }
  return best;
}

template <Scalar S>
GradedOperator<S> top_part(const GradedOperator<S>& a, const GradingWeights& w) {
  const auto top = grading_order(a, w);
  if (!top) return a;
  return a.filter([&](const MonomialKey& k) { return w.weight(k) == *top; });
}

/// Part of exactly the given order.
template <Scalar S>
GradedOperator<S> graded_component(const GradedOperator<S>& a, const GradingWeights& w, int order) {
  return a.filter([&](const MonomialKey& k) { return w.weight(k) == order; });
}

/// Top cG part with Clifford words replaced by exterior words.
template <Scalar S>
GradedOperator<S> model_operator(const GradedOperator<S>& a, const GradingWeights& w) {
  if (!(w == GradingWeights::cG())) throw InputError("model_operator is defined for the cG grading only");
  return top_part(a, w).with_kind(AlgebraKind::exterior);
}

/// Polynomial in x with algebra-element coefficients, known exactly up to total degree `bound`.
/// A formal parameter may be present. Terms beyond the bound are never stored; `dropped` counts
/// the terms discarded by arithmetic.
template <Scalar S>
class JetSection {
 public:
  JetSection() = default;
  JetSection(GradedOperator<S> poly, int bound) : poly_(std::move(poly)), bound_(bound) {
    if (bound < 0) throw InputError("jet truncation bound must be non-negative");
    if (!poly_.is_multiplication()) throw InputError("a jet section cannot contain derivatives");
    truncate();
  }
  static JetSection zero(int n, int twist, int bound, AlgebraKind kind = AlgebraKind::clifford) {
    return {GradedOperator<S>(n, twist, kind), bound};
  }
  static JetSection one(int n, int twist, int bound, AlgebraKind kind = AlgebraKind::clifford) {
    return {GradedOperator<S>::identity(n, twist, kind), bound};
  }
  /// Scalar polynomial Σ c_I x^I times the twist identity.
  static JetSection scalar(int n, int twist, int bound, const std::map<MultiIndex, S>& coeffs,
                           AlgebraKind kind = AlgebraKind::clifford) {
    GradedOperator<S> op(n, twist, kind);
    for (const auto& [i, c] : coeffs) op.add_term({i, {}, {}, 0}, Matrix<S>::scalar(twist, c));
    return {op, bound};
  }

  const GradedOperator<S>& poly() const { return poly_; }
  int bound() const { return bound_; }
  long dropped() const { return dropped_; }
  int dimension() const { return poly_.dimension(); }
  int twist() const { return poly_.twist(); }
  AlgebraKind kind() const { return poly_.kind(); }

  friend JetSection operator+(const JetSection& a, const JetSection& b) {
    JetSection r(a.poly_ + b.poly_, std::min(a.bound_, b.bound_));
    r.dropped_ += a.dropped_ + b.dropped_;
    return r;
  }
  friend JetSection operator-(const JetSection& a, const JetSection& b) { return a + S(-1) * b; }
  friend JetSection operator*(const S& s, const JetSection& a) {
    JetSection r = a;
    r.poly_ = s * a.poly_;
    return r;
  }
  /// Pointwise product (left factor's algebra coefficient acts first from the left).
  friend JetSection operator*(const JetSection& a, const JetSection& b) {
    JetSection r(compose(a.poly_, b.poly_), std::min(a.bound_, b.bound_));
    r.dropped_ += a.dropped_ + b.dropped_;
    return r;
  }
  friend bool operator==(const JetSection& a, const JetSection& b) {
    return a.bound_ == b.bound_ && a.poly_ == b.poly_;
  }

  /// Coefficient of the monomial x^I (summed over parameter powers only if no parameter is present).
  WordAlgebraElement<S, AlgebraKind::clifford> value_at_origin() const {
    WordAlgebraElement<S, AlgebraKind::clifford> e(dimension(), twist());
    for (const auto& [k, c] : poly_.terms()) {
      if (!k.x.is_unit()) continue;
      if (k.param) throw InputError("value_at_origin: formal parameter still present");
      e.add_term(k.word, c);
    }
    return e;
  }

  JetSection restricted(int bound) const {
    JetSection r = *this;
    r.bound_ = std::min(bound, bound_);
    r.truncate();
    return r;
  }

  JetSection substitute_param(const S& value) const {
    JetSection r = *this;
    r.poly_ = poly_.substitute_param(value);
    return r;
  }

 private:
  void truncate() {
    const int b = bound_;
    auto kept = poly_.filter([b](const MonomialKey& k) { return k.x.degree() <= b; });
    dropped_ += static_cast<long>(poly_.terms().size() - kept.terms().size());
    poly_ = std::move(kept);
  }

  template <Scalar T>
  friend JetSection<T> apply(const GradedOperator<T>&, const JetSection<T>&, const std::optional<T>&);

  GradedOperator<S> poly_;
  int bound_ = 0;
  long dropped_ = 0;
};

/// A acting as a differential operator on the polynomial section s. The result is known exactly up
/// to degree bound(s) − reach(A); asking for more than the jet can support is an error.
template <Scalar S>
JetSection<S> apply(const GradedOperator<S>& a, const JetSection<S>& s, const std::optional<S>& param_value = std::nullopt) {
  a.check_compatible(s.poly());
  const int reach = a.reach();
  if (s.bound() < reach)
    throw TruncationOverflow("apply: operator reaches " + std::to_string(reach) + " degrees but the jet is known only to degree " +
                             std::to_string(s.bound()));
  const int out_bound = s.bound() - reach;
  GradedOperator<S> out(a.dimension(), a.twist(), a.kind());
  long dropped = s.dropped();
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [ks, cs] : s.poly().terms()) {
      const long f = falling_factorial(ks.x, ka.d);
      if (f == 0) continue;
      const MultiIndex xe = ka.x + (ks.x - ka.d);
      if (xe.degree() > out_bound) {
        ++dropped;
        continue;
      }
      auto [sign, w] = word_product(a.kind(), ka.word, ks.word);
      if (sign == 0) continue;
      Matrix<S> prod = ca * cs;
      S scale(sign * f);
      int param = ka.param + ks.param;
      if (param_value && param) {
        scale = scale * pow_int(*param_value, static_cast<unsigned>(param));
        param = 0;
      }
      out.add_term({xe, w, {}, param}, scale * prod);
    }
  JetSection<S> r(std::move(out), out_bound);
  r.dropped_ = dropped;
  return r;
}

/// x^I ↦ x^I / (j + |I|): the exact value of ∫_0^1 s^{j−1} f(sx) ds on monomials.
template <Scalar S>
JetSection<S> ray_integrate(const JetSection<S>& s, int j) {
  GradedOperator<S> out(s.dimension(), s.twist(), s.kind());
  for (const auto& [k, c] : s.poly().terms()) {
    const int den = j + k.x.degree();
    if (den <= 0) throw InputError("ray_integrate: divergent integral for a constant term with j = 0");
    out.add_term(k, ScalarTraits<S>::ratio(1, den) * c);
  }
  return JetSection<S>(std::move(out), s.bound());
}

/// Multiplicative inverse of a jet whose constant term is a nonzero multiple of the identity.
template <Scalar S>
JetSection<S> jet_inverse(const JetSection<S>& s) {
  const auto c0 = s.value_at_origin();
  const auto* unit = c0.coefficient({});
  if (!unit || c0.terms().size() != 1 || !(*unit == Matrix<S>::scalar(s.twist(), (*unit)(0, 0))))
    throw InputError("jet_inverse: constant term must be a nonzero multiple of the identity");
  const S lambda_inv = S(1) / (*unit)(0, 0);
  auto one = JetSection<S>::one(s.dimension(), s.twist(), s.bound(), s.kind());
  JetSection<S> u = one - lambda_inv * s;  // no constant term
  JetSection<S> acc = one, power = one;
  for (int k = 1; k <= s.bound(); ++k) {
    power = power * u;
    acc = acc + power;
  }
  return lambda_inv * acc;
}

}  // namespace getzler
