#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <ostream>

#include "getzler/algebra.hpp"

namespace getzler {

/// Even element of the exterior algebra Λ(e^1..e^16) with coefficients in S: a commutative,
/// nilpotent coefficient ring (products of more than n/2 two-forms vanish in dimension n).
/// Forms are keyed by the bit mask of the basis word.
template <Scalar S>
class FormScalar {
 public:
  using Terms = std::map<std::uint32_t, S>;

  FormScalar() = default;
  FormScalar(long v) : FormScalar(S(v)) {}  // NOLINT(implicit)
  FormScalar(const S& v) {                   // NOLINT(implicit)
    if (!(v == S(0))) terms_.emplace(0u, v);
  }

  /// Basis form e^{i1}∧…∧e^{ik} (indices strictly increasing, even count) times `c`.
  static FormScalar basis(const std::vector<int>& indices, const S& c = S(1)) {
    if (indices.size() % 2) throw InputError("FormScalar holds even forms only");
    FormScalar f;
    if (!(c == S(0))) f.terms_.emplace(CliffordWord::from_indices(indices).mask, c);
    return f;
  }
  /// e^a∧e^b for any a ≠ b (sign from reordering); zero when a = b.
  static FormScalar two_form(int a, int b, const S& c = S(1)) {
    if (a == b) return {};
    return a < b ? basis({a, b}, c) : basis({b, a}, S(0) - c);
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of the basis word with the given mask.
  S coefficient(std::uint32_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? S(0) : it->second;
  }
  S constant_term() const { return coefficient(0u); }
  int max_degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, std::popcount(m));
    return d;
  }
  /// Sub-sum of forms of the given degree.
  FormScalar degree_part(int k) const {
    FormScalar f;
    for (const auto& [m, c] : terms_)
      if (std::popcount(m) == k) f.terms_.emplace(m, c);
    return f;
  }

  FormScalar& operator+=(const FormScalar& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  FormScalar& operator-=(const FormScalar& o) {
    for (const auto& [m, c] : o.terms_) add(m, S(0) - c);
    return *this;
  }
  friend FormScalar operator+(FormScalar a, const FormScalar& b) { return a += b; }
  friend FormScalar operator-(FormScalar a, const FormScalar& b) { return a -= b; }
  friend FormScalar operator-(const FormScalar& a) {
    FormScalar r;
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, S(0) - c);
    return r;
  }
  friend FormScalar operator*(const FormScalar& a, const FormScalar& b) {
    FormScalar r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        auto [sign, w] = word_product(AlgebraKind::exterior, CliffordWord{ma}, CliffordWord{mb});
        if (sign == 0) continue;
        S v = ca * cb;
        r.add(w.mask, sign > 0 ? v : S(0) - v);
      }
    return r;
  }
  friend FormScalar operator/(const FormScalar& a, const S& s) {
    FormScalar r;
    for (const auto& [m, c] : a.terms_) r.add(m, c / s);
    return r;
  }
  friend bool operator==(const FormScalar& a, const FormScalar& b) { return a.terms_ == b.terms_; }

  friend std::ostream& operator<<(std::ostream& os, const FormScalar& f) {
    if (f.terms_.empty()) return os << '0';
    bool first = true;
    for (const auto& [m, c] : f.terms_) {
      os << (first ? "" : " + ") << c;
      for (int i : CliffordWord{m}.indices()) os << "e" << i;
      first = false;
    }
    return os;
  }

 private:
  void add(std::uint32_t m, const S& c) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second = it->second + c;
    if (it->second == S(0)) terms_.erase(it);
  }
  Terms terms_;
};

template <Scalar S>
struct ScalarTraits<FormScalar<S>> {
  static constexpr bool exact = ScalarTraits<S>::exact;
  static FormScalar<S> ratio(long num, long den) { return ScalarTraits<S>::ratio(num, den); }
  static FormScalar<S> from_rational(const mpq_class& q) { return ScalarTraits<S>::from_rational(q); }
  static FormScalar<S> imag_unit() { return ScalarTraits<S>::imag_unit(); }
  static bool is_zero(const FormScalar<S>& z) { return z.is_zero(); }
};

}  // namespace getzler
