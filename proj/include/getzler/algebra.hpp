#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "getzler/matrix.hpp"
#include "getzler/scalar.hpp"

namespace getzler {

inline constexpr int kMaxDimension = 16;

/// A strictly increasing subset of {1..n}, stored as a bit mask (bit i-1 <-> generator i).
struct CliffordWord {
  std::uint32_t mask = 0;

  static CliffordWord from_indices(const std::vector<int>& idx);  // 1-based, must be increasing
  static CliffordWord full(int n) { return {n >= 32 ? ~0u : ((1u << n) - 1u)}; }

  int length() const { return std::popcount(mask); }
  bool contains(int i) const { return (mask >> (i - 1)) & 1u; }
  std::vector<int> indices() const;

  friend bool operator==(CliffordWord a, CliffordWord b) = default;
  friend auto operator<=>(CliffordWord a, CliffordWord b) = default;
};

inline CliffordWord CliffordWord::from_indices(const std::vector<int>& idx) {
  CliffordWord w;
  int prev = 0;
  for (int i : idx) {
    if (i <= prev || i > kMaxDimension) throw InputError("CliffordWord: indices must be strictly increasing in 1..16");
    w.mask |= 1u << (i - 1);
    prev = i;
  }
  return w;
}

inline std::vector<int> CliffordWord::indices() const {
  std::vector<int> out;
  for (std::uint32_t m = mask; m; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

/// Sign from reordering the concatenation a·b into increasing order: one -1 per pair
/// (i in a, j in b) with i > j.
inline int reorder_sign(std::uint32_t a, std::uint32_t b) {
  int swaps = 0;
  for (std::uint32_t t = a >> 1; t; t >>= 1) swaps += std::popcount(t & b);
  return (swaps & 1) ? -1 : 1;
}

enum class AlgebraKind { clifford, exterior };

/// Product of basis words. Clifford: c^i c^i = -1. Exterior: e^i ^ e^i = 0 (sign 0).
inline std::pair<int, CliffordWord> word_product(AlgebraKind kind, CliffordWord a, CliffordWord b) {
  const std::uint32_t shared = a.mask & b.mask;
  if (kind == AlgebraKind::exterior && shared) return {0, {}};
  int sign = reorder_sign(a.mask, b.mask);
  if (std::popcount(shared) & 1) sign = -sign;
  return {sign, CliffordWord{a.mask ^ b.mask}};
}

/// Finite sum of basis words with N×N matrix coefficients over S (the twisting endomorphism
/// factor). Zero coefficients are never stored.
template <Scalar S, AlgebraKind Kind>
class WordAlgebraElement {
 public:
  using Coefficient = Matrix<S>;
  using Terms = std::map<CliffordWord, Coefficient>;

  WordAlgebraElement() = default;
  WordAlgebraElement(int n, int twist) : n_(n), twist_(twist) {
    if (n < 0 || n > kMaxDimension) throw InputError("algebra dimension must lie in 0..16");
    if (twist < 1) throw InputError("twist size must be positive");
  }

  static WordAlgebraElement unit(int n, int twist) {
    WordAlgebraElement e(n, twist);
    e.add_term({}, Coefficient::identity(twist));
    return e;
  }
  static WordAlgebraElement generator(int n, int twist, int i) {
    if (i < 1 || i > n) throw InputError("generator index out of range");
    return basis(n, twist, CliffordWord{1u << (i - 1)}, Coefficient::identity(twist));
  }
  static WordAlgebraElement basis(int n, int twist, CliffordWord w, Coefficient c) {
    WordAlgebraElement e(n, twist);
    e.add_term(w, std::move(c));
    return e;
  }

  int dimension() const { return n_; }
  int twist() const { return twist_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  const Coefficient* coefficient(CliffordWord w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? nullptr : &it->second;
  }

  void add_term(CliffordWord w, const Coefficient& c) {
    if (w.mask >> n_) throw InputError("word uses generators beyond the algebra dimension");
    if (c.rows() != static_cast<std::size_t>(twist_) || !c.square()) throw InputError("coefficient must be twist×twist");
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  WordAlgebraElement& operator+=(const WordAlgebraElement& o) {
    check_compatible(o);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  WordAlgebraElement& operator-=(const WordAlgebraElement& o) {
    check_compatible(o);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend WordAlgebraElement operator+(WordAlgebraElement a, const WordAlgebraElement& b) { return a += b; }
  friend WordAlgebraElement operator-(WordAlgebraElement a, const WordAlgebraElement& b) { return a -= b; }
  friend WordAlgebraElement operator-(const WordAlgebraElement& a) {
    WordAlgebraElement r(a.n_, a.twist_);
    for (const auto& [w, c] : a.terms_) r.terms_.emplace(w, -c);
    return r;
  }
  friend WordAlgebraElement operator*(const S& s, const WordAlgebraElement& a) {
    WordAlgebraElement r(a.n_, a.twist_);
    for (const auto& [w, c] : a.terms_) r.add_term(w, s * c);
    return r;
  }

  friend WordAlgebraElement operator*(const WordAlgebraElement& a, const WordAlgebraElement& b) {
    a.check_compatible(b);
    WordAlgebraElement r(a.n_, a.twist_);
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        auto [sign, w] = word_product(Kind, wa, wb);
        if (sign == 0) continue;
        Coefficient prod = ca * cb;
        if (sign < 0) prod = -prod;
        r.add_term(w, prod);
      }
    return r;
  }

  friend bool operator==(const WordAlgebraElement& a, const WordAlgebraElement& b) {
    return a.n_ == b.n_ && a.twist_ == b.twist_ && a.terms_ == b.terms_;
  }

  /// Largest word length present (-1 for zero).
  int top_length() const {
    int best = -1;
    for (const auto& [w, c] : terms_) best = std::max(best, w.length());
    return best;
  }

  void check_compatible(const WordAlgebraElement& o) const {
    if (n_ != o.n_ || twist_ != o.twist_) throw InputError("algebra elements differ in dimension or twist size");
  }

 private:
  int n_ = 0;
  int twist_ = 1;
  Terms terms_;
};

template <Scalar S>
using CliffordElement = WordAlgebraElement<S, AlgebraKind::clifford>;
template <Scalar S>
using ExteriorElement = WordAlgebraElement<S, AlgebraKind::exterior>;

template <Scalar S>
CliffordElement<S> clifford_mul(const CliffordElement<S>& a, const CliffordElement<S>& b) {
  return a * b;
}

template <Scalar S>
ExteriorElement<S> wedge(const ExteriorElement<S>& a, const ExteriorElement<S>& b) {
  return a * b;
}

/// (-2i)^{n/2} for even n.
template <Scalar S>
S volume_supertrace(int n) {
  if (n % 2) throw InputError("supertrace requires even dimension");
  S minus_two_i = S(0) - S(2) * ScalarTraits<S>::imag_unit();
  return pow_int(minus_two_i, static_cast<unsigned>(n / 2));
}

/// str(c^I) = 0 unless I is the full word; str(c^1...c^n) = (-2i)^{n/2}; twist factor traced.
template <Scalar S>
S supertrace(const CliffordElement<S>& a) {
  const int n = a.dimension();
  if (n % 2) throw InputError("supertrace undefined in odd dimension (bundle is not Z2-graded)");
  const auto* top = a.coefficient(CliffordWord::full(n));
  if (!top) return S(0);
  return volume_supertrace<S>(n) * top->trace();
}

/// Word-for-word transfer of coefficients into the exterior algebra.
template <Scalar S>
ExteriorElement<S> exterior_symbol(const CliffordElement<S>& a) {
  ExteriorElement<S> e(a.dimension(), a.twist());
  for (const auto& [w, c] : a.terms()) e.add_term(w, c);
  return e;
}

/// Explicit irreducible matrix representation of Cl(n)⊗C with c^i c^j + c^j c^i = -2δ_ij, of size
/// 2^{floor(n/2)}, built from Jordan-Wigner strings of Pauli matrices. For even n, `grading` is the
/// chirality operator i^{n/2} c^1...c^n, normalized so that tr(grading · c^1...c^n) = (-2i)^{n/2}.
template <Scalar S>
struct SpinRepresentation {
  int n = 0;
  std::vector<Matrix<S>> gamma;  // gamma[i-1] represents c^i
  Matrix<S> grading;             // empty for odd n

  std::size_t size() const { return gamma.empty() ? 1 : gamma.front().rows(); }

  Matrix<S> word(CliffordWord w) const {
    Matrix<S> m = Matrix<S>::identity(size());
    for (int i : w.indices()) m = m * gamma[i - 1];
    return m;
  }

  /// Image of a twisted Clifford element in End(S) ⊗ End(W).
  Matrix<S> represent(const CliffordElement<S>& a) const {
    Matrix<S> out(size() * a.twist(), size() * a.twist());
    for (const auto& [w, c] : a.terms()) out += kron(word(w), c);
    return out;
  }
};

template <Scalar S>
SpinRepresentation<S> spin_representation(int n) {
  if (n < 1 || n > 12) throw InputError("spin_representation: n must lie in 1..12");
  const S i = ScalarTraits<S>::imag_unit();
  const Matrix<S> id = Matrix<S>::identity(2);
  const Matrix<S> s1(2, 2, {S(0), S(1), S(1), S(0)});
  const Matrix<S> s2(2, 2, {S(0), S(0) - i, i, S(0)});
  const Matrix<S> s3(2, 2, {S(1), S(0), S(0), S(-1)});
  const int m = n / 2;

  auto string_op = [&](int site, const Matrix<S>& op) {
    Matrix<S> out = Matrix<S>::identity(1);
    for (int k = 0; k < m; ++k) out = kron(out, k < site ? s3 : (k == site ? op : id));
    return out;
  };

  SpinRepresentation<S> rep;
  rep.n = n;
  for (int k = 0; k < m; ++k) {
    rep.gamma.push_back(i * string_op(k, s1));
    rep.gamma.push_back(i * string_op(k, s2));
  }
  if (n % 2) {
    Matrix<S> chirality = Matrix<S>::identity(1);
    for (int k = 0; k < m; ++k) chirality = kron(chirality, s3);
    rep.gamma.push_back(i * chirality);
  } else {
    rep.grading = pow_int(i, static_cast<unsigned>(m)) * rep.word(CliffordWord::full(n));
  }
  return rep;
}

}  // namespace getzler
