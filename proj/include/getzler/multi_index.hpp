#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

#include "getzler/algebra.hpp"

namespace getzler {

/// Exponent vector over axes 1..16; |I| is the total degree. The zero vector is the unit index.
struct MultiIndex {
  std::array<std::uint8_t, kMaxDimension> exps{};

  static MultiIndex axis(int i, int multiplicity = 1) {
    MultiIndex m;
    m.set(i, multiplicity);
    return m;
  }
  /// Sorted (axis, multiplicity) pairs; axes strictly increasing, multiplicities positive.
  static MultiIndex from_pairs(const std::vector<std::pair<int, int>>& pairs) {
    MultiIndex m;
    int prev = 0;
    for (auto [axis, mult] : pairs) {
      if (axis <= prev || mult <= 0) throw InputError("MultiIndex: axes must increase strictly with positive multiplicity");
      m.set(axis, mult);
      prev = axis;
    }
    return m;
  }
  /// Expanded form, e.g. {1,1,3} for x_1^2 x_3.
  static MultiIndex from_list(const std::vector<int>& axes) {
    MultiIndex m;
    for (int a : axes) m.set(a, m[a] + 1);
    return m;
  }

  int operator[](int axis) const { return exps[axis - 1]; }
  void set(int axis, int value) {
    if (axis < 1 || axis > kMaxDimension) throw InputError("MultiIndex: axis out of range");
    if (value < 0 || value > 255) throw InputError("MultiIndex: exponent out of range");
    exps[axis - 1] = static_cast<std::uint8_t>(value);
  }

  int degree() const {
    int d = 0;
    for (auto e : exps) d += e;
    return d;
  }
  bool is_unit() const { return degree() == 0; }
  /// Highest axis with nonzero exponent (0 for the unit index).
  int max_axis() const {
    for (int i = kMaxDimension; i >= 1; --i)
      if ((*this)[i]) return i;
    return 0;
  }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= kMaxDimension; ++i)
      if ((*this)[i]) out.emplace_back(i, (*this)[i]);
    return out;
  }

  bool divides(const MultiIndex& o) const {
    for (int k = 0; k < kMaxDimension; ++k)
      if (exps[k] > o.exps[k]) return false;
    return true;
  }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    for (int k = 0; k < kMaxDimension; ++k) {
      int s = a.exps[k] + b.exps[k];
      if (s > 255) throw InputError("MultiIndex: exponent overflow");
      r.exps[k] = static_cast<std::uint8_t>(s);
    }
    return r;
  }
  /// Componentwise difference; requires b ≤ a.
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    for (int k = 0; k < kMaxDimension; ++k) r.exps[k] = static_cast<std::uint8_t>(a.exps[k] - b.exps[k]);
    return r;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Π_i C(k_i, l_i).
inline long multi_binomial(const MultiIndex& k, const MultiIndex& l) {
  long r = 1;
  for (int a = 0; a < kMaxDimension; ++a) {
    long c = 1;
    for (int j = 0; j < l.exps[a]; ++j) c = c * (k.exps[a] - j) / (j + 1);
    r *= c;
  }
  return r;
}

/// Π_i s_i!/(s_i − l_i)!, the coefficient of ∂^L x^S = (coef) x^{S−L}; zero unless L ≤ S.
inline long falling_factorial(const MultiIndex& s, const MultiIndex& l) {
  long r = 1;
  for (int a = 0; a < kMaxDimension; ++a) {
    if (l.exps[a] > s.exps[a]) return 0;
    for (int j = 0; j < l.exps[a]; ++j) r *= s.exps[a] - j;
  }
  return r;
}

/// Calls f(L) for every L ≤ K componentwise.
template <typename F>
void for_each_divisor(const MultiIndex& k, F&& f) {
  MultiIndex l;
  const int top = k.max_axis();
  while (true) {
    f(l);
    int a = 0;
    while (a < top && l.exps[a] == k.exps[a]) l.exps[a++] = 0;
    if (a >= top) return;
    ++l.exps[a];
  }
}

}  // namespace getzler
