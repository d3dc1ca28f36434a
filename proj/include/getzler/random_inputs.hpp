#pragma once

// Random exact inputs for property tests and the verification suite.

#include <algorithm>
#include <random>

#include "getzler/algebra.hpp"

namespace getzler::random_inputs {

using Q = ComplexRational;

inline Q random_rational(std::mt19937& rng, int range = 3) {
  std::uniform_int_distribution<long> num(-range, range), den(1, 3);
  return Q(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

inline Matrix<Q> random_matrix(std::mt19937& rng, int k, int range = 3) {
  Matrix<Q> m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = random_rational(rng, range);
  return m;
}

inline CliffordElement<Q> random_clifford(std::mt19937& rng, int n, int twist, int terms = 4) {
  CliffordElement<Q> e(n, twist);
  std::uniform_int_distribution<std::uint32_t> word(0, (1u << n) - 1);
  for (int t = 0; t < terms; ++t) e.add_term(CliffordWord{word(rng)}, random_matrix(rng, twist));
  return e;
}

/// Random element supported on words of one parity.
inline CliffordElement<Q> random_homogeneous(std::mt19937& rng, int n, int twist, int parity, int terms = 4) {
  CliffordElement<Q> e(n, twist);
  std::uniform_int_distribution<std::uint32_t> word(0, (1u << n) - 1);
  terms = std::min(terms, 1 << (n - 1));
  while (static_cast<int>(e.terms().size()) < terms) {
    CliffordWord w{word(rng)};
    if (w.length() % 2 == parity) e.add_term(w, random_matrix(rng, twist));
  }
  return e;
}

}  // namespace getzler::random_inputs

#include "getzler/graded_ops.hpp"

namespace getzler::random_inputs {

inline MultiIndex random_index(std::mt19937& rng, int n, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree), axis(1, n);
  MultiIndex m;
  for (int k = deg(rng); k > 0; --k) {
    int a = axis(rng);
    m.set(a, m[a] + 1);
  }
  return m;
}

struct RandomOperatorShape {
  int n = 2;
  int twist = 1;
  int monomials = 4;
  int max_x = 2;
  int max_d = 2;
  int max_param = 2;
  bool clifford_words = true;
  AlgebraKind kind = AlgebraKind::clifford;
};

inline GradedOperator<Q> random_operator(std::mt19937& rng, const RandomOperatorShape& s) {
  GradedOperator<Q> op(s.n, s.twist, s.kind);
  std::uniform_int_distribution<std::uint32_t> word(0, (1u << s.n) - 1);
  std::uniform_int_distribution<int> param(0, s.max_param);
  for (int t = 0; t < s.monomials; ++t) {
    MonomialKey k{random_index(rng, s.n, s.max_x), CliffordWord{s.clifford_words ? word(rng) : 0u},
                  random_index(rng, s.n, s.max_d), param(rng)};
    op.add_term(k, random_matrix(rng, s.twist, 2));
  }
  return op;
}

inline JetSection<Q> random_jet(std::mt19937& rng, const RandomOperatorShape& s, int bound) {
  RandomOperatorShape shape = s;
  shape.max_d = 0;
  shape.max_x = bound;
  return JetSection<Q>(random_operator(rng, shape), bound);
}

}  // namespace getzler::random_inputs

#include "getzler/heat_jets.hpp"

namespace getzler::random_inputs {

/// Σ_s (A_s ⊙ A_s) for random symmetric A_s: an algebraic curvature tensor (pair antisymmetry,
/// pair symmetry and the first Bianchi identity hold).
inline RiemannTensor<Q> random_curvature(std::mt19937& rng, int n, int summands = 2) {
  RiemannTensor<Q> r(n);
  for (int s = 0; s < summands; ++s) {
    std::vector<Q> a(static_cast<std::size_t>(n * n));
    std::uniform_int_distribution<long> v(-2, 2);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = Q(v(rng));
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k)
          for (int l = 1; l <= n; ++l)
            r.at(i, j, k, l) = r(i, j, k, l) + a[(i - 1) * n + (k - 1)] * a[(j - 1) * n + (l - 1)] -
                               a[(i - 1) * n + (l - 1)] * a[(j - 1) * n + (k - 1)];
  }
  return r;
}

/// Antisymmetric n×n array of random twist matrices, flattened row-major.
inline std::vector<Matrix<Q>> random_twist_curvature(std::mt19937& rng, int n, int twist) {
  std::vector<Matrix<Q>> f(static_cast<std::size_t>(n * n), Matrix<Q>(twist, twist));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      f[i * n + j] = random_matrix(rng, twist, 2);
      f[j * n + i] = -f[i * n + j];
    }
  return f;
}

}  // namespace getzler::random_inputs
