#pragma once

#include <string>
#include <vector>

#include "getzler/forms.hpp"
#include "getzler/graded_ops.hpp"
#include "getzler/matrix.hpp"

namespace getzler {

/// Named power series accepted by matrix_fn. All but `exp` are even.
/// (x/2)/sinh(x/2) and x/(e^{x/2} − e^{−x/2}) are the same function; both names are accepted.
enum class SeriesName { x_over_sinh_x, x_coth_x, exp, half_x_over_sinh_half_x, x_over_exp_half_diff, cosh };

SeriesName parse_series_name(const std::string& name);
std::string series_name(SeriesName f);
bool is_even_series(SeriesName f);

/// Exact Taylor coefficients: for even series the coefficient of x^{2k}, for exp that of x^k,
/// k = 0..terms−1.
std::vector<mpq_class> series_coefficients(SeriesName f, int terms);

/// Scalar value, used by the eigendecomposition cross-check.
Complex scalar_series_value(SeriesName f, Complex x);

/// Numeric matrix function by truncated series on a scaled argument, followed by the doubling
/// identities g(2x) = g(x)/cosh x, h(2x) = h(x) + x²/h(x), cosh 2x = 2cosh²x − 1, exp 2x = (exp x)².
Matrix<Complex> matrix_fn(SeriesName f, const Matrix<Complex>& m);

/// Cross-check path: f applied to the eigenvalues of a diagonalizable m.
Matrix<Complex> matrix_fn_eigen(SeriesName f, const Matrix<Complex>& m);

/// Matrix exponential (scaling and squaring).
Matrix<Complex> matrix_exp(const Matrix<Complex>& m);

/// Principal √det m = exp(½ tr log m); log m from Denman–Beavers square roots and the log series.
/// Rejects m with an eigenvalue on the closed negative real axis.
Complex sqrt_det(const Matrix<Complex>& m);

/// Series evaluation that must terminate because the argument is nilpotent (or the coefficient
/// ring is): stops at the first vanishing power and throws if none vanishes within max_terms.
template <typename T>
Matrix<T> matrix_fn_terminating(SeriesName f, const Matrix<T>& m, int max_terms = 40) {
  if (!m.square()) throw InputError("matrix_fn: non-square matrix");
  const auto coeffs = series_coefficients(f, max_terms);
  const bool even = is_even_series(f);
  const Matrix<T> step = even ? m * m : m;
  Matrix<T> acc = Matrix<T>::scalar(m.rows(), ScalarTraits<T>::from_rational(coeffs[0]));
  Matrix<T> power = Matrix<T>::identity(m.rows());
  for (int k = 1; k < max_terms; ++k) {
    power = power * step;
    if (power.is_zero()) return acc;
    if (coeffs[k] != 0) acc += ScalarTraits<T>::from_rational(coeffs[k]) * power;
  }
  throw std::domain_error("matrix_fn: series did not terminate; argument is not nilpotent");
}

/// √det of identity + nilpotent over a form-valued ring, by terminating log and exp series.
template <Scalar S>
FormScalar<S> sqrt_det(const Matrix<FormScalar<S>>& m) {
  if (!m.square()) throw InputError("sqrt_det: non-square matrix");
  const std::size_t k = m.rows();
  const Matrix<FormScalar<S>> eta = m - Matrix<FormScalar<S>>::identity(k);
  for (const auto& e : eta.data())
    if (!(e.constant_term() == S(0))) throw InputError("sqrt_det: argument must be identity plus a nilpotent part");
  FormScalar<S> tr_log;
  Matrix<FormScalar<S>> power = Matrix<FormScalar<S>>::identity(k);
  for (long j = 1;; ++j) {
    power = power * eta;
    if (power.is_zero()) break;
    const S c = ScalarTraits<S>::ratio(j % 2 ? 1 : -1, j);
    tr_log += FormScalar<S>(c) * power.trace();
  }
  const FormScalar<S> half_log = FormScalar<S>(ScalarTraits<S>::ratio(1, 2)) * tr_log;
  FormScalar<S> out(S(1)), term(S(1));
  for (long j = 1;; ++j) {
    term = term * half_log * FormScalar<S>(ScalarTraits<S>::ratio(1, j));
    if (term.is_zero()) break;
    out += term;
  }
  return out;
}

/// Numeric Mehler input: H = −Σ_i(∂_i + ¼ x_j R_ij)² + F on ℝⁿ ⊗ ℂ^N at time t.
struct ModelData {
  int n = 0;
  Matrix<Complex> R;
  Matrix<Complex> F;
  double t = 0.0;

  void validate() const;
  int twist() const { return static_cast<int>(F.rows()); }
};

/// p_t(x) = prefactor · detfactor · exp(−⟨x|quadform|x⟩/(4t)) · endfactor.
struct MehlerValue {
  double prefactor = 0.0;     // (4πt)^{−n/2}
  Complex detfactor;          // √det(tR/2 / sinh(tR/2))
  Matrix<Complex> quadform;   // (tR/2) coth(tR/2)
  Matrix<Complex> endfactor;  // e^{−tF}
  double t = 0.0;

  Matrix<Complex> at(const std::vector<double>& x) const;
};

MehlerValue mehler_value(const ModelData& m);
Matrix<Complex> mehler_kernel(const ModelData& m, const std::vector<double>& x);

/// The operator H of a ModelData instance, assembled with graded_ops.
GradedOperator<Complex> model_operator(const ModelData& m);

/// Mehler's formula over a nilpotent coefficient ring. The transcendental prefactor (4πt)^{−n/2}
/// is kept separate so the result stays exact.
template <Scalar S>
struct NilpotentMehler {
  int n = 0;
  S t;
  FormScalar<S> detfactor;
  Matrix<FormScalar<S>> quadform;
  Matrix<FormScalar<S>> endfactor;

  /// detfactor · e^{−tF}: the kernel at x = 0 without the prefactor.
  Matrix<FormScalar<S>> diagonal() const { return detfactor * endfactor; }
  double prefactor() const {
    return std::pow(4.0 * std::numbers::pi * ScalarTraits<S>::to_complex(t).real(), -0.5 * n);
  }
};

template <Scalar S>
NilpotentMehler<S> mehler_nilpotent(const Matrix<FormScalar<S>>& r, const Matrix<FormScalar<S>>& f, const S& t) {
  if (!r.square() || !f.square()) throw InputError("mehler_nilpotent: non-square input");
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.rows(); ++j)
      if (!(r(i, j) == -r(j, i))) throw InputError("mehler_nilpotent: R must be antisymmetric");
  NilpotentMehler<S> out;
  out.n = static_cast<int>(r.rows());
  out.t = t;
  const Matrix<FormScalar<S>> x = FormScalar<S>(t * ScalarTraits<S>::ratio(1, 2)) * r;
  out.detfactor = sqrt_det(matrix_fn_terminating(SeriesName::x_over_sinh_x, x));
  out.quadform = matrix_fn_terminating(SeriesName::x_coth_x, x);
  out.endfactor = matrix_fn_terminating(SeriesName::exp, FormScalar<S>(S(0) - t) * f);
  return out;
}

}  // namespace getzler
