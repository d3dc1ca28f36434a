#pragma once

#include <optional>
#include <vector>

#include "getzler/forms.hpp"
#include "getzler/graded_ops.hpp"
#include "getzler/mehler.hpp"

namespace getzler {

// ---------------------------------------------------------------------------------------------
// Index density

template <Scalar S>
struct IndexDensityInput {
  int n = 0;
  Matrix<FormScalar<S>> R;  // n×n, antisymmetric, entries are 2-forms
  Matrix<FormScalar<S>> F;  // N×N twist curvature
};

/// Full even form (4π)^{−n/2} is kept symbolic: returns (−2i)^{n/2}·√det((R/2)/sinh(R/2))·tr e^{−F}.
template <Scalar S>
FormScalar<S> index_form(const IndexDensityInput<S>& in) {
  if (in.n % 2) throw InputError("index_density: n must be even");
  if (in.R.rows() != static_cast<std::size_t>(in.n)) throw InputError("index_density: R must be n×n");
  const auto m = mehler_nilpotent(in.R, in.F, S(1));
  const S vol = volume_supertrace<S>(in.n);
  return FormScalar<S>(vol) * m.diagonal().trace();
}

/// Top-degree coefficient of (4π)^{−n/2}(−2i)^{n/2}·√det((R/2)/sinh(R/2))·tr e^{−F}.
template <Scalar S>
FourPiScaled<S> index_density(const IndexDensityInput<S>& in) {
  const FormScalar<S> form = index_form(in);
  return {form.coefficient(CliffordWord::full(in.n).mask), in.n / 2};
}

/// Σ_k w_k · density_k, numerically.
template <Scalar S>
Complex integrate_index_density(const std::vector<IndexDensityInput<S>>& samples, const std::vector<double>& weights) {
  if (samples.size() != weights.size()) throw InputError("integrate_index_density: one weight per sample");
  Complex total = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) total += weights[k] * index_density(samples[k]).numeric();
  return total;
}

// ---------------------------------------------------------------------------------------------
// Model-data extraction

/// Reads R and F off an operator of the form −Σ(∂_i + g_i + ¼x_jR_ij)² + F (constant g_i is a gauge
/// and is removed by conjugation). A formal parameter is substituted first. Throws InputError if the
/// operator has any other shape.
ModelData extract_model_data(const GradedOperator<Complex>& h, std::optional<Complex> param = std::nullopt,
                             double tolerance = 1e-9);

/// e^{g·x} H e^{−g·x}: every ∂_i becomes ∂_i − g_i.
GradedOperator<Complex> gauge_shift(const GradedOperator<Complex>& h, const std::vector<Complex>& g);

// ---------------------------------------------------------------------------------------------
// Bergman-type leading term on a flat complex model

/// Exterior algebra Λ(ℂ^m) with creation/annihilation operators in the Jordan-Wigner basis
/// (basis index = bit mask of the word Z̄^S).
struct AntiHolomorphicModule {
  int m = 0;
  std::vector<Matrix<Complex>> eps;   // ε(Z̄^l)
  std::vector<Matrix<Complex>> iota;  // ι(Z̄_l)

  explicit AntiHolomorphicModule(int m);
  std::size_t size() const { return std::size_t{1} << m; }
  /// c(e_{2l−1}) = ε_l − ι_l, c(e_{2l}) = i(ε_l + ι_l); j is 1-based.
  Matrix<Complex> clifford(int j) const;
  /// ½ Σ F_ij c(e_i) c(e_j).
  Matrix<Complex> clifford_curvature(const Matrix<Complex>& f) const;
};

struct ComplexCurvature {
  int m = 1;
  Matrix<Complex> Fdot;                  // Ḟ^L, m×m, diagonalizable
  Matrix<Complex> FEdot;                 // lower-order line twist in the same form (optional)

  static ComplexCurvature diagonal(const std::vector<double>& a, const std::vector<double>& e = {});
  void validate() const;
  int n() const { return 2 * m; }
  Complex tau() const { return Fdot.trace(); }
  std::vector<Complex> eigenvalues() const;
};

/// Real-frame components F_ij = F(e_i, e_j) of the (1,1)-form with F(Z_a, Z̄_b) = Ḟ_ba.
Matrix<Complex> real_form(const Matrix<Complex>& fdot);
/// ω_d = −Σ F(Z_l, Z̄_k) ε(Z̄^k) ι(Z̄_l) on Λ(ℂ^m); with this pairing c(F^L) = −(2ω_d + τ).
Matrix<Complex> omega_d(const ComplexCurvature& c);

/// p^{n/2}(2π)^{−n/2}·e^{2uω_d}·det(Ḟ)/det(1 − e^{−2uḞ}) on the exterior word space.
Matrix<Complex> bergman_leading(const ComplexCurvature& c, double u, long p);

/// D_p² = −Σ(∂_i + p·h^L_i + h^E_i)² + p·c(F^L) + c(F^E), with h_i = −½F_ij x_j; p stays formal.
GradedOperator<Complex> bergman_operator(const ComplexCurvature& c);
/// Q_p = −Σ(∂_i − (p/2)x_j F^L_ij)² − p(2ω_d + τ), p formal.
GradedOperator<Complex> bergman_model(const ComplexCurvature& c);
/// Connection terms below the leading p-order: Σ_i h^E_i (multiplication operators).
GradedOperator<Complex> bergman_lower_connection(const ComplexCurvature& c, int i);

struct BergmanChain {
  GradedOperator<Complex> full;  // D_p²
  GradedOperator<Complex> top;   // top_part(D_p², pG)
  ModelData model;               // read from `top` at the given p, t = u/p
  Matrix<Complex> kernel;        // k_{u/p}(0,0) from Mehler
  std::optional<int> order_full;
};

BergmanChain bergman_chain(const ComplexCurvature& c, double u, long p);

// ---------------------------------------------------------------------------------------------
// Odd-dimensional leading trace

/// A = i·da: real antisymmetric n×n with n odd.
struct OddCurvature {
  int n = 3;
  Matrix<Complex> A;

  void validate() const;
  static OddCurvature plane(int n, double b);  // b in the (1,2)-plane
};

/// Scaling weights ord(x) = −1, ord(∂) = 1, ord(r) = 2 that isolate the field-carrying terms.
inline constexpr GradingWeights kParabolicWeights{-1, 1, 0, 2};

/// (4πt)^{−n/2}·√det(f(itA)) with f(x) = x/tanh x (pairs ±iλ of A contribute tλ/tanh tλ).
double odd_leading(const OddCurvature& o, double t);
double integrate_odd(const std::vector<std::pair<OddCurvature, double>>& samples, double t);

/// (D^r)² = −Σ(∂_k + r a_k + a⁰_k)² + r c(da) + c(F_0) on flat ℝⁿ ⊗ spinors, a_k = ½x_j da_jk,
/// da = −iA, F_0 = −iA0; r stays formal.
GradedOperator<Complex> odd_operator(const OddCurvature& o, const Matrix<Complex>& A0);
/// H_r = −Σ(∂_k + r a_k)² + r c(da).
GradedOperator<Complex> odd_model(const OddCurvature& o);

struct OddChain {
  GradedOperator<Complex> full;
  GradedOperator<Complex> top;
  ModelData model;
  Matrix<Complex> kernel;   // k_{t/r}(0,0) on spinors
  double density = 0.0;     // r^{−n/2}·tr k / 2^{(n−1)/2}
  std::optional<int> order_rg;
};

OddChain odd_chain(const OddCurvature& o, const Matrix<Complex>& A0, double t, double r);

}  // namespace getzler
