#include "getzler/mehler.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace getzler {

namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const Matrix<Complex>& m) {
  EMat e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Matrix<Complex> from_eigen(const EMat& e) {
  Matrix<Complex> m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

std::vector<mpq_class> bernoulli(int count) {
  std::vector<mpq_class> b(count + 1);
  b[0] = 1;
  for (int m = 1; m <= count; ++m) {
    mpq_class s = 0;
    mpz_class binom = 1;  // C(m+1, k)
    for (int k = 0; k < m; ++k) {
      s += binom * b[k];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    b[m] = -s / (m + 1);
  }
  return b;
}

mpz_class factorial(int k) {
  mpz_class f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Σ_k c_k y^k with y a matrix, Horner form.
Matrix<Complex> horner(const std::vector<mpq_class>& c, const Matrix<Complex>& y) {
  Matrix<Complex> acc = Matrix<Complex>::scalar(y.rows(), c.back().get_d());
  for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * y + Matrix<Complex>::scalar(y.rows(), it->get_d());
  return acc;
}

constexpr int kSeriesTerms = 24;   // |reduced argument| ≤ 1/2: remainder far below 1e-16
constexpr double kReducedNorm = 0.5;

int scaling_steps(const Matrix<Complex>& m) {
  const double norm = norm_inf(m);
  int s = 0;
  while (norm / std::ldexp(1.0, s) > kReducedNorm) {
    if (++s > 200) throw std::domain_error("matrix_fn: argument norm is not finite");
  }
  return s;
}

}  // namespace

SeriesName parse_series_name(const std::string& name) {
  if (name == "x_over_sinh_x") return SeriesName::x_over_sinh_x;
  if (name == "x_coth_x") return SeriesName::x_coth_x;
  if (name == "exp") return SeriesName::exp;
  if (name == "half_x_over_sinh_half_x") return SeriesName::half_x_over_sinh_half_x;
  if (name == "x_over_exp_half_diff") return SeriesName::x_over_exp_half_diff;
  if (name == "cosh") return SeriesName::cosh;
  throw InputError("unknown series name: " + name);
}

std::string series_name(SeriesName f) {
  switch (f) {
    case SeriesName::x_over_sinh_x: return "x_over_sinh_x";
    case SeriesName::x_coth_x: return "x_coth_x";
    case SeriesName::exp: return "exp";
    case SeriesName::half_x_over_sinh_half_x: return "half_x_over_sinh_half_x";
    case SeriesName::x_over_exp_half_diff: return "x_over_exp_half_diff";
    case SeriesName::cosh: return "cosh";
  }
  return "?";
}

bool is_even_series(SeriesName f) { return f != SeriesName::exp; }

std::vector<mpq_class> series_coefficients(SeriesName f, int terms) {
  if (terms < 1) throw InputError("series_coefficients: need at least one term");
  std::vector<mpq_class> c(terms);
  if (f == SeriesName::exp) {
    for (int k = 0; k < terms; ++k) c[k] = mpq_class(1, factorial(k));
    return c;
  }
  const auto b = bernoulli(2 * terms);
  for (int k = 0; k < terms; ++k) {
    const mpz_class pow4 = mpz_class(1) << (2 * k);
    const mpq_class inv_fact(1, factorial(2 * k));
    switch (f) {
      case SeriesName::x_over_sinh_x: c[k] = -(pow4 - 2) * b[2 * k] * inv_fact; break;
      case SeriesName::x_coth_x: c[k] = pow4 * b[2 * k] * inv_fact; break;
      case SeriesName::half_x_over_sinh_half_x:
      case SeriesName::x_over_exp_half_diff: c[k] = -(pow4 - 2) * b[2 * k] * inv_fact / pow4; break;
      case SeriesName::cosh: c[k] = inv_fact; break;
      case SeriesName::exp: break;
    }
    c[k].canonicalize();
  }
  return c;
}

Complex scalar_series_value(SeriesName f, Complex x) {
  const bool small = std::abs(x) < 1e-8;
  switch (f) {
    case SeriesName::x_over_sinh_x: return small ? 1.0 - x * x / 6.0 : x / std::sinh(x);
    case SeriesName::x_coth_x: return small ? 1.0 + x * x / 3.0 : x * std::cosh(x) / std::sinh(x);
    case SeriesName::exp: return std::exp(x);
    case SeriesName::half_x_over_sinh_half_x:
    case SeriesName::x_over_exp_half_diff: return scalar_series_value(SeriesName::x_over_sinh_x, x / 2.0);
    case SeriesName::cosh: return std::cosh(x);
  }
  return {};
}

Matrix<Complex> matrix_exp(const Matrix<Complex>& m) {
  if (!m.square()) throw InputError("matrix_exp: non-square matrix");
  const int s = scaling_steps(m);
  const Matrix<Complex> y = std::ldexp(1.0, -s) * m;
  Matrix<Complex> e = horner(series_coefficients(SeriesName::exp, kSeriesTerms), y);
  for (int i = 0; i < s; ++i) e = e * e;
  return e;
}

Matrix<Complex> matrix_fn(SeriesName f, const Matrix<Complex>& m) {
  if (!m.square()) throw InputError("matrix_fn: non-square matrix");
  for (const auto& v : m.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::domain_error("matrix_fn: non-finite entry");
  switch (f) {
    case SeriesName::exp: return matrix_exp(m);
    case SeriesName::half_x_over_sinh_half_x:
    case SeriesName::x_over_exp_half_diff: return matrix_fn(SeriesName::x_over_sinh_x, 0.5 * m);
    default: break;
  }
  const int s = scaling_steps(m);
  const Matrix<Complex> y = std::ldexp(1.0, -s) * m;
  Matrix<Complex> y2 = y * y;
  Matrix<Complex> ch = horner(series_coefficients(SeriesName::cosh, kSeriesTerms), y2);
  if (f == SeriesName::cosh) {
    for (int i = 0; i < s; ++i) ch = 2.0 * (ch * ch) - Matrix<Complex>::identity(m.rows());
    return ch;
  }
  if (f == SeriesName::x_over_sinh_x) {
    Matrix<Complex> g = horner(series_coefficients(SeriesName::x_over_sinh_x, kSeriesTerms), y2);
    for (int i = 0; i < s; ++i) {
      g = g * inverse(ch);
      ch = 2.0 * (ch * ch) - Matrix<Complex>::identity(m.rows());
    }
    return g;
  }
  Matrix<Complex> h = horner(series_coefficients(SeriesName::x_coth_x, kSeriesTerms), y2);
  for (int i = 0; i < s; ++i) {
    h = h + y2 * inverse(h);
    y2 = 4.0 * y2;
  }
  return h;
}

Matrix<Complex> matrix_fn_eigen(SeriesName f, const Matrix<Complex>& m) {
  if (!m.square()) throw InputError("matrix_fn_eigen: non-square matrix");
  Eigen::ComplexEigenSolver<EMat> es(to_eigen(m));
  if (es.info() != Eigen::Success) throw std::domain_error("matrix_fn_eigen: eigendecomposition failed");
  const EMat& v = es.eigenvectors();
  Eigen::VectorXcd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = scalar_series_value(f, d(i));
  return from_eigen(v * d.asDiagonal() * v.inverse());
}

Complex sqrt_det(const Matrix<Complex>& m) {
  if (!m.square()) throw InputError("sqrt_det: non-square matrix");
  const std::size_t k = m.rows();
  if (k == 0) return 1.0;
  Eigen::ComplexEigenSolver<EMat> es(to_eigen(m), false);
  if (es.info() != Eigen::Success) throw std::domain_error("sqrt_det: eigenvalue computation failed");
  const double scale = std::max(1.0, norm_inf(m));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) <= 1e-13 * scale && lam.real() <= 1e-13 * scale)
      throw std::domain_error("sqrt_det: eigenvalue on the closed negative real axis");
  }

  const Matrix<Complex> id = Matrix<Complex>::identity(k);
  Matrix<Complex> y = m;
  int halvings = 0;
  while (norm_inf(y - id) >= 0.25) {
    // Denman–Beavers iteration for the principal square root.
    Matrix<Complex> z = id;
    for (int it = 0; it < 100; ++it) {
      Matrix<Complex> y_next = 0.5 * (y + inverse(z));
      Matrix<Complex> z_next = 0.5 * (z + inverse(y));
      const double change = norm_inf(y_next - y);
      y = std::move(y_next);
      z = std::move(z_next);
      if (change <= 1e-15 * norm_inf(y)) break;
    }
    if (++halvings > 64) throw std::domain_error("sqrt_det: square-root reduction did not converge");
  }
  const Matrix<Complex> e = y - id;
  Matrix<Complex> power = id;
  Complex tr_log = 0.0;
  for (int j = 1; j <= 200; ++j) {
    power = power * e;
    const Complex term = power.trace() / static_cast<double>(j);
    tr_log += (j % 2 ? 1.0 : -1.0) * term;
    if (norm_inf(power) / j < 1e-18) break;
  }
  return std::exp(0.5 * std::ldexp(1.0, halvings) * tr_log);
}

void ModelData::validate() const {
  if (n < 1 || n > kMaxDimension) throw InputError("ModelData: n must lie in 1..16");
  if (R.rows() != static_cast<std::size_t>(n) || R.cols() != static_cast<std::size_t>(n))
    throw InputError("ModelData: R must be n×n");
  if (!F.square() || F.rows() == 0) throw InputError("ModelData: F must be a non-empty square matrix");
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("ModelData: t must be positive");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(R(i, j) + R(j, i)) > 1e-12 * std::max(1.0, norm_inf(R)))
        throw InputError("ModelData: R must be antisymmetric");
}

Matrix<Complex> MehlerValue::at(const std::vector<double>& x) const {
  if (x.size() != quadform.rows()) throw InputError("mehler_kernel: point has wrong dimension");
  Complex q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) q += x[i] * quadform(i, j) * x[j];
  return (prefactor * detfactor * std::exp(-q / (4.0 * t))) * endfactor;
}

MehlerValue mehler_value(const ModelData& m) {
  m.validate();
  MehlerValue v;
  v.t = m.t;
  v.prefactor = std::pow(4.0 * std::numbers::pi * m.t, -0.5 * m.n);
  const Matrix<Complex> half = (0.5 * m.t) * m.R;
  v.detfactor = sqrt_det(matrix_fn(SeriesName::x_over_sinh_x, half));
  v.quadform = matrix_fn(SeriesName::x_coth_x, half);
  v.endfactor = matrix_exp((-m.t) * m.F);
  return v;
}

Matrix<Complex> mehler_kernel(const ModelData& m, const std::vector<double>& x) { return mehler_value(m).at(x); }

GradedOperator<Complex> model_operator(const ModelData& m) {
  m.validate();
  const int n = m.n, twist = m.twist();
  GradedOperator<Complex> h = GradedOperator<Complex>::constant(n, m.F);
  for (int i = 1; i <= n; ++i) {
    auto conn = GradedOperator<Complex>::derivative(n, twist, i);
    for (int j = 1; j <= n; ++j)
      if (m.R(i - 1, j - 1) != Complex{}) conn += (0.25 * m.R(i - 1, j - 1)) * GradedOperator<Complex>::coordinate(n, twist, j);
    h -= compose(conn, conn);
  }
  return h;
}

}  // namespace getzler
