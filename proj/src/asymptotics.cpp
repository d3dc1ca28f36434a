#include "getzler/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace getzler {

namespace {

using Op = GradedOperator<Complex>;
using CM = Matrix<Complex>;
constexpr Complex kI{0.0, 1.0};

double max_abs(const CM& m) {
  double best = 0.0;
  for (const auto& v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

/// The scalar s when c = s·1 within tolerance.
std::optional<Complex> scalar_part(const CM& c, double tol) {
  const Complex s = c(0, 0);
  if (max_abs(c - CM::scalar(c.rows(), s)) > tol * std::max(1.0, std::abs(s))) return std::nullopt;
  return s;
}

Op scaled_coordinate(int n, int tw, int j, Complex s) { return s * Op::coordinate(n, tw, j); }

std::vector<Complex> eigenvalues_of(const CM& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(e, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  std::vector<Complex> out;
  for (Eigen::Index k = 0; k < e.rows(); ++k) out.push_back(solver.eigenvalues()(k));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

GradedOperator<Complex> gauge_shift(const GradedOperator<Complex>& h, const std::vector<Complex>& g) {
  const int n = h.dimension(), tw = h.twist();
  if (static_cast<int>(g.size()) != n) throw InputError("gauge_shift: one shift per axis");
  Op out(n, tw, h.kind());
  for (const auto& [key, c] : h.terms()) {
    Op term = Op::monomial(n, tw, {key.x, key.word, {}, key.param}, c, h.kind());
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < key.d[i]; ++k)
        term = term * (Op::derivative(n, tw, i, h.kind()) - g[i - 1] * Op::identity(n, tw, h.kind()));
    out += term;
  }
  return out;
}

ModelData extract_model_data(const GradedOperator<Complex>& h, std::optional<Complex> param, double tolerance) {
  const Op op = param ? h.substitute_param(*param) : h;
  if (op.max_param_exponent() > 0) throw InputError("extract_model_data: operator still depends on the parameter");
  const int n = op.dimension(), tw = op.twist();
  const auto shape_error = [](const std::string& what) {
    return InputError("extract_model_data: not of the form −Σ(∂_i + ¼x_jR_ij)² + F (" + what + ")");
  };
  std::vector<Complex> g(n, 0.0);
  for (const auto& [key, c] : op.terms()) {
    if (key.word.mask) throw shape_error("Clifford words present");
    if (key.d.degree() == 1 && key.x.is_unit()) {
      auto s = scalar_part(c, tolerance);
      if (!s) throw shape_error("matrix-valued first-order term");
      for (int i = 1; i <= n; ++i)
        if (key.d[i]) g[i - 1] = -0.5 * *s;
    }
  }
  const Op shifted = gauge_shift(op, g);

  ModelData m;
  m.n = n;
  m.R = CM(n, n);
  m.F = CM(tw, tw);
  m.t = 1.0;
  for (const auto& [key, c] : shifted.terms()) {
    if (key.d.degree() == 1 && key.x.degree() == 1) {
      auto s = scalar_part(c, tolerance);
      if (!s) throw shape_error("matrix-valued x∂ term");
      int i = 0, j = 0;
      for (int a = 1; a <= n; ++a) {
        if (key.d[a]) i = a;
        if (key.x[a]) j = a;
      }
      m.R(i - 1, j - 1) = -2.0 * *s;
    } else if (key.d.is_unit() && key.x.is_unit()) {
      m.F = c;
    }
  }
  if (max_abs(m.R + m.R.transpose()) > tolerance * std::max(1.0, max_abs(m.R))) throw shape_error("R not antisymmetric");
  const Op residual = shifted - model_operator(m);
  double scale = 1.0;
  for (const auto& [key, c] : shifted.terms()) scale = std::max(scale, max_abs(c));
  for (const auto& [key, c] : residual.terms())
    if (max_abs(c) > tolerance * scale) throw shape_error("unexpected remainder term");
  return m;
}

// ---------------------------------------------------------------------------------------------

AntiHolomorphicModule::AntiHolomorphicModule(int m_) : m(m_) {
  if (m < 1 || m > 6) throw InputError("complex dimension must lie in 1..6");
  const std::size_t dim = size();
  for (int l = 0; l < m; ++l) {
    CM e(dim, dim);
    for (std::size_t s = 0; s < dim; ++s) {
      if (s >> l & 1u) continue;
      const int before = std::popcount(static_cast<unsigned>(s & ((1u << l) - 1u)));
      e(s | (std::size_t{1} << l), s) = before % 2 ? -1.0 : 1.0;
    }
    eps.push_back(e);
    iota.push_back(e.transpose());
  }
}

Matrix<Complex> AntiHolomorphicModule::clifford(int j) const {
  if (j < 1 || j > 2 * m) throw InputError("Clifford generator index out of range");
  const int l = (j - 1) / 2;
  return j % 2 ? eps[l] - iota[l] : kI * (eps[l] + iota[l]);
}

Matrix<Complex> AntiHolomorphicModule::clifford_curvature(const Matrix<Complex>& f) const {
  CM out(size(), size());
  for (int i = 1; i <= 2 * m; ++i)
    for (int j = 1; j <= 2 * m; ++j)
      if (f(i - 1, j - 1) != Complex{}) out += (0.5 * f(i - 1, j - 1)) * (clifford(i) * clifford(j));
  return out;
}

ComplexCurvature ComplexCurvature::diagonal(const std::vector<double>& a, const std::vector<double>& e) {
  ComplexCurvature c;
  c.m = static_cast<int>(a.size());
  c.Fdot = CM(c.m, c.m);
  c.FEdot = CM(c.m, c.m);
  for (int j = 0; j < c.m; ++j) c.Fdot(j, j) = a[j];
  if (!e.empty()) {
    if (e.size() != a.size()) throw InputError("twist eigenvalues must match the complex dimension");
    for (int j = 0; j < c.m; ++j) c.FEdot(j, j) = e[j];
  }
  return c;
}

void ComplexCurvature::validate() const {
  if (m < 1 || m > 6) throw InputError("complex dimension must lie in 1..6");
  if (Fdot.rows() != static_cast<std::size_t>(m) || !Fdot.square()) throw InputError("Fdot must be m×m");
  if (FEdot.rows() != static_cast<std::size_t>(m) || !FEdot.square()) throw InputError("FEdot must be m×m");
}

std::vector<Complex> ComplexCurvature::eigenvalues() const { return eigenvalues_of(Fdot); }

Matrix<Complex> real_form(const Matrix<Complex>& fdot) {
  const int m = static_cast<int>(fdot.rows());
  const int n = 2 * m;
  const double r = 1.0 / std::numbers::sqrt2;
  // e_i = Σ α_ia Z_a + β_ia Z̄_a
  CM alpha(n, m), beta(n, m);
  for (int l = 0; l < m; ++l) {
    alpha(2 * l, l) = r;
    beta(2 * l, l) = r;
    alpha(2 * l + 1, l) = kI * r;
    beta(2 * l + 1, l) = -kI * r;
  }
  CM f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) s += alpha(i, a) * beta(j, b) * fdot(b, a) - beta(i, a) * alpha(j, b) * fdot(a, b);
      f(i, j) = s;
    }
  return f;
}

Matrix<Complex> omega_d(const ComplexCurvature& c) {
  c.validate();
  const AntiHolomorphicModule lam(c.m);
  CM out(lam.size(), lam.size());
  for (int l = 0; l < c.m; ++l)
    for (int k = 0; k < c.m; ++k)
      if (c.Fdot(k, l) != Complex{}) out -= c.Fdot(k, l) * (lam.eps[k] * lam.iota[l]);
  return out;
}

Matrix<Complex> bergman_leading(const ComplexCurvature& c, double u, long p) {
  c.validate();
  if (u <= 0.0 || p <= 0) throw InputError("bergman_leading needs u > 0 and p > 0");
  Complex ratio = 1.0;
  for (Complex a : c.eigenvalues()) {
    if (std::abs(a) < 1e-8) {
      ratio *= 1.0 / (2.0 * u) + a / 2.0;
      continue;
    }
    const Complex den = 1.0 - std::exp(-2.0 * u * a);
    if (std::abs(den) < 1e-13) throw std::domain_error("bergman_leading: singular denominator 1 − e^{−2ua}");
    ratio *= a / den;
  }
  const double scale = std::pow(static_cast<double>(p) / (2.0 * std::numbers::pi), c.m);
  return (scale * ratio) * matrix_exp((2.0 * u) * omega_d(c));
}

GradedOperator<Complex> bergman_lower_connection(const ComplexCurvature& c, int i) {
  c.validate();
  const int n = c.n(), tw = 1 << c.m;
  const CM fe = real_form(c.FEdot);
  Op h(n, tw);
  for (int j = 1; j <= n; ++j) h += scaled_coordinate(n, tw, j, -0.5 * fe(i - 1, j - 1));
  return h;
}

GradedOperator<Complex> bergman_operator(const ComplexCurvature& c) {
  c.validate();
  const int n = c.n(), tw = 1 << c.m;
  const AntiHolomorphicModule lam(c.m);
  const CM fl = real_form(c.Fdot), fe = real_form(c.FEdot);
  const Op p = Op::parameter(n, tw);
  Op d2(n, tw);
  for (int i = 1; i <= n; ++i) {
    Op hl(n, tw);
    for (int j = 1; j <= n; ++j) hl += scaled_coordinate(n, tw, j, -0.5 * fl(i - 1, j - 1));
    const Op nabla = Op::derivative(n, tw, i) + p * hl + bergman_lower_connection(c, i);
    d2 -= nabla * nabla;
  }
  d2 += p * Op::constant(n, lam.clifford_curvature(fl));
  d2 += Op::constant(n, lam.clifford_curvature(fe));
  return d2;
}

GradedOperator<Complex> bergman_model(const ComplexCurvature& c) {
  c.validate();
  const int n = c.n(), tw = 1 << c.m;
  const CM fl = real_form(c.Fdot);
  const Op p = Op::parameter(n, tw);
  Op q(n, tw);
  for (int i = 1; i <= n; ++i) {
    Op a(n, tw);
    for (int j = 1; j <= n; ++j) a += scaled_coordinate(n, tw, j, -0.5 * fl(i - 1, j - 1));
    const Op nabla = Op::derivative(n, tw, i) + p * a;
    q -= nabla * nabla;
  }
  const CM endo = 2.0 * omega_d(c) + CM::scalar(tw, c.tau());
  q -= p * Op::constant(n, endo);
  return q;
}

BergmanChain bergman_chain(const ComplexCurvature& c, double u, long p) {
  if (u <= 0.0 || p <= 0) throw InputError("bergman_chain needs u > 0 and p > 0");
  BergmanChain out{bergman_operator(c), Op(c.n(), 1 << c.m), {}, {}, {}};
  out.order_full = grading_order(out.full, GradingWeights::pG());
  out.top = top_part(out.full, GradingWeights::pG());
  out.model = extract_model_data(out.top, Complex(static_cast<double>(p)));
  out.model.t = u / static_cast<double>(p);
  out.kernel = mehler_value(out.model).at(std::vector<double>(c.n(), 0.0));
  return out;
}

// ---------------------------------------------------------------------------------------------

void OddCurvature::validate() const {
  if (n < 1 || n > 11 || n % 2 == 0) throw InputError("odd curvature needs odd n in 1..11");
  if (A.rows() != static_cast<std::size_t>(n) || !A.square()) throw InputError("A must be n×n");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (A(i, j).imag() != 0.0) throw InputError("A must be real");
      if (A(i, j) != -A(j, i)) throw InputError("A must be exactly antisymmetric");
    }
}

OddCurvature OddCurvature::plane(int n, double b) {
  OddCurvature o;
  o.n = n;
  o.A = CM(n, n);
  if (n >= 2) {
    o.A(0, 1) = b;
    o.A(1, 0) = -b;
  }
  o.validate();
  return o;
}

double odd_leading(const OddCurvature& o, double t) {
  o.validate();
  if (t <= 0.0) throw InputError("odd_leading needs t > 0");
  // eigenvalues μ = ±iλ of A; f(itμ) = f(∓tλ) with f(x) = x/tanh x real and even
  double det = 1.0;
  for (Complex mu : eigenvalues_of(o.A)) {
    const double x = t * mu.imag();
    det *= std::abs(x) < 1e-8 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
  }
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * o.n) * std::sqrt(det);
}

double integrate_odd(const std::vector<std::pair<OddCurvature, double>>& samples, double t) {
  double total = 0.0;
  for (const auto& [o, w] : samples) total += w * odd_leading(o, t);
  return total;
}

namespace {

Op odd_connection_part(int n, int tw, const CM& curvature, int k) {
  Op a(n, tw);
  for (int j = 1; j <= n; ++j) a += scaled_coordinate(n, tw, j, 0.5 * curvature(j - 1, k - 1));
  return a;
}

CM spinor_curvature(const SpinRepresentation<Complex>& rep, const CM& f) {
  CM out(rep.size(), rep.size());
  for (int i = 0; i < rep.n; ++i)
    for (int j = 0; j < rep.n; ++j)
      if (f(i, j) != Complex{}) out += (0.5 * f(i, j)) * (rep.gamma[i] * rep.gamma[j]);
  return out;
}

}  // namespace

GradedOperator<Complex> odd_operator(const OddCurvature& o, const Matrix<Complex>& A0) {
  o.validate();
  const int n = o.n;
  if (A0.rows() != static_cast<std::size_t>(n) || !A0.square()) throw InputError("A0 must be n×n");
  const auto rep = spin_representation<Complex>(n);
  const int tw = static_cast<int>(rep.size());
  const CM da = -kI * o.A, f0 = -kI * A0;
  const Op r = Op::parameter(n, tw);
  Op d2(n, tw);
  for (int k = 1; k <= n; ++k) {
    const Op nabla = Op::derivative(n, tw, k) + r * odd_connection_part(n, tw, da, k) + odd_connection_part(n, tw, f0, k);
    d2 -= nabla * nabla;
  }
  d2 += r * Op::constant(n, spinor_curvature(rep, da));
  d2 += Op::constant(n, spinor_curvature(rep, f0));
  return d2;
}

GradedOperator<Complex> odd_model(const OddCurvature& o) { return odd_operator(o, CM(o.n, o.n)); }

OddChain odd_chain(const OddCurvature& o, const Matrix<Complex>& A0, double t, double r) {
  if (t <= 0.0 || r <= 0.0) throw InputError("odd_chain needs t > 0 and r > 0");
  OddChain out{odd_operator(o, A0), {}, {}, {}, 0.0, {}};
  out.top = top_part(out.full, kParabolicWeights);
  out.order_rg = grading_order(out.top, GradingWeights::rG());
  out.model = extract_model_data(out.top, Complex(r));
  out.model.t = t / r;
  out.kernel = mehler_value(out.model).at(std::vector<double>(o.n, 0.0));
  const double rank = static_cast<double>(out.kernel.rows());
  out.density = std::pow(r, -0.5 * o.n) * out.kernel.trace().real() / rank;
  return out;
}

}  // namespace getzler
