#include "getzler/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

namespace getzler {

namespace {

using EMat = Eigen::MatrixXcd;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAdjointTolerance = 1e-12;

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

long gcd_long(long a, long b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

struct BlockResult {
  std::vector<double> eigenvalues;
  std::vector<int> fiber_of;
  double adjointness_defect = 0.0;
  double scalar_minimum = std::numeric_limits<double>::infinity();
  int components = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// Splits H into connected components and diagonalizes each one.
BlockResult diagonalize(const EMat& h, const Matrix<Complex>& fiber) {
  BlockResult out;
  out.adjointness_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (out.adjointness_defect > kAdjointTolerance)
    throw std::runtime_error("lattice operator is not self-adjoint to 1e-12");

  const auto n = static_cast<std::size_t>(h.rows());
  const auto nf = fiber.rows();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (h(i, j) != Complex{}) uf.unite(i, j);
  std::vector<std::vector<Eigen::Index>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(static_cast<Eigen::Index>(i));

  for (const auto& idx : groups) {
    if (idx.empty()) continue;
    ++out.components;
    const auto k = static_cast<Eigen::Index>(idx.size());
    EMat sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = h(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<EMat> solver(sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("lattice eigensolve failed");

    int f = static_cast<int>(idx.front() % nf);
    for (auto i : idx)
      if (static_cast<int>(i % nf) != f) f = -1;
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index a = 0; a < k; ++a) {
      out.eigenvalues.push_back(ev(a));
      out.fiber_of.push_back(f);
    }
    if (f >= 0) out.scalar_minimum = std::min(out.scalar_minimum, ev(0) - fiber(f, f).real());
  }
  return out;
}

void add_fiber(EMat& h, std::size_t site, const Matrix<Complex>& fiber, double potential) {
  const auto nf = fiber.rows();
  for (std::size_t a = 0; a < nf; ++a) {
    for (std::size_t b = 0; b < nf; ++b) h(site * nf + a, site * nf + b) += fiber(a, b);
    h(site * nf + a, site * nf + a) += potential;
  }
}

/// Adds v on (a, b) and its conjugate on (b, a) for every fiber component.
void add_hop(EMat& h, std::size_t a, std::size_t b, Complex v, std::size_t nf) {
  for (std::size_t f = 0; f < nf; ++f) {
    h(a * nf + f, b * nf + f) += v;
    h(b * nf + f, a * nf + f) += std::conj(v);
  }
}

/// Periodic chain of `sites` points.
EMat chain_operator(int sites, double spacing, const Matrix<Complex>& fiber, const std::vector<double>& potential) {
  const auto nf = fiber.rows();
  const double inv = 1.0 / (spacing * spacing);
  EMat h = EMat::Zero(sites * nf, sites * nf);
  for (int x = 0; x < sites; ++x) {
    for (std::size_t f = 0; f < nf; ++f) h(x * nf + f, x * nf + f) += 2.0 * inv;
    add_hop(h, x, (x + 1) % sites, -inv, nf);
    add_fiber(h, x, fiber, potential.empty() ? 0.0 : potential[x]);
  }
  return h;
}

/// Bloch block of the Hofstadter operator: y = y0 + stride·m, quasi-momentum kappa along the stride.
EMat magnetic_block(const LatticeSpec& spec, int stride, double kappa) {
  const int L = spec.L;
  const auto nf = static_cast<std::size_t>(spec.fibers());
  const double theta = spec.flux_angle();
  const double inv = 1.0 / (spec.h * spec.h);
  const std::size_t sites = static_cast<std::size_t>(L) * stride;
  EMat h = EMat::Zero(sites * nf, sites * nf);
  auto site = [&](int x, int y0) { return static_cast<std::size_t>(x) * stride + y0; };
  for (int x = 0; x < L; ++x)
    for (int y0 = 0; y0 < stride; ++y0) {
      const std::size_t s = site(x, y0);
      for (std::size_t f = 0; f < nf; ++f) h(s * nf + f, s * nf + f) += 4.0 * inv;
      // y-hop carries the Landau-gauge phase; wrapping the cell picks up the Bloch phase
      Complex py = std::polar(1.0, theta * x);
      if (y0 + 1 == stride) py *= std::polar(1.0, kappa);
      add_hop(h, s, site(x, (y0 + 1) % stride), -inv * py, nf);
      // x-hop across the torus boundary carries the twist that keeps the flux uniform
      Complex px = x + 1 == L ? std::polar(1.0, -theta * L * y0) : Complex(1.0);
      add_hop(h, s, site((x + 1) % L, y0), -inv * px, nf);
      add_fiber(h, s, spec.fiber, spec.potential.empty() ? 0.0 : spec.potential[x * L + y0]);
    }
  return h;
}

template <typename Job>
std::vector<BlockResult> run_jobs(const std::vector<Job>& jobs, int workers) {
  std::vector<BlockResult> results(jobs.size());
  workers = std::max(1, workers);
  std::size_t next = 0;
  while (next < jobs.size()) {
    std::vector<std::future<BlockResult>> batch;
    for (int w = 0; w < workers && next < jobs.size(); ++w, ++next)
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, jobs[next]));
    const std::size_t start = next - batch.size();
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }
  return results;
}

}  // namespace

void LatticeSpec::validate() const {
  require(n >= 1 && n <= 3, "lattice dimension must be 1, 2 or 3");
  require(L >= 2, "lattice needs at least two sites per axis");
  require(n != 2 || L <= 128, "2D lattices are limited to L <= 128 (dense eigensolve)");
  require(h > 0.0, "lattice spacing must be positive");
  require(fiber.square() && fiber.rows() >= 1, "fiber endomorphism must be square");
  require(circle_sites >= 0, "circle sites must be non-negative");
  if (n == 1) require(flux == 0, "a 1D lattice carries no flux");
  mpq_class quanta = flux * L * L;
  quanta.canonicalize();
  require(quanta.get_den() == 1, "flux quantization violated: flux per plaquette times L^2 must be an integer");
  const std::size_t expected = n == 1 ? L : static_cast<std::size_t>(L) * L;
  require(potential.empty() || potential.size() == expected, "potential must have one sample per site");
}

long LatticeSpec::flux_quanta() const {
  mpq_class q = flux * L * L;
  q.canonicalize();
  return q.get_num().get_si();
}

double LatticeSpec::flux_angle() const { return kTwoPi * flux.get_d(); }
double LatticeSpec::field() const { return flux_angle() / (h * h); }

double LatticeSpec::volume() const {
  const double side = L * h;
  if (n == 1) return side;
  if (n == 2) return side * side;
  return side * side * (circle_sites ? circle_sites : L) * h;
}

LatticeSpectrum lattice_spectrum(const LatticeSpec& spec, int jobs) {
  spec.validate();
  LatticeSpectrum out;
  out.volume = spec.volume();
  out.fibers = spec.fibers();
  std::vector<BlockResult> blocks;
  if (spec.n == 1) {
    blocks.push_back(diagonalize(chain_operator(spec.L, spec.h, spec.fiber, spec.potential), spec.fiber));
  } else {
    // magnetic translations by `stride` along y commute with the operator
    const long quanta = spec.flux_quanta();
    const int stride = spec.potential.empty() ? static_cast<int>(spec.L / gcd_long(quanta, spec.L)) : spec.L;
    const int count = spec.L / stride;
    std::vector<std::function<BlockResult()>> work;
    for (int j = 0; j < count; ++j) {
      const double kappa = kTwoPi * j / count;
      work.emplace_back([&spec, stride, kappa] { return diagonalize(magnetic_block(spec, stride, kappa), spec.fiber); });
    }
    blocks = run_jobs(work, jobs);
  }
  out.scalar_minimum = std::numeric_limits<double>::infinity();
  for (auto& b : blocks) {
    out.eigenvalues.insert(out.eigenvalues.end(), b.eigenvalues.begin(), b.eigenvalues.end());
    out.fiber_of.insert(out.fiber_of.end(), b.fiber_of.begin(), b.fiber_of.end());
    out.adjointness_defect = std::max(out.adjointness_defect, b.adjointness_defect);
    out.scalar_minimum = std::min(out.scalar_minimum, b.scalar_minimum);
    out.components += b.components;
  }
  out.blocks = static_cast<int>(blocks.size());

  std::vector<std::size_t> order(out.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return out.eigenvalues[a] < out.eigenvalues[b]; });
  std::vector<double> ev;
  std::vector<int> fo;
  for (auto k : order) {
    ev.push_back(out.eigenvalues[k]);
    fo.push_back(out.fiber_of[k]);
  }
  out.eigenvalues = std::move(ev);
  out.fiber_of = std::move(fo);

  if (spec.n == 3) {
    const Matrix<Complex> scalar_fiber(1, 1);
    auto circle = diagonalize(chain_operator(spec.circle_sites ? spec.circle_sites : spec.L, spec.h, scalar_fiber, {}),
                              scalar_fiber);
    std::sort(circle.eigenvalues.begin(), circle.eigenvalues.end());
    out.circle = std::move(circle.eigenvalues);
  }
  return out;
}

namespace {
double circle_factor(const LatticeSpectrum& s, double t) {
  if (s.circle.empty()) return 1.0;
  double c = 0.0;
  for (double mu : s.circle) c += std::exp(-t * mu);
  return c;
}
}  // namespace

double heat_trace(const LatticeSpectrum& s, double t) {
  require(t > 0.0, "heat trace needs t > 0");
  double sum = 0.0;
  for (double lambda : s.eigenvalues) sum += std::exp(-t * lambda);
  return sum * circle_factor(s, t);
}

std::vector<double> fiber_heat_traces(const LatticeSpectrum& s, double t) {
  require(t > 0.0, "heat trace needs t > 0");
  std::vector<double> out(s.fibers, 0.0);
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
    if (s.fiber_of[k] >= 0) out[s.fiber_of[k]] += std::exp(-t * s.eigenvalues[k]);
  const double c = circle_factor(s, t);
  for (auto& v : out) v *= c;
  return out;
}

double lattice_heat_trace(const LatticeSpec& spec, double t) { return heat_trace(lattice_spectrum(spec), t); }

double ComparisonRow::relative_error() const {
  const double scale = std::abs(oracle);
  return scale == 0.0 ? std::abs(predicted) : std::abs(predicted - oracle) / scale;
}

double SpectralOracleReport::max_relative_error() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.relative_error());
  return m;
}

SpectralOracleReport spectral_report(const LatticeSpectrum& s, const std::vector<double>& times) {
  SpectralOracleReport r;
  r.eigenvalues = s.eigenvalues;
  r.times = times;
  for (double t : times) r.traces.push_back(heat_trace(s, t));
  return r;
}

double landau_trace(double b, double t) {
  require(b > 0.0 && t > 0.0, "landau_trace needs b > 0 and t > 0");
  const double field = 0.5 * b;
  const double degeneracy = field / kTwoPi;
  const double ratio = std::exp(-2.0 * t * field);
  constexpr long kMaxLevels = 50'000'000;
  double sum = 0.0;
  for (long k = 0;; ++k) {
    const double term = degeneracy * std::exp(-t * field * (2 * k + 1));
    sum += term;
    // remaining levels form a geometric tail bounded by term·ratio/(1 − ratio)
    if (term * ratio / (1.0 - ratio) < 1e-12) break;
    if (k >= kMaxLevels) throw InputError("landau_trace: level series tail not bounded (t·b too small)");
  }
  return sum;
}

namespace {

/// Central-difference derivative of order ≤ 2 along one axis.
Matrix<Complex> axis_derivative(const std::function<Matrix<Complex>(const std::vector<double>&)>& f,
                                std::vector<double> x, int axis, int order, double h) {
  if (order == 0) return f(x);
  const double x0 = x[axis];
  x[axis] = x0 + h;
  auto plus = f(x);
  x[axis] = x0 - h;
  auto minus = f(x);
  if (order == 1) return Complex(1.0 / (2.0 * h)) * (plus - minus);
  x[axis] = x0;
  auto mid = f(x);
  return Complex(1.0 / (h * h)) * (plus + minus - Complex(2.0) * mid);
}

Matrix<Complex> mixed_derivative(const std::function<Matrix<Complex>(const std::vector<double>&)>& f,
                                 const std::vector<double>& x, const MultiIndex& k, int axis, double h) {
  const int n = static_cast<int>(x.size());
  if (axis > n) return f(x);
  const int order = k[axis];
  if (order > 2) throw InputError("fd_residual supports derivative order <= 2 per axis");
  auto inner = [&](const std::vector<double>& y) { return mixed_derivative(f, y, k, axis + 1, h); };
  return axis_derivative(inner, x, axis - 1, order, h);
}

double residual_at_spacing(const KernelFunction& kernel, const GradedOperator<Complex>& op, const FdGrid& grid,
                           double h) {
  const int n = op.dimension();
  std::vector<double> x(n);
  std::vector<int> counter(n, 0);
  const int m = std::max(1, grid.points_per_axis);
  double worst = 0.0;
  while (true) {
    for (int i = 0; i < n; ++i)
      x[i] = grid.center[i] + (m == 1 ? 0.0 : -grid.half_width + 2.0 * grid.half_width * counter[i] / (m - 1));
    auto at_t = [&](const std::vector<double>& y) { return kernel(grid.t, y); };
    Matrix<Complex> res = Complex(1.0 / (2.0 * h)) * (kernel(grid.t + h, x) - kernel(grid.t - h, x));
    for (const auto& [key, c] : op.terms()) {
      Complex mono = 1.0;
      for (int i = 1; i <= n; ++i) mono *= std::pow(x[i - 1], key.x[i]);
      res += mono * (c * mixed_derivative(at_t, x, key.d, 1, h));
    }
    for (const auto& v : res.data()) worst = std::max(worst, std::abs(v));
    int i = 0;
    while (i < n && ++counter[i] == m) counter[i++] = 0;
    if (i == n) break;
  }
  return worst;
}

}  // namespace

FdResidual fd_residual(const KernelFunction& kernel, const GradedOperator<Complex>& op, const FdGrid& grid) {
  require(static_cast<int>(grid.center.size()) == op.dimension(), "fd grid center must match the operator dimension");
  require(grid.h > 0.0 && grid.t > grid.h, "fd grid needs 0 < h < t");
  for (const auto& [key, c] : op.terms())
    require(key.word.mask == 0 && key.param == 0, "fd_residual needs a Clifford-free, parameter-free operator");
  FdResidual r;
  r.residual_h = residual_at_spacing(kernel, op, grid, grid.h);
  r.residual_h2 = residual_at_spacing(kernel, op, grid, grid.h / 2.0);
  r.ratio = r.residual_h2 == 0.0 ? std::numeric_limits<double>::infinity() : r.residual_h / r.residual_h2;
  return r;
}

}  // namespace getzler
