#pragma once

#include <functional>
#include <string>
#include <vector>

#include "getzler/graded_ops.hpp"
#include "getzler/matrix.hpp"

// Brute-force verification tools. Nothing here depends on the Mehler or asymptotics evaluators.

namespace getzler {

/// Periodic lattice discretization of −(∇ − iA)² ⊗ 1 + 1 ⊗ K on a torus of L sites per axis and
/// spacing h. In 2D the field is constant with flux `flux` (in units of 2π) per plaquette, in the
/// Landau gauge with the boundary twist that makes the torus consistent; flux·L² must be an integer.
/// n = 3 is the product of the 2D block with a free circle of `circle_sites` sites.
struct LatticeSpec {
  int n = 2;
  int L = 32;
  double h = 0.1;
  mpq_class flux = 0;                  // per plaquette, units of 2π
  Matrix<Complex> fiber = Matrix<Complex>(1, 1);  // constant endomorphism K (Hermitian)
  std::vector<double> potential;       // optional per-site scalar potential (1D/2D part)
  int circle_sites = 0;                // n = 3; 0 means L

  void validate() const;
  long flux_quanta() const;            // flux·L²
  double flux_angle() const;           // 2π·flux
  double field() const;                // continuum field strength 2π·flux / h²
  double volume() const;
  int fibers() const { return static_cast<int>(fiber.rows()); }
};

/// Spectrum of the discretized operator. Eigenvalues of the magnetic block come with the fiber index
/// of their connected component (−1 when a component couples several fibers). In 3D the circle
/// spectrum is kept as a separate factor: the full spectrum is the set of sums.
struct LatticeSpectrum {
  std::vector<double> eigenvalues;
  std::vector<int> fiber_of;
  std::vector<double> circle;
  double scalar_minimum = 0.0;            // lowest eigenvalue of the scalar part (fiber shift removed)
  double volume = 0.0;
  int fibers = 1;
  double adjointness_defect = 0.0;        // max |H − H†| over assembled blocks
  int blocks = 0;
  int components = 0;
};

LatticeSpectrum lattice_spectrum(const LatticeSpec& spec, int jobs = 1);

/// Σ e^{−tλ} over the full spectrum.
double heat_trace(const LatticeSpectrum& s, double t);
/// Trace restricted to components supported on a single fiber, indexed by fiber.
std::vector<double> fiber_heat_traces(const LatticeSpectrum& s, double t);

double lattice_heat_trace(const LatticeSpec& spec, double t);

struct ComparisonRow {
  std::string label;
  double parameter = 0.0;
  double t = 0.0;
  double predicted = 0.0;
  double oracle = 0.0;
  double relative_error() const;
};

struct SpectralOracleReport {
  std::vector<double> eigenvalues;
  std::vector<double> times;
  std::vector<double> traces;
  std::vector<ComparisonRow> rows;
  double max_relative_error() const;
};

SpectralOracleReport spectral_report(const LatticeSpectrum& s, const std::vector<double>& times);

/// Per-unit-area diagonal heat kernel of the continuum operator −(∂_i + ¼x_j R_ij)² with R = i·b·J
/// (field strength b/2): Landau levels (2k+1)b/2 with degeneracy b/(4π) per unit area, summed until
/// the remaining tail is below 1e−12.
double landau_trace(double b, double t);

using KernelFunction = std::function<Matrix<Complex>(double t, const std::vector<double>& x)>;

struct FdGrid {
  std::vector<double> center;      // grid center (dimension n)
  double half_width = 0.5;         // evaluation window half width per axis
  int points_per_axis = 3;
  double t = 0.5;
  double h = 0.02;                 // spatial and temporal step; the second pass uses h/2
};

struct FdResidual {
  double residual_h = 0.0;
  double residual_h2 = 0.0;
  double ratio = 0.0;
};

/// max |(∂_t + H) p| over the grid with central differences at spacing h and h/2.
FdResidual fd_residual(const KernelFunction& kernel, const GradedOperator<Complex>& op, const FdGrid& grid);

/// Truncated power series with exact rational coefficients.
class PowerSeries {
 public:
  explicit PowerSeries(int order, std::vector<mpq_class> c = {});
  static PowerSeries x(int order);
  static PowerSeries constant(int order, const mpq_class& v);

  int order() const { return order_; }
  const mpq_class& operator[](int k) const { return c_[k]; }
  mpq_class& operator[](int k) { return c_[k]; }
  const std::vector<mpq_class>& coefficients() const { return c_; }

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator*(const mpq_class& s, const PowerSeries& a);
  friend PowerSeries operator/(const PowerSeries& a, const PowerSeries& b);
  friend bool operator==(const PowerSeries& a, const PowerSeries& b) { return a.c_ == b.c_; }

  PowerSeries inverse() const;          // constant term nonzero
  PowerSeries exp() const;              // constant term zero
  PowerSeries log() const;              // constant term one
  PowerSeries sqrt() const;             // constant term one
  PowerSeries compose(const PowerSeries& inner) const;  // inner(0) = 0
  /// f(x)/x for f(0) = 0, keeping the order.
  PowerSeries divide_by_x() const;

 private:
  int order_;
  std::vector<mpq_class> c_;
};

/// Named characteristic series expanded to the given order (≤ 6):
///   x_over_sinh_x, sqrt_x_over_sinh_x, half_x_over_sinh_half_x, sqrt_half_x_over_sinh_half_x,
///   log_half_x_over_sinh_half_x, half_x_over_exp_half_diff, x_over_one_minus_exp_neg_2x, x_coth_x.
std::vector<mpq_class> series_oracle(const std::string& name, int order);
std::vector<std::string> series_oracle_names();

}  // namespace getzler
