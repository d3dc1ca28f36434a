#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

// Sweeps and acceptance checks shared by the acceptance binary and `getzler verify all`.

namespace getzler::verify {

/// One comparison, tagged with the relation it checks (imp, limit, hkrec, mehler, index).
struct SweepRow {
  std::string tag;
  std::string label;
  double parameter = 0.0;
  double t = 0.0;
  double predicted = 0.0;
  double oracle = 0.0;
  double relative_error() const;
};

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string format_double(double v);  // %.17g

/// Flat m = 1 Bergman model with line curvature a and a lower-order line twist e; lattice oracle at
/// L sites per axis with p flux quanta.
struct BergmanSweep {
  double a = 1.0;
  double e = 1.0;
  double u = 0.5;
  std::vector<long> p = {4, 8, 16};
  int L = 64;
  int jobs = 1;
};
std::vector<SweepRow> bergman_sweep(const BergmanSweep& cfg);

/// T²×S¹ odd model: constant block b, lower-order twist f0 in the same plane; r must be integral.
struct OddSweep {
  double b = 1.0;
  double f0 = 1.5;
  double t = 0.5;
  std::vector<long> r = {4, 8, 16};
  int L = 64;
  int circle_sites = 64;
  int jobs = 1;
};
std::vector<SweepRow> odd_sweep(const OddSweep& cfg);

/// 2D constant field R = i·b·J: lattice per-area trace vs Mehler diagonal and vs Landau levels.
struct LatticeSweep {
  double b = 1.0;
  std::vector<double> t = {0.25, 0.5, 1.0};
  int L = 64;
  long flux_quanta = 4;
  int jobs = 1;
};
std::vector<SweepRow> lattice_sweep(const LatticeSweep& cfg);

struct Options {
  int jobs = 1;
  unsigned seed = 20240611;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;
  std::vector<SweepRow> rows;
};

inline constexpr int kCriteria = 10;

CriterionResult run_criterion(int id, const Options& opt);
std::vector<CriterionResult> run_all(const Options& opt,
                                     const std::function<void(const CriterionResult&)>& on_result = {});
std::string summary_line(const CriterionResult& r);

}  // namespace getzler::verify
