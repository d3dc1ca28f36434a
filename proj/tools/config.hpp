#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "getzler/heat_jets.hpp"
#include "getzler/verify.hpp"

namespace getzler::cli {

using Json = nlohmann::ordered_json;
using Q = ComplexRational;

/// Malformed or inconsistent configuration; the message starts with the offending JSON path.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Scalars: a number, an exact string ("3/5", "-0.125", "2e-3"), or an [re, im] pair of those.
// Matrices: row-major arrays of rows, e.g. [[1, 0], [0, [0, 1]]].
Q parse_exact(const Json& j, const std::string& path);
Complex parse_complex(const Json& j, const std::string& path);
Matrix<Q> parse_exact_matrix(const Json& j, const std::string& path);
Matrix<Complex> parse_complex_matrix(const Json& j, const std::string& path);

Json to_json(const Complex& z);
Json to_json(const Q& z);
Json to_json(const Matrix<Complex>& m);
Json to_json(const Matrix<Q>& m);

/// Constant curvature data shared by `theta` and `index-density`: Riemann entries R_ijkl (completed by
/// the pair symmetries) and twist curvature entries F_ab (completed by antisymmetry).
struct CurvatureData {
  int n = 2;
  int twist = 1;
  RiemannTensor<Q> riemann{2};
  std::vector<Matrix<Q>> twist_curvature;  // n·n entries, row-major in (a, b)

  bool flat() const;
};

struct ThetaConfig {
  std::filesystem::path operator_file;
  int J = 2;
  std::optional<int> D;  // default 2J + 2
};

/// Operator file for `theta`: either the Lichnerowicz operator of the given curvature data or an
/// explicit list of normal-ordered terms (with the curvature data providing the geometry jets).
struct ThetaProblem {
  CurvatureData curvature;
  GradedOperator<Q> op;
  std::string source;  // "lichnerowicz" or "terms"
};

struct MehlerConfig {
  Matrix<Complex> R = Matrix<Complex>(2, 2, {0.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 0.0});
  Matrix<Complex> F = Matrix<Complex>(1, 1);
  std::vector<double> t = {0.25, 0.5, 1.0};
  std::vector<std::vector<double>> points = {{0.0, 0.0}};
};

struct RunConfig {
  std::filesystem::path input_file;  // empty: built-in defaults
  std::filesystem::path output_dir;  // empty: resolved at run time
  int jobs = 1;
  unsigned seed = 20240611;
  std::map<std::string, double> tolerances = {{"bk", 0.05}, {"odd", 0.08}, {"lattice", 0.02}, {"landau", 0.01}};
  ThetaConfig theta;
  MehlerConfig mehler;
  CurvatureData index;
  verify::BergmanSweep bk;
  verify::OddSweep odd;
  verify::LatticeSweep lattice;
};

RunConfig default_config();
/// Overlays the keys present in `j` onto the defaults; relative paths resolve against base_dir.
RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& file);
/// Canonical JSON form; parse_config(config_to_json(c)) reproduces c bit for bit.
Json config_to_json(const RunConfig& c);

ThetaProblem load_theta_problem(const std::filesystem::path& file);
ThetaProblem parse_theta_problem(const Json& j);

}  // namespace getzler::cli
