#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "getzler/asymptotics.hpp"
#include "getzler/oracle.hpp"
#include "getzler/verify.hpp"

namespace py = pybind11;
using namespace getzler;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

Matrix<Complex> to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-D array");
  Matrix<Complex> m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto v = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = v(i, j);
  return m;
}

CArray to_array(const Matrix<Complex>& m) {
  CArray a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v(i, j) = m(i, j);
  return a;
}

py::object fraction(const mpq_class& q) {
  static py::object Fraction = py::module_::import("fractions").attr("Fraction");
  return Fraction(q.get_str());
}

py::list rows_to_list(const std::vector<verify::SweepRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["tag"] = r.tag;
    d["label"] = r.label;
    d["parameter"] = r.parameter;
    d["t"] = r.t;
    d["predicted"] = r.predicted;
    d["oracle"] = r.oracle;
    d["relative_error"] = r.relative_error();
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Getzler rescaling toolkit: Clifford supertraces, Mehler kernels, leading asymptotics and lattice oracles";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def(
      "volume_supertrace",
      [](int n) {
        const auto s = volume_supertrace<ComplexRational>(n);
        return py::make_tuple(fraction(s.real()), fraction(s.imag()));
      },
      py::arg("n"), "str(c^1…c^n) as an exact (re, im) pair of Fractions.");

  m.def(
      "series_oracle",
      [](const std::string& name, int order) {
        py::list out;
        for (const auto& c : series_oracle(name, order)) out.append(fraction(c));
        return out;
      },
      py::arg("name"), py::arg("order"), "Exact Taylor coefficients of a named characteristic series.");
  m.def("series_oracle_names", &series_oracle_names);

  m.def(
      "mehler_kernel",
      [](const CArray& R, const CArray& F, double t, const std::vector<double>& x) {
        ModelData md{static_cast<int>(R.shape(0)), to_matrix(R), to_matrix(F), t};
        return to_array(mehler_kernel(md, x));
      },
      py::arg("R"), py::arg("F"), py::arg("t"), py::arg("x"),
      "Heat kernel p_t(x, 0) of H = −Σ(∂_i + ¼x_j R_ij)² + F.");

  m.def("landau_trace", &landau_trace, py::arg("b"), py::arg("t"),
        "Per-area heat trace of the constant-field operator with R = i·b·J.");

  m.def(
      "lattice_heat_trace",
      [](int L, double h, const std::string& flux, double t, int n, int circle_sites, int jobs) {
        LatticeSpec s;
        s.n = n;
        s.L = L;
        s.h = h;
        s.flux = mpq_class(flux);
        s.flux.canonicalize();
        s.circle_sites = circle_sites;
        const auto spectrum = lattice_spectrum(s, jobs);
        return heat_trace(spectrum, t) / spectrum.volume;
      },
      py::arg("L"), py::arg("h"), py::arg("flux"), py::arg("t"), py::arg("n") = 2, py::arg("circle_sites") = 0,
      py::arg("jobs") = 1, "Per-volume lattice heat trace; flux per plaquette in units of 2π, e.g. '4/4096'.");

  m.def(
      "bergman_leading",
      [](const std::vector<double>& a, const std::vector<double>& e, double u, long p) {
        return to_array(bergman_leading(ComplexCurvature::diagonal(a, e), u, p));
      },
      py::arg("a"), py::arg("e") = std::vector<double>{}, py::arg("u"), py::arg("p"),
      "Leading Bergman-type term on Λ^{0,*} for diagonal curvature.");

  m.def(
      "odd_leading", [](int n, double b, double t) { return odd_leading(OddCurvature::plane(n, b), t); }, py::arg("n"),
      py::arg("b"), py::arg("t"), "Odd-dimensional leading trace density for a single plane block b.");

  m.def(
      "bergman_sweep",
      [](double a, double e, double u, std::vector<long> p, int L, int jobs) {
        return rows_to_list(verify::bergman_sweep({a, e, u, std::move(p), L, jobs}));
      },
      py::arg("a") = 1.0, py::arg("e") = 1.0, py::arg("u") = 0.5, py::arg("p") = std::vector<long>{4, 8, 16},
      py::arg("L") = 64, py::arg("jobs") = 1);
  m.def(
      "odd_sweep",
      [](double b, double f0, double t, std::vector<long> r, int L, int circle_sites, int jobs) {
        return rows_to_list(verify::odd_sweep({b, f0, t, std::move(r), L, circle_sites, jobs}));
      },
      py::arg("b") = 1.0, py::arg("f0") = 1.5, py::arg("t") = 0.5, py::arg("r") = std::vector<long>{4, 8, 16},
      py::arg("L") = 64, py::arg("circle_sites") = 64, py::arg("jobs") = 1);

  m.def(
      "run_criterion",
      [](int id, int jobs) {
        verify::Options opt;
        opt.jobs = jobs;
        const auto r = verify::run_criterion(id, opt);
        py::dict d;
        d["id"] = r.id;
        d["title"] = r.title;
        d["passed"] = r.passed;
        d["seconds"] = r.seconds;
        d["detail"] = r.detail;
        d["rows"] = rows_to_list(r.rows);
        return d;
      },
      py::arg("id"), py::arg("jobs") = 1, "Run one acceptance criterion (1..10).");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
