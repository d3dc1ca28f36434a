#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "config.hpp"
#include "getzler/asymptotics.hpp"
#include "getzler/oracle.hpp"

namespace getzler::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "GETZLER_OUT";

struct Invocation {
  std::string command;
  std::string target = "all";  // verify
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<double> tolerance;
  std::optional<int> jobs;
};

struct Context {
  RunConfig cfg;
  fs::path out_dir;
  std::optional<double> tolerance;
  std::ostream& out;
  std::ostream& err;

  std::ofstream open(const std::string& name) const {
    fs::create_directories(out_dir);
    const fs::path path = out_dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    out << "wrote " << path.string() << '\n';
    return f;
  }
  double tol(const std::string& key) const { return tolerance.value_or(cfg.tolerances.at(key)); }
};

std::string exact(const mpq_class& q) { return q.get_str(); }

std::string axes(const MultiIndex& m) {
  std::string s;
  for (auto [axis, mult] : m.pairs())
    for (int k = 0; k < mult; ++k) s += (s.empty() ? "" : " ") + std::to_string(axis);
  return s;
}

std::string word_indices(CliffordWord w) {
  std::string s;
  for (int i = 1; i <= 32; ++i)
    if (w.mask >> (i - 1) & 1u) s += (s.empty() ? "" : " ") + std::to_string(i);
  return s;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

// ---------------------------------------------------------------------------------------------

int cmd_theta(const Context& ctx) {
  const auto& tc = ctx.cfg.theta;
  if (tc.operator_file.empty()) throw ConfigError("/theta/operator_file: required by the theta command");
  if (!fs::exists(tc.operator_file)) throw ConfigError("/theta/operator_file: no such file " + tc.operator_file.string());
  const ThetaProblem p = load_theta_problem(tc.operator_file);
  const int J = tc.J, D = tc.D.value_or(2 * J + 2);
  const auto& c = p.curvature;
  const auto geo = c.flat() ? GeometryJets<Q>::flat(c.n, c.twist, D) : GeometryJets<Q>::from_riemann(c.riemann, c.twist_curvature, D);
  const auto h = theta_recursion(p.op, geo, J, D);

  auto f = ctx.open("theta.csv");
  f << "tag,j,x,word,d,param,row,col,re,im\n";
  for (std::size_t j = 0; j < h.theta.size(); ++j) {
    const auto& poly = h.theta[j].poly();
    for (const auto& [k, m] : poly.terms())
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t col = 0; col < m.cols(); ++col) {
          if (m(r, col).is_zero()) continue;
          f << "hkrec," << j << ',' << axes(k.x) << ',' << word_indices(k.word) << ',' << axes(k.d) << ',' << k.param << ','
            << r << ',' << col << ',' << exact(m(r, col).real()) << ',' << exact(m(r, col).imag()) << '\n';
        }
    const auto order = grading_order(poly, GradingWeights::cG());
    ctx.out << "Θ_" << j << ": " << poly.terms().size() << " terms, cG order "
            << (order ? std::to_string(*order) : std::string("-")) << '\n';
  }
  ctx.out << "operator: " << p.source << ", n = " << c.n << ", twist = " << c.twist << ", J = " << J << ", D = " << D << '\n';
  return kSuccess;
}

int cmd_mehler(const Context& ctx) {
  const auto& mc = ctx.cfg.mehler;
  auto f = ctx.open("mehler.csv");
  f << "tag,t,point,x,row,col,re,im\n";
  for (double t : mc.t) {
    ModelData m{static_cast<int>(mc.R.rows()), mc.R, mc.F, t};
    m.validate();
    const auto value = mehler_value(m);
    for (std::size_t p = 0; p < mc.points.size(); ++p) {
      const auto k = value.at(mc.points[p]);
      std::string x;
      for (double v : mc.points[p]) x += (x.empty() ? "" : " ") + verify::format_double(v);
      for (std::size_t r = 0; r < k.rows(); ++r)
        for (std::size_t c = 0; c < k.cols(); ++c)
          f << "mehler," << verify::format_double(t) << ',' << p << ',' << x << ',' << r << ',' << c << ','
            << verify::format_double(k(r, c).real()) << ',' << verify::format_double(k(r, c).imag()) << '\n';
    }
    ctx.out << "t = " << t << ": tr p_t(0,0) = " << std::setprecision(10) << value.at(std::vector<double>(mc.R.rows(), 0.0)).trace() << '\n';
  }
  return kSuccess;
}

int cmd_index(const Context& ctx) {
  const auto& c = ctx.cfg.index;
  if (c.n % 2) throw ConfigError("/index/n: the index density needs an even dimension");
  using Form = FormScalar<Q>;
  IndexDensityInput<Q> in{c.n, Matrix<Form>(c.n, c.n), Matrix<Form>(c.twist, c.twist)};
  for (int i = 1; i <= c.n; ++i)
    for (int j = 1; j <= c.n; ++j)
      for (int a = 1; a <= c.n; ++a)
        for (int b = a + 1; b <= c.n; ++b) {
          const Q& v = c.riemann(i, j, a, b);
          if (!v.is_zero()) in.R(i - 1, j - 1) += Form::two_form(a, b, v);
        }
  for (int a = 1; a <= c.n; ++a)
    for (int b = a + 1; b <= c.n; ++b) {
      const auto& m = c.twist_curvature[static_cast<std::size_t>((a - 1) * c.n + (b - 1))];
      for (int r = 0; r < c.twist; ++r)
        for (int s = 0; s < c.twist; ++s)
          if (!m(r, s).is_zero()) in.F(r, s) += Form::two_form(a, b, m(r, s));
    }
  const auto d = index_density(in);
  const Complex value = d.numeric();
  auto f = ctx.open("index_density.csv");
  f << "tag,n,power,coefficient_re,coefficient_im,value_re,value_im\n";
  f << "index," << c.n << ',' << d.power << ',' << exact(d.coefficient.real()) << ',' << exact(d.coefficient.imag()) << ','
    << verify::format_double(value.real()) << ',' << verify::format_double(value.imag()) << '\n';
  ctx.out << "density = (4π)^-" << d.power << " · " << d.coefficient << " ≈ " << std::setprecision(12) << value << '\n';
  return kSuccess;
}

bool report_trend(const Context& ctx, const std::vector<verify::SweepRow>& rows, double tolerance) {
  std::vector<double> errors;
  double last_param = -1;
  for (const auto& r : rows) {
    if (errors.empty() || r.parameter != last_param) errors.push_back(0.0);
    last_param = r.parameter;
    errors.back() = std::max(errors.back(), r.relative_error());
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
  for (const auto& r : rows)
    ctx.out << std::setw(6) << r.parameter << "  " << std::setw(8) << r.label << "  predicted " << std::setprecision(10)
            << std::setw(14) << r.predicted << "  oracle " << std::setw(14) << r.oracle << "  rel.err " << std::setprecision(4)
            << r.relative_error() << '\n';
  const bool ok = decreasing && errors.back() <= tolerance;
  ctx.out << (ok ? "PASS" : "FAIL") << ": error " << (decreasing ? "strictly decreasing" : "NOT strictly decreasing")
          << ", final " << errors.back() << " (tolerance " << tolerance << ")\n";
  return ok;
}

int cmd_bk(const Context& ctx) {
  const auto rows = verify::bergman_sweep(ctx.cfg.bk);
  auto f = ctx.open("bk_asymptotics.csv");
  verify::write_csv(f, rows);
  return report_trend(ctx, rows, ctx.tol("bk")) ? kSuccess : kVerificationFailed;
}

int cmd_odd(const Context& ctx) {
  const auto rows = verify::odd_sweep(ctx.cfg.odd);
  auto f = ctx.open("odd_asymptotics.csv");
  verify::write_csv(f, rows);
  return report_trend(ctx, rows, ctx.tol("odd")) ? kSuccess : kVerificationFailed;
}

int cmd_lattice(const Context& ctx) {
  const auto rows = verify::lattice_sweep(ctx.cfg.lattice);
  auto f = ctx.open("oracle_lattice.csv");
  verify::write_csv(f, rows);
  const double tol_mehler = ctx.tol("lattice"), tol_landau = ctx.tolerance.value_or(ctx.cfg.tolerances.at("landau"));
  bool ok = true;
  for (const auto& r : rows) {
    const double tol = r.label == "landau_trace" ? tol_landau : tol_mehler;
    ok = ok && r.relative_error() <= tol;
    ctx.out << "t = " << std::setw(5) << r.t << "  " << std::setw(13) << r.label << "  " << std::setprecision(10) << r.predicted
            << "  lattice " << r.oracle << "  rel.err " << std::setprecision(4) << r.relative_error() << " (≤ " << tol << ")\n";
  }
  ctx.out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kSuccess : kVerificationFailed;
}

int run_criteria(const Context& ctx, const std::vector<int>& ids, const std::string& stem) {
  verify::Options opt;
  opt.jobs = ctx.cfg.jobs;
  opt.seed = ctx.cfg.seed;
  std::vector<verify::CriterionResult> results;
  for (int id : ids) {
    results.push_back(verify::run_criterion(id, opt));
    ctx.out << verify::summary_line(results.back()) << std::endl;
  }
  auto summary = ctx.open(stem + "_summary.csv");
  summary << "criterion,title,passed,limit_seconds,detail\n";
  for (const auto& r : results)
    summary << "AC" << r.id << ',' << csv_quote(r.title) << ',' << (r.passed ? "PASS" : "FAIL") << ','
            << verify::format_double(r.limit_seconds) << ',' << csv_quote(r.detail) << '\n';
  auto rows = ctx.open(stem + "_rows.csv");
  rows << "criterion,tag,label,parameter,t,predicted,oracle,relative_error\n";
  for (const auto& r : results)
    for (const auto& row : r.rows)
      rows << "AC" << r.id << ',' << row.tag << ',' << row.label << ',' << verify::format_double(row.parameter) << ','
           << verify::format_double(row.t) << ',' << verify::format_double(row.predicted) << ','
           << verify::format_double(row.oracle) << ',' << verify::format_double(row.relative_error()) << '\n';
  int passed = 0;
  for (const auto& r : results) passed += r.passed;
  ctx.out << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? kSuccess : kVerificationFailed;
}

int cmd_verify(const Context& ctx, const std::string& target) {
  if (target == "all") {
    std::vector<int> ids;
    for (int id = 1; id <= verify::kCriteria; ++id) ids.push_back(id);
    return run_criteria(ctx, ids, "verify");
  }
  int id = 0;
  try {
    std::size_t used = 0;
    id = std::stoi(target, &used);
    if (used != target.size()) id = 0;
  } catch (const std::exception&) {
  }
  if (id < 1 || id > verify::kCriteria) throw InputError("verify: expected 'all' or a criterion number 1..10, got '" + target + "'");
  return run_criteria(ctx, {id}, "verify");
}

int cmd_algebra_selftest(const Context& ctx) { return run_criteria(ctx, {1, 2, 3, 9}, "algebra_selftest"); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  CLI::App app{"Getzler rescaling toolkit: heat-kernel coefficients, Mehler kernels, index densities and lattice oracles",
               "getzler"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", inv.config, "JSON run configuration (defaults are built in)");
  app.add_option("--out", inv.out, std::string("output directory (default: config output_dir, then $") + kOutEnv + ", then ./getzler-out)");
  app.add_option("--tolerance", inv.tolerance, "override the command's pass tolerance (relative error)")->check(CLI::PositiveNumber);
  app.add_option("--jobs", inv.jobs, "parallel eigensolve jobs")->check(CLI::Range(1, 256));

  const std::map<std::string, std::string> commands = {
      {"algebra-selftest", "exact Clifford, filtration, Θ-recursion and model-operator checks"},
      {"theta", "heat coefficients Θ_0..Θ_J of an operator file"},
      {"mehler-eval", "evaluate Mehler's kernel on the configured points and times"},
      {"index-density", "top-degree index density of constant curvature data"},
      {"bk-asymptotics", "Bergman leading-term sweep over p against the lattice oracle"},
      {"odd-asymptotics", "odd-dimensional leading-trace sweep over r against the lattice oracle"},
      {"oracle-lattice", "constant-field lattice heat trace vs Mehler and Landau levels"},
      {"verify", "run the acceptance suite: 'verify all' or 'verify <n>'"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&inv, name = name] { inv.command = name; });
    if (name == "verify") sub->add_option("target", inv.target, "'all' or a criterion number");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "getzler: " << e.what() << "\n" << "run 'getzler --help' for usage\n";
    return kInputError;
  }

  try {
    RunConfig cfg = default_config();
    if (inv.config) {
      if (!fs::exists(*inv.config)) throw ConfigError(*inv.config + ": no such file");
      cfg = load_config(*inv.config);
    }
    if (inv.jobs) cfg.jobs = cfg.bk.jobs = cfg.odd.jobs = cfg.lattice.jobs = *inv.jobs;
    fs::path out_dir = "getzler-out";
    if (inv.out) out_dir = *inv.out;
    else if (!cfg.output_dir.empty()) out_dir = cfg.output_dir;
    else if (const char* env = std::getenv(kOutEnv); env && *env) out_dir = env;
    Context ctx{cfg, out_dir, inv.tolerance, out, err};

    static const std::set<std::string> with_tolerance = {"bk-asymptotics", "odd-asymptotics", "oracle-lattice"};
    if (inv.tolerance && !with_tolerance.count(inv.command))
      err << "getzler: warning: --tolerance has no effect on " << inv.command << '\n';

    if (inv.command == "theta") return cmd_theta(ctx);
    if (inv.command == "mehler-eval") return cmd_mehler(ctx);
    if (inv.command == "index-density") return cmd_index(ctx);
    if (inv.command == "bk-asymptotics") return cmd_bk(ctx);
    if (inv.command == "odd-asymptotics") return cmd_odd(ctx);
    if (inv.command == "oracle-lattice") return cmd_lattice(ctx);
    if (inv.command == "algebra-selftest") return cmd_algebra_selftest(ctx);
    return cmd_verify(ctx, inv.target);
  } catch (const InputError& e) {
    err << "getzler: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "getzler: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "getzler: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "getzler: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "getzler: failed: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace getzler::cli
