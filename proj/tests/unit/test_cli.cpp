#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cli.hpp"
#include "config.hpp"

using namespace getzler;
using namespace getzler::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GETZLER_CONFIG_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("getzler-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string config_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("exact and complex scalars") {
  CHECK(parse_exact(Json("3/5"), "") == Q(mpq_class(3, 5)));
  CHECK(parse_exact(Json("-0.125"), "") == Q(mpq_class(-1, 8)));
  CHECK(parse_exact(Json("2e-3"), "") == Q(mpq_class(1, 500)));
  CHECK(parse_exact(Json("+3/5"), "") == Q(mpq_class(3, 5)));
  CHECK(parse_exact(Json("010"), "") == Q(10));
  CHECK(parse_exact(Json(7), "") == Q(7));
  CHECK(parse_exact(Json(0.5), "") == Q(mpq_class(1, 2)));
  CHECK(parse_exact(Json::array({"1/2", -3}), "") == Q(mpq_class(1, 2), -3));
  CHECK_THROWS_AS(parse_exact(Json("1/0"), "/x"), ConfigError);
  CHECK_THROWS_AS(parse_exact(Json("abc"), "/x"), ConfigError);
  CHECK(parse_complex(Json::array({1.5, -2}), "") == Complex(1.5, -2));

  const auto m = parse_complex_matrix(Json::parse(R"([[0, [0, 1]], [[0, -1], 0]])"), "");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == Complex(0, 1));
  CHECK(m(1, 0) == Complex(0, -1));
  CHECK_THROWS_AS(parse_complex_matrix(Json::parse("[[1, 2], [3]]"), "/m"), ConfigError);
  CHECK(parse_complex_matrix(Json::parse("[[[1, 2]]]"), "")(0, 0) == Complex(1, 2));
  CHECK(parse_complex_matrix(Json::parse("[[1, 2]]"), "").cols() == 2);
}

TEST_CASE("config round trip is bit exact") {
  auto c = load_config(kConfigs / "default.json");
  c.mehler.t = {0.1 + 0.2, 1.0 / 3.0, std::nextafter(1.0, 2.0)};
  c.bk.u = std::ldexp(0.7, -40);
  const Json j = config_to_json(c);
  const auto again = parse_config(Json::parse(j.dump()));
  CHECK(again.mehler.t == c.mehler.t);
  CHECK(again.bk.u == c.bk.u);
  CHECK(config_to_json(again).dump() == j.dump());
  CHECK(again.index.riemann(1, 2, 1, 2) == c.index.riemann(1, 2, 1, 2));

  const auto n4 = load_config(kConfigs / "index_n4.json");
  CHECK(config_to_json(parse_config(config_to_json(n4))).dump() == config_to_json(n4).dump());
}

TEST_CASE("shipped default config matches the built-in defaults") {
  const auto file = load_config(kConfigs / "default.json");
  const auto built = default_config();
  Json a = config_to_json(file), b = config_to_json(built);
  for (Json* j : {&a, &b}) {
    j->erase("output_dir");
    (*j)["theta"].erase("operator_file");
    (*j)["mehler"].erase("points");
  }
  CHECK(a.dump() == b.dump());
  CHECK(file.theta.operator_file == kConfigs / "sphere_twisted.json");
}

TEST_CASE("config validation names the offending field") {
  CHECK(config_error(Json::parse(R"({"bk": {"p": [4, 4, 16]}})")).starts_with("/bk/p/1:"));
  CHECK(config_error(Json::parse(R"({"odd": {"r": []}})")).starts_with("/odd/r:"));
  CHECK(config_error(Json::parse(R"({"lattice": {"t": [0.5, 0.25]}})")).starts_with("/lattice/t/1:"));
  CHECK(config_error(Json::parse(R"({"tolerances": {"bk": -1}})")).starts_with("/tolerances/bk:"));
  CHECK(config_error(Json::parse(R"({"tolerances": {"bogus": 1}})")).starts_with("/tolerances/bogus: unknown key"));
  CHECK(config_error(Json::parse(R"({"jobs": 0})")).starts_with("/jobs:"));
  CHECK(config_error(Json::parse(R"({"mehler": {"points": [[0, 0, 0]]}})")).starts_with("/mehler/points/0:"));
  CHECK(config_error(Json::parse(R"({"index": {"n": 2, "riemann": [[1, 1, 1, 2, 1]]}})")).starts_with("/index/riemann/0:"));
  CHECK(config_error(Json::parse(R"({"index": {"n": 2, "riemann": [[1, 2, 1, 2, 1], [2, 1, 2, 1, 2]]}})"))
            .find("conflicts") != std::string::npos);
  CHECK(config_error(Json::parse(R"([1, 2])")).starts_with("/:"));

  const fs::path bad = scratch("bad.json");
  std::ofstream(bad) << "{\n  \"jobs\": 1,\n  \"bk\": {\"p\": [4, 8,]}\n}\n";
  try {
    load_config(bad);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("riemann entries are completed by symmetry") {
  const auto c = parse_config(Json::parse(R"({"index": {"n": 4, "riemann": [[1, 2, 3, 4, "1/2"]]}})"));
  CHECK(c.index.riemann(1, 2, 3, 4) == Q(mpq_class(1, 2)));
  CHECK(c.index.riemann(2, 1, 3, 4) == Q(mpq_class(-1, 2)));
  CHECK(c.index.riemann(3, 4, 1, 2) == Q(mpq_class(1, 2)));
  CHECK(c.index.riemann(4, 3, 2, 1) == Q(mpq_class(1, 2)));
  CHECK(c.index.riemann.has_curvature_symmetries());
}

TEST_CASE("theta operator files") {
  const auto p = load_theta_problem(kConfigs / "harmonic_oscillator.json");
  CHECK(p.source == "terms");
  CHECK(p.op.terms().size() == 2);
  const auto s = load_theta_problem(kConfigs / "sphere_twisted.json");
  CHECK(s.source == "lichnerowicz");
  CHECK(grading_order(s.op, GradingWeights::cG()) == 2);
  CHECK_THROWS_AS(parse_theta_problem(Json::parse(R"({"n": 2})")), ConfigError);
  CHECK_THROWS_AS(parse_theta_problem(Json::parse(R"({"n": 2, "terms": [{"coefficient": 1, "word": [2, 1]}]})")), ConfigError);
  CHECK_THROWS_AS(parse_theta_problem(Json::parse(R"({"n": 2, "terms": [{"coefficient": 1, "x": [3]}]})")), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({}).code == kInputError);
  CHECK(run_cli({"no-such-command"}).code == kInputError);
  CHECK(run_cli({"--help"}).code == kSuccess);
  CHECK(run_cli({"theta", "--config", "/nonexistent/config.json"}).code == kInputError);
  CHECK(run_cli({"verify", "0"}).code == kInputError);
  CHECK(run_cli({"mehler-eval", "--jobs", "0"}).code == kInputError);

  const fs::path cfg = scratch("missing-operator.json");
  std::ofstream(cfg) << R"({"theta": {"operator_file": "does-not-exist.json"}})";
  const auto r = run_cli({"theta", "--config", cfg.string(), "--out", scratch("o-missing").string()});
  CHECK(r.code == kInputError);
  CHECK(r.err.find("/theta/operator_file") != std::string::npos);
}

TEST_CASE("commands write deterministic CSV") {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  for (const char* cmd : {"mehler-eval", "index-density", "theta"}) {
    const std::string config = (kConfigs / "default.json").string();
    REQUIRE(run_cli({cmd, "--config", config, "--out", a.string()}).code == kSuccess);
    REQUIRE(run_cli({cmd, "--config", config, "--out", b.string()}).code == kSuccess);
  }
  for (const char* f : {"mehler.csv", "index_density.csv", "theta.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f).find(",") != std::string::npos);
  }
  CHECK(slurp(a / "index_density.csv").find("index,2,1,0,1,") != std::string::npos);
  CHECK(slurp(a / "theta.csv").starts_with("tag,j,x,word,d,param,row,col,re,im\nhkrec,0,"));
  CHECK(slurp(a / "mehler.csv").starts_with("tag,t,point,x,row,col,re,im\nmehler,0.25,0,0 0,0,0,"));
}

TEST_CASE("sweeps: trend verdict and tolerance override") {
  const std::string quick = (kConfigs / "quick.json").string();
  const fs::path out = scratch("sweeps");
  const auto bk = run_cli({"bk-asymptotics", "--config", quick, "--out", out.string()});
  CHECK(bk.code == kSuccess);
  const std::string csv = slurp(out / "bk_asymptotics.csv");
  CHECK(csv.starts_with("tag,label,parameter,t,predicted,oracle,relative_error\nimp,"));
  CHECK(run_cli({"bk-asymptotics", "--config", quick, "--out", out.string(), "--tolerance", "1e-6"}).code == kVerificationFailed);
  CHECK(run_cli({"odd-asymptotics", "--config", quick, "--out", out.string()}).code == kSuccess);
  CHECK(slurp(out / "odd_asymptotics.csv").find("\nlimit,") != std::string::npos);
  CHECK(run_cli({"oracle-lattice", "--config", quick, "--out", out.string(), "--jobs", "2"}).code == kSuccess);
  CHECK(slurp(out / "oracle_lattice.csv").find("\nmehler,landau_trace,") != std::string::npos);
}

TEST_CASE("verify and self-test") {
  const fs::path out = scratch("verify");
  const auto r = run_cli({"verify", "1", "--out", out.string()});
  CHECK(r.code == kSuccess);
  CHECK(r.out.find("AC1 PASS") != std::string::npos);
  CHECK(slurp(out / "verify_summary.csv").starts_with("criterion,title,passed,limit_seconds,detail\nAC1,"));
  const auto s = run_cli({"algebra-selftest", "--out", out.string()});
  CHECK(s.code == kSuccess);
  CHECK(s.out.find("4/4 criteria passed") != std::string::npos);
}

TEST_CASE("output directory precedence") {
  const fs::path env_dir = scratch("env-out");
  setenv("GETZLER_OUT", env_dir.string().c_str(), 1);
  CHECK(run_cli({"index-density"}).code == kSuccess);
  CHECK(fs::exists(env_dir / "index_density.csv"));
  const fs::path flag_dir = scratch("flag-out");
  CHECK(run_cli({"index-density", "--out", flag_dir.string()}).code == kSuccess);
  CHECK(fs::exists(flag_dir / "index_density.csv"));
  unsetenv("GETZLER_OUT");
}
