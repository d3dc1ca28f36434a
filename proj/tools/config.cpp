#include "config.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace getzler::cli {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }
std::string where(const std::string& path) { return path.empty() ? "/" : path; }

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(where(path) + ": " + what); }

/// Object reader that rejects keys nobody asked for.
class Object {
 public:
  Object(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }
  const Json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& require(const std::string& key) {
    const Json* v = get(key);
    if (!v) fail(at(path_, key), "missing required key");
    return *v;
  }
  std::string path(const std::string& key) const { return at(path_, key); }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(at(path_, k), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

mpq_class parse_rational_text(const std::string& s, const std::string& path) {
  static const std::regex fraction(R"(^\s*([+-]?\d+)\s*/\s*(\d+)\s*$)");
  static const std::regex decimal(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, fraction)) {
    std::string numerator = m[1].str();
    if (numerator.front() == '+') numerator.erase(0, 1);
    mpz_class num(numerator, 10), den(m[2].str(), 10);
    if (den == 0) fail(path, "zero denominator in \"" + s + "\"");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  if (std::regex_match(s, m, decimal) && (m[2].length() + m[3].length()) > 0) {
    const std::string digits = m[2].str() + m[3].str();
    long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
    exponent -= static_cast<long>(m[3].length());
    if (exponent > 1000 || exponent < -1000) fail(path, "exponent out of range in \"" + s + "\"");
    mpz_class num(digits, 10), scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    mpq_class q = exponent >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
    q.canonicalize();
    return m[1].str() == "-" ? mpq_class(-q) : q;
  }
  fail(path, "cannot read \"" + s + "\" as a number");
}

mpq_class parse_real_exact(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return mpq_class(mpz_class(j.dump(), 10));
  if (j.is_number_float()) return mpq_class(j.get<double>());
  if (j.is_string()) return parse_rational_text(j.get<std::string>(), path);
  fail(path, "expected a number or a numeric string");
}

double parse_real(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational_text(j.get<std::string>(), path).get_d();
  fail(path, "expected a number");
}

bool is_pair(const Json& j) { return j.is_array() && j.size() == 2 && !j[0].is_array() && !j[1].is_array(); }

template <typename T, typename F>
Matrix<T> parse_matrix(const Json& j, const std::string& path, F entry) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].empty()) fail(at(path, i), "expected a non-empty row");
    if (i == 0) cols = j[i].size();
    else if (j[i].size() != cols) fail(at(path, i), "row length differs from the first row");
  }
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = entry(j[i][k], at(at(path, i), k));
  return m;
}

int read_int(const Json& j, const std::string& path, long lo, long hi) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const long v = j.get<long>();
  if (v < lo || v > hi) fail(path, "must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
  return static_cast<int>(v);
}

double read_positive(const Json& j, const std::string& path) {
  const double v = parse_real(j, path);
  if (!(v > 0) || !std::isfinite(v)) fail(path, "must be positive");
  return v;
}

double read_finite(const Json& j, const std::string& path) {
  const double v = parse_real(j, path);
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

template <typename T, typename F>
std::vector<T> read_increasing(const Json& j, const std::string& path, F read) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read(j[i], at(path, i)));
    if (i > 0 && !(out[i] > out[i - 1])) fail(at(path, i), "list must be strictly increasing");
  }
  return out;
}

std::vector<long> read_positive_ints(const Json& j, const std::string& path) {
  return read_increasing<long>(j, path, [](const Json& v, const std::string& p) { return static_cast<long>(read_int(v, p, 1, 1 << 20)); });
}

std::vector<double> read_positive_reals(const Json& j, const std::string& path) {
  return read_increasing<double>(j, path, read_positive);
}

Json real_json(double v) { return v; }

CurvatureData parse_curvature(Object& o, const std::string& path, std::optional<int> fixed_n = std::nullopt) {
  CurvatureData c;
  const Json* n = o.get("n");
  if (fixed_n) {
    c.n = *fixed_n;
    if (n && read_int(*n, o.path("n"), 1, 16) != c.n) fail(o.path("n"), "disagrees with the operator dimension");
  } else if (n) {
    c.n = read_int(*n, o.path("n"), 1, 16);
  }
  if (const Json* t = o.get("twist")) c.twist = read_int(*t, o.path("twist"), 1, 64);
  c.riemann = RiemannTensor<Q>(c.n);
  c.twist_curvature.assign(static_cast<std::size_t>(c.n * c.n), Matrix<Q>(c.twist, c.twist));

  if (const Json* r = o.get("riemann")) {
    const std::string rp = o.path("riemann");
    if (!r->is_array()) fail(rp, "expected a list of [i, j, k, l, value] entries");
    std::vector<bool> set(static_cast<std::size_t>(c.n * c.n * c.n * c.n), false);
    auto slot = [&](int i, int j, int k, int l) { return static_cast<std::size_t>((((i - 1) * c.n + (j - 1)) * c.n + (k - 1)) * c.n + (l - 1)); };
    for (std::size_t e = 0; e < r->size(); ++e) {
      const auto& row = (*r)[e];
      const std::string ep = at(rp, e);
      if (!row.is_array() || row.size() != 5) fail(ep, "expected [i, j, k, l, value]");
      int idx[4];
      for (int q = 0; q < 4; ++q) idx[q] = read_int(row[q], at(ep, static_cast<std::size_t>(q)), 1, c.n);
      if (idx[0] == idx[1] || idx[2] == idx[3]) fail(ep, "R_ijkl with i = j or k = l vanishes by antisymmetry");
      const Q v = parse_exact(row[4], at(ep, 4));
      auto put = [&](int i, int j, int k, int l, const Q& value) {
        const auto s = slot(i, j, k, l);
        if (set[s] && !(c.riemann(i, j, k, l) == value)) fail(ep, "conflicts with an earlier entry under the curvature symmetries");
        set[s] = true;
        c.riemann.at(i, j, k, l) = value;
      };
      const auto [i, j, k, l] = std::tuple{idx[0], idx[1], idx[2], idx[3]};
      for (auto [a, b, cc, d] : {std::tuple{i, j, k, l}, std::tuple{k, l, i, j}}) {
        put(a, b, cc, d, v);
        put(b, a, cc, d, -v);
        put(a, b, d, cc, -v);
        put(b, a, d, cc, v);
      }
    }
  }
  if (const Json* f = o.get("twist_curvature")) {
    const std::string fp = o.path("twist_curvature");
    if (!f->is_array()) fail(fp, "expected a list of [a, b, matrix] entries");
    for (std::size_t e = 0; e < f->size(); ++e) {
      const auto& row = (*f)[e];
      const std::string ep = at(fp, e);
      if (!row.is_array() || row.size() != 3) fail(ep, "expected [a, b, matrix]");
      const int a = read_int(row[0], at(ep, 0), 1, c.n), b = read_int(row[1], at(ep, 1), 1, c.n);
      if (a == b) fail(ep, "F_aa vanishes by antisymmetry");
      const auto m = parse_exact_matrix(row[2], at(ep, 2));
      if (m.rows() != static_cast<std::size_t>(c.twist) || m.cols() != static_cast<std::size_t>(c.twist))
        fail(at(ep, 2), "must be twist×twist (" + std::to_string(c.twist) + ")");
      auto& ab = c.twist_curvature[static_cast<std::size_t>((a - 1) * c.n + (b - 1))];
      auto& ba = c.twist_curvature[static_cast<std::size_t>((b - 1) * c.n + (a - 1))];
      if (!ab.is_zero()) fail(ep, "duplicate entry");
      ab = m;
      ba = -m;
    }
  }
  (void)path;
  return c;
}

Json curvature_json(const CurvatureData& c) {
  Json j = Json::object();
  j["n"] = c.n;
  j["twist"] = c.twist;
  Json r = Json::array();
  for (int i = 1; i <= c.n; ++i)
    for (int jj = i + 1; jj <= c.n; ++jj)
      for (int k = 1; k <= c.n; ++k)
        for (int l = k + 1; l <= c.n; ++l)
          if (std::pair{i, jj} <= std::pair{k, l} && !(c.riemann(i, jj, k, l) == Q(0)))
            r.push_back(Json::array({i, jj, k, l, to_json(c.riemann(i, jj, k, l))}));
  j["riemann"] = r;
  Json f = Json::array();
  for (int a = 1; a <= c.n; ++a)
    for (int b = a + 1; b <= c.n; ++b) {
      const auto& m = c.twist_curvature[static_cast<std::size_t>((a - 1) * c.n + (b - 1))];
      if (!m.is_zero()) f.push_back(Json::array({a, b, to_json(m)}));
    }
  j["twist_curvature"] = f;
  return j;
}

Json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

}  // namespace

bool CurvatureData::flat() const {
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l)
          if (!(riemann(i, j, k, l) == Q(0))) return false;
  for (const auto& m : twist_curvature)
    if (!m.is_zero()) return false;
  return true;
}

Q parse_exact(const Json& j, const std::string& path) {
  if (is_pair(j)) return Q(parse_real_exact(j[0], at(path, 0)), parse_real_exact(j[1], at(path, 1)));
  return Q(parse_real_exact(j, path));
}

Complex parse_complex(const Json& j, const std::string& path) {
  if (is_pair(j)) return {read_finite(j[0], at(path, 0)), read_finite(j[1], at(path, 1))};
  return {read_finite(j, path), 0.0};
}

Matrix<Q> parse_exact_matrix(const Json& j, const std::string& path) { return parse_matrix<Q>(j, path, parse_exact); }
Matrix<Complex> parse_complex_matrix(const Json& j, const std::string& path) { return parse_matrix<Complex>(j, path, parse_complex); }

Json to_json(const Complex& z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

Json to_json(const Q& z) {
  if (z.imag() == 0) return z.real().get_str();
  return Json::array({z.real().get_str(), z.imag().get_str()});
}

template <typename T>
Json matrix_json(const Matrix<T>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Matrix<Complex>& m) { return matrix_json(m); }
Json to_json(const Matrix<Q>& m) { return matrix_json(m); }

RunConfig default_config() {
  RunConfig c;
  c.index.n = 2;
  c.index.twist = 1;
  c.index.riemann = RiemannTensor<Q>(2);
  c.index.twist_curvature.assign(4, Matrix<Q>(1, 1));
  c.index.twist_curvature[1] = Matrix<Q>(1, 1, {Q(mpq_class(1, 2))});
  c.index.twist_curvature[2] = Matrix<Q>(1, 1, {Q(mpq_class(-1, 2))});
  return c;
}

RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  RunConfig c = default_config();
  Object root(j, "");
  auto resolve = [&](const Json& v, const std::string& p) {
    if (!v.is_string() || v.get<std::string>().empty()) fail(p, "expected a non-empty path string");
    std::filesystem::path path = v.get<std::string>();
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (const Json* v = root.get("output_dir")) c.output_dir = resolve(*v, root.path("output_dir"));
  if (const Json* v = root.get("jobs")) c.jobs = read_int(*v, root.path("jobs"), 1, 256);
  if (const Json* v = root.get("seed")) c.seed = static_cast<unsigned>(read_int(*v, root.path("seed"), 0, 2147483647));
  if (const Json* v = root.get("tolerances")) {
    Object o(*v, root.path("tolerances"));
    for (auto& [key, value] : c.tolerances)
      if (const Json* t = o.get(key)) value = read_positive(*t, o.path(key));
    o.finish();
  }
  if (const Json* v = root.get("theta")) {
    Object o(*v, root.path("theta"));
    if (const Json* f = o.get("operator_file")) c.theta.operator_file = resolve(*f, o.path("operator_file"));
    if (const Json* t = o.get("J")) c.theta.J = read_int(*t, o.path("J"), 0, 12);
    if (const Json* t = o.get("D")) c.theta.D = read_int(*t, o.path("D"), 0, 40);
    o.finish();
  }
  if (const Json* v = root.get("mehler")) {
    Object o(*v, root.path("mehler"));
    if (const Json* t = o.get("R")) c.mehler.R = parse_complex_matrix(*t, o.path("R"));
    if (const Json* t = o.get("F")) c.mehler.F = parse_complex_matrix(*t, o.path("F"));
    if (const Json* t = o.get("t")) c.mehler.t = read_positive_reals(*t, o.path("t"));
    const std::size_t n = c.mehler.R.rows();
    if (!c.mehler.R.square()) fail(o.path("R"), "must be square");
    if (!c.mehler.F.square()) fail(o.path("F"), "must be square");
    if (const Json* t = o.get("points")) {
      const std::string pp = o.path("points");
      if (!t->is_array() || t->empty()) fail(pp, "expected a non-empty list of points");
      c.mehler.points.clear();
      for (std::size_t i = 0; i < t->size(); ++i) {
        const auto& pt = (*t)[i];
        if (!pt.is_array()) fail(at(pp, i), "expected a coordinate list");
        std::vector<double> x;
        for (std::size_t k = 0; k < pt.size(); ++k) x.push_back(read_finite(pt[k], at(at(pp, i), k)));
        c.mehler.points.push_back(std::move(x));
      }
    } else {
      c.mehler.points = {std::vector<double>(n, 0.0)};
    }
    for (std::size_t i = 0; i < c.mehler.points.size(); ++i)
      if (c.mehler.points[i].size() != n) fail(at(o.path("points"), i), "point dimension must equal the size of R");
    o.finish();
  }
  if (const Json* v = root.get("index")) {
    Object o(*v, root.path("index"));
    c.index = parse_curvature(o, root.path("index"));
    o.finish();
  }
  if (const Json* v = root.get("bk")) {
    Object o(*v, root.path("bk"));
    if (const Json* t = o.get("a")) c.bk.a = read_finite(*t, o.path("a"));
    if (const Json* t = o.get("e")) c.bk.e = read_finite(*t, o.path("e"));
    if (const Json* t = o.get("u")) c.bk.u = read_positive(*t, o.path("u"));
    if (const Json* t = o.get("p")) c.bk.p = read_positive_ints(*t, o.path("p"));
    if (const Json* t = o.get("L")) c.bk.L = read_int(*t, o.path("L"), 4, 128);
    o.finish();
  }
  if (const Json* v = root.get("odd")) {
    Object o(*v, root.path("odd"));
    if (const Json* t = o.get("b")) c.odd.b = read_finite(*t, o.path("b"));
    if (const Json* t = o.get("f0")) c.odd.f0 = read_finite(*t, o.path("f0"));
    if (const Json* t = o.get("t")) c.odd.t = read_positive(*t, o.path("t"));
    if (const Json* t = o.get("r")) c.odd.r = read_positive_ints(*t, o.path("r"));
    if (const Json* t = o.get("L")) c.odd.L = read_int(*t, o.path("L"), 4, 128);
    if (const Json* t = o.get("circle_sites")) c.odd.circle_sites = read_int(*t, o.path("circle_sites"), 1, 4096);
    o.finish();
  }
  if (const Json* v = root.get("lattice")) {
    Object o(*v, root.path("lattice"));
    if (const Json* t = o.get("b")) c.lattice.b = read_positive(*t, o.path("b"));
    if (const Json* t = o.get("t")) c.lattice.t = read_positive_reals(*t, o.path("t"));
    if (const Json* t = o.get("L")) c.lattice.L = read_int(*t, o.path("L"), 4, 128);
    if (const Json* t = o.get("flux_quanta")) c.lattice.flux_quanta = read_int(*t, o.path("flux_quanta"), 1, 1 << 14);
    o.finish();
  }
  root.finish();
  c.bk.jobs = c.odd.jobs = c.lattice.jobs = c.jobs;
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  RunConfig c = parse_config(read_json_file(file), file.parent_path());
  c.input_file = file;
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j = Json::object();
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.string();
  j["jobs"] = c.jobs;
  j["seed"] = c.seed;
  Json tol = Json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  Json theta = Json::object();
  if (!c.theta.operator_file.empty()) theta["operator_file"] = c.theta.operator_file.string();
  theta["J"] = c.theta.J;
  if (c.theta.D) theta["D"] = *c.theta.D;
  j["theta"] = theta;
  Json points = Json::array();
  for (const auto& p : c.mehler.points) points.push_back(p);
  j["mehler"] = {{"R", to_json(c.mehler.R)}, {"F", to_json(c.mehler.F)}, {"t", c.mehler.t}, {"points", points}};
  j["index"] = curvature_json(c.index);
  j["bk"] = {{"a", real_json(c.bk.a)}, {"e", real_json(c.bk.e)}, {"u", real_json(c.bk.u)}, {"p", c.bk.p}, {"L", c.bk.L}};
  j["odd"] = {{"b", real_json(c.odd.b)}, {"f0", real_json(c.odd.f0)}, {"t", real_json(c.odd.t)},
              {"r", c.odd.r},          {"L", c.odd.L},           {"circle_sites", c.odd.circle_sites}};
  j["lattice"] = {{"b", real_json(c.lattice.b)}, {"t", c.lattice.t}, {"L", c.lattice.L}, {"flux_quanta", c.lattice.flux_quanta}};
  return j;
}

ThetaProblem parse_theta_problem(const Json& j) {
  ThetaProblem p;
  Object root(j, "");
  const Json& n = root.require("n");
  p.curvature = parse_curvature(root, "", read_int(n, root.path("n"), 1, 16));
  const int dim = p.curvature.n, twist = p.curvature.twist;
  const Json* op = root.get("operator");
  const Json* terms = root.get("terms");
  if ((op != nullptr) == (terms != nullptr)) fail("", "give exactly one of \"operator\" or \"terms\"");
  if (op) {
    if (!op->is_string() || op->get<std::string>() != "lichnerowicz") fail(root.path("operator"), "only \"lichnerowicz\" is supported");
    p.source = "lichnerowicz";
    const auto geo = GeometryJets<Q>::from_riemann(p.curvature.riemann, p.curvature.twist_curvature, 2);
    p.op = lichnerowicz_operator(geo);
  } else {
    p.source = "terms";
    const std::string tp = root.path("terms");
    if (!terms->is_array() || terms->empty()) fail(tp, "expected a non-empty list of terms");
    p.op = GradedOperator<Q>(dim, twist);
    for (std::size_t i = 0; i < terms->size(); ++i) {
      Object t((*terms)[i], at(tp, i));
      MonomialKey key;
      auto axes = [&](const char* name) {
        std::vector<int> out;
        if (const Json* v = t.get(name)) {
          if (!v->is_array()) fail(t.path(name), "expected a list of axes");
          for (std::size_t k = 0; k < v->size(); ++k) out.push_back(read_int((*v)[k], at(t.path(name), k), 1, dim));
        }
        return out;
      };
      key.x = MultiIndex::from_list(axes("x"));
      key.d = MultiIndex::from_list(axes("d"));
      const auto word = axes("word");
      for (std::size_t k = 1; k < word.size(); ++k)
        if (word[k] <= word[k - 1]) fail(t.path("word"), "Clifford indices must increase strictly");
      key.word = CliffordWord::from_indices(word);
      if (const Json* v = t.get("param")) key.param = read_int(*v, t.path("param"), 0, 16);
      const Json& cj = t.require("coefficient");
      Matrix<Q> coef;
      if (cj.is_array() && !is_pair(cj)) {
        coef = parse_exact_matrix(cj, t.path("coefficient"));
        if (coef.rows() != static_cast<std::size_t>(twist) || coef.cols() != static_cast<std::size_t>(twist))
          fail(t.path("coefficient"), "must be twist×twist (" + std::to_string(twist) + ")");
      } else {
        coef = Matrix<Q>::scalar(twist, parse_exact(cj, t.path("coefficient")));
      }
      t.finish();
      p.op.add_term(key, coef);
    }
  }
  root.finish();
  return p;
}

ThetaProblem load_theta_problem(const std::filesystem::path& file) { return parse_theta_problem(read_json_file(file)); }

}  // namespace getzler::cli
