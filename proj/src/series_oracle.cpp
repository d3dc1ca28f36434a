#include <map>

#include "getzler/oracle.hpp"

namespace getzler {

PowerSeries::PowerSeries(int order, std::vector<mpq_class> c) : order_(order), c_(std::move(c)) {
  if (order < 0) throw InputError("power series order must be non-negative");
  c_.resize(order + 1, mpq_class(0));
}

PowerSeries PowerSeries::x(int order) {
  PowerSeries s(order);
  if (order >= 1) s[1] = 1;
  return s;
}

PowerSeries PowerSeries::constant(int order, const mpq_class& v) {
  PowerSeries s(order);
  s[0] = v;
  return s;
}

namespace {
void check_orders(const PowerSeries& a, const PowerSeries& b) {
  if (a.order() != b.order()) throw InputError("power series orders differ");
}
}  // namespace

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  check_orders(a, b);
  PowerSeries r(a.order());
  for (int k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
  check_orders(a, b);
  PowerSeries r(a.order());
  for (int k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
  return r;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  check_orders(a, b);
  PowerSeries r(a.order());
  for (int i = 0; i <= a.order(); ++i)
    for (int j = 0; i + j <= a.order(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

PowerSeries operator*(const mpq_class& s, const PowerSeries& a) {
  PowerSeries r(a.order());
  for (int k = 0; k <= a.order(); ++k) r[k] = s * a[k];
  return r;
}

PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) { return a * b.inverse(); }

PowerSeries PowerSeries::inverse() const {
  if (c_[0] == 0) throw std::domain_error("power series inverse needs a nonzero constant term");
  PowerSeries r(order_);
  r[0] = 1 / c_[0];
  for (int k = 1; k <= order_; ++k) {
    mpq_class s = 0;
    for (int j = 1; j <= k; ++j) s += c_[j] * r[k - j];
    r[k] = -s / c_[0];
  }
  return r;
}

PowerSeries PowerSeries::exp() const {
  if (c_[0] != 0) throw std::domain_error("exact exp needs a zero constant term");
  // f' = g' f
  PowerSeries r(order_);
  r[0] = 1;
  for (int k = 1; k <= order_; ++k) {
    mpq_class s = 0;
    for (int j = 1; j <= k; ++j) s += j * c_[j] * r[k - j];
    r[k] = s / k;
  }
  return r;
}

PowerSeries PowerSeries::log() const {
  if (c_[0] != 1) throw std::domain_error("exact log needs constant term 1");
  // log(1 + u) = Σ (−1)^{k+1} u^k / k
  PowerSeries u = *this;
  u[0] = 0;
  PowerSeries r(order_), power = PowerSeries::constant(order_, 1);
  for (int k = 1; k <= order_; ++k) {
    power = power * u;
    r = r + mpq_class(k % 2 ? 1 : -1, k) * power;
  }
  return r;
}

PowerSeries PowerSeries::sqrt() const { return (mpq_class(1, 2) * log()).exp(); }

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
  check_orders(*this, inner);
  if (inner[0] != 0) throw std::domain_error("composition needs inner(0) = 0");
  PowerSeries r(order_), power = PowerSeries::constant(order_, 1);
  for (int k = 0; k <= order_; ++k) {
    r = r + c_[k] * power;
    power = power * inner;
  }
  return r;
}

PowerSeries PowerSeries::divide_by_x() const {
  if (c_[0] != 0) throw std::domain_error("divide_by_x needs f(0) = 0");
  // one extra order of the numerator is required; callers build numerators at order + 1
  PowerSeries r(order_ - 1 < 0 ? 0 : order_ - 1);
  for (int k = 1; k <= order_; ++k) r[k - 1] = c_[k];
  return r;
}

namespace {

/// e^{a x} at the given order.
PowerSeries exp_linear(int order, const mpq_class& a) { return (a * PowerSeries::x(order)).exp(); }

/// sinh(x)/x, from exponentials: numerator computed one order higher then shifted.
PowerSeries sinhc(int order) {
  const int o = order + 1;
  PowerSeries num = mpq_class(1, 2) * (exp_linear(o, 1) - exp_linear(o, -1));
  return num.divide_by_x();
}

PowerSeries coshs(int order) { return mpq_class(1, 2) * (exp_linear(order, 1) + exp_linear(order, -1)); }

PowerSeries half_argument(const PowerSeries& f) { return f.compose(mpq_class(1, 2) * PowerSeries::x(f.order())); }

using Builder = PowerSeries (*)(int);

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table = {
      {"x_over_sinh_x", [](int o) { return sinhc(o).inverse(); }},
      {"sqrt_x_over_sinh_x", [](int o) { return sinhc(o).inverse().sqrt(); }},
      {"half_x_over_sinh_half_x", [](int o) { return half_argument(sinhc(o).inverse()); }},
      {"sqrt_half_x_over_sinh_half_x", [](int o) { return half_argument(sinhc(o).inverse()).sqrt(); }},
      {"log_half_x_over_sinh_half_x", [](int o) { return half_argument(sinhc(o).inverse()).log(); }},
      // (x/2)/(e^{x/2} − e^{−x/2}) = ½·(x/2)/sinh(x/2)
      {"half_x_over_exp_half_diff",
       [](int o) {
         const int p = o + 1;
         PowerSeries den = exp_linear(p, mpq_class(1, 2)) - exp_linear(p, mpq_class(-1, 2));
         return mpq_class(1, 2) * den.divide_by_x().inverse();
       }},
      {"x_over_one_minus_exp_neg_2x",
       [](int o) {
         PowerSeries den = PowerSeries::constant(o + 1, 1) - exp_linear(o + 1, -2);
         return den.divide_by_x().inverse();
       }},
      {"x_coth_x", [](int o) { return coshs(o) * sinhc(o).inverse(); }},
  };
  return table;
}

}  // namespace

std::vector<mpq_class> series_oracle(const std::string& name, int order) {
  if (order < 0 || order > 6) throw InputError("series_oracle: order must lie in 0..6");
  auto it = builders().find(name);
  if (it == builders().end()) throw InputError("series_oracle: unknown series '" + name + "'");
  return it->second(order).coefficients();
}

std::vector<std::string> series_oracle_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : builders()) out.push_back(k);
  return out;
}

}  // namespace getzler
