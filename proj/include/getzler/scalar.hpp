#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace getzler {

using Complex = std::complex<double>;

/// Exact complex number with rational real and imaginary parts.
class ComplexRational {
 public:
  ComplexRational() = default;
  ComplexRational(long re) : re_(re), im_(0) {}  // NOLINT(implicit)
  ComplexRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static ComplexRational ratio(long num, long den) { return {mpq_class(num, den), 0}; }
  static ComplexRational imag_unit() { return {0, 1}; }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  ComplexRational conj() const { return {re_, -im_}; }

  ComplexRational& operator+=(const ComplexRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ComplexRational& operator*=(const ComplexRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  ComplexRational& operator/=(const ComplexRational& o) {
    mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
    if (den == 0) throw std::domain_error("ComplexRational: division by zero");
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / den;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  friend std::ostream& operator<<(std::ostream& os, const ComplexRational& z) {
    return os << '(' << z.re_ << ',' << z.im_ << ')';
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Coefficient domains the algebra is generic over.
template <typename S>
concept Scalar = requires(S a, S b) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { -a } -> std::convertible_to<S>;
  { a == b } -> std::convertible_to<bool>;
  S(1);
};

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<ComplexRational> {
  static constexpr bool exact = true;
  static ComplexRational ratio(long num, long den) { return ComplexRational::ratio(num, den); }
  static ComplexRational from_rational(const mpq_class& q) { return {q, 0}; }
  static ComplexRational imag_unit() { return ComplexRational::imag_unit(); }
  static bool is_zero(const ComplexRational& z) { return z.is_zero(); }
  static Complex to_complex(const ComplexRational& z) { return z.to_complex(); }
  static ComplexRational conj(const ComplexRational& z) { return z.conj(); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex ratio(long num, long den) { return {static_cast<double>(num) / den, 0.0}; }
  static Complex from_rational(const mpq_class& q) { return {q.get_d(), 0.0}; }
  static Complex imag_unit() { return {0.0, 1.0}; }
  static bool is_zero(const Complex& z) { return z == Complex{}; }
  static Complex to_complex(const Complex& z) { return z; }
  static Complex conj(const Complex& z) { return std::conj(z); }
};

template <typename S>
S pow_int(S base, unsigned e) {
  S out(1);
  while (e) {
    if (e & 1u) out = out * base;
    base = base * base;
    e >>= 1u;
  }
  return out;
}

/// Exact value coefficient · (4π)^{−power}, keeping the transcendental factor symbolic.
template <typename S>
struct FourPiScaled {
  S coefficient;
  int power = 0;

  Complex numeric() const {
    return ScalarTraits<S>::to_complex(coefficient) * std::pow(4.0 * std::numbers::pi, -power);
  }
  friend bool operator==(const FourPiScaled&, const FourPiScaled&) = default;
};

/// Thrown for inputs that violate an operation's preconditions (dimension mismatch, odd n, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace getzler
