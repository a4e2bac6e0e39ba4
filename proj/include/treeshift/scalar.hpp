#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <variant>

#include "treeshift/numeric.hpp"

namespace treeshift {

using Complex = std::complex<double>;

/// Nonnegative magnitude that is either an exact rational or a float.
/// Exact values never degrade unless compared or combined with floats.
class Magnitude {
 public:
  Magnitude() : value_(Rational(0)) {}
  Magnitude(const Rational& r) : value_(rabs(r)) {}
  Magnitude(double d) : value_(std::abs(d)) {}

  bool exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& rational() const { return std::get<Rational>(value_); }
  double approx() const {
    return exact() ? static_cast<double>(rational()) : std::get<double>(value_);
  }
  bool is_zero(double tol = 0.0) const {
    return exact() ? rational() == 0 : std::get<double>(value_) <= tol;
  }

  friend bool operator==(const Magnitude& a, const Magnitude& b) {
    if (a.exact() && b.exact()) return a.rational() == b.rational();
    return a.approx() == b.approx();
  }
  friend bool operator<(const Magnitude& a, const Magnitude& b) {
    if (a.exact() && b.exact()) return a.rational() < b.rational();
    return a.approx() < b.approx();
  }
  friend bool operator<=(const Magnitude& a, const Magnitude& b) {
    return a < b || a == b;
  }
  friend Magnitude max(const Magnitude& a, const Magnitude& b) {
    return a < b ? b : a;
  }
  friend Magnitude operator*(const Magnitude& a, const Magnitude& b) {
    if (a.exact() && b.exact()) return Magnitude(Rational(a.rational() * b.rational()));
    return Magnitude(a.approx() * b.approx());
  }

  std::string str() const {
    if (exact()) return rational_to_string(rational());
    std::ostringstream os;
    os.precision(17);
    os << approx();
    return os.str();
  }

 private:
  std::variant<Rational, double> value_;
};

/// Magnitude extended with +infinity, as reported by norm computations on
/// functions whose derivative is unbounded.
class ExtendedMagnitude {
 public:
  ExtendedMagnitude() = default;
  ExtendedMagnitude(Magnitude m) : finite_(std::move(m)) {}
  static ExtendedMagnitude infinity() {
    ExtendedMagnitude e;
    e.infinite_ = true;
    return e;
  }

  bool infinite() const { return infinite_; }
  const Magnitude& finite() const {
    if (infinite_) throw ContractError("extended magnitude is infinite");
    return finite_;
  }
  std::string str() const { return infinite_ ? "inf" : finite_.str(); }

  friend bool operator<(const ExtendedMagnitude& a, const ExtendedMagnitude& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.finite_ < b.finite_;
  }

 private:
  bool infinite_ = false;
  Magnitude finite_;
};

/// Scalar value in one of the two arithmetic modes: exact real rational, or
/// complex floating point. Mixed-mode arithmetic promotes to complex.
class Scalar {
 public:
  Scalar() : value_(Rational(0)) {}
  Scalar(int n) : value_(Rational(n)) {}
  Scalar(const Integer& n) : value_(Rational(n)) {}
  Scalar(const Rational& r) : value_(r) {}
  Scalar(Complex z) : value_(z) {}
  Scalar(double d) : value_(Complex(d, 0.0)) {}

  bool exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& rational() const { return std::get<Rational>(value_); }
  Complex complex_value() const {
    return exact() ? Complex(static_cast<double>(rational()), 0.0)
                   : std::get<Complex>(value_);
  }

  bool is_zero(double tol = 0.0) const {
    return exact() ? rational() == 0 : std::abs(std::get<Complex>(value_)) <= tol;
  }

  Magnitude abs() const {
    return exact() ? Magnitude(rabs(rational())) : Magnitude(std::abs(complex_value()));
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return Scalar(Rational(a.rational() + b.rational()));
    return Scalar(a.complex_value() + b.complex_value());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return Scalar(Rational(a.rational() - b.rational()));
    return Scalar(a.complex_value() - b.complex_value());
  }
  friend Scalar operator-(const Scalar& a) {
    if (a.exact()) return Scalar(Rational(-a.rational()));
    return Scalar(-a.complex_value());
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return Scalar(Rational(a.rational() * b.rational()));
    return Scalar(a.complex_value() * b.complex_value());
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) {
      if (b.rational() == 0) throw ContractError("scalar division by zero");
      return Scalar(Rational(a.rational() / b.rational()));
    }
    return Scalar(a.complex_value() / b.complex_value());
  }

  Scalar pow(int e) const {
    if (exact()) return Scalar(rpow(rational(), e));
    Complex acc(1.0, 0.0);
    Complex base = e >= 0 ? complex_value() : Complex(1.0, 0.0) / complex_value();
    for (int k = std::abs(e); k > 0; --k) acc *= base;
    return Scalar(acc);
  }

  /// Equality up to tolerance; exact when both sides are rational.
  bool equals(const Scalar& other, double tol = 0.0) const {
    return (*this - other).is_zero(tol);
  }

  std::string str() const {
    if (exact()) return rational_to_string(rational());
    std::ostringstream os;
    os.precision(17);
    Complex z = complex_value();
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "-") << std::abs(z.imag()) << "i";
    return os.str();
  }

 private:
  std::variant<Rational, Complex> value_;
};

/// Parses either an exact rational ("p/q", "-3") or a complex float
/// ("1.5", "-0.25+2i", "3i").
inline Scalar parse_scalar(const std::string& text) {
  if (auto r = parse_rational(text)) return Scalar(*r);
  std::string t;
  for (char c : text)
    if (c != ' ') t += c;
  if (t.empty()) throw SpecError("empty scalar literal");
  auto parse_double = [](const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
  };
  if (t.back() == 'i') {
    std::string body = t.substr(0, t.size() - 1);
    // split at the last sign that starts the imaginary part
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    double re = 0.0, im = 0.0;
    if (split == std::string::npos) {
      std::string imtext = body;
      if (imtext.empty() || imtext == "+") imtext = "1";
      if (imtext == "-") imtext = "-1";
      if (!parse_double(imtext, im)) throw SpecError("bad scalar literal: " + text);
      return Scalar(Complex(0.0, im));
    }
    std::string imtext = body.substr(split);
    if (imtext == "+") imtext = "1";
    if (imtext == "-") imtext = "-1";
    if (!parse_double(body.substr(0, split), re) || !parse_double(imtext, im))
      throw SpecError("bad scalar literal: " + text);
    return Scalar(Complex(re, im));
  }
  double re = 0.0;
  if (!parse_double(t, re)) throw SpecError("bad scalar literal: " + text);
  return Scalar(Complex(re, 0.0));
}

}  // namespace treeshift
