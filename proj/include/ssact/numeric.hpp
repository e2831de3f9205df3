#pragma once

// Scalar layer shared by the float and exact engines.  Everything downstream
// is templated on a scalar S which is either `double` or `Rational`.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace ssact {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Input/constraint violations.  Collects every issue found, not just the
// first one.  Maps to exit code 2 in the CLI.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  explicit ValidationError(const std::string& issue)
      : ValidationError(std::vector<std::string>{issue}) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& i : v) {
      if (!s.empty()) s += "; ";
      s += i;
    }
    return s;
  }
  std::vector<std::string> issues_;
};

// Non-convergence, exceeded bounds, uncertified estimates, singular
// constrained systems.  Maps to exit code 3 in the CLI.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// States that are impossible unless the library itself is wrong.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

inline double sabs(double x) { return std::fabs(x); }
inline Rational sabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

template <typename S>
S scalar_from_bigint(const BigInt& n) {
  if constexpr (std::is_same_v<S, double>) {
    return to_double(n);
  } else {
    return Rational(n);
  }
}

template <typename S>
S spow(S base, long k) {
  S r(1);
  for (long i = 0; i < k; ++i) r = r * base;
  return r;
}

inline std::string format_scalar(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}
inline std::string format_scalar(const Rational& q) { return q.str(); }

// Accepts "p/q", integers, and decimal literals with optional exponent
// ("0.25", "1e-10", "-3.5e2").  Decimal literals convert exactly.
std::optional<Rational> parse_rational(const std::string& text);

// --- complex values ------------------------------------------------------
// Trace values are complex in general.  Stored as explicit pairs so the
// exact engine works with rational real/imaginary parts.

template <typename S>
struct Cx {
  S re{};
  S im{};

  Cx() = default;
  Cx(S r) : re(std::move(r)) {}  // NOLINT: implicit from real is intended
  Cx(S r, S i) : re(std::move(r)), im(std::move(i)) {}

  Cx conj() const { return {re, S(0) - im}; }
  S norm_sq() const { return re * re + im * im; }
  // Chebyshev magnitude: max(|re|, |im|).  Used for deltas so the exact
  // engine never needs square roots.
  S cheb() const {
    S a = sabs(re), b = sabs(im);
    return a < b ? b : a;
  }

  Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
  Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
  Cx scaled(const S& s) const { return {re * s, im * s}; }
  bool operator==(const Cx& o) const { return re == o.re && im == o.im; }
};

template <typename S>
std::string format_cx(const Cx<S>& z) {
  if (z.im == S(0)) return format_scalar(z.re);
  return format_scalar(z.re) + (z.im < S(0) ? "-" : "+") +
         format_scalar(sabs(z.im)) + "i";
}

// --- discount ------------------------------------------------------------
// The inverse temperature beta enters all formulas through d = e^{-beta}.
// Exact mode requires a rational d.

struct Discount {
  double value = 0.0;
  std::optional<Rational> exact;

  static Discount from_string(const std::string& text) {
    auto q = parse_rational(text);
    if (!q) throw ValidationError("cannot parse discount '" + text + "'");
    Discount d;
    d.exact = *q;
    d.value = to_double(*q);
    return d;
  }
  static Discount from_beta(double beta) {
    Discount d;
    d.value = std::exp(-beta);
    return d;
  }
  static Discount from_rational(Rational q) {
    Discount d;
    d.value = to_double(q);
    d.exact = std::move(q);
    return d;
  }

  template <typename S>
  S as() const {
    if constexpr (std::is_same_v<S, double>) {
      return value;
    } else {
      if (!exact)
        throw ValidationError(
            "exact mode requires a rational discount (p/q or decimal)");
      return *exact;
    }
  }
};

}  // namespace ssact
