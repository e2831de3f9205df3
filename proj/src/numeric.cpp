#include "ssact/numeric.hpp"

#include <cctype>

namespace ssact {

namespace {

bool parse_int(const std::string& s, BigInt& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  if (i == s.size()) return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? BigInt(-v) : v;
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(const std::string& text) {
  std::string s = text;
  // trim
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.pop_back();
  if (s.empty()) return std::nullopt;

  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt p, q;
    if (!parse_int(s.substr(0, slash), p) ||
        !parse_int(s.substr(slash + 1), q) || q == 0)
      return std::nullopt;
    return Rational(p, q);
  }

  // decimal with optional exponent
  std::size_t epos = s.find_first_of("eE");
  long exp10 = 0;
  std::string mant = s;
  if (epos != std::string::npos) {
    BigInt e;
    if (!parse_int(s.substr(epos + 1), e)) return std::nullopt;
    if (e > 100000 || e < -100000) return std::nullopt;
    exp10 = e.convert_to<long>();
    mant = s.substr(0, epos);
  }
  std::size_t dotpos = mant.find('.');
  std::string digits = mant;
  if (dotpos != std::string::npos) {
    digits = mant.substr(0, dotpos) + mant.substr(dotpos + 1);
    exp10 -= static_cast<long>(mant.size() - dotpos - 1);
    if (digits.empty() || digits == "+" || digits == "-") return std::nullopt;
  }
  BigInt m;
  if (!parse_int(digits, m)) return std::nullopt;
  Rational r(m);
  BigInt ten(10);
  if (exp10 >= 0) {
    for (long i = 0; i < exp10; ++i) r *= ten;
  } else {
    for (long i = 0; i < -exp10; ++i) r /= ten;
  }
  return r;
}

}  // namespace ssact
