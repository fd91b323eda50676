#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symeu {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "0.446464", "-3", "2/5", "1e-3" -> exact value
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error("not a number: '" + std::string(text) + "'"); };
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  s = s.substr(b);
  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  long exp10 = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') fail();
    if (++i == s.size()) fail();
    auto res = std::from_chars(s.data() + i + (s[i] == '+' ? 1 : 0), s.data() + s.size(), exp10);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail();
  }
  // a leading zero would make the digit string octal
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Integer n(digits);
  Integer ten = 10;
  long e = exp10 - scale;
  Rational r(n);
  if (e > 0) r *= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(e)));
  if (e < 0) r /= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(-e)));
  return neg ? Rational(-r) : r;
}

// shortest round-trip text of the double, then exact parse; so 0.3 -> 3/10
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw Error("non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return parse_rational(std::string_view(buf, res.ptr - buf));
}

inline std::string to_string(const Rational& r) {
  return r.str();
}

// fixed-point text; exact when the expansion terminates within max_places
inline std::string format_decimal(const Rational& r, int max_places = 12) {
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(max_places));
  Integer scaled = (num * scale * 2 + den) / (den * 2);  // round half up
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= max_places)
    digits = std::string(max_places + 1 - digits.size(), '0') + digits;
  std::string ip = digits.substr(0, digits.size() - max_places);
  std::string fp = digits.substr(digits.size() - max_places);
  while (!fp.empty() && fp.back() == '0') fp.pop_back();
  std::string out = ip;
  if (!fp.empty()) out += "." + fp;
  if (neg && out != "0") out = "-" + out;
  return out;
}

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

}  // namespace symeu
