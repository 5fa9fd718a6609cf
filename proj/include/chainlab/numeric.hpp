#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chainlab {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Decimal rendering rounded half-up to `digits` significant digits, with
/// trailing zeros dropped: 20/41 -> "0.4878", 1/41 -> "0.02439",
/// 2060/41 -> "50.244".
inline std::string format_significant(const Rational& value, int digits = 5) {
  if (digits < 1 || digits > 18) throw std::invalid_argument("digits out of range");
  if (value.numerator() == 0) return "0";

  using Wide = __int128;
  const bool negative = value.numerator() < 0;
  Wide num = negative ? -static_cast<Wide>(value.numerator()) : value.numerator();
  Wide den = value.denominator();

  auto pow10 = [](int e) {
    Wide p = 1;
    for (int i = 0; i < e; ++i) p *= 10;
    return p;
  };

  // exponent e with 10^e <= num/den < 10^(e+1)
  int e = 0;
  if (num >= den) {
    while (num >= den * pow10(e + 1)) ++e;
  } else {
    while (num * pow10(-e) < den) --e;
  }

  // scaled = round_half_up(num/den * 10^(digits-1-e))
  const int shift = digits - 1 - e;
  Wide scaled_num = shift >= 0 ? num * pow10(shift) : num;
  Wide scaled_den = shift >= 0 ? den : den * pow10(-shift);
  Wide scaled = (2 * scaled_num + scaled_den) / (2 * scaled_den);
  if (scaled >= pow10(digits)) {
    scaled /= 10;
    ++e;
  }

  std::string mantissa;
  for (Wide v = scaled; v > 0; v /= 10) mantissa.insert(mantissa.begin(), char('0' + int(v % 10)));

  std::string out;
  if (e >= 0) {
    const auto int_len = static_cast<std::size_t>(e + 1);
    if (mantissa.size() <= int_len) {
      out = mantissa + std::string(int_len - mantissa.size(), '0');
    } else {
      out = mantissa.substr(0, int_len) + "." + mantissa.substr(int_len);
    }
  } else {
    out = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + mantissa;
  }

  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return negative ? "-" + out : out;
}

}  // namespace chainlab
