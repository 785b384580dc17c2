#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "flpf/error.hpp"

namespace flpf {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw Error(ErrorCode::Parse, "zero denominator");
  return Rational(Integer(num), Integer(den));
}

inline bool is_zero(const Rational& q) { return q.sign() == 0; }
inline bool is_positive(const Rational& q) { return q.sign() > 0; }
inline bool is_negative(const Rational& q) { return q.sign() < 0; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "n/d" for non-integers, plain "n" otherwise.
inline std::string to_string(const Rational& q) {
  const Integer& den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

/// Number of significant bits in the larger of numerator and denominator.
inline std::size_t bit_size(const Rational& q) {
  const Integer num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
  const Integer& den = boost::multiprecision::denominator(q);
  std::size_t bits = 0;
  if (num != 0) bits = boost::multiprecision::msb(num) + 1;
  if (den != 0) bits = std::max<std::size_t>(bits, boost::multiprecision::msb(den) + 1);
  return bits;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw Error(ErrorCode::Parse, "malformed rational '" + std::string(whole) + "'");
  Integer v{std::string(s)};
  return negative ? Integer(-v) : v;
}

}  // namespace detail

/// Accepts "n", "n/d" and plain decimals such as "0.25" (converted exactly).
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw Error(ErrorCode::Parse, "empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = detail::parse_integer(s.substr(0, slash), text);
    std::string_view den_text = s.substr(slash + 1);
    if (!detail::all_digits(den_text))
      throw Error(ErrorCode::Parse, "malformed rational '" + std::string(text) + "'");
    Integer den(std::string{den_text});
    if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  // Decimal with exponent, e.g. 1e-6 or 2.5E3.
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    Rational mantissa = parse_rational(s.substr(0, e));
    std::string_view exp_text = s.substr(e + 1);
    bool neg = !exp_text.empty() && exp_text.front() == '-';
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) exp_text.remove_prefix(1);
    if (exp_text.empty() || exp_text.size() > 4 || !detail::all_digits(exp_text))
      throw Error(ErrorCode::Parse, "malformed exponent in '" + std::string(text) + "'");
    Rational scale(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::stoul(std::string(exp_text)))));
    return neg ? Rational(mantissa / scale) : Rational(mantissa * scale);
  }

  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) int_part.remove_prefix(1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !detail::all_digits(int_part)) ||
        (!frac_part.empty() && !detail::all_digits(frac_part)))
      throw Error(ErrorCode::Parse, "malformed rational '" + std::string(text) + "'");
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac_part.size()));
    Integer whole = int_part.empty() ? Integer(0) : Integer(std::string(int_part));
    Integer frac = frac_part.empty() ? Integer(0) : Integer(std::string(frac_part));
    Rational q(Integer(whole * scale + frac), scale);
    return negative ? Rational(-q) : q;
  }

  return Rational(detail::parse_integer(s, text));
}

}  // namespace flpf
