#include "convmp/numeric.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <system_error>

namespace convmp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw InputError("empty number");

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(s) + "'");
    Rational r = num / den;
    r.canonicalize();
    return r;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InputError("not a number: '" + std::string(s) + "'");

  long exponent = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    const char* first = s.data() + pos;
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr == first) throw InputError("bad exponent in '" + std::string(s) + "'");
    pos = static_cast<std::size_t>(ptr - s.data());
  }
  if (pos != s.size()) throw InputError("trailing characters in number '" + std::string(s) + "'");
  if (exponent > 100000 || exponent < -100000) throw InputError("exponent out of range in '" + std::string(s) + "'");

  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long scale = exponent - frac_digits;
  Rational r;
  if (scale >= 0) {
    r = Rational(mantissa * pow10(static_cast<unsigned long>(scale)));
  } else {
    r = Rational(mantissa, pow10(static_cast<unsigned long>(-scale)));
  }
  r.canonicalize();
  return r;
}

double parse_double(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw InputError("non-finite number: '" + std::string(text) + "'");
  return v;
}

std::string to_decimal_string(const Rational& value) {
  mpz_class den = value.get_den();
  unsigned long twos = 0;
  unsigned long fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return value.get_str(10);

  const unsigned long places = std::max(twos, fives);
  if (places == 0) return value.get_num().get_str(10);
  // value * 10^places is an integer.
  mpz_class scaled = value.get_num() * pow10(places) / value.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str(10);
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  digits.insert(digits.size() - places, 1, '.');
  while (digits.back() == '0') digits.pop_back();
  if (digits.back() == '.') digits.pop_back();
  return negative ? "-" + digits : digits;
}

std::string to_decimal_string(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf.data(), ptr);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InputError("non-finite value");
  Rational r(value);
  r.canonicalize();
  return r;
}

}  // namespace convmp
