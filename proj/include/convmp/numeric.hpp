#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace convmp {

using Rational = mpq_class;

/// Raised for malformed user input (files, CLI arguments, instance data).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NumericMode { Float64, ExactRational };

/// Parses "12", "-3.5", "1e-3", "2.5E+2" or "7/2" into an exact rational.
Rational parse_rational(std::string_view text);

/// Parses a decimal string into a double; the whole string must be consumed.
double parse_double(std::string_view text);

/// Exact decimal rendering when the denominator divides a power of ten,
/// otherwise "p/q".
std::string to_decimal_string(const Rational& value);

/// Shortest round-trip decimal rendering.
std::string to_decimal_string(double value);

/// Exact rational value of a finite double.
Rational rational_from_double(double value);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double parse(std::string_view s) { return parse_double(s); }
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static std::string to_string(double v) { return to_decimal_string(v); }
  static double abs(double v) { return std::fabs(v); }
  static bool finite(double v) { return std::isfinite(v); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational parse(std::string_view s) { return parse_rational(s); }
  // Doubles coming from JSON are re-read through their shortest decimal
  // form so that 0.1 becomes 1/10 rather than its binary approximation.
  static Rational from_double(double v) { return parse_rational(to_decimal_string(v)); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static std::string to_string(const Rational& v) { return to_decimal_string(v); }
  static Rational abs(const Rational& v) { return Rational(::abs(v)); }
  static bool finite(const Rational&) { return true; }
};

}  // namespace convmp
