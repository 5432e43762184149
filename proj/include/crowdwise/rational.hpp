#pragma once

#include <cstdint>
#include <string>

namespace crowdwise {

/// Exact rational over int64 with gcd normalization. Comparisons go through
/// 128-bit cross products; arithmetic that would overflow int64 throws.
/// Used for the ordering-condition checks, whose conclusions are discrete and
/// sensitive to boundary cases that doubles can misclassify.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den);

  /// Parses a plain decimal literal, e.g. "2", "-0.125", "3.5e2".
  static Rational from_decimal_string(const std::string& text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& rhs) const;
  Rational operator-(const Rational& rhs) const;
  Rational operator*(const Rational& rhs) const;

  bool operator==(const Rational& rhs) const;
  bool operator<(const Rational& rhs) const;
  bool operator<=(const Rational& rhs) const;
  bool operator>(const Rational& rhs) const { return rhs < *this; }
  bool operator>=(const Rational& rhs) const { return rhs <= *this; }
  bool operator!=(const Rational& rhs) const { return !(*this == rhs); }

 private:
  void normalize();

  std::int64_t num_;
  std::int64_t den_;  // always > 0
};

}  // namespace crowdwise
