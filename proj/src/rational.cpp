#include "crowdwise/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace crowdwise {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("Rational: multiplication overflow");
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("Rational: addition overflow");
  }
  return out;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::from_decimal_string(const std::string& text) {
  std::size_t pos = 0;
  const auto fail = [&]() -> Rational {
    throw std::invalid_argument("Rational: malformed decimal literal '" + text + "'");
  };
  if (text.empty()) return fail();

  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }

  std::int64_t mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_dot) return fail();
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = checked_add(checked_mul(mantissa, 10), c - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();

  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) return fail();
    int digits = 0;
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) return fail();
      digits = digits * 10 + (text[pos] - '0');
      if (digits > 1000) return fail();
    }
    exponent = exp_negative ? -digits : digits;
  }
  if (pos != text.size()) return fail();

  std::int64_t num = negative ? -mantissa : mantissa;
  std::int64_t den = 1;
  int shift = exponent - frac_digits;
  for (; shift > 0; --shift) num = checked_mul(num, 10);
  for (; shift < 0; ++shift) den = checked_mul(den, 10);
  return Rational(num, den);
}

Rational Rational::operator+(const Rational& rhs) const {
  return Rational(checked_add(checked_mul(num_, rhs.den_), checked_mul(rhs.num_, den_)),
                  checked_mul(den_, rhs.den_));
}

Rational Rational::operator-(const Rational& rhs) const {
  return *this + Rational(-rhs.num_, rhs.den_);
}

Rational Rational::operator*(const Rational& rhs) const {
  return Rational(checked_mul(num_, rhs.num_), checked_mul(den_, rhs.den_));
}

bool Rational::operator==(const Rational& rhs) const {
  return num_ == rhs.num_ && den_ == rhs.den_;
}

bool Rational::operator<(const Rational& rhs) const {
  return static_cast<__int128>(num_) * rhs.den_ < static_cast<__int128>(rhs.num_) * den_;
}

bool Rational::operator<=(const Rational& rhs) const {
  return static_cast<__int128>(num_) * rhs.den_ <= static_cast<__int128>(rhs.num_) * den_;
}

}  // namespace crowdwise
