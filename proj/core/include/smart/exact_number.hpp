#ifndef SMART_EXACT_NUMBER_HPP
#define SMART_EXACT_NUMBER_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smart {

using BigInt = boost::multiprecision::cpp_int;

struct NumberError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact numeric value. Never passes through binary floating point.
//
// Integer:  value = num                  (den == 1, exp10 == 0)
// Rational: value = num / den            (den > 1, lowest terms, exp10 == 0)
// Decimal:  value = num * 10^exp10       (den == 1, exp10 < 0; num is the
//           mantissa as written, so "0.0050" keeps mantissa 50, exp10 -4)
//
// Decimals with a non-negative exponent normalize to Integer on construction.
class ExactNumber {
 public:
  enum class Kind { Integer, Rational, Decimal };

  ExactNumber() : kind_(Kind::Integer), num_(0), den_(1), exp10_(0) {}

  static ExactNumber integer(BigInt v);
  static ExactNumber rational(BigInt num, BigInt den);   // reduces; throws on den == 0
  static ExactNumber decimal(BigInt mantissa, int32_t exp10);

  // Accepts "72", "-5", "3/4", "34.823", "-0.5", "1.2e3", "5e-2".
  static ExactNumber parse(std::string_view text);
  static std::optional<ExactNumber> try_parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_integer_kind() const { return kind_ == Kind::Integer; }
  bool is_decimal_kind() const { return kind_ == Kind::Decimal; }
  // True when the *value* is a whole number, regardless of kind.
  bool is_integral_value() const;

  const BigInt& mantissa() const { return num_; }
  const BigInt& denominator() const { return den_; }
  int32_t exponent10() const { return exp10_; }

  // Reduced rational value (num, den) with den > 0.
  std::pair<BigInt, BigInt> rational_value() const;

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  ExactNumber operator-() const;
  ExactNumber operator+(const ExactNumber& o) const;
  ExactNumber operator-(const ExactNumber& o) const;
  ExactNumber operator*(const ExactNumber& o) const;
  // Exact rational division; throws NumberError on zero divisor.
  ExactNumber operator/(const ExactNumber& o) const;
  // Flooring integer division/modulo; both operands must be integral values.
  ExactNumber floor_div(const ExactNumber& o) const;
  ExactNumber floor_mod(const ExactNumber& o) const;

  ExactNumber abs() const;

  // Value comparison (exact, cross-kind).
  int compare(const ExactNumber& o) const;
  bool operator==(const ExactNumber& o) const { return compare(o) == 0; }
  bool operator!=(const ExactNumber& o) const { return compare(o) != 0; }
  bool operator<(const ExactNumber& o) const { return compare(o) < 0; }
  bool operator<=(const ExactNumber& o) const { return compare(o) <= 0; }
  bool operator>(const ExactNumber& o) const { return compare(o) > 0; }
  bool operator>=(const ExactNumber& o) const { return compare(o) >= 0; }

  // Same kind and same stored representation (distinguishes 72 / 72.0 / 144/2).
  bool structurally_equal(const ExactNumber& o) const;

  // Canonical text: "72", "-5", "3/4" (rational), "34.823" (decimal).
  std::string to_string() const;

  double to_double() const;  // I/O convenience only; never used in comparisons

 private:
  Kind kind_;
  BigInt num_;
  BigInt den_;
  int32_t exp10_;
};

struct Tolerance {
  ExactNumber abs_tol;
  ExactNumber rel_tol;

  // abs = rel = 1e-6
  static Tolerance defaults();
  static Tolerance exact();
};

// Exact equality when both operands are Integer/Rational kind; otherwise
// |a - b| <= max(abs_tol, rel_tol * |b|), evaluated in exact arithmetic.
bool compare_answers(const ExactNumber& a, const ExactNumber& b, const Tolerance& tol);

}  // namespace smart

#endif
