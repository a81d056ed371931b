#include "smart/exact_number.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace smart {

namespace {

BigInt pow10(uint32_t e) {
  BigInt r = 1;
  for (uint32_t i = 0; i < e; ++i) r *= 10;
  return r;
}

// cpp_int's string constructor treats a leading 0 as an octal prefix.
BigInt decimal_digits_to_big(std::string_view digits) {
  size_t i = 0;
  while (i + 1 < digits.size() && digits[i] == '0') ++i;
  return BigInt(std::string(digits.substr(i)));
}

BigInt big_gcd(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  return boost::multiprecision::gcd(a, b);
}

}  // namespace

ExactNumber ExactNumber::integer(BigInt v) {
  ExactNumber n;
  n.kind_ = Kind::Integer;
  n.num_ = std::move(v);
  n.den_ = 1;
  n.exp10_ = 0;
  return n;
}

ExactNumber ExactNumber::rational(BigInt num, BigInt den) {
  if (den == 0) throw NumberError("invalid rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  BigInt g = big_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den == 1) return integer(std::move(num));
  ExactNumber n;
  n.kind_ = Kind::Rational;
  n.num_ = std::move(num);
  n.den_ = std::move(den);
  n.exp10_ = 0;
  return n;
}

ExactNumber ExactNumber::decimal(BigInt mantissa, int32_t exp10) {
  if (exp10 >= 0) {
    // 34e2 is a whole number; fold the exponent in.
    return integer(mantissa * pow10(static_cast<uint32_t>(exp10)));
  }
  ExactNumber n;
  n.kind_ = Kind::Decimal;
  n.num_ = std::move(mantissa);
  n.den_ = 1;
  n.exp10_ = exp10;
  return n;
}

std::optional<ExactNumber> ExactNumber::try_parse(std::string_view text) {
  // Trim.
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  text = text.substr(b, e - b);
  if (text.empty()) return std::nullopt;

  bool neg = false;
  size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }

  std::string digits;       // integer part
  std::string frac;         // fractional part
  std::string den_digits;   // after '/'
  std::string exp_digits;   // after 'e'
  bool exp_neg = false;
  enum { INT, FRAC, DEN, EXP } state = INT;
  bool seen_digit = false;

  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
      switch (state) {
        case INT: digits += c; break;
        case FRAC: frac += c; break;
        case DEN: den_digits += c; break;
        case EXP: exp_digits += c; break;
      }
    } else if (c == '.' && state == INT) {
      state = FRAC;
    } else if (c == '/' && state == INT && !digits.empty()) {
      state = DEN;
    } else if ((c == 'e' || c == 'E') && (state == INT || state == FRAC) && seen_digit) {
      state = EXP;
    } else if ((c == '+' || c == '-') && state == EXP && exp_digits.empty()) {
      exp_neg = c == '-';
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  if (state == DEN) {
    if (den_digits.empty() || digits.empty()) return std::nullopt;
    BigInt num = decimal_digits_to_big(digits);
    BigInt den = decimal_digits_to_big(den_digits);
    if (den == 0) return std::nullopt;
    if (neg) num = -num;
    return rational(std::move(num), std::move(den));
  }
  if (state == EXP && exp_digits.empty()) return std::nullopt;

  int64_t exp10 = 0;
  if (!exp_digits.empty()) {
    if (exp_digits.size() > 6) return std::nullopt;
    exp10 = std::stoll(exp_digits);
    if (exp_neg) exp10 = -exp10;
  }
  exp10 -= static_cast<int64_t>(frac.size());

  std::string mant = digits + frac;
  if (mant.empty()) return std::nullopt;
  BigInt m = decimal_digits_to_big(mant);
  if (neg) m = -m;

  if (frac.empty() && exp_digits.empty()) return integer(std::move(m));
  return decimal(std::move(m), static_cast<int32_t>(exp10));
}

ExactNumber ExactNumber::parse(std::string_view text) {
  auto v = try_parse(text);
  if (!v) throw NumberError("unparsable number: '" + std::string(text) + "'");
  return *v;
}

bool ExactNumber::is_integral_value() const {
  auto [n, d] = rational_value();
  return d == 1;
}

std::pair<BigInt, BigInt> ExactNumber::rational_value() const {
  if (kind_ == Kind::Decimal) {
    BigInt den = pow10(static_cast<uint32_t>(-exp10_));
    BigInt g = big_gcd(num_, den);
    return {num_ / g, den / g};
  }
  return {num_, den_};
}

ExactNumber ExactNumber::operator-() const {
  ExactNumber n = *this;
  n.num_ = -n.num_;
  return n;
}

namespace {

ExactNumber from_ratio(BigInt num, BigInt den) { return ExactNumber::rational(std::move(num), std::move(den)); }

}  // namespace

ExactNumber ExactNumber::operator+(const ExactNumber& o) const {
  if (is_decimal_kind() && o.is_decimal_kind()) {
    // Align exponents; stays exact decimal.
    int32_t e = std::min(exp10_, o.exp10_);
    BigInt a = num_ * pow10(static_cast<uint32_t>(exp10_ - e));
    BigInt b = o.num_ * pow10(static_cast<uint32_t>(o.exp10_ - e));
    return decimal(a + b, e);
  }
  auto [an, ad] = rational_value();
  auto [bn, bd] = o.rational_value();
  return from_ratio(an * bd + bn * ad, ad * bd);
}

ExactNumber ExactNumber::operator-(const ExactNumber& o) const { return *this + (-o); }

ExactNumber ExactNumber::operator*(const ExactNumber& o) const {
  if (is_decimal_kind() && o.is_decimal_kind()) {
    return decimal(num_ * o.num_, exp10_ + o.exp10_);
  }
  auto [an, ad] = rational_value();
  auto [bn, bd] = o.rational_value();
  return from_ratio(an * bn, ad * bd);
}

ExactNumber ExactNumber::operator/(const ExactNumber& o) const {
  if (o.is_zero()) throw NumberError("division by zero");
  auto [an, ad] = rational_value();
  auto [bn, bd] = o.rational_value();
  return from_ratio(an * bd, ad * bn);
}

ExactNumber ExactNumber::floor_div(const ExactNumber& o) const {
  if (!is_integral_value() || !o.is_integral_value())
    throw NumberError("integer division requires integer operands");
  if (o.is_zero()) throw NumberError("division by zero");
  BigInt a = rational_value().first;
  BigInt b = o.rational_value().first;
  BigInt q = a / b;  // truncates toward zero
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return integer(q);
}

ExactNumber ExactNumber::floor_mod(const ExactNumber& o) const {
  ExactNumber q = floor_div(o);
  return *this - q * o;
}

ExactNumber ExactNumber::abs() const { return is_negative() ? -*this : *this; }

int ExactNumber::compare(const ExactNumber& o) const {
  auto [an, ad] = rational_value();
  auto [bn, bd] = o.rational_value();
  BigInt l = an * bd;
  BigInt r = bn * ad;
  if (l < r) return -1;
  if (l > r) return 1;
  return 0;
}

bool ExactNumber::structurally_equal(const ExactNumber& o) const {
  return kind_ == o.kind_ && num_ == o.num_ && den_ == o.den_ && exp10_ == o.exp10_;
}

std::string ExactNumber::to_string() const {
  switch (kind_) {
    case Kind::Integer:
      return num_.str();
    case Kind::Rational:
      return num_.str() + "/" + den_.str();
    case Kind::Decimal: {
      BigInt m = num_ < 0 ? BigInt(-num_) : num_;
      std::string digits = m.str();
      uint32_t frac = static_cast<uint32_t>(-exp10_);
      if (digits.size() <= frac) digits.insert(0, frac - digits.size() + 1, '0');
      std::string out = digits.substr(0, digits.size() - frac) + "." + digits.substr(digits.size() - frac);
      if (num_ < 0) out.insert(0, 1, '-');
      return out;
    }
  }
  return {};
}

double ExactNumber::to_double() const {
  auto [n, d] = rational_value();
  return static_cast<double>(boost::multiprecision::cpp_rational(n) / boost::multiprecision::cpp_rational(d));
}

Tolerance Tolerance::defaults() {
  return Tolerance{ExactNumber::decimal(1, -6), ExactNumber::decimal(1, -6)};
}

Tolerance Tolerance::exact() {
  return Tolerance{ExactNumber::integer(0), ExactNumber::integer(0)};
}

bool compare_answers(const ExactNumber& a, const ExactNumber& b, const Tolerance& tol) {
  if (!a.is_decimal_kind() && !b.is_decimal_kind()) return a == b;
  ExactNumber diff = (a - b).abs();
  ExactNumber rel = tol.rel_tol * b.abs();
  const ExactNumber& bound = rel > tol.abs_tol ? rel : tol.abs_tol;
  return diff <= bound;
}

}  // namespace smart
