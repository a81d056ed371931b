#include <doctest.h>

#include "smart/exact_number.hpp"

using smart::compare_answers;
using smart::ExactNumber;
using smart::Tolerance;

TEST_CASE("parsing recognizes integer, rational, and decimal forms") {
  CHECK(ExactNumber::parse("72").is_integer_kind());
  CHECK(ExactNumber::parse("-5").is_integer_kind());
  CHECK(ExactNumber::parse("3/4").kind() == ExactNumber::Kind::Rational);
  CHECK(ExactNumber::parse("34.823").is_decimal_kind());
  CHECK(ExactNumber::parse("1.2e3") == ExactNumber::integer(1200));
  CHECK(ExactNumber::parse("5e-2") == ExactNumber::decimal(5, -2));
  CHECK_FALSE(ExactNumber::try_parse("cannot be determined").has_value());
  CHECK_FALSE(ExactNumber::try_parse("1/0").has_value());
  CHECK_THROWS_AS(ExactNumber::rational(1, 0), smart::NumberError);
}

TEST_CASE("rationals normalize to lowest terms and fold to integers") {
  ExactNumber v = ExactNumber::rational(144, 2);
  CHECK(v.is_integer_kind());
  CHECK(v == ExactNumber::integer(72));
  ExactNumber third = ExactNumber::rational(2, 6);
  CHECK(third.mantissa() == 1);
  CHECK(third.denominator() == 3);
  CHECK(ExactNumber::rational(3, -4).is_negative());
}

TEST_CASE("decimal storage keeps the written mantissa") {
  ExactNumber v = ExactNumber::parse("0.0050");
  CHECK(v.mantissa() == 50);
  CHECK(v.exponent10() == -4);
  CHECK(v.to_string() == "0.0050");
  CHECK(ExactNumber::parse("34.823").to_string() == "34.823");
  // Non-negative exponents normalize to integers.
  CHECK(ExactNumber::decimal(34, 2) == ExactNumber::integer(3400));
}

TEST_CASE("arithmetic stays exact") {
  ExactNumber third = ExactNumber::rational(1, 3);
  CHECK(third * ExactNumber::integer(3) == ExactNumber::integer(1));
  CHECK(ExactNumber::parse("0.1") + ExactNumber::parse("0.2") == ExactNumber::parse("0.3"));
  CHECK(ExactNumber::parse("2.5") * ExactNumber::parse("0.4") == ExactNumber::integer(1));
  CHECK_THROWS_AS(ExactNumber::integer(1) / ExactNumber::integer(0), smart::NumberError);
}

TEST_CASE("floor division and mod use flooring semantics on integers") {
  auto n = [](long long v) { return ExactNumber::integer(v); };
  CHECK(n(47).floor_mod(n(5)) == n(2));
  CHECK(n(-7).floor_div(n(2)) == n(-4));
  CHECK(n(-7).floor_mod(n(2)) == n(1));
  CHECK_THROWS_AS(n(3).floor_mod(n(0)), smart::NumberError);
  CHECK_THROWS_AS(ExactNumber::parse("1.5").floor_mod(n(2)), smart::NumberError);
}

TEST_CASE("compare_answers: exact on integers and rationals") {
  Tolerance tol = Tolerance::defaults();
  CHECK(compare_answers(ExactNumber::integer(5), ExactNumber::integer(5), tol));
  CHECK_FALSE(compare_answers(ExactNumber::integer(72), ExactNumber::integer(70), tol));
  // 143/2 vs 71.5 crosses into the tolerance branch via the decimal operand.
  CHECK(compare_answers(ExactNumber::rational(143, 2), ExactNumber::parse("71.5"), tol));
}

TEST_CASE("compare_answers: tolerance branch for decimals") {
  Tolerance tol = Tolerance::defaults();
  // |1/3 - 0.3333333| ~ 3.3e-8 < 1e-6
  CHECK(compare_answers(ExactNumber::rational(1, 3), ExactNumber::parse("0.3333333"), tol));
  CHECK_FALSE(compare_answers(ExactNumber::rational(1, 3), ExactNumber::parse("0.33"), tol));
  // Relative component: 1e9 vs 1e9+500 is within 1e-6 relative.
  CHECK(compare_answers(ExactNumber::parse("1000000500.0"), ExactNumber::parse("1000000000.0"), tol));
}

TEST_CASE("compare_answers is reflexive and symmetric on the exact branch") {
  std::vector<ExactNumber> values = {ExactNumber::integer(7), ExactNumber::rational(22, 7),
                                     ExactNumber::parse("3.9"), ExactNumber::integer(-41)};
  Tolerance tol = Tolerance::defaults();
  for (const auto& a : values) {
    CHECK(compare_answers(a, a, tol));
    for (const auto& b : values) {
      if (!a.is_decimal_kind() && !b.is_decimal_kind()) {
        CHECK(compare_answers(a, b, tol) == compare_answers(b, a, tol));
      }
    }
  }
}

TEST_CASE("structural equality distinguishes kinds, value equality does not") {
  ExactNumber i = ExactNumber::integer(3);
  ExactNumber d = ExactNumber::parse("3.0");
  CHECK(i == d);
  CHECK_FALSE(i.structurally_equal(d));
}
