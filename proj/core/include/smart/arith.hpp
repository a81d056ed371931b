#ifndef SMART_ARITH_HPP
#define SMART_ARITH_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smart/exact_number.hpp"
#include "smart/smtlib.hpp"

namespace smart::arith {

struct ArithError : std::runtime_error {
  size_t line;  // 1-based; 0 when not line-specific
  ArithError(std::string msg, size_t ln = 0)
      : std::runtime_error(ln ? "line " + std::to_string(ln) + ": " + std::move(msg) : std::move(msg)),
        line(ln) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One binding per line; the final binding must be "goal". Expressions use
// + - * / mod (unicode − × ÷ accepted) with standard precedence.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Node { Number, Ref, Add, Sub, Mul, Div, Mod, Neg };
  Node node;
  ExactNumber value;  // Number
  std::string name;   // Ref
  ExprPtr lhs, rhs;   // binary ops; Neg uses lhs only
};

struct Binding {
  std::string name;
  ExprPtr expr;
  std::string source_text;
};

struct ArithProgram {
  std::vector<Binding> bindings;
};

ArithProgram parse_arith(std::string_view text);

// Exact rational evaluation of the goal binding. Division by zero and mod on
// non-integers throw EvalError.
ExactNumber eval_arith(const ArithProgram& p);

// Canonical surface text (one "name = expr" line per binding).
std::string render_arith(const ArithProgram& p);

// Mantissa digit count in scientific notation. Integers drop trailing zeros
// (100 -> 1); decimals keep them (0.0050 -> 2). Rationals must terminate.
size_t significant_digits(const ExactNumber& v);

// Mechanically converts an SMT evaluation chain (every assertion is
// "const = expression over numerals and earlier consts") into an arithmetic
// program. Returns nullopt when the program is not such a chain or uses
// integer division (not representable in the arithmetic surface syntax).
std::optional<ArithProgram> derive_from_chain(const smtlib::SmtProgram& p);

}  // namespace smart::arith

#endif
