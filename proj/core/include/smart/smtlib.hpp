#ifndef SMART_SMTLIB_HPP
#define SMART_SMTLIB_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smart/exact_number.hpp"

namespace smart::smtlib {

enum class Sort { Int, Real };

std::string sort_name(Sort s);

enum class Op {
  Add,      // +   n-ary
  Sub,      // -   n-ary (>= 2 args)
  Neg,      // -   unary
  Mul,      // *   n-ary
  RealDiv,  // /   binary, Real
  IntDiv,   // div binary, Int
  Mod,      // mod binary, Int
  Eq,       // =
  Lt,       // <
  Le,       // <=
  Gt,       // >
  Ge,       // >=
  Not       // not (internal; used for uniqueness queries, rejected by strict validation)
};

std::string op_symbol(Op op);
bool is_arith_op(Op op);
bool is_comparison(Op op);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable term tree. Construction canonicalizes literal forms:
//   (- <numeral>)            folds to a negative numeral
//   (/ <numeral> <numeral>)  folds to a rational numeral
// so "(- 5)" and "(/ 1 3)" round-trip as literals, not applications.
struct Term {
  enum class Node { Numeral, Const, App };

  Node node;
  ExactNumber value;          // Numeral
  std::string name;           // Const
  Op op = Op::Add;            // App
  std::vector<TermPtr> args;  // App

  static TermPtr numeral(ExactNumber v);
  static TermPtr constant(std::string name);
  static TermPtr app(Op op, std::vector<TermPtr> args);

  bool is_numeral() const { return node == Node::Numeral; }
  bool is_const() const { return node == Node::Const; }
  bool is_app() const { return node == Node::App; }
};

bool term_equal(const TermPtr& a, const TermPtr& b);

struct SmtProgram {
  std::vector<std::pair<std::string, Sort>> declarations;
  std::vector<TermPtr> assertions;
  std::string goal_var = "goal";
  // Command tail is fixed: (check-sat) then (get-value (<goal_var>)).
};

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(std::string msg, size_t off)
      : std::runtime_error(std::move(msg) + " at offset " + std::to_string(off)), offset(off) {}
};

struct SortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  // Permit (not ...) and a missing goal constant; used for solver-side
  // queries, never for candidate programs.
  bool internal_query = false;
};

// Parses the SMT-LIB subset and validates the result (sorts, arities,
// declarations, goal conventions). Throws ParseError / SortError /
// ValidationError.
SmtProgram parse_program(std::string_view text, const ParseOptions& opts = {});

// Re-runs full validation on an already-built program.
void validate_program(const SmtProgram& p, const ParseOptions& opts = {});

// Canonical text: declarations first, assertions in order, one command per
// line, fixed whitespace, "(check-sat)" and "(get-value (goal))" last.
// parse_program(emit_program(p)) is structurally identical to p.
std::string emit_program(const SmtProgram& p);

bool structurally_equal(const SmtProgram& a, const SmtProgram& b);

// Distinct arithmetic operator classes used in assertions. The five classes
// are +, -, *, division (/ and div count once), mod; comparisons and unary
// minus are excluded.
size_t count_distinct_ops(const SmtProgram& p);

// Stable structural address of a numeral: assertion index plus the child
// index path from that assertion's root.
struct LiteralPath {
  size_t assertion = 0;
  std::vector<uint32_t> steps;

  bool operator==(const LiteralPath&) const = default;
  std::string to_string() const;
};

std::vector<std::pair<LiteralPath, ExactNumber>> collect_literals(const SmtProgram& p);

// Returns a copy of p with the numerals at the given paths replaced. The
// result is re-validated, so an ill-sorted edit (e.g. 3/2 into an Int
// context) throws SortError; a stale path throws StructuralError.
SmtProgram substitute_literals(const SmtProgram& p,
                               const std::vector<std::pair<LiteralPath, ExactNumber>>& edits);

// Sort of a declared constant. Throws ValidationError when undeclared.
Sort sort_of(const SmtProgram& p, const std::string& name);

// Required sort of the numeral at `path` (Int when the literal sits under an
// integer operation or is equated with Int-sorted terms; Real otherwise).
Sort literal_context_sort(const SmtProgram& p, const LiteralPath& path);

// True when the program pins the goal with literal-only comparisons and no
// arithmetic at all (e.g. a bare "goal = 72"). Such candidates trivially
// match any expected answer without encoding reasoning and are rejected.
bool is_degenerate(const SmtProgram& p);

// Copy with every reference to constant `from` renamed to `to`.
SmtProgram rename_constant(const SmtProgram& p, const std::string& from, const std::string& to);

// Copy with one extra assertion appended (used for uniqueness queries and
// goal-chain extension). Not re-validated.
SmtProgram with_assertion(const SmtProgram& p, TermPtr assertion);

}  // namespace smart::smtlib

#endif
