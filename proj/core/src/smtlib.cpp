#include "smart/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace smart::smtlib {

std::string sort_name(Sort s) { return s == Sort::Int ? "Int" : "Real"; }

std::string op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Neg: return "-";
    case Op::Mul: return "*";
    case Op::RealDiv: return "/";
    case Op::IntDiv: return "div";
    case Op::Mod: return "mod";
    case Op::Eq: return "=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Not: return "not";
  }
  return "?";
}

bool is_arith_op(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
    case Op::Mul:
    case Op::RealDiv:
    case Op::IntDiv:
    case Op::Mod:
      return true;
    default:
      return false;
  }
}

bool is_comparison(Op op) {
  switch (op) {
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      return true;
    default:
      return false;
  }
}

TermPtr Term::numeral(ExactNumber v) {
  auto t = std::make_shared<Term>();
  t->node = Node::Numeral;
  t->value = std::move(v);
  return t;
}

TermPtr Term::constant(std::string name) {
  auto t = std::make_shared<Term>();
  t->node = Node::Const;
  t->name = std::move(name);
  return t;
}

TermPtr Term::app(Op op, std::vector<TermPtr> args) {
  // Canonical literal folds keep negative and rational constants as numerals.
  if (op == Op::Neg && args.size() == 1 && args[0]->is_numeral()) {
    return numeral(-args[0]->value);
  }
  if (op == Op::RealDiv && args.size() == 2 && args[0]->is_numeral() && args[1]->is_numeral() &&
      args[0]->value.is_integer_kind() && args[1]->value.is_integer_kind() && !args[1]->value.is_zero()) {
    auto [an, ad] = args[0]->value.rational_value();
    auto [bn, bd] = args[1]->value.rational_value();
    (void)ad;
    (void)bd;
    return numeral(ExactNumber::rational(an, bn));
  }
  auto t = std::make_shared<Term>();
  t->node = Node::App;
  t->op = op;
  t->args = std::move(args);
  return t;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a->node != b->node) return false;
  switch (a->node) {
    case Term::Node::Numeral:
      return a->value.structurally_equal(b->value);
    case Term::Node::Const:
      return a->name == b->name;
    case Term::Node::App: {
      if (a->op != b->op || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i) {
        if (!term_equal(a->args[i], b->args[i])) return false;
      }
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Tokenizer / reader
// ---------------------------------------------------------------------------

namespace {

struct SExpr {
  enum class Kind { Atom, List };
  Kind kind;
  std::string atom;
  size_t offset = 0;
  std::vector<SExpr> items;
};

struct Reader {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {  // comment to end of line
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  SExpr read() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    size_t start = pos;
    char c = text[pos];
    if (c == '(') {
      ++pos;
      SExpr list{SExpr::Kind::List, {}, start, {}};
      for (;;) {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unbalanced parenthesis", start);
        if (text[pos] == ')') {
          ++pos;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') throw ParseError("unexpected ')'", pos);
    std::string atom;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
           text[pos] != ')' && text[pos] != ';') {
      atom += text[pos];
      ++pos;
    }
    return SExpr{SExpr::Kind::Atom, std::move(atom), start, {}};
  }
};

bool atom_is_number(const std::string& a) {
  if (a.empty()) return false;
  size_t i = a[0] == '-' || a[0] == '+' ? 1 : 0;
  if (i >= a.size()) return false;
  bool digit = false;
  for (; i < a.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(a[i]))) {
      digit = true;
    } else if (a[i] != '.') {
      return false;
    }
  }
  return digit;
}

Op parse_op(const std::string& sym, size_t nargs, size_t offset, const ParseOptions& opts) {
  if (sym == "+") return Op::Add;
  if (sym == "-") return nargs == 1 ? Op::Neg : Op::Sub;
  if (sym == "*") return Op::Mul;
  if (sym == "/") return Op::RealDiv;
  if (sym == "div") return Op::IntDiv;
  if (sym == "mod") return Op::Mod;
  if (sym == "=") return Op::Eq;
  if (sym == "<") return Op::Lt;
  if (sym == "<=") return Op::Le;
  if (sym == ">") return Op::Gt;
  if (sym == ">=") return Op::Ge;
  if (sym == "not" && opts.internal_query) return Op::Not;
  throw ParseError("unknown operator '" + sym + "'", offset);
}

TermPtr build_term(const SExpr& e, const ParseOptions& opts) {
  if (e.kind == SExpr::Kind::Atom) {
    if (atom_is_number(e.atom)) {
      auto v = ExactNumber::try_parse(e.atom);
      if (!v) throw ParseError("malformed numeral '" + e.atom + "'", e.offset);
      return Term::numeral(*v);
    }
    return Term::constant(e.atom);
  }
  if (e.items.empty()) throw ParseError("empty application", e.offset);
  if (e.items[0].kind != SExpr::Kind::Atom)
    throw ParseError("operator must be a symbol", e.items[0].offset);
  size_t nargs = e.items.size() - 1;
  Op op = parse_op(e.items[0].atom, nargs, e.items[0].offset, opts);

  size_t min_args = 1, max_args = SIZE_MAX;
  switch (op) {
    case Op::Neg:
    case Op::Not:
      min_args = max_args = 1;
      break;
    case Op::RealDiv:
    case Op::IntDiv:
    case Op::Mod:
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      min_args = max_args = 2;
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      min_args = 2;
      break;
  }
  if (nargs < min_args || nargs > max_args)
    throw ParseError("operator '" + e.items[0].atom + "' applied to " + std::to_string(nargs) + " arguments",
                     e.offset);

  std::vector<TermPtr> args;
  args.reserve(nargs);
  for (size_t i = 1; i < e.items.size(); ++i) args.push_back(build_term(e.items[i], opts));
  return Term::app(op, std::move(args));
}

// ---------------------------------------------------------------------------
// Sort checking
// ---------------------------------------------------------------------------

// Numerals are polymorphic until the surrounding context resolves them.
enum class TSort { Int, Real, Poly, Bool };

TSort join_arith(TSort a, TSort b, const char* ctx) {
  if (a == TSort::Bool || b == TSort::Bool) throw SortError(std::string("boolean operand in ") + ctx);
  if (a == TSort::Poly) return b;
  if (b == TSort::Poly) return a;
  if (a != b) throw SortError(std::string("mixed Int/Real operands in ") + ctx);
  return a;
}

struct SortChecker {
  const std::map<std::string, Sort>& decls;

  TSort check(const TermPtr& t) const {
    switch (t->node) {
      case Term::Node::Numeral:
        return t->value.is_integer_kind() ? TSort::Poly : TSort::Real;
      case Term::Node::Const: {
        auto it = decls.find(t->name);
        if (it == decls.end()) throw ValidationError("undeclared constant '" + t->name + "'");
        return it->second == Sort::Int ? TSort::Int : TSort::Real;
      }
      case Term::Node::App:
        break;
    }
    const char* sym = "?";
    switch (t->op) {
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Neg: {
        TSort acc = TSort::Poly;
        for (const auto& a : t->args) acc = join_arith(acc, check(a), op_symbol(t->op).c_str());
        return acc;
      }
      case Op::RealDiv: {
        for (const auto& a : t->args) {
          TSort s = check(a);
          if (s == TSort::Int) throw SortError("'/' requires Real operands; use div for Int");
          if (s == TSort::Bool) throw SortError("boolean operand in '/'");
        }
        return TSort::Real;
      }
      case Op::IntDiv:
      case Op::Mod: {
        sym = t->op == Op::Mod ? "mod" : "div";
        for (const auto& a : t->args) {
          TSort s = check(a);
          if (s == TSort::Real) throw SortError(std::string("'") + sym + "' requires Int operands");
          if (s == TSort::Bool) throw SortError(std::string("boolean operand in '") + sym + "'");
        }
        return TSort::Int;
      }
      case Op::Eq:
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        join_arith(check(t->args[0]), check(t->args[1]), op_symbol(t->op).c_str());
        return TSort::Bool;
      case Op::Not: {
        if (check(t->args[0]) != TSort::Bool) throw SortError("'not' requires a boolean operand");
        return TSort::Bool;
      }
    }
    throw SortError("unreachable");
  }
};

void collect_consts(const TermPtr& t, std::set<std::string>& out) {
  if (t->is_const()) {
    out.insert(t->name);
  } else if (t->is_app()) {
    for (const auto& a : t->args) collect_consts(a, out);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// parse / validate / emit
// ---------------------------------------------------------------------------

SmtProgram parse_program(std::string_view text, const ParseOptions& opts) {
  Reader reader{text};
  SmtProgram p;
  bool saw_check_sat = false;
  bool saw_get_value = false;

  while (!reader.eof()) {
    SExpr e = reader.read();
    if (e.kind != SExpr::Kind::List || e.items.empty() || e.items[0].kind != SExpr::Kind::Atom)
      throw ParseError("expected a command", e.offset);
    const std::string& cmd = e.items[0].atom;

    if (cmd == "declare-const" || cmd == "declare-fun") {
      // declare-fun is accepted only in its zero-arity declare-const form.
      size_t sort_idx = 2;
      if (cmd == "declare-fun") {
        if (e.items.size() != 4 || e.items[2].kind != SExpr::Kind::List || !e.items[2].items.empty())
          throw ParseError("only zero-arity declarations are supported", e.offset);
        sort_idx = 3;
      } else if (e.items.size() != 3) {
        throw ParseError("declare-const expects a name and a sort", e.offset);
      }
      if (e.items[1].kind != SExpr::Kind::Atom || e.items[sort_idx].kind != SExpr::Kind::Atom)
        throw ParseError("malformed declaration", e.offset);
      const std::string& name = e.items[1].atom;
      const std::string& sort = e.items[sort_idx].atom;
      if (atom_is_number(name)) throw ParseError("invalid constant name '" + name + "'", e.items[1].offset);
      Sort s;
      if (sort == "Int") {
        s = Sort::Int;
      } else if (sort == "Real") {
        s = Sort::Real;
      } else {
        throw ParseError("unsupported sort '" + sort + "'", e.items[sort_idx].offset);
      }
      p.declarations.emplace_back(name, s);
    } else if (cmd == "assert") {
      if (e.items.size() != 2) throw ParseError("assert expects one term", e.offset);
      p.assertions.push_back(build_term(e.items[1], opts));
    } else if (cmd == "check-sat") {
      saw_check_sat = true;
    } else if (cmd == "get-value") {
      saw_get_value = true;
      if (e.items.size() == 2 && e.items[1].kind == SExpr::Kind::List && e.items[1].items.size() == 1 &&
          e.items[1].items[0].kind == SExpr::Kind::Atom) {
        p.goal_var = e.items[1].items[0].atom;
      } else {
        throw ParseError("get-value expects a single constant", e.offset);
      }
    } else if (cmd == "set-logic" || cmd == "set-option" || cmd == "set-info" || cmd == "exit") {
      // Tolerated in input, dropped from canonical form.
    } else {
      throw ParseError("unknown command '" + cmd + "'", e.offset);
    }
  }
  (void)saw_check_sat;
  (void)saw_get_value;

  validate_program(p, opts);
  return p;
}

void validate_program(const SmtProgram& p, const ParseOptions& opts) {
  std::map<std::string, Sort> decls;
  for (const auto& [name, sort] : p.declarations) {
    if (!decls.emplace(name, sort).second) throw ValidationError("duplicate declaration '" + name + "'");
  }
  if (p.assertions.empty()) throw ValidationError("program has no assertions");
  if (!opts.internal_query) {
    if (p.goal_var != "goal") throw ValidationError("goal variable must be named 'goal'");
  }
  if (!decls.count(p.goal_var)) throw ValidationError("goal constant '" + p.goal_var + "' is not declared");

  std::set<std::string> used;
  SortChecker checker{decls};
  for (const auto& a : p.assertions) {
    if (checker.check(a) != TSort::Bool) throw SortError("assertion is not a boolean term");
    collect_consts(a, used);
  }
  if (!used.count(p.goal_var))
    throw ValidationError("goal constant '" + p.goal_var + "' does not appear in any assertion");
}

namespace {

void emit_number(const ExactNumber& v, std::string& out) {
  if (v.is_negative()) {
    out += "(- ";
    emit_number(-v, out);
    out += ")";
    return;
  }
  switch (v.kind()) {
    case ExactNumber::Kind::Integer:
    case ExactNumber::Kind::Decimal:
      out += v.to_string();
      break;
    case ExactNumber::Kind::Rational: {
      auto [n, d] = v.rational_value();
      out += "(/ " + n.str() + " " + d.str() + ")";
      break;
    }
  }
}

void emit_term(const TermPtr& t, std::string& out) {
  switch (t->node) {
    case Term::Node::Numeral:
      emit_number(t->value, out);
      return;
    case Term::Node::Const:
      out += t->name;
      return;
    case Term::Node::App: {
      out += "(" + op_symbol(t->op);
      for (const auto& a : t->args) {
        out += " ";
        emit_term(a, out);
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

std::string emit_program(const SmtProgram& p) {
  std::string out;
  for (const auto& [name, sort] : p.declarations) {
    out += "(declare-const " + name + " " + sort_name(sort) + ")\n";
  }
  for (const auto& a : p.assertions) {
    out += "(assert ";
    emit_term(a, out);
    out += ")\n";
  }
  out += "(check-sat)\n";
  out += "(get-value (" + p.goal_var + "))\n";
  return out;
}

bool structurally_equal(const SmtProgram& a, const SmtProgram& b) {
  if (a.declarations != b.declarations || a.goal_var != b.goal_var) return false;
  if (a.assertions.size() != b.assertions.size()) return false;
  for (size_t i = 0; i < a.assertions.size(); ++i) {
    if (!term_equal(a.assertions[i], b.assertions[i])) return false;
  }
  return true;
}

namespace {

void collect_op_classes(const TermPtr& t, std::set<int>& classes) {
  if (!t->is_app()) return;
  switch (t->op) {
    case Op::Add: classes.insert(0); break;
    case Op::Sub: classes.insert(1); break;
    case Op::Mul: classes.insert(2); break;
    case Op::RealDiv:
    case Op::IntDiv: classes.insert(3); break;
    case Op::Mod: classes.insert(4); break;
    default: break;
  }
  for (const auto& a : t->args) collect_op_classes(a, classes);
}

}  // namespace

size_t count_distinct_ops(const SmtProgram& p) {
  std::set<int> classes;
  for (const auto& a : p.assertions) collect_op_classes(a, classes);
  return classes.size();
}

std::string LiteralPath::to_string() const {
  std::string s = "a" + std::to_string(assertion);
  for (uint32_t step : steps) s += "." + std::to_string(step);
  return s;
}

namespace {

void collect_literals_rec(const TermPtr& t, LiteralPath& path,
                          std::vector<std::pair<LiteralPath, ExactNumber>>& out) {
  if (t->is_numeral()) {
    out.emplace_back(path, t->value);
    return;
  }
  if (!t->is_app()) return;
  for (uint32_t i = 0; i < t->args.size(); ++i) {
    path.steps.push_back(i);
    collect_literals_rec(t->args[i], path, out);
    path.steps.pop_back();
  }
}

TermPtr substitute_rec(const TermPtr& t, const std::vector<uint32_t>& steps, size_t depth,
                       const ExactNumber& value) {
  if (depth == steps.size()) {
    if (!t->is_numeral()) throw StructuralError("path does not address a numeral");
    return Term::numeral(value);
  }
  if (!t->is_app() || steps[depth] >= t->args.size()) throw StructuralError("stale literal path");
  std::vector<TermPtr> args = t->args;
  args[steps[depth]] = substitute_rec(t->args[steps[depth]], steps, depth + 1, value);
  // Rebuild without re-canonicalizing so paths stay stable.
  auto copy = std::make_shared<Term>();
  copy->node = Term::Node::App;
  copy->op = t->op;
  copy->args = std::move(args);
  return copy;
}

}  // namespace

std::vector<std::pair<LiteralPath, ExactNumber>> collect_literals(const SmtProgram& p) {
  std::vector<std::pair<LiteralPath, ExactNumber>> out;
  for (size_t i = 0; i < p.assertions.size(); ++i) {
    LiteralPath path;
    path.assertion = i;
    collect_literals_rec(p.assertions[i], path, out);
  }
  return out;
}

SmtProgram substitute_literals(const SmtProgram& p,
                               const std::vector<std::pair<LiteralPath, ExactNumber>>& edits) {
  SmtProgram q = p;
  for (const auto& [path, value] : edits) {
    if (path.assertion >= q.assertions.size()) throw StructuralError("stale literal path");
    if (path.steps.empty()) {
      throw StructuralError("path does not address a numeral");
    }
    q.assertions[path.assertion] = substitute_rec(q.assertions[path.assertion], path.steps, 0, value);
  }
  validate_program(q);
  return q;
}

Sort sort_of(const SmtProgram& p, const std::string& name) {
  for (const auto& [n, s] : p.declarations) {
    if (n == name) return s;
  }
  throw ValidationError("undeclared constant '" + name + "'");
}

namespace {

// Walks down to `path`, tracking whether any enclosing op or sibling forces
// an Int context.
bool path_context_is_int(const SmtProgram& p, const TermPtr& root, const std::vector<uint32_t>& steps) {
  std::map<std::string, Sort> decls(p.declarations.begin(), p.declarations.end());

  // Strict Int when any constant in the term is Int-sorted or an integer op
  // appears; our subset forbids mixed sorts so one Int constant pins the
  // whole assertion.
  std::set<std::string> consts;
  collect_consts(root, consts);
  for (const auto& c : consts) {
    auto it = decls.find(c);
    if (it != decls.end() && it->second == Sort::Int) return true;
  }
  const Term* t = root.get();
  for (uint32_t s : steps) {
    if (t->op == Op::IntDiv || t->op == Op::Mod) return true;
    t = t->args[s].get();
  }
  return false;
}

}  // namespace

Sort literal_context_sort(const SmtProgram& p, const LiteralPath& path) {
  if (path.assertion >= p.assertions.size()) throw StructuralError("stale literal path");
  return path_context_is_int(p, p.assertions[path.assertion], path.steps) ? Sort::Int : Sort::Real;
}

bool is_degenerate(const SmtProgram& p) {
  if (count_distinct_ops(p) != 0) return false;
  std::set<std::string> used;
  for (const auto& a : p.assertions) collect_consts(a, used);
  used.erase(p.goal_var);
  return used.empty();
}

namespace {

TermPtr rename_rec(const TermPtr& t, const std::string& from, const std::string& to) {
  switch (t->node) {
    case Term::Node::Numeral:
      return t;
    case Term::Node::Const:
      return t->name == from ? Term::constant(to) : t;
    case Term::Node::App: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(rename_rec(a, from, to));
      auto copy = std::make_shared<Term>();
      copy->node = Term::Node::App;
      copy->op = t->op;
      copy->args = std::move(args);
      return copy;
    }
  }
  return t;
}

}  // namespace

SmtProgram rename_constant(const SmtProgram& p, const std::string& from, const std::string& to) {
  SmtProgram q = p;
  for (auto& [name, sort] : q.declarations) {
    if (name == from) name = to;
  }
  for (auto& a : q.assertions) a = rename_rec(a, from, to);
  if (q.goal_var == from) q.goal_var = to;
  return q;
}

SmtProgram with_assertion(const SmtProgram& p, TermPtr assertion) {
  SmtProgram q = p;
  q.assertions.push_back(std::move(assertion));
  return q;
}

}  // namespace smart::smtlib
