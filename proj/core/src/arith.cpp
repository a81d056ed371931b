#include "smart/arith.hpp"

#include <cctype>
#include <map>
#include <set>

#include "smart/text.hpp"

namespace smart::arith {

namespace {

ExprPtr make_number(ExactNumber v) {
  auto e = std::make_shared<Expr>();
  e->node = Expr::Node::Number;
  e->value = std::move(v);
  return e;
}

ExprPtr make_ref(std::string name) {
  auto e = std::make_shared<Expr>();
  e->node = Expr::Node::Ref;
  e->name = std::move(name);
  return e;
}

ExprPtr make_binary(Expr::Node node, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->node = node;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr make_neg(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->node = Expr::Node::Neg;
  e->lhs = std::move(inner);
  return e;
}

// Tokenizer over one expression. Unicode − × ÷ map to - * /.
struct Token {
  enum class Kind { Number, Ident, Op, LParen, RParen, End };
  Kind kind;
  std::string text;
  size_t pos;
};

struct Lexer {
  std::string_view s;
  size_t i = 0;
  size_t line;

  Token next() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) return {Token::Kind::End, "", i};
    size_t start = i;
    unsigned char c = static_cast<unsigned char>(s[i]);

    // UTF-8 math symbols: − (e2 88 92), × (c3 97), ÷ (c3 b7).
    if (c == 0xe2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x88 &&
        static_cast<unsigned char>(s[i + 2]) == 0x92) {
      i += 3;
      return {Token::Kind::Op, "-", start};
    }
    if (c == 0xc3 && i + 1 < s.size()) {
      unsigned char c2 = static_cast<unsigned char>(s[i + 1]);
      if (c2 == 0x97) {
        i += 2;
        return {Token::Kind::Op, "*", start};
      }
      if (c2 == 0xb7) {
        i += 2;
        return {Token::Kind::Op, "/", start};
      }
    }
    if (c == '(') {
      ++i;
      return {Token::Kind::LParen, "(", start};
    }
    if (c == ')') {
      ++i;
      return {Token::Kind::RParen, ")", start};
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '%') {
      ++i;
      return {Token::Kind::Op, std::string(1, static_cast<char>(c)), start};
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::string num;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
        num += s[i];
        ++i;
      }
      return {Token::Kind::Number, std::move(num), start};
    }
    if (std::isalpha(c) || c == '_') {
      std::string id;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        id += s[i];
        ++i;
      }
      if (id == "mod") return {Token::Kind::Op, "mod", start};
      return {Token::Kind::Ident, std::move(id), start};
    }
    throw ArithError("unexpected character '" + std::string(1, static_cast<char>(c)) + "'", line);
  }
};

struct ExprParser {
  Lexer lex;
  Token cur;

  explicit ExprParser(std::string_view text, size_t line) : lex{text, 0, line} { cur = lex.next(); }

  void advance() { cur = lex.next(); }

  ExprPtr parse() {
    ExprPtr e = parse_additive();
    if (cur.kind != Token::Kind::End) throw ArithError("trailing input after expression", lex.line);
    return e;
  }

  ExprPtr parse_additive() {
    ExprPtr left = parse_multiplicative();
    while (cur.kind == Token::Kind::Op && (cur.text == "+" || cur.text == "-")) {
      std::string op = cur.text;
      advance();
      ExprPtr right = parse_multiplicative();
      left = make_binary(op == "+" ? Expr::Node::Add : Expr::Node::Sub, left, right);
    }
    return left;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr left = parse_unary();
    while (cur.kind == Token::Kind::Op &&
           (cur.text == "*" || cur.text == "/" || cur.text == "mod" || cur.text == "%")) {
      std::string op = cur.text;
      advance();
      ExprPtr right = parse_unary();
      Expr::Node node = op == "*" ? Expr::Node::Mul : op == "/" ? Expr::Node::Div : Expr::Node::Mod;
      left = make_binary(node, left, right);
    }
    return left;
  }

  ExprPtr parse_unary() {
    if (cur.kind == Token::Kind::Op && cur.text == "-") {
      advance();
      return make_neg(parse_unary());
    }
    if (cur.kind == Token::Kind::Op && cur.text == "+") {
      advance();
      return parse_unary();
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (cur.kind == Token::Kind::Number) {
      auto v = ExactNumber::try_parse(cur.text);
      if (!v) throw ArithError("malformed number '" + cur.text + "'", lex.line);
      advance();
      return make_number(*v);
    }
    if (cur.kind == Token::Kind::Ident) {
      std::string name = cur.text;
      advance();
      return make_ref(std::move(name));
    }
    if (cur.kind == Token::Kind::LParen) {
      advance();
      ExprPtr e = parse_additive();
      if (cur.kind != Token::Kind::RParen) throw ArithError("missing ')'", lex.line);
      advance();
      return e;
    }
    throw ArithError("expected a number, name, or '('", lex.line);
  }
};

void collect_refs(const ExprPtr& e, std::set<std::string>& out) {
  switch (e->node) {
    case Expr::Node::Number:
      return;
    case Expr::Node::Ref:
      out.insert(e->name);
      return;
    case Expr::Node::Neg:
      collect_refs(e->lhs, out);
      return;
    default:
      collect_refs(e->lhs, out);
      collect_refs(e->rhs, out);
  }
}

}  // namespace

ArithProgram parse_arith(std::string_view text) {
  ArithProgram p;
  std::set<std::string> defined;
  size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    // Also tolerate ';' separators within a line ("x = 8 * 9; goal = x").
    std::vector<std::string> stmts;
    {
      std::string cur;
      for (char c : line) {
        if (c == ';') {
          stmts.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      stmts.push_back(cur);
    }
    for (auto& stmt_raw : stmts) {
      std::string stmt = trim(stmt_raw);
      if (stmt.empty()) continue;
      size_t eq = stmt.find('=');
      if (eq == std::string::npos) throw ArithError("expected 'name = expression'", line_no);
      std::string name = trim(stmt.substr(0, eq));
      std::string expr_text = trim(stmt.substr(eq + 1));
      if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        throw ArithError("invalid binding name '" + name + "'", line_no);
      for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
          throw ArithError("invalid binding name '" + name + "'", line_no);
      }
      if (defined.count(name)) throw ArithError("reassignment of '" + name + "'", line_no);

      ExprParser parser(expr_text, line_no);
      ExprPtr expr = parser.parse();

      std::set<std::string> refs;
      collect_refs(expr, refs);
      for (const auto& r : refs) {
        if (!defined.count(r)) throw ArithError("unknown symbol '" + r + "'", line_no);
      }
      defined.insert(name);
      p.bindings.push_back(Binding{std::move(name), std::move(expr), stmt});
    }
  }
  if (p.bindings.empty()) throw ArithError("empty program");
  if (p.bindings.back().name != "goal") throw ArithError("final binding must be 'goal'");
  return p;
}

namespace {

ExactNumber eval_expr(const ExprPtr& e, const std::map<std::string, ExactNumber>& env) {
  switch (e->node) {
    case Expr::Node::Number:
      return e->value;
    case Expr::Node::Ref:
      return env.at(e->name);
    case Expr::Node::Neg:
      return -eval_expr(e->lhs, env);
    case Expr::Node::Add:
      return eval_expr(e->lhs, env) + eval_expr(e->rhs, env);
    case Expr::Node::Sub:
      return eval_expr(e->lhs, env) - eval_expr(e->rhs, env);
    case Expr::Node::Mul:
      return eval_expr(e->lhs, env) * eval_expr(e->rhs, env);
    case Expr::Node::Div: {
      ExactNumber rhs = eval_expr(e->rhs, env);
      if (rhs.is_zero()) throw EvalError("division by zero");
      return eval_expr(e->lhs, env) / rhs;
    }
    case Expr::Node::Mod: {
      ExactNumber lhs = eval_expr(e->lhs, env);
      ExactNumber rhs = eval_expr(e->rhs, env);
      if (!lhs.is_integral_value() || !rhs.is_integral_value())
        throw EvalError("mod requires integer operands");
      if (rhs.is_zero()) throw EvalError("division by zero");
      return lhs.floor_mod(rhs);
    }
  }
  throw EvalError("unreachable");
}

}  // namespace

ExactNumber eval_arith(const ArithProgram& p) {
  std::map<std::string, ExactNumber> env;
  for (const auto& b : p.bindings) {
    env[b.name] = eval_expr(b.expr, env);
  }
  return env.at("goal");
}

namespace {

int precedence(Expr::Node n) {
  switch (n) {
    case Expr::Node::Add:
    case Expr::Node::Sub:
      return 1;
    case Expr::Node::Mul:
    case Expr::Node::Div:
    case Expr::Node::Mod:
      return 2;
    default:
      return 3;
  }
}

void render_expr(const ExprPtr& e, std::string& out, int parent_prec) {
  int prec = precedence(e->node);
  switch (e->node) {
    case Expr::Node::Number:
      if (e->value.is_negative()) {
        out += "(" + e->value.to_string() + ")";
      } else {
        out += e->value.to_string();
      }
      return;
    case Expr::Node::Ref:
      out += e->name;
      return;
    case Expr::Node::Neg:
      out += "-";
      render_expr(e->lhs, out, 3);
      return;
    default:
      break;
  }
  const char* sym = e->node == Expr::Node::Add   ? " + "
                    : e->node == Expr::Node::Sub ? " - "
                    : e->node == Expr::Node::Mul ? " * "
                    : e->node == Expr::Node::Div ? " / "
                                                 : " mod ";
  bool parens = prec < parent_prec;
  if (parens) out += "(";
  render_expr(e->lhs, out, prec);
  out += sym;
  render_expr(e->rhs, out, prec + 1);  // right operand binds tighter: a - b - c
  if (parens) out += ")";
}

}  // namespace

std::string render_arith(const ArithProgram& p) {
  std::string out;
  for (const auto& b : p.bindings) {
    out += b.name + " = ";
    render_expr(b.expr, out, 0);
    out += "\n";
  }
  return out;
}

size_t significant_digits(const ExactNumber& v) {
  BigInt mantissa;
  if (v.is_decimal_kind()) {
    mantissa = v.mantissa();
  } else if (v.is_integer_kind()) {
    mantissa = v.mantissa();
    if (mantissa != 0) {
      while (mantissa % 10 == 0) mantissa /= 10;  // 100 == 1e2: one mantissa digit
    }
  } else {
    // Terminating rationals convert; others have no finite mantissa.
    auto [num, den] = v.rational_value();
    BigInt d = den;
    int32_t exp = 0;
    while (d % 2 == 0) {
      d /= 2;
      ++exp;
    }
    while (d % 5 == 0) {
      d /= 5;
      ++exp;
    }
    if (d != 1) throw EvalError("non-terminating rational has no digit count; use a decimal");
    // num/den = num * (10^exp / den) / 10^exp
    BigInt scale = 1;
    for (int32_t i = 0; i < exp; ++i) scale *= 10;
    return significant_digits(ExactNumber::decimal(num * (scale / den), -exp));
  }
  if (mantissa < 0) mantissa = -mantissa;
  if (mantissa == 0) return 1;
  size_t digits = 0;
  while (mantissa > 0) {
    ++digits;
    mantissa /= 10;
  }
  return digits;
}

namespace {

using smtlib::Op;
using smtlib::Term;
using smtlib::TermPtr;

std::optional<ExprPtr> chain_expr(const TermPtr& t, const std::set<std::string>& defined) {
  switch (t->node) {
    case Term::Node::Numeral:
      return make_number(t->value);
    case Term::Node::Const:
      if (!defined.count(t->name)) return std::nullopt;
      return make_ref(t->name);
    case Term::Node::App:
      break;
  }
  Expr::Node node;
  switch (t->op) {
    case Op::Add: node = Expr::Node::Add; break;
    case Op::Sub: node = Expr::Node::Sub; break;
    case Op::Mul: node = Expr::Node::Mul; break;
    case Op::RealDiv: node = Expr::Node::Div; break;
    case Op::Mod: node = Expr::Node::Mod; break;
    case Op::Neg: {
      auto inner = chain_expr(t->args[0], defined);
      if (!inner) return std::nullopt;
      return make_neg(*inner);
    }
    default:
      return std::nullopt;  // IntDiv (flooring) and comparisons have no arith-surface form
  }
  auto acc = chain_expr(t->args[0], defined);
  if (!acc) return std::nullopt;
  for (size_t i = 1; i < t->args.size(); ++i) {
    auto rhs = chain_expr(t->args[i], defined);
    if (!rhs) return std::nullopt;
    acc = make_binary(node, *acc, *rhs);
  }
  if (t->args.size() == 1 && (node == Expr::Node::Add || node == Expr::Node::Sub || node == Expr::Node::Mul))
    return std::nullopt;
  return acc;
}

}  // namespace

std::optional<ArithProgram> derive_from_chain(const smtlib::SmtProgram& p) {
  ArithProgram out;
  std::set<std::string> defined;
  for (const auto& a : p.assertions) {
    if (!a->is_app() || a->op != Op::Eq) return std::nullopt;
    const TermPtr* def = nullptr;
    const TermPtr* rhs = nullptr;
    if (a->args[0]->is_const() && !defined.count(a->args[0]->name)) {
      def = &a->args[0];
      rhs = &a->args[1];
    } else if (a->args[1]->is_const() && !defined.count(a->args[1]->name)) {
      def = &a->args[1];
      rhs = &a->args[0];
    } else {
      return std::nullopt;
    }
    auto expr = chain_expr(*rhs, defined);
    if (!expr) return std::nullopt;
    defined.insert((*def)->name);
    out.bindings.push_back(Binding{(*def)->name, *expr, {}});
  }
  if (out.bindings.empty() || out.bindings.back().name != p.goal_var) {
    // The goal must be the final binding; reorder only when it is defined last
    // anyway, otherwise this is not a straight-line chain.
    return std::nullopt;
  }
  for (auto& b : out.bindings) {
    std::string text = b.name + " = ";
    render_expr(b.expr, text, 0);
    b.source_text = std::move(text);
  }
  return out;
}

}  // namespace smart::arith
