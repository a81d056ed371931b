// smartsolve: exact satisfiability checker for the SMT-LIB subset this
// project emits (QF arithmetic over Int/Real, declare-const only, one
// get-value target). Reads one file, prints "sat"/"unsat"/"unknown" and, on
// sat, "((<goal> <value>))" in the same value grammar z3 uses.
//
// Strategy: propagate definitional equalities, then solve what remains with
// exact linear algebra, univariate polynomial roots (degree <= 2), and a
// small deterministic probe grid. Anything beyond that is answered
// "unknown" - never a guessed sat/unsat.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "smart/exact_number.hpp"
#include "smart/smtlib.hpp"

using smart::BigInt;
using smart::ExactNumber;
namespace smtlib = smart::smtlib;
using smtlib::Op;
using smtlib::Term;
using smtlib::TermPtr;

namespace {

using Env = std::map<std::string, ExactNumber>;

struct Constraint {
  TermPtr cmp;   // comparison term
  bool negated;  // wrapped in (not ...)
};

struct EvalFail {
  std::string reason;
};

std::optional<ExactNumber> eval_term(const TermPtr& t, const Env& env) {
  switch (t->node) {
    case Term::Node::Numeral:
      return t->value;
    case Term::Node::Const: {
      auto it = env.find(t->name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Term::Node::App:
      break;
  }
  std::vector<ExactNumber> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) {
    auto v = eval_term(a, env);
    if (!v) return std::nullopt;
    args.push_back(std::move(*v));
  }
  switch (t->op) {
    case Op::Add: {
      ExactNumber acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = acc + args[i];
      return acc;
    }
    case Op::Sub: {
      ExactNumber acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = acc - args[i];
      return acc;
    }
    case Op::Neg:
      return -args[0];
    case Op::Mul: {
      ExactNumber acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = acc * args[i];
      return acc;
    }
    case Op::RealDiv:
      if (args[1].is_zero()) throw EvalFail{"division by zero"};
      return args[0] / args[1];
    case Op::IntDiv:
      if (args[1].is_zero()) throw EvalFail{"division by zero"};
      return args[0].floor_div(args[1]);
    case Op::Mod:
      if (args[1].is_zero()) throw EvalFail{"mod by zero"};
      return args[0].floor_mod(args[1]);
    default:
      throw EvalFail{"comparison in arithmetic position"};
  }
}

std::optional<bool> eval_constraint(const Constraint& c, const Env& env) {
  const TermPtr& t = c.cmp;
  auto lhs = eval_term(t->args[0], env);
  auto rhs = eval_term(t->args[1], env);
  if (!lhs || !rhs) return std::nullopt;
  bool holds = false;
  switch (t->op) {
    case Op::Eq: holds = *lhs == *rhs; break;
    case Op::Lt: holds = *lhs < *rhs; break;
    case Op::Le: holds = *lhs <= *rhs; break;
    case Op::Gt: holds = *lhs > *rhs; break;
    case Op::Ge: holds = *lhs >= *rhs; break;
    default: throw EvalFail{"unsupported constraint"};
  }
  return c.negated ? !holds : holds;
}

void collect_unbound(const TermPtr& t, const Env& env, std::set<std::string>& out) {
  if (t->is_const() && !env.count(t->name)) out.insert(t->name);
  if (t->is_app()) {
    for (const auto& a : t->args) collect_unbound(a, env, out);
  }
}

// --- polynomial form over one variable ---------------------------------------

using Poly = std::map<int, ExactNumber>;  // degree -> coefficient

void poly_add(Poly& a, const Poly& b, bool negate = false) {
  for (const auto& [deg, coef] : b) {
    ExactNumber c = negate ? -coef : coef;
    auto it = a.find(deg);
    if (it == a.end()) {
      a[deg] = c;
    } else {
      it->second = it->second + c;
    }
  }
}

std::optional<Poly> poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [da, ca] : a) {
    for (const auto& [db, cb] : b) {
      if (da + db > 8) return std::nullopt;
      ExactNumber prod = ca * cb;
      auto it = out.find(da + db);
      if (it == out.end()) {
        out[da + db] = prod;
      } else {
        it->second = it->second + prod;
      }
    }
  }
  return out;
}

std::optional<Poly> poly_form(const TermPtr& t, const std::string& var, const Env& env) {
  switch (t->node) {
    case Term::Node::Numeral:
      return Poly{{0, t->value}};
    case Term::Node::Const: {
      if (t->name == var) return Poly{{1, ExactNumber::integer(1)}};
      auto it = env.find(t->name);
      if (it == env.end()) return std::nullopt;
      return Poly{{0, it->second}};
    }
    case Term::Node::App:
      break;
  }
  switch (t->op) {
    case Op::Add: {
      Poly acc;
      for (const auto& a : t->args) {
        auto p = poly_form(a, var, env);
        if (!p) return std::nullopt;
        poly_add(acc, *p);
      }
      return acc;
    }
    case Op::Sub: {
      auto first = poly_form(t->args[0], var, env);
      if (!first) return std::nullopt;
      Poly acc = *first;
      for (size_t i = 1; i < t->args.size(); ++i) {
        auto p = poly_form(t->args[i], var, env);
        if (!p) return std::nullopt;
        poly_add(acc, *p, /*negate=*/true);
      }
      return acc;
    }
    case Op::Neg: {
      auto p = poly_form(t->args[0], var, env);
      if (!p) return std::nullopt;
      Poly acc;
      poly_add(acc, *p, true);
      return acc;
    }
    case Op::Mul: {
      auto acc = poly_form(t->args[0], var, env);
      if (!acc) return std::nullopt;
      for (size_t i = 1; i < t->args.size(); ++i) {
        auto p = poly_form(t->args[i], var, env);
        if (!p) return std::nullopt;
        acc = poly_mul(*acc, *p);
        if (!acc) return std::nullopt;
      }
      return acc;
    }
    case Op::RealDiv: {
      auto num = poly_form(t->args[0], var, env);
      auto den = poly_form(t->args[1], var, env);
      if (!num || !den) return std::nullopt;
      if (den->size() != 1 || den->count(0) == 0) return std::nullopt;  // variable divisor
      ExactNumber d = den->at(0);
      if (d.is_zero()) return std::nullopt;
      Poly out;
      for (const auto& [deg, coef] : *num) out[deg] = coef / d;
      return out;
    }
    case Op::IntDiv:
    case Op::Mod: {
      // Only constant integer operands fold into a polynomial.
      auto v = [&]() -> std::optional<ExactNumber> {
        try {
          return eval_term(t, env);
        } catch (const EvalFail&) {
          return std::nullopt;
        }
      }();
      if (!v) return std::nullopt;
      return Poly{{0, *v}};
    }
    default:
      return std::nullopt;
  }
}

int poly_degree(const Poly& p) {
  int deg = 0;
  for (const auto& [d, c] : p) {
    if (!c.is_zero()) deg = std::max(deg, d);
  }
  return deg;
}

// Exact rational square root, when one exists.
std::optional<ExactNumber> exact_sqrt(const ExactNumber& v) {
  if (v.is_negative()) return std::nullopt;
  auto [num, den] = v.rational_value();
  BigInt sn = boost::multiprecision::sqrt(num);
  BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return ExactNumber::rational(sn, sd);
}

// All real roots of a polynomial of degree <= 2 when they are rational.
// nullopt = roots exist but are not representable (irrational / high degree).
std::optional<std::vector<ExactNumber>> rational_roots(const Poly& p) {
  int deg = poly_degree(p);
  auto coef = [&](int d) {
    auto it = p.find(d);
    return it == p.end() ? ExactNumber::integer(0) : it->second;
  };
  if (deg == 0) {
    // No variable occurrence: either identically satisfied or contradictory.
    return std::vector<ExactNumber>{};
  }
  if (deg == 1) {
    return std::vector<ExactNumber>{-coef(0) / coef(1)};
  }
  if (deg == 2) {
    ExactNumber a = coef(2), b = coef(1), c = coef(0);
    ExactNumber four = ExactNumber::integer(4);
    ExactNumber disc = b * b - four * a * c;
    if (disc.is_negative()) return std::vector<ExactNumber>{};
    auto root = exact_sqrt(disc);
    if (!root) return std::nullopt;  // irrational roots
    ExactNumber two_a = a + a;
    std::vector<ExactNumber> out;
    out.push_back((-b - *root) / two_a);
    if (!root->is_zero()) out.push_back((-b + *root) / two_a);
    std::sort(out.begin(), out.end());
    return out;
  }
  return std::nullopt;
}

// --- linear forms over several variables --------------------------------------

struct LinForm {
  std::map<std::string, ExactNumber> coef;
  ExactNumber constant;
};

std::optional<LinForm> linear_form(const TermPtr& t, const Env& env) {
  switch (t->node) {
    case Term::Node::Numeral:
      return LinForm{{}, t->value};
    case Term::Node::Const: {
      auto it = env.find(t->name);
      if (it != env.end()) return LinForm{{}, it->second};
      LinForm f;
      f.coef[t->name] = ExactNumber::integer(1);
      return f;
    }
    case Term::Node::App:
      break;
  }
  auto combine = [](LinForm& acc, const LinForm& other, bool negate) {
    for (const auto& [v, c] : other.coef) {
      ExactNumber d = negate ? -c : c;
      auto it = acc.coef.find(v);
      if (it == acc.coef.end()) {
        acc.coef[v] = d;
      } else {
        it->second = it->second + d;
      }
    }
    acc.constant = negate ? acc.constant - other.constant : acc.constant + other.constant;
  };
  switch (t->op) {
    case Op::Add:
    case Op::Sub: {
      auto first = linear_form(t->args[0], env);
      if (!first) return std::nullopt;
      LinForm acc = *first;
      for (size_t i = 1; i < t->args.size(); ++i) {
        auto p = linear_form(t->args[i], env);
        if (!p) return std::nullopt;
        combine(acc, *p, t->op == Op::Sub);
      }
      return acc;
    }
    case Op::Neg: {
      auto p = linear_form(t->args[0], env);
      if (!p) return std::nullopt;
      LinForm acc;
      combine(acc, *p, true);
      return acc;
    }
    case Op::Mul: {
      auto acc = linear_form(t->args[0], env);
      if (!acc) return std::nullopt;
      for (size_t i = 1; i < t->args.size(); ++i) {
        auto p = linear_form(t->args[i], env);
        if (!p) return std::nullopt;
        bool acc_const = acc->coef.empty();
        bool p_const = p->coef.empty();
        if (!acc_const && !p_const) return std::nullopt;  // bilinear
        LinForm out;
        const LinForm& lin = acc_const ? *p : *acc;
        const ExactNumber k = acc_const ? acc->constant : p->constant;
        for (const auto& [v, c] : lin.coef) out.coef[v] = c * k;
        out.constant = lin.constant * k;
        acc = out;
      }
      return acc;
    }
    case Op::RealDiv: {
      auto num = linear_form(t->args[0], env);
      auto den = linear_form(t->args[1], env);
      if (!num || !den || !den->coef.empty() || den->constant.is_zero()) return std::nullopt;
      LinForm out;
      for (const auto& [v, c] : num->coef) out.coef[v] = c / den->constant;
      out.constant = num->constant / den->constant;
      return out;
    }
    case Op::IntDiv:
    case Op::Mod: {
      try {
        auto v = eval_term(t, env);
        if (!v) return std::nullopt;
        return LinForm{{}, *v};
      } catch (const EvalFail&) {
        return std::nullopt;
      }
    }
    default:
      return std::nullopt;
  }
}

// --- solver --------------------------------------------------------------------

struct Solver {
  smtlib::SmtProgram program;
  std::vector<Constraint> constraints;
  std::map<std::string, smtlib::Sort> sorts;

  enum class Verdict { Sat, Unsat, Unknown };
  Verdict verdict = Verdict::Unknown;
  ExactNumber goal_value;

  void run() {
    for (const auto& [name, sort] : program.declarations) sorts[name] = sort;
    for (const auto& a : program.assertions) {
      if (a->is_app() && a->op == Op::Not) {
        constraints.push_back({a->args[0], true});
      } else {
        constraints.push_back({a, false});
      }
    }

    Env env;
    try {
      verdict = solve(env);
    } catch (const EvalFail&) {
      verdict = Verdict::Unknown;
      return;
    }
    if (verdict == Verdict::Sat) goal_value = env.at(program.goal_var);
  }

  void propagate(Env& env) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : constraints) {
        if (c.negated || c.cmp->op != Op::Eq) continue;
        for (int side = 0; side < 2; ++side) {
          const TermPtr& lhs = c.cmp->args[side];
          const TermPtr& rhs = c.cmp->args[1 - side];
          if (!lhs->is_const() || env.count(lhs->name)) continue;
          auto v = eval_term(rhs, env);
          if (v) {
            env[lhs->name] = *v;
            changed = true;
          }
        }
      }
    }
  }

  bool int_sort_ok(const Env& env) {
    for (const auto& [name, value] : env) {
      auto it = sorts.find(name);
      if (it != sorts.end() && it->second == smtlib::Sort::Int && !value.is_integral_value()) return false;
    }
    return true;
  }

  std::optional<bool> check_all(const Env& env) {
    if (!int_sort_ok(env)) return false;
    bool all = true;
    for (const auto& c : constraints) {
      auto v = eval_constraint(c, env);
      if (!v) return std::nullopt;
      all = all && *v;
      if (!all) return false;
    }
    return all;
  }

  std::set<std::string> unbound_vars(const Env& env) {
    std::set<std::string> out;
    for (const auto& c : constraints) collect_unbound(c.cmp, env, out);
    return out;
  }

  std::vector<ExactNumber> probe_values() {
    std::vector<ExactNumber> out;
    for (int v : {0, 1, 2, 3, 4, 5, 10, -1, -2, 100}) out.push_back(ExactNumber::integer(v));
    out.push_back(ExactNumber::rational(1, 2));
    out.push_back(ExactNumber::rational(-1, 2));
    return out;
  }

  Verdict solve(Env& env) {
    propagate(env);
    std::set<std::string> unbound = unbound_vars(env);

    if (unbound.empty()) {
      auto ok = check_all(env);
      if (!ok) return Verdict::Unknown;
      return *ok ? Verdict::Sat : Verdict::Unsat;
    }

    // Linear system over what remains.
    std::vector<LinForm> rows;
    bool nonlinear_equality = false;
    for (const auto& c : constraints) {
      if (c.negated || c.cmp->op != Op::Eq) continue;
      std::set<std::string> mentions;
      collect_unbound(c.cmp, env, mentions);
      if (mentions.empty()) continue;
      auto lhs = linear_form(c.cmp->args[0], env);
      auto rhs = linear_form(c.cmp->args[1], env);
      if (!lhs || !rhs) {
        nonlinear_equality = true;
        continue;
      }
      LinForm row = *lhs;
      for (const auto& [v, coef] : rhs->coef) {
        auto it = row.coef.find(v);
        if (it == row.coef.end()) {
          row.coef[v] = -coef;
        } else {
          it->second = it->second - coef;
        }
      }
      row.constant = row.constant - rhs->constant;
      rows.push_back(std::move(row));
    }

    if (nonlinear_equality && unbound.size() == 1) {
      return solve_single_poly(env, *unbound.begin());
    }

    std::vector<std::string> vars(unbound.begin(), unbound.end());
    return solve_linear(env, vars, rows, nonlinear_equality);
  }

  Verdict solve_single_poly(Env& env, const std::string& var) {
    std::optional<std::vector<ExactNumber>> candidates;
    for (const auto& c : constraints) {
      if (c.negated || c.cmp->op != Op::Eq) continue;
      std::set<std::string> mentions;
      collect_unbound(c.cmp, env, mentions);
      if (!mentions.count(var)) continue;
      auto lhs = poly_form(c.cmp->args[0], var, env);
      auto rhs = poly_form(c.cmp->args[1], var, env);
      if (!lhs || !rhs) continue;
      Poly diff = *lhs;
      poly_add(diff, *rhs, true);
      if (poly_degree(diff) == 0) {
        auto it = diff.find(0);
        bool contradiction = it != diff.end() && !it->second.is_zero();
        if (contradiction) return Verdict::Unsat;  // the variable cancels, e.g. x = x + 1
        continue;
      }
      auto roots = rational_roots(diff);
      if (!roots) return Verdict::Unknown;  // irrational or high degree
      candidates = roots;
      break;  // one pinning equality is enough; the rest act as filters
    }
    if (!candidates) return Verdict::Unknown;
    if (candidates->empty()) return Verdict::Unsat;

    for (const auto& root : *candidates) {
      Env trial = env;
      trial[var] = root;
      Verdict v = solve(trial);  // recurse: other vars may still be unbound
      if (v == Verdict::Sat) {
        env = trial;
        return Verdict::Sat;
      }
      if (v == Verdict::Unknown) return Verdict::Unknown;
    }
    return Verdict::Unsat;  // the equality enumerated every possible value
  }

  Verdict solve_linear(Env& env, const std::vector<std::string>& vars, std::vector<LinForm> rows,
                       bool nonlinear_equality) {
    size_t n = vars.size();
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[vars[i]] = i;

    // Matrix [A | b] for A x = b with b = -constant.
    std::vector<std::vector<ExactNumber>> m;
    for (const auto& row : rows) {
      std::vector<ExactNumber> r(n + 1, ExactNumber::integer(0));
      for (const auto& [v, c] : row.coef) r[index.at(v)] = c;
      r[n] = -row.constant;
      m.push_back(std::move(r));
    }

    // Gaussian elimination.
    std::vector<int> pivot_of_col(n, -1);
    size_t rank = 0;
    for (size_t col = 0; col < n && rank < m.size(); ++col) {
      size_t sel = m.size();
      for (size_t r = rank; r < m.size(); ++r) {
        if (!m[r][col].is_zero()) {
          sel = r;
          break;
        }
      }
      if (sel == m.size()) continue;
      std::swap(m[rank], m[sel]);
      ExactNumber inv = m[rank][col];
      for (size_t k = col; k <= n; ++k) m[rank][k] = m[rank][k] / inv;
      for (size_t r = 0; r < m.size(); ++r) {
        if (r == rank || m[r][col].is_zero()) continue;
        ExactNumber f = m[r][col];
        for (size_t k = col; k <= n; ++k) m[r][k] = m[r][k] - f * m[rank][k];
      }
      pivot_of_col[col] = static_cast<int>(rank);
      ++rank;
    }
    for (size_t r = rank; r < m.size(); ++r) {
      if (!m[r][n].is_zero()) return Verdict::Unsat;  // 0 = c
    }

    std::vector<std::string> frees;
    for (size_t col = 0; col < n; ++col) {
      if (pivot_of_col[col] < 0) frees.push_back(vars[col]);
    }

    auto assign_and_check = [&](const std::map<std::string, ExactNumber>& free_vals) -> std::optional<Env> {
      Env trial = env;
      for (const auto& [v, val] : free_vals) trial[v] = val;
      for (size_t col = 0; col < n; ++col) {
        int prow = pivot_of_col[col];
        if (prow < 0) continue;
        ExactNumber val = m[static_cast<size_t>(prow)][n];
        for (size_t k = col + 1; k < n; ++k) {
          if (m[static_cast<size_t>(prow)][k].is_zero()) continue;
          auto it = trial.find(vars[k]);
          if (it == trial.end()) return std::nullopt;
          val = val - m[static_cast<size_t>(prow)][k] * it->second;
        }
        trial[vars[col]] = val;
      }
      auto ok = check_all(trial);
      if (ok && *ok) return trial;
      return std::nullopt;
    };

    if (frees.empty()) {
      Env trial = env;
      for (size_t col = 0; col < n; ++col) {
        int prow = pivot_of_col[col];
        ExactNumber val = m[static_cast<size_t>(prow)][n];
        trial[vars[col]] = val;
      }
      auto ok = check_all(trial);
      if (!ok) return Verdict::Unknown;
      if (*ok) {
        env = trial;
        return Verdict::Sat;
      }
      // The linear equalities force this assignment; anything else violates
      // them, so a failed filter means unsat.
      return Verdict::Unsat;
    }

    if (nonlinear_equality || frees.size() > 3) return Verdict::Unknown;

    // Deterministic probe over the free variables.
    std::vector<ExactNumber> grid = probe_values();
    std::vector<size_t> idx(frees.size(), 0);
    for (;;) {
      std::map<std::string, ExactNumber> free_vals;
      for (size_t i = 0; i < frees.size(); ++i) free_vals[frees[i]] = grid[idx[i]];
      try {
        if (auto found = assign_and_check(free_vals)) {
          env = *found;
          return Verdict::Sat;
        }
      } catch (const EvalFail&) {
        // division by zero along this probe; try the next grid point
      }
      size_t d = 0;
      for (; d < idx.size(); ++d) {
        if (++idx[d] < grid.size()) break;
        idx[d] = 0;
      }
      if (d == idx.size()) break;
    }
    return Verdict::Unknown;  // probing is incomplete; absence is not unsat
  }
};

std::string format_value(const ExactNumber& v) {
  if (v.is_negative()) return "(- " + format_value(-v) + ")";
  auto [num, den] = v.rational_value();
  if (den == 1) return num.str();
  return "(/ " + num.str() + " " + den.str() + ")";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: smartsolve <file.smt2>\n";
    return 2;
  }
  std::string path = argv[argc - 1];
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "smartsolve: cannot open " << path << "\n";
    return 2;
  }
  std::stringstream ss;
  ss << f.rdbuf();

  smtlib::SmtProgram program;
  try {
    program = smtlib::parse_program(ss.str(), smtlib::ParseOptions{.internal_query = true});
  } catch (const std::exception& e) {
    std::cerr << "smartsolve: " << e.what() << "\n";
    std::cout << "unknown\n";
    return 0;
  }

  Solver solver;
  solver.program = program;
  solver.run();

  switch (solver.verdict) {
    case Solver::Verdict::Sat:
      std::cout << "sat\n((" << program.goal_var << " " << format_value(solver.goal_value) << "))\n";
      break;
    case Solver::Verdict::Unsat:
      std::cout << "unsat\n";
      break;
    case Solver::Verdict::Unknown:
      std::cout << "unknown\n";
      break;
  }
  return 0;
}
