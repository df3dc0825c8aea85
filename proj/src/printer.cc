#include <sstream>
#include <string>

#include "dtsim/syntax.h"

namespace dtsim {
namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kXor: return 1;
    case Expr::Kind::kAnd: return 2;
    case Expr::Kind::kNot: return 3;
    default: return 4;
  }
}

void print_expr_to(std::ostream& os, const Expr& e, int min_prec) {
  const int prec = precedence(e);
  const bool parens = prec < min_prec;
  if (parens) os << '(';
  switch (e.kind) {
    case Expr::Kind::kConst:
      os << (e.value ? '1' : '0');
      break;
    case Expr::Kind::kVar:
      os << e.name;
      break;
    case Expr::Kind::kNot:
      os << '~';
      print_expr_to(os, e.args[0], 3);
      break;
    case Expr::Kind::kAnd:
    case Expr::Kind::kXor:
      // Left-associative: the right operand binds strictly tighter.
      print_expr_to(os, e.args[0], prec);
      os << (e.kind == Expr::Kind::kAnd ? " ^ " : " + ");
      print_expr_to(os, e.args[1], prec + 1);
      break;
  }
  if (parens) os << ')';
}

void print_table(std::ostream& os, const SelectTree& t) {
  if (t.is_leaf()) {
    os << t.leaf;
    return;
  }
  os << '[';
  print_table(os, t.branches[0]);
  os << ", ";
  print_table(os, t.branches[1]);
  os << "]?" << t.selector;
}

void print_groups(std::ostream& os, const std::vector<PartyArgs>& groups) {
  os << '(';
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) os << ", ";
    os << groups[i].party << '(';
    for (std::size_t j = 0; j < groups[i].names.size(); ++j) {
      if (j) os << ", ";
      os << groups[i].names[j];
    }
    os << ')';
  }
  os << ')';
}

void print_stmt(std::ostream& os, const Stmt& s, const char* indent) {
  os << indent;
  if (const auto* a = std::get_if<Assign>(&s.node)) {
    os << a->target << " = ";
    if (const auto* f = std::get_if<FlipRhs>(&a->rhs)) {
      os << "FLIP @" << f->party;
    } else if (const auto* sec = std::get_if<SecretRhs>(&a->rhs)) {
      os << "SECRET @" << sec->party;
    } else if (const auto* e = std::get_if<ExprRhs>(&a->rhs)) {
      print_expr_to(os, e->expr, 0);
      if (e->party) os << " @" << *e->party;
    } else {
      const auto& o = std::get<ObliviousRhs>(a->rhs);
      os << "OBLIVIOUSLY ";
      print_table(os, o.table);
      os << " FOR " << o.receiver;
    }
  } else if (const auto* send = std::get_if<Send>(&s.node)) {
    os << "SEND " << send->var << " TO " << send->to;
  } else if (const auto* out = std::get_if<Output>(&s.node)) {
    os << "OUTPUT " << out->var;
    if (out->party) os << " @" << *out->party;
  } else {
    const auto& c = std::get<MacroCall>(s.node);
    os << "DO " << c.name;
    print_groups(os, c.parties);
    if (!c.renames.empty()) {
      os << " GET(";
      for (std::size_t i = 0; i < c.renames.size(); ++i) {
        if (i) os << ", ";
        os << c.renames[i].outer << '=' << c.renames[i].inner;
      }
      os << ')';
    }
  }
  os << '\n';
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::ostringstream os;
  print_expr_to(os, expr, 0);
  return os.str();
}

std::string print_program(const Program& program) {
  std::ostringstream os;
  for (const MacroDef& m : program.macros) {
    os << "MACRO " << m.name;
    print_groups(os, m.params);
    os << " AS\n";
    for (const Stmt& s : m.body) print_stmt(os, s, "  ");
    os << "ENDMACRO\n";
  }
  for (const Stmt& s : program.body) print_stmt(os, s, "");
  return os.str();
}

}  // namespace dtsim
