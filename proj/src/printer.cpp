#include <sstream>

#include "archpat/parser.hpp"

namespace archpat {

namespace {

// Binding strength, loosest first.
enum Prec { kOr = 1, kAnd, kNot, kCmp, kAdd, kMul, kNeg, kPostfix, kPrimary };

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Unary: return e.unary_op == UnaryOp::Not ? kNot : kNeg;
    case Expr::Kind::Index: return kPostfix;
    case Expr::Kind::Binary:
      switch (e.binary_op) {
        case BinaryOp::Or: return kOr;
        case BinaryOp::And: return kAnd;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Mod: return kMul;
        default: return kCmp;
      }
    default: return kPrimary;
  }
}

void print(std::ostream& os, const Expr& e, int min_prec);

void print_child(std::ostream& os, const Expr& e, int min_prec) {
  if (prec_of(e) < min_prec) {
    os << '(';
    print(os, e, 0);
    os << ')';
  } else {
    print(os, e, min_prec);
  }
}

void print_list(std::ostream& os, const std::vector<ExprPtr>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << ", ";
    print(os, *items[i], 0);
  }
}

void print(std::ostream& os, const Expr& e, int) {
  switch (e.kind) {
    case Expr::Kind::BoolLit: os << (e.bool_value ? "true" : "false"); return;
    case Expr::Kind::IntLit: os << e.int_value; return;
    case Expr::Kind::ArrayLit:
      os << '[';
      print_list(os, e.operands);
      os << ']';
      return;
    case Expr::Kind::SetChoice:
      os << '{';
      print_list(os, e.operands);
      os << '}';
      return;
    case Expr::Kind::Ref:
      if (e.instance) os << *e.instance << '.';
      os << e.name;
      return;
    case Expr::Kind::Index:
      print_child(os, *e.operands[0], kPostfix);
      os << '[';
      print(os, *e.operands[1], 0);
      os << ']';
      return;
    case Expr::Kind::Unary: {
      const Expr& op = *e.operands[0];
      if (e.unary_op == UnaryOp::Not) {
        os << '!';
        print_child(os, op, kNot);
        return;
      }
      os << '-';
      // "-5" would reparse as a literal and "--" starts a comment.
      if (op.kind == Expr::Kind::IntLit || (op.kind == Expr::Kind::Unary && op.unary_op == UnaryOp::Neg)) {
        os << '(';
        print(os, op, 0);
        os << ')';
      } else {
        print_child(os, op, kNeg);
      }
      return;
    }
    case Expr::Kind::Binary: {
      const int p = prec_of(e);
      const bool chainable = p != kCmp;
      print_child(os, *e.operands[0], chainable ? p : p + 1);
      os << ' ' << to_string(e.binary_op) << ' ';
      print_child(os, *e.operands[1], p + 1);
      return;
    }
    case Expr::Kind::Case:
      os << "case ";
      for (const auto& br : e.branches) {
        print(os, *br.condition, 0);
        os << " : ";
        print(os, *br.value, 0);
        os << "; ";
      }
      os << "esac";
      return;
  }
}

enum LtlPrec { kLImplies = 1, kLOr, kLAnd, kLUntil, kLUnary, kLPrimary };

int ltl_prec(const LtlFormula& f) {
  using K = LtlFormula::Kind;
  switch (f.kind) {
    case K::Implies: return kLImplies;
    case K::Or: return kLOr;
    case K::And: return kLAnd;
    case K::Until: return kLUntil;
    case K::Not:
    case K::Globally:
    case K::Eventually:
    case K::Next: return kLUnary;
    default: return kLPrimary;
  }
}

void print_ltl(std::ostream& os, const LtlFormula& f);

void print_ltl_child(std::ostream& os, const LtlFormula& f, int min_prec) {
  if (ltl_prec(f) < min_prec) {
    os << '(';
    print_ltl(os, f);
    os << ')';
  } else {
    print_ltl(os, f);
  }
}

void print_ltl(std::ostream& os, const LtlFormula& f) {
  using K = LtlFormula::Kind;
  switch (f.kind) {
    case K::Atom: {
      const int p = prec_of(*f.atom);
      if (p == kOr || p == kAnd) {
        os << '(';
        print(os, *f.atom, 0);
        os << ')';
      } else {
        print(os, *f.atom, 0);
      }
      return;
    }
    case K::Active: os << "active(" << f.instance << ')'; return;
    case K::Connected:
      os << "conn(" << f.first.instance << '.' << f.first.port << ", " << f.second.instance << '.' << f.second.port
         << ')';
      return;
    case K::Not: os << '!'; break;
    case K::Globally: os << "G "; break;
    case K::Eventually: os << "F "; break;
    case K::Next: os << "X "; break;
    case K::Implies:
      print_ltl_child(os, *f.operands[0], kLImplies + 1);
      os << " -> ";
      print_ltl_child(os, *f.operands[1], kLImplies);
      return;
    case K::Until:
      print_ltl_child(os, *f.operands[0], kLUntil + 1);
      os << " U ";
      print_ltl_child(os, *f.operands[1], kLUntil);
      return;
    case K::And:
    case K::Or: {
      const int p = ltl_prec(f);
      print_ltl_child(os, *f.operands[0], p);
      os << (f.kind == K::And ? " & " : " | ");
      print_ltl_child(os, *f.operands[1], p + 1);
      return;
    }
  }
  print_ltl_child(os, *f.operands[0], kLUnary);
}

void print_assignment(std::ostream& os, const char* kw, const Assignment& a) {
  os << "  " << kw << ' ' << a.port;
  if (a.element) os << '[' << *a.element << ']';
  os << " := " << to_dsl(*a.value) << '\n';
}

}  // namespace

std::string to_dsl(const Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string to_dsl(const LtlFormula& f) {
  std::ostringstream os;
  print_ltl(os, f);
  return os.str();
}

std::string to_dsl(const Sort& s) { return to_string(s); }

std::string pretty_print(const PatternSpec& spec) {
  std::ostringstream os;
  os << "pattern " << spec.name << '\n';
  for (const auto& iface : spec.interfaces) {
    os << "\ninterface " << iface.name << '\n';
    for (const auto& p : iface.ports) os << "  " << to_string(p.kind) << ' ' << p.name << " : " << to_dsl(p.sort) << '\n';
  }
  for (const auto& b : spec.behaviors) {
    os << "\nbehavior " << b.interface << " states ";
    for (std::size_t i = 0; i < b.control_states.size(); ++i) os << (i ? ", " : "") << b.control_states[i];
    os << " init " << b.initial_control << '\n';
    for (const auto& a : b.local_init) print_assignment(os, "init", a);
    for (const auto& t : b.transitions) os << "  trans " << t.from << " -> " << t.to << " when " << to_dsl(*t.guard) << '\n';
    for (const auto& a : b.local_updates) print_assignment(os, "next", a);
    for (const auto& d : b.defines) os << "  define " << d.name << " := " << to_dsl(*d.value) << '\n';
  }
  const auto& arch = spec.architecture;
  os << "\narchitecture\n";
  for (const auto& inst : arch.instances) {
    os << "  component " << inst.name << " : " << inst.interface << " (";
    for (std::size_t i = 0; i < inst.bindings.size(); ++i)
      os << (i ? ", " : "") << inst.bindings[i].port << " := " << to_dsl(*inst.bindings[i].value);
    os << ")\n";
  }
  for (const auto& env : arch.env_vars)
    os << "  env " << env.name << " : " << to_dsl(env.sort) << " init " << to_dsl(*env.init) << " next "
       << to_dsl(*env.next) << '\n';
  for (const auto& d : arch.shared_defs) os << "  define " << d.name << " := " << to_dsl(*d.value) << '\n';
  if (!spec.properties.empty()) os << '\n';
  for (const auto& p : spec.properties) os << "property " << p.name << " : " << to_dsl(*p.formula) << '\n';
  return os.str();
}

}  // namespace archpat
