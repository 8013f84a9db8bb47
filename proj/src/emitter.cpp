#include "archpat/emitter.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace archpat {

namespace {

constexpr const char* kIndent = "  ";

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

void print(std::ostream& os, const Expr& e);

void print_child(std::ostream& os, const Expr& e, int min_prec) {
  if (prec_of(e) < min_prec) {
    os << '(';
    print(os, e);
    os << ')';
  } else {
    print(os, e);
  }
}

void print_list(std::ostream& os, const std::vector<ExprPtr>& items, const char* sep) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << sep;
    print(os, *items[i]);
  }
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolLit: os << (e.bool_value ? "TRUE" : "FALSE"); return;
    case Expr::Kind::IntLit: os << e.int_value; return;
    case Expr::Kind::ArrayLit:
      os << '[';
      print_list(os, e.operands, ",");
      os << ']';
      return;
    case Expr::Kind::SetChoice:
      os << '{';
      print_list(os, e.operands, ",");
      os << '}';
      return;
    case Expr::Kind::Ref:
      if (e.instance) os << *e.instance << '.';
      os << e.name;
      return;
    case Expr::Kind::Index:
      print_child(os, *e.operands[0], kPostfix);
      os << '[';
      print(os, *e.operands[1]);
      os << ']';
      return;
    case Expr::Kind::Unary: {
      const Expr& op = *e.operands[0];
      os << (e.unary_op == UnaryOp::Not ? "!" : "-");
      if (e.unary_op == UnaryOp::Neg && (op.kind == Expr::Kind::IntLit || op.kind == Expr::Kind::Unary)) {
        os << '(';
        print(os, op);
        os << ')';
      } else {
        print_child(os, op, e.unary_op == UnaryOp::Not ? kNot : kNeg);
      }
      return;
    }
    case Expr::Kind::Binary: {
      const int p = prec_of(e);
      print_child(os, *e.operands[0], p != kCmp ? p : p + 1);
      os << ' ' << to_string(e.binary_op) << ' ';
      print_child(os, *e.operands[1], p + 1);
      return;
    }
    case Expr::Kind::Case:
      os << "case ";
      for (const auto& br : e.branches) {
        print(os, *br.condition);
        os << " : ";
        print(os, *br.value);
        os << "; ";
      }
      os << "esac";
      return;
  }
}

std::string render(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

/// Right-hand side of an assignment: top-level cases span several lines.
void write_rhs(std::ostream& os, const Expr& e, const std::string& indent) {
  if (e.kind != Expr::Kind::Case) {
    os << render(e) << ";\n";
    return;
  }
  os << "case\n";
  for (const auto& br : e.branches)
    os << indent << kIndent << render(*br.condition) << " : " << render(*br.value) << ";\n";
  os << indent << "esac;\n";
}

/// Element `k` of an array-valued expression, pushed through literals and
/// case branches.
ExprPtr element_of(const ExprPtr& e, std::int64_t offset, std::int64_t index) {
  switch (e->kind) {
    case Expr::Kind::ArrayLit:
      return e->operands.at(static_cast<std::size_t>(offset));
    case Expr::Kind::Case: {
      std::vector<Expr::Branch> branches;
      for (const auto& br : e->branches) branches.push_back({br.condition, element_of(br.value, offset, index)});
      return Expr::case_of(std::move(branches));
    }
    default:
      return Expr::index(e, Expr::integer(index));
  }
}

void write_assignments(std::ostream& os, const char* fn, const InterfaceSpec& iface,
                       const std::vector<Assignment>& assignments) {
  for (const auto& a : assignments) {
    const PortDecl* port = iface.find_port(a.port);
    const bool whole_array = port && port->sort.kind == Sort::Kind::Array && !a.element;
    if (!whole_array) {
      os << kIndent << fn << '(' << a.port;
      if (a.element) os << '[' << *a.element << ']';
      os << ") := ";
      write_rhs(os, *a.value, kIndent);
      continue;
    }
    for (std::int64_t k = port->sort.lo; k <= port->sort.hi; ++k) {
      os << kIndent << fn << '(' << a.port << '[' << k << "]) := ";
      write_rhs(os, *element_of(a.value, k - port->sort.lo, k), kIndent);
    }
  }
}

bool is_true(const ExprPtr& e) { return e && e->kind == Expr::Kind::BoolLit && e->bool_value; }

void write_control_next(std::ostream& os, const BehaviorSpec& b) {
  std::vector<std::string> fallthrough(b.control_states);
  std::vector<char> closed(b.control_states.size(), 0);
  auto index_of = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(b.control_states.begin(), b.control_states.end(), s) -
                                    b.control_states.begin());
  };
  os << kIndent << "next(controlState) := case\n";
  for (const auto& t : b.transitions) {
    const std::size_t from = index_of(t.from);
    if (from >= closed.size() || closed[from]) continue;
    if (is_true(t.guard)) {
      fallthrough[from] = t.to;
      closed[from] = 1;
      continue;
    }
    std::ostringstream guard;
    print_child(guard, *t.guard, kAnd);
    os << kIndent << kIndent << "controlState = " << t.from << " & " << guard.str() << " : " << t.to << ";\n";
  }
  const bool uniform =
      std::all_of(fallthrough.begin(), fallthrough.end(), [&](const std::string& s) { return s == fallthrough[0]; });
  if (uniform && !fallthrough.empty()) {
    os << kIndent << kIndent << "TRUE : " << fallthrough[0] << ";\n";
  } else {
    for (std::size_t i = 0; i < fallthrough.size(); ++i)
      if (fallthrough[i] != b.control_states[i])
        os << kIndent << kIndent << "controlState = " << b.control_states[i] << " : " << fallthrough[i] << ";\n";
    os << kIndent << kIndent << "TRUE : controlState;\n";
  }
  os << kIndent << "esac;\n";
}

enum LPrec { kLImplies = 1, kLOr, kLAnd };

bool is_primary_atom(const LtlFormula& f) {
  return f.kind == LtlFormula::Kind::Atom && prec_of(*f.atom) >= kPostfix;
}

void print_ltl(std::ostream& os, const LtlFormula& f);

/// Operand of a unary operator: bare when primary or itself unary.
void print_ltl_operand(std::ostream& os, const LtlFormula& f) {
  using K = LtlFormula::Kind;
  const bool bare = is_primary_atom(f) || f.kind == K::Not || f.kind == K::Globally || f.kind == K::Eventually ||
                    f.kind == K::Next;
  if (!bare) os << '(';
  print_ltl(os, f);
  if (!bare) os << ')';
}

int ltl_prec(LtlFormula::Kind k) {
  using K = LtlFormula::Kind;
  return k == K::Implies ? kLImplies : k == K::Or ? kLOr : k == K::And ? kLAnd : 0;
}

/// Operand of a binary operator: atoms, negations, tighter connectives and
/// same-operator chains stay bare.
void print_ltl_side(std::ostream& os, const LtlFormula& f, LtlFormula::Kind parent) {
  using K = LtlFormula::Kind;
  const int p = ltl_prec(f.kind);
  const bool chain = f.kind == parent && (parent == K::And || parent == K::Or);
  const bool tighter = p > 0 && parent != K::Until && p > ltl_prec(parent);
  const bool bare = chain || tighter || is_primary_atom(f) || f.kind == K::Not;
  if (!bare) os << '(';
  print_ltl(os, f);
  if (!bare) os << ')';
}

void print_ltl(std::ostream& os, const LtlFormula& f) {
  using K = LtlFormula::Kind;
  switch (f.kind) {
    case K::Atom:
      print(os, *f.atom);
      return;
    case K::Active:
      throw UnsupportedAtom("active(" + f.instance +
                            ") has no SMV counterpart; refer to the instance's boolean `active` local instead");
    case K::Connected:
      throw UnsupportedAtom("connected(" + f.first.instance + "." + f.first.port + ", " + f.second.instance + "." +
                            f.second.port + ") has no SMV counterpart; wiring is fixed in the main module");
    case K::Not:
      os << '!';
      print_ltl_operand(os, *f.operands[0]);
      return;
    case K::Globally:
    case K::Eventually:
    case K::Next:
      os << (f.kind == K::Globally ? "G " : f.kind == K::Eventually ? "F " : "X ");
      print_ltl_operand(os, *f.operands[0]);
      return;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Until: {
      const char* op = f.kind == K::And ? " & " : f.kind == K::Or ? " | " : f.kind == K::Implies ? " -> " : " U ";
      print_ltl_side(os, *f.operands[0], f.kind);
      os << op;
      print_ltl_side(os, *f.operands[1], f.kind);
      return;
    }
  }
}

}  // namespace

std::string to_smv(const Expr& e) { return render(e); }

std::string to_smv(const LtlFormula& f) {
  std::ostringstream os;
  print_ltl(os, f);
  return os.str();
}

std::string to_smv(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Bool: return "boolean";
    case Sort::Kind::Int: return std::to_string(s.lo) + ".." + std::to_string(s.hi);
    case Sort::Kind::Enum: {
      std::string out = "{";
      for (std::size_t i = 0; i < s.labels.size(); ++i) out += (i ? ", " : "") + s.labels[i];
      return out + "}";
    }
    case Sort::Kind::Array:
      if (!s.element) throw UnsupportedSort("array sort without element sort");
      return "array " + std::to_string(s.lo) + ".." + std::to_string(s.hi) + " of " + to_smv(*s.element);
  }
  throw UnsupportedSort("unknown sort");
}

std::string module_name(const std::string& interface_name) {
  std::string out = interface_name;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string emit_module(const InterfaceSpec& iface, const BehaviorSpec& b) {
  std::ostringstream os;
  os << "MODULE " << module_name(iface.name);
  const auto inputs = iface.ports_of(PortKind::Input);
  if (!inputs.empty()) {
    os << " (";
    for (std::size_t i = 0; i < inputs.size(); ++i) os << (i ? ", " : "") << inputs[i]->name;
    os << ')';
  }
  os << "\nVAR\n";
  os << kIndent << "controlState : {";
  for (std::size_t i = 0; i < b.control_states.size(); ++i) os << (i ? ", " : "") << b.control_states[i];
  os << "};\n";
  for (const PortDecl* p : iface.ports_of(PortKind::Local)) os << kIndent << p->name << " : " << to_smv(p->sort) << ";\n";

  os << "ASSIGN\n";
  os << kIndent << "init(controlState) := " << b.initial_control << ";\n";
  write_assignments(os, "init", iface, b.local_init);
  write_control_next(os, b);
  write_assignments(os, "next", iface, b.local_updates);

  if (!b.defines.empty()) {
    os << "DEFINE\n";
    for (const auto& d : b.defines) {
      os << kIndent << d.name << " := ";
      write_rhs(os, *d.value, kIndent);
    }
  }
  return os.str();
}

std::string emit_main(const PatternSpec& spec) {
  const auto& a = spec.architecture;
  std::ostringstream os;
  os << "MODULE main\nVAR\n";
  for (const auto& inst : a.instances) {
    os << kIndent << inst.name << " : " << module_name(inst.interface);
    const InterfaceSpec* iface = spec.find_interface(inst.interface);
    if (!iface) throw std::invalid_argument("instance '" + inst.name + "' has unknown interface");
    const auto inputs = iface->ports_of(PortKind::Input);
    if (!inputs.empty()) {
      os << '(';
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Binding* bnd = inst.find_binding(inputs[i]->name);
        if (!bnd) throw std::invalid_argument("instance '" + inst.name + "' leaves '" + inputs[i]->name + "' unbound");
        os << (i ? ", " : "") << render(*bnd->value);
      }
      os << ')';
    }
    os << ";\n";
  }
  for (const auto& v : a.env_vars) os << kIndent << v.name << " : " << to_smv(v.sort) << ";\n";
  if (!a.env_vars.empty()) {
    os << "ASSIGN\n";
    for (const auto& v : a.env_vars) {
      if (v.init) {
        os << kIndent << "init(" << v.name << ") := ";
        write_rhs(os, *v.init, kIndent);
      }
      if (v.next) {
        os << kIndent << "next(" << v.name << ") := ";
        write_rhs(os, *v.next, kIndent);
      }
    }
  }
  if (!a.shared_defs.empty()) {
    os << "DEFINE\n";
    for (const auto& d : a.shared_defs) {
      os << kIndent << d.name << " := ";
      write_rhs(os, *d.value, kIndent);
    }
  }
  return os.str();
}

std::string emit_ltlspecs(const std::vector<Property>& properties) {
  std::ostringstream os;
  for (const auto& p : properties) os << "-- " << p.name << "\nLTLSPEC " << to_smv(*p.formula) << "\n";
  return os.str();
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SmvDocument emit_file(const PatternSpec& spec) {
  if (has_errors(validate_spec(spec))) throw std::invalid_argument("spec has validation errors");
  SmvDocument doc;
  for (const auto& iface : spec.interfaces) {
    const BehaviorSpec* b = spec.find_behavior(iface.name);
    if (!b) throw std::invalid_argument("interface '" + iface.name + "' has no behavior");
    doc.modules.push_back(emit_module(iface, *b));
  }
  doc.modules.push_back(emit_main(spec));
  if (!spec.properties.empty()) doc.modules.push_back(emit_ltlspecs(spec.properties));

  std::string body;
  for (std::size_t i = 0; i < doc.modules.size(); ++i) {
    if (i) body += '\n';
    body += doc.modules[i];
  }
  doc.header = "-- pattern: " + spec.name + "\n-- generator: " + kToolVersion + "\n-- content-hash: fnv1a64:" +
               content_hash(body) + "\n\n";
  doc.rendered = doc.header + body;
  return doc;
}

}  // namespace archpat
