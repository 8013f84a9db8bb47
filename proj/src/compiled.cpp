#include "compiled.hpp"

#include <algorithm>
#include <map>

#include "archpat/parser.hpp"

namespace archpat {

struct Workspace::Impl {
  std::vector<std::int64_t> frame;
  std::vector<std::vector<std::int64_t>> values;  // per choice point
  std::vector<std::size_t> points;                // slots of multi-valued choice points
  std::vector<std::int64_t> scratch;
};

Workspace::Workspace() : impl_(std::make_unique<Impl>()) {}
Workspace::~Workspace() = default;
Workspace::Workspace(Workspace&&) noexcept = default;
Workspace& Workspace::operator=(Workspace&&) noexcept = default;

namespace detail {

bool SortCheck::ok(std::int64_t v) const {
  switch (kind) {
    case Kind::None: return true;
    case Kind::Range: return v >= lo && v <= hi;
    case Kind::Labels: return std::find(labels.begin(), labels.end(), v) != labels.end();
  }
  return true;
}

namespace {

/// Compiled shape of an expression: one node per scalar element.
struct CV {
  std::vector<int> elems;
  bool array = false;
  std::int64_t lo = 0;
};

class Compiler {
 public:
  explicit Compiler(CompiledSystem& sys) : sys_(sys), scope_(sys.spec) {}

  void run() {
    const auto& spec = sys_.spec;
    const auto& arch = spec.architecture;
    // Register every signal, then compile them all; dependencies are
    // compiled first, which fixes the evaluation order.
    for (std::size_t k = 0; k < arch.instances.size(); ++k) {
      const int ki = static_cast<int>(k);
      const auto* iface = scope_.interface_of(ki);
      const auto* b = scope_.behavior_of(ki);
      for (const auto* p : iface->ports_of(PortKind::Input)) declare(ki, p->name);
      for (const auto& d : b->defines) declare(ki, d.name);
    }
    for (const auto& d : arch.shared_defs) declare(-1, d.name);
    for (std::size_t i = 0; i < pending_.size(); ++i) ensure(static_cast<int>(i));
    for (int id : order_) {
      const auto& p = pending_[static_cast<std::size_t>(id)];
      sys_.signal_index[{p.instance, p.name}] = sys_.signals.size();
      sys_.signals.push_back(p.code);
    }

    for (std::size_t k = 0; k < arch.instances.size(); ++k) compile_instance(static_cast<int>(k));
    for (const auto& env : arch.env_vars) {
      const auto* var = sys_.layout.find(env.name);
      add_targets(sys_.env_inits, var->first_slot, env.sort, env.name, *env.init, Ctx{-1, false});
      add_targets(sys_.env_nexts, var->first_slot, env.sort, env.name, *env.next, Ctx{-1, false});
    }
  }

  CV compile_atom(const LtlFormula& f) {
    switch (f.kind) {
      case LtlFormula::Kind::Atom: return compile(*f.atom, Ctx{-1, false});
      case LtlFormula::Kind::Active: {
        int k = scope_.instance_index(f.instance);
        if (k < 0) throw std::invalid_argument("unknown instance '" + f.instance + "'");
        const auto* iface = scope_.interface_of(k);
        const PortDecl* flag = iface->find_port(kActivationFlag);
        if (!flag || flag->kind != PortKind::Local || flag->sort.kind != Sort::Kind::Bool) return scalar(constant(1));
        const auto* var = sys_.layout.find(f.instance + "." + kActivationFlag);
        return scalar(slot(var->first_slot));
      }
      case LtlFormula::Kind::Connected:
        return scalar(constant(statically_connected(sys_.spec, f.first, f.second) ? 1 : 0));
      default: throw std::invalid_argument("not an atomic formula");
    }
  }

 private:
  struct Ctx {
    int instance;  // -1: architecture namespace
    bool init;     // input ports read their (constant) bindings directly
  };

  struct Pending {
    int instance;
    std::string name;
    int state = 0;  // 0 new, 1 compiling, 2 done
    SignalCode code;
  };

  CompiledSystem& sys_;
  Scope scope_;
  std::vector<Pending> pending_;
  std::map<std::pair<int, std::string>, int> ids_;
  std::vector<int> order_;

  int declare(int k, const std::string& name) {
    auto [it, fresh] = ids_.emplace(std::make_pair(k, name), static_cast<int>(pending_.size()));
    if (fresh) pending_.push_back(Pending{k, name, 0, {}});
    return it->second;
  }

  const Instance& inst(int k) const { return sys_.spec.architecture.instances[static_cast<std::size_t>(k)]; }

  // --- node construction --------------------------------------------------

  int add(Node n) {
    sys_.nodes.push_back(n);
    return static_cast<int>(sys_.nodes.size()) - 1;
  }
  int constant(std::int64_t v) {
    Node n;
    n.op = Op::Const;
    n.imm = v;
    return add(n);
  }
  int slot(std::size_t s) {
    Node n;
    n.op = Op::Slot;
    n.imm = static_cast<std::int64_t>(s);
    return add(n);
  }
  int unary(Op op, int a) {
    Node n;
    n.op = op;
    n.a = a;
    return add(n);
  }
  int binary(Op op, int a, int b, int site = -1) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.site = site;
    return add(n);
  }
  int site(const Expr& e) {
    sys_.sites.push_back(to_dsl(e));
    return static_cast<int>(sys_.sites.size()) - 1;
  }
  static CV scalar(int node) { return CV{{node}, false, 0}; }

  // --- signals ------------------------------------------------------------

  /// Compiles a signal (and its dependencies) on first use.
  const SignalCode& ensure(int id) {
    Pending& p = pending_[static_cast<std::size_t>(id)];
    if (p.state == 2) return p.code;
    if (p.state == 1) throw std::logic_error("combinational cycle through '" + p.name + "'");
    p.state = 1;
    SignalCode code;
    const std::string name = p.name;
    const int k = p.instance;
    CV cv;
    if (k < 0) {
      code.name = name;
      const Definition* def = nullptr;
      for (const auto& d : sys_.spec.architecture.shared_defs)
        if (d.name == name) def = &d;
      cv = compile(*def->value, Ctx{-1, false});
    } else {
      code.name = inst(k).name + "." + name;
      code.instance = k;
      const auto* iface = scope_.interface_of(k);
      const PortDecl* port = iface->find_port(name);
      if (port && port->kind == PortKind::Input) {
        code.input = true;
        code.sort = &port->sort;
        cv = compile(*inst(k).find_binding(name)->value, Ctx{-1, false});
      } else {
        const auto* b = scope_.behavior_of(k);
        const Definition* def = nullptr;
        for (const auto& d : b->defines)
          if (d.name == name) def = &d;
        if (port) {
          code.output = true;
          code.sort = &port->sort;
        }
        cv = compile(*def->value, Ctx{k, false});
      }
    }
    code.elements = cv.elems;
    code.array = cv.array;
    code.lo = code.sort && code.sort->kind == Sort::Kind::Array ? code.sort->lo : cv.lo;
    if (code.sort) {
      const Sort& elem = code.sort->kind == Sort::Kind::Array ? *code.sort->element : *code.sort;
      code.checks.assign(code.elements.size(), check_for(elem));
    }
    code.offset = sys_.frame_size;
    sys_.frame_size += code.elements.size();
    Pending& done = pending_[static_cast<std::size_t>(id)];
    done.code = std::move(code);
    done.state = 2;
    order_.push_back(id);
    return done.code;
  }

  CV signal_ref(int k, const std::string& name) {
    const SignalCode* found = nullptr;
    if (auto done = sys_.signal_index.find({k, name}); done != sys_.signal_index.end()) {
      found = &sys_.signals[done->second];
    } else {
      auto it = ids_.find({k, name});
      if (it == ids_.end()) throw std::logic_error("unregistered signal '" + name + "'");
      found = &ensure(it->second);
    }
    const SignalCode& code = *found;
    CV cv;
    cv.array = code.array;
    cv.lo = code.lo;
    for (std::size_t j = 0; j < code.elements.size(); ++j) {
      Node n;
      n.op = Op::Signal;
      n.imm = static_cast<std::int64_t>(code.offset + j);
      cv.elems.push_back(add(n));
    }
    return cv;
  }

  CV stored(const std::string& var) {
    const auto* v = sys_.layout.find(var);
    if (!v) throw std::logic_error("unknown stored variable '" + var + "'");
    CV cv;
    if (v->sort.kind == Sort::Kind::Array) {
      cv.array = true;
      cv.lo = v->sort.lo;
      for (std::int64_t j = 0; j < v->sort.length(); ++j) cv.elems.push_back(slot(v->first_slot + static_cast<std::size_t>(j)));
    } else {
      cv.elems.push_back(slot(v->first_slot));
    }
    return cv;
  }

  SortCheck check_for(const Sort& sort) const {
    SortCheck c;
    if (sort.kind == Sort::Kind::Int) {
      c.kind = SortCheck::Kind::Range;
      c.lo = sort.lo;
      c.hi = sort.hi;
    } else if (sort.kind == Sort::Kind::Enum) {
      c.kind = SortCheck::Kind::Labels;
      for (const auto& l : sort.labels) c.labels.push_back(sys_.layout.label_id(l));
    }
    return c;
  }

  // --- expressions --------------------------------------------------------

  CV member(int k, const NameInfo& info, const std::string& name, const Ctx& ctx) {
    if (info.kind == NameKind::Control) return stored(inst(k).name + "." + kControlState);
    switch (info.port->kind) {
      case PortKind::Local: return stored(inst(k).name + "." + name);
      case PortKind::Input:
        if (ctx.init) return compile(*inst(k).find_binding(name)->value, Ctx{-1, true});
        return signal_ref(k, name);
      case PortKind::Output: return signal_ref(k, name);
    }
    return {};
  }

  CV ref(const Expr& e, const Ctx& ctx) {
    if (e.instance) {
      NameInfo info = scope_.lookup_member(*e.instance, e.name);
      return member(info.instance, info, e.name, ctx);
    }
    if (ctx.instance >= 0) {
      const int k = ctx.instance;
      NameInfo info = scope_.lookup_in_behavior(*scope_.interface_of(k), scope_.behavior_of(k), e.name);
      switch (info.kind) {
        case NameKind::Port:
        case NameKind::Control: return member(k, info, e.name, ctx);
        case NameKind::Define: return signal_ref(k, e.name);
        case NameKind::Label: return scalar(constant(sys_.layout.label_id(e.name)));
        default: break;
      }
      throw std::logic_error("unresolved name '" + e.name + "'");
    }
    NameInfo info = scope_.lookup_global(e.name);
    switch (info.kind) {
      case NameKind::Env: return stored(e.name);
      case NameKind::Shared: return signal_ref(-1, e.name);
      case NameKind::Label: return scalar(constant(sys_.layout.label_id(e.name)));
      default: break;
    }
    throw std::logic_error("unresolved name '" + e.name + "'");
  }

  static Op op_of(BinaryOp op) {
    switch (op) {
      case BinaryOp::Add: return Op::Add;
      case BinaryOp::Sub: return Op::Sub;
      case BinaryOp::Mul: return Op::Mul;
      case BinaryOp::Mod: return Op::Mod;
      case BinaryOp::Eq: return Op::Eq;
      case BinaryOp::Ne: return Op::Ne;
      case BinaryOp::Lt: return Op::Lt;
      case BinaryOp::Le: return Op::Le;
      case BinaryOp::Gt: return Op::Gt;
      case BinaryOp::Ge: return Op::Ge;
      case BinaryOp::And: return Op::And;
      case BinaryOp::Or: return Op::Or;
    }
    return Op::Add;
  }

  CV compile(const Expr& e, const Ctx& ctx) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: return scalar(constant(e.bool_value ? 1 : 0));
      case Expr::Kind::IntLit: return scalar(constant(e.int_value));
      case Expr::Kind::ArrayLit: {
        CV cv;
        cv.array = true;
        for (const auto& op : e.operands) cv.elems.push_back(compile(*op, ctx).elems.at(0));
        return cv;
      }
      case Expr::Kind::Ref: return ref(e, ctx);
      case Expr::Kind::Index: {
        CV arr = compile(*e.operands[0], ctx);
        int idx = compile(*e.operands[1], ctx).elems.at(0);
        const Node& in = sys_.nodes[static_cast<std::size_t>(idx)];
        if (in.op == Op::Const) {
          const std::int64_t pos = in.imm - arr.lo;
          if (pos >= 0 && pos < static_cast<std::int64_t>(arr.elems.size()))
            return scalar(arr.elems[static_cast<std::size_t>(pos)]);
        }
        Node n;
        n.op = Op::Select;
        n.a = idx;
        n.imm = arr.lo;
        n.first = static_cast<std::uint32_t>(sys_.args.size());
        n.count = static_cast<std::uint32_t>(arr.elems.size());
        n.site = site(e);
        for (int x : arr.elems) sys_.args.push_back(x);
        return scalar(add(n));
      }
      case Expr::Kind::Unary: {
        int a = compile(*e.operands[0], ctx).elems.at(0);
        return scalar(unary(e.unary_op == UnaryOp::Not ? Op::Not : Op::Neg, a));
      }
      case Expr::Kind::Binary: {
        CV a = compile(*e.operands[0], ctx);
        CV b = compile(*e.operands[1], ctx);
        if ((e.binary_op == BinaryOp::Eq || e.binary_op == BinaryOp::Ne) && a.elems.size() != 1) {
          int acc = -1;
          for (std::size_t j = 0; j < a.elems.size(); ++j) {
            int eq = binary(Op::Eq, a.elems[j], b.elems.at(j));
            acc = acc < 0 ? eq : binary(Op::And, acc, eq);
          }
          return scalar(e.binary_op == BinaryOp::Eq ? acc : unary(Op::Not, acc));
        }
        return scalar(binary(op_of(e.binary_op), a.elems.at(0), b.elems.at(0),
                             e.binary_op == BinaryOp::Mod ? site(e) : -1));
      }
      case Expr::Kind::Case: {
        std::vector<int> conds;
        std::vector<CV> values;
        for (const auto& br : e.branches) {
          conds.push_back(compile(*br.condition, ctx).elems.at(0));
          values.push_back(compile(*br.value, ctx));
        }
        CV cv;
        cv.array = values.front().array;
        cv.lo = values.front().lo;
        const int s = site(e);
        for (std::size_t j = 0; j < values.front().elems.size(); ++j) {
          Node n;
          n.op = Op::Case;
          n.first = static_cast<std::uint32_t>(sys_.args.size());
          n.count = static_cast<std::uint32_t>(conds.size());
          n.site = s;
          for (std::size_t i = 0; i < conds.size(); ++i) {
            sys_.args.push_back(conds[i]);
            sys_.args.push_back(values[i].elems.at(j));
          }
          cv.elems.push_back(add(n));
        }
        return cv;
      }
      case Expr::Kind::SetChoice: throw std::logic_error("set choice outside init/next: " + to_dsl(e));
    }
    return {};
  }

  // --- choices and targets -----------------------------------------------

  std::vector<Choice> compile_choice(const Expr& e, std::size_t width, const Ctx& ctx) {
    std::vector<Choice> out(width);
    if (e.kind == Expr::Kind::SetChoice) {
      Choice c;
      c.kind = Choice::Kind::Set;
      for (const auto& op : e.operands) c.set.push_back(compile(*op, ctx).elems.at(0));
      out.assign(1, std::move(c));
      return out;
    }
    if (e.kind == Expr::Kind::Case) {
      for (auto& c : out) c.kind = Choice::Kind::Case;
      for (const auto& br : e.branches) {
        int cond = compile(*br.condition, ctx).elems.at(0);
        auto values = compile_choice(*br.value, width, ctx);
        for (std::size_t j = 0; j < width; ++j) out[j].branches.emplace_back(cond, std::move(values[j]));
      }
      const int s = site(e);
      for (auto& c : out) c.node = s;  // site of the case, for MissingBranch
      return out;
    }
    CV cv = compile(e, ctx);
    for (std::size_t j = 0; j < width; ++j) {
      out[j].kind = Choice::Kind::Plain;
      out[j].node = cv.elems.at(j);
    }
    return out;
  }

  void add_targets(std::vector<Target>& list, std::size_t first_slot, const Sort& sort, const std::string& name,
                   const Expr& value, const Ctx& ctx) {
    const bool array = sort.kind == Sort::Kind::Array;
    const std::size_t width = static_cast<std::size_t>(sort.length());
    auto choices = compile_choice(value, width, ctx);
    const Sort& elem = array ? *sort.element : sort;
    for (std::size_t j = 0; j < width; ++j) {
      Target t;
      t.slot = first_slot + j;
      t.choice = std::move(choices[j]);
      t.check = check_for(elem);
      t.where = array ? name + "[" + std::to_string(sort.lo + static_cast<std::int64_t>(j)) + "]" : name;
      list.push_back(std::move(t));
    }
  }

  void add_assignment(std::vector<Target>& list, int k, const Assignment& a, bool init) {
    const auto* iface = scope_.interface_of(k);
    const PortDecl* port = iface->find_port(a.port);
    const std::string var = inst(k).name + "." + a.port;
    const auto* v = sys_.layout.find(var);
    Ctx ctx{k, init};
    if (a.element) {
      const std::size_t pos = static_cast<std::size_t>(*a.element - port->sort.lo);
      add_targets(list, v->first_slot + pos, *port->sort.element, var + "[" + std::to_string(*a.element) + "]", *a.value,
                  ctx);
    } else {
      add_targets(list, v->first_slot, port->sort, var, *a.value, ctx);
    }
  }

  void compile_instance(int k) {
    InstanceCode code;
    const auto* b = scope_.behavior_of(k);
    code.name = inst(k).name;
    code.control_slot = sys_.layout.find(inst(k).name + "." + kControlState)->first_slot;
    code.initial = sys_.layout.label_id(b->initial_control);
    for (const auto& s : b->control_states) {
      TransitionCode tc;
      tc.from = sys_.layout.label_id(s);
      for (const auto& t : b->transitions)
        if (t.from == s) tc.guarded.emplace_back(compile(*t.guard, Ctx{k, false}).elems.at(0), sys_.layout.label_id(t.to));
      code.transitions.push_back(std::move(tc));
    }
    for (const auto& a : b->local_init) add_assignment(code.inits, k, a, true);
    for (const auto& a : b->local_updates) add_assignment(code.updates, k, a, false);
    sys_.instances.push_back(std::move(code));
  }
};

[[noreturn]] void raise(EvalError::Kind kind, const std::string& where, const std::string& msg) {
  throw EvalError(kind, where, where + ": " + msg);
}

}  // namespace

CompiledSystem::CompiledSystem(const PatternSpec& s) : spec(s), layout(s) {}

std::int64_t CompiledSystem::eval(int node, const std::int32_t* slots, const std::int64_t* frame) const {
  const Node& n = nodes[static_cast<std::size_t>(node)];
  switch (n.op) {
    case Op::Const: return n.imm;
    case Op::Slot: return slots[n.imm];
    case Op::Signal: return frame[n.imm];
    case Op::Not: return eval(n.a, slots, frame) ? 0 : 1;
    case Op::Neg: return -eval(n.a, slots, frame);
    case Op::Add: return eval(n.a, slots, frame) + eval(n.b, slots, frame);
    case Op::Sub: return eval(n.a, slots, frame) - eval(n.b, slots, frame);
    case Op::Mul: return eval(n.a, slots, frame) * eval(n.b, slots, frame);
    case Op::Mod: {
      const std::int64_t a = eval(n.a, slots, frame);
      const std::int64_t b = eval(n.b, slots, frame);
      if (b == 0) raise(EvalError::Kind::Range, sites[static_cast<std::size_t>(n.site)], "modulus is zero");
      return a % b;
    }
    case Op::Eq: return eval(n.a, slots, frame) == eval(n.b, slots, frame);
    case Op::Ne: return eval(n.a, slots, frame) != eval(n.b, slots, frame);
    case Op::Lt: return eval(n.a, slots, frame) < eval(n.b, slots, frame);
    case Op::Le: return eval(n.a, slots, frame) <= eval(n.b, slots, frame);
    case Op::Gt: return eval(n.a, slots, frame) > eval(n.b, slots, frame);
    case Op::Ge: return eval(n.a, slots, frame) >= eval(n.b, slots, frame);
    case Op::And: return eval(n.a, slots, frame) && eval(n.b, slots, frame);
    case Op::Or: return eval(n.a, slots, frame) || eval(n.b, slots, frame);
    case Op::Case:
      for (std::uint32_t i = 0; i < n.count; ++i)
        if (eval(args[n.first + 2 * i], slots, frame)) return eval(args[n.first + 2 * i + 1], slots, frame);
      raise(EvalError::Kind::MissingBranch, sites[static_cast<std::size_t>(n.site)], "no case branch is true");
    case Op::Select: {
      const std::int64_t idx = eval(n.a, slots, frame);
      const std::int64_t pos = idx - n.imm;
      if (pos < 0 || pos >= static_cast<std::int64_t>(n.count))
        raise(EvalError::Kind::Range, sites[static_cast<std::size_t>(n.site)],
              "array index " + std::to_string(idx) + " out of bounds");
      return eval(args[n.first + static_cast<std::uint32_t>(pos)], slots, frame);
    }
  }
  return 0;
}

void CompiledSystem::compute_signals(const GlobalState& s, std::vector<std::int64_t>& frame) const {
  frame.resize(frame_size);
  const std::int32_t* slots = s.slots.data();
  for (const auto& sig : signals) {
    for (std::size_t j = 0; j < sig.elements.size(); ++j) {
      std::int64_t v;
      try {
        v = eval(sig.elements[j], slots, frame.data());
      } catch (const EvalError& e) {
        throw EvalError(e.kind(), sig.name, "while computing " + sig.name + ": " + e.what());
      }
      if (!sig.checks.empty() && !sig.checks[j].ok(v)) {
        std::string where = sig.array ? sig.name + "[" + std::to_string(sig.lo + static_cast<std::int64_t>(j)) + "]" : sig.name;
        throw EvalError(EvalError::Kind::Range, where,
                        where + ": value " + std::to_string(v) + " leaves " + to_string(*sig.sort));
      }
      frame[sig.offset + j] = v;
    }
  }
}

void CompiledSystem::choose(const Choice& c, const std::int32_t* slots, const std::int64_t* frame,
                            std::vector<std::int64_t>& out) const {
  switch (c.kind) {
    case Choice::Kind::Plain: out.push_back(eval(c.node, slots, frame)); return;
    case Choice::Kind::Set:
      for (int n : c.set) {
        std::int64_t v = eval(n, slots, frame);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
      }
      return;
    case Choice::Kind::Case:
      for (const auto& [cond, value] : c.branches)
        if (eval(cond, slots, frame)) return choose(value, slots, frame, out);
      raise(EvalError::Kind::MissingBranch, sites[static_cast<std::size_t>(c.node)], "no case branch is true");
  }
}

std::vector<std::int64_t>& CompiledSystem::frame_of(Workspace& ws) { return ws.impl_->frame; }

namespace {

/// Evaluates every target into `values`; single-valued targets are written
/// to `base` directly and multi-valued ones are returned as choice points.
template <typename Sys>
void evaluate_targets(const Sys& sys, const std::vector<Target>& targets, const std::int32_t* slots,
                      const std::int64_t* frame, GlobalState& base, std::vector<std::vector<std::int64_t>>& values,
                      std::vector<std::size_t>& points, std::size_t& used) {
  for (const auto& t : targets) {
    if (used == values.size()) values.emplace_back();
    auto& vals = values[used];
    vals.clear();
    try {
      sys.choose(t.choice, slots, frame, vals);
    } catch (const EvalError& e) {
      throw EvalError(e.kind(), t.where, "while computing next " + t.where + ": " + e.what());
    }
    for (std::int64_t v : vals)
      if (!t.check.ok(v))
        throw EvalError(EvalError::Kind::Range, t.where, t.where + ": value " + std::to_string(v) + " leaves its sort");
    if (vals.size() == 1) {
      base.slots[t.slot] = static_cast<std::int32_t>(vals[0]);
    } else {
      points.push_back(t.slot);
      ++used;
    }
  }
}

void cartesian(const GlobalState& base, const std::vector<std::vector<std::int64_t>>& values,
               const std::vector<std::size_t>& points, std::vector<GlobalState>& out) {
  if (points.empty()) {
    out.push_back(base);
    return;
  }
  std::vector<std::size_t> pick(points.size(), 0);
  GlobalState s = base;
  while (true) {
    for (std::size_t i = 0; i < points.size(); ++i) s.slots[points[i]] = static_cast<std::int32_t>(values[i][pick[i]]);
    out.push_back(s);
    std::size_t i = points.size();
    while (true) {
      if (i == 0) return;
      --i;
      if (++pick[i] < values[i].size()) break;
      pick[i] = 0;
    }
  }
}

}  // namespace

void CompiledSystem::step(const GlobalState& s, const std::vector<std::int64_t>& frame, Workspace& ws,
                          std::vector<GlobalState>& out) const {
  auto& w = *ws.impl_;
  out.clear();
  const std::int32_t* slots = s.slots.data();
  GlobalState base = s;
  for (const auto& ic : instances) {
    const std::int64_t current = slots[ic.control_slot];
    for (const auto& tc : ic.transitions) {
      if (tc.from != current) continue;
      for (const auto& [guard, target] : tc.guarded) {
        bool enabled;
        try {
          enabled = eval(guard, slots, frame.data()) != 0;
        } catch (const EvalError& e) {
          throw EvalError(e.kind(), ic.name, "while evaluating a transition guard of " + ic.name + ": " + e.what());
        }
        if (enabled) {
          base.slots[ic.control_slot] = static_cast<std::int32_t>(target);
          break;
        }
      }
      break;
    }
  }
  w.points.clear();
  std::size_t used = 0;
  // Choice values must be kept separate from points; points index `values`.
  std::vector<std::size_t>& points = w.points;
  for (const auto& ic : instances) evaluate_targets(*this, ic.updates, slots, frame.data(), base, w.values, points, used);
  evaluate_targets(*this, env_nexts, slots, frame.data(), base, w.values, points, used);
  cartesian(base, w.values, points, out);
}

Value CompiledSystem::signal_value(const SignalCode& sig, const std::vector<std::int64_t>& frame) const {
  auto scalar = [&](const Sort* sort, std::int64_t raw) {
    if (sort && sort->kind == Sort::Kind::Bool) return Value::boolean(raw != 0);
    if (sort && sort->kind == Sort::Kind::Enum) return Value::enumeration(layout.label_name(static_cast<std::int32_t>(raw)));
    return Value::integer(raw);
  };
  const Sort* elem = sig.sort && sig.sort->kind == Sort::Kind::Array ? sig.sort->element.get() : sig.sort;
  if (sig.array) {
    std::vector<Value> vals;
    for (std::size_t j = 0; j < sig.elements.size(); ++j) vals.push_back(scalar(elem, frame[sig.offset + j]));
    return Value::array(std::move(vals));
  }
  return scalar(elem, frame[sig.offset]);
}

}  // namespace detail

// --- System ----------------------------------------------------------------

System::System(const PatternSpec& spec) {
  auto diags = validate_spec(spec);
  if (has_errors(diags)) {
    std::string msg = "spec has validation errors";
    for (const auto& d : diags)
      if (d.severity == Severity::Error) {
        msg += ": " + d.message;
        break;
      }
    throw std::invalid_argument(msg);
  }
  impl_ = std::make_unique<detail::CompiledSystem>(spec);
  detail::Compiler(*impl_).run();
}

System::~System() = default;

const PatternSpec& System::spec() const { return impl_->spec; }
const StateLayout& System::layout() const { return impl_->layout; }

std::vector<GlobalState> System::initial_states() const {
  const auto& sys = *impl_;
  GlobalState base;
  base.slots.assign(sys.layout.slot_count(), 0);
  for (const auto& ic : sys.instances) base.slots[ic.control_slot] = static_cast<std::int32_t>(ic.initial);
  std::vector<std::vector<std::int64_t>> values;
  std::vector<std::size_t> points;
  std::size_t used = 0;
  const std::int64_t* no_frame = nullptr;
  for (const auto& ic : sys.instances)
    detail::evaluate_targets(sys, ic.inits, base.slots.data(), no_frame, base, values, points, used);
  detail::evaluate_targets(sys, sys.env_inits, base.slots.data(), no_frame, base, values, points, used);
  std::vector<GlobalState> out;
  detail::cartesian(base, values, points, out);
  return out;
}

void System::successors(const GlobalState& s, Workspace& ws, std::vector<GlobalState>& out) const {
  auto& frame = detail::CompiledSystem::frame_of(ws);
  impl_->compute_signals(s, frame);
  impl_->step(s, frame, ws, out);
}

StepLabel System::label_at(const GlobalState& s) const {
  std::vector<std::int64_t> frame;
  impl_->compute_signals(s, frame);
  StepLabel label;
  for (const auto& sig : impl_->signals) {
    if (sig.input) label.inputs[sig.name] = impl_->signal_value(sig, frame);
    if (sig.output) label.outputs[sig.name] = impl_->signal_value(sig, frame);
  }
  return label;
}

std::vector<std::pair<StepLabel, GlobalState>> System::labeled_successors(const GlobalState& s) const {
  StepLabel label = label_at(s);
  Workspace ws;
  std::vector<GlobalState> next;
  successors(s, ws, next);
  std::vector<std::pair<StepLabel, GlobalState>> out;
  out.reserve(next.size());
  for (auto& n : next) out.emplace_back(label, std::move(n));
  return out;
}

AtomSet System::compile_atoms(const std::vector<LtlPtr>& atoms) const {
  if (atoms.size() > 64) throw std::invalid_argument("more than 64 distinct atoms in one formula");
  AtomSet set;
  set.count_ = atoms.size();
  // Compilation appends nodes; the node pool is logically const for callers.
  auto& sys = const_cast<detail::CompiledSystem&>(*impl_);
  detail::Compiler compiler(sys);
  for (const auto& a : atoms) set.roots_.push_back(compiler.compile_atom(*a).elems.at(0));
  return set;
}

std::uint64_t System::atoms_at(const GlobalState& s, const AtomSet& atoms, Workspace& ws) const {
  auto& frame = detail::CompiledSystem::frame_of(ws);
  impl_->compute_signals(s, frame);
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < atoms.roots_.size(); ++i)
    if (impl_->eval(atoms.roots_[i], s.slots.data(), frame.data())) mask |= std::uint64_t{1} << i;
  return mask;
}

std::uint64_t System::expand(const GlobalState& s, const AtomSet& atoms, Workspace& ws,
                             std::vector<GlobalState>& out) const {
  auto& frame = detail::CompiledSystem::frame_of(ws);
  impl_->compute_signals(s, frame);
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < atoms.roots_.size(); ++i)
    if (impl_->eval(atoms.roots_[i], s.slots.data(), frame.data())) mask |= std::uint64_t{1} << i;
  impl_->step(s, frame, ws, out);
  return mask;
}

// --- convenience -------------------------------------------------------------

std::vector<GlobalState> initial_states(const PatternSpec& spec) { return System(spec).initial_states(); }

std::vector<std::pair<StepLabel, GlobalState>> successors(const PatternSpec& spec, const GlobalState& s) {
  return System(spec).labeled_successors(s);
}

}  // namespace archpat
