#include "certivex/corec.hpp"

#include <algorithm>
#include <sstream>

#include "certivex/mutation.hpp"

namespace certivex::core {

std::string_view name(Unop op) { return op == Unop::Neg ? "Neg" : "Not"; }

std::string_view name(Binop op) {
  switch (op) {
    case Binop::Add: return "Add";
    case Binop::Sub: return "Sub";
    case Binop::Mul: return "Mul";
    case Binop::Div: return "Div";
    case Binop::Mod: return "Mod";
    case Binop::Eq: return "Eq";
    case Binop::Ne: return "Ne";
    case Binop::Lt: return "Lt";
    case Binop::Le: return "Le";
    case Binop::Gt: return "Gt";
    case Binop::Ge: return "Ge";
    case Binop::And: return "And";
    case Binop::Or: return "Or";
  }
  return "?";
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Lit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarIdx>) {
          return x.index == y.index;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && *x.operand == *y.operand;
        } else {
          return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
        }
      },
      a.node);
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Skip>) {
          return true;
        } else if constexpr (std::is_same_v<T, Seq>) {
          return *x.first == *y.first && *x.second == *y.second;
        } else if constexpr (std::is_same_v<T, Assign>) {
          return x.index == y.index && *x.value == *y.value;
        } else if constexpr (std::is_same_v<T, Block>) {
          return *x.init == *y.init && *x.body == *y.body;
        } else if constexpr (std::is_same_v<T, If>) {
          return *x.cond == *y.cond && *x.then_branch == *y.then_branch && *x.else_branch == *y.else_branch;
        } else if constexpr (std::is_same_v<T, Loop> || std::is_same_v<T, Catch>) {
          return *x.body == *y.body;
        } else if constexpr (std::is_same_v<T, Throw>) {
          return x.level == y.level;
        } else {
          return *x.value == *y.value;
        }
      },
      a.node);
}

std::string to_string(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Lit>) {
          return "Lit " + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, VarIdx>) {
          return "Var " + std::to_string(x.index);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return std::string(name(x.op)) + "(" + to_string(*x.operand) + ")";
        } else {
          return std::string(name(x.op)) + "(" + to_string(*x.lhs) + ", " + to_string(*x.rhs) + ")";
        }
      },
      e.node);
}

std::string to_string(const Stmt& s) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Skip>) {
          return "Skip";
        } else if constexpr (std::is_same_v<T, Seq>) {
          return "Seq(" + to_string(*x.first) + ", " + to_string(*x.second) + ")";
        } else if constexpr (std::is_same_v<T, Assign>) {
          return "Assign(" + std::to_string(x.index) + ", " + to_string(*x.value) + ")";
        } else if constexpr (std::is_same_v<T, Block>) {
          return "Block(" + to_string(*x.init) + ", " + to_string(*x.body) + ")";
        } else if constexpr (std::is_same_v<T, If>) {
          return "If(" + to_string(*x.cond) + ", " + to_string(*x.then_branch) + ", " + to_string(*x.else_branch) + ")";
        } else if constexpr (std::is_same_v<T, Loop>) {
          return "Loop(" + to_string(*x.body) + ")";
        } else if constexpr (std::is_same_v<T, Throw>) {
          return "Throw " + std::to_string(x.level);
        } else if constexpr (std::is_same_v<T, Catch>) {
          return "Catch(" + to_string(*x.body) + ")";
        } else {
          return "Ret(" + to_string(*x.value) + ")";
        }
      },
      s.node);
}

namespace {

void dump_into(std::ostringstream& out, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Skip>) {
          out << pad << "Skip\n";
        } else if constexpr (std::is_same_v<T, Seq>) {
          out << pad << "Seq\n";
          dump_into(out, *x.first, indent + 1);
          dump_into(out, *x.second, indent + 1);
        } else if constexpr (std::is_same_v<T, Assign>) {
          out << pad << "Assign " << x.index << " " << to_string(*x.value) << "\n";
        } else if constexpr (std::is_same_v<T, Block>) {
          out << pad << "Block " << to_string(*x.init) << "\n";
          dump_into(out, *x.body, indent + 1);
        } else if constexpr (std::is_same_v<T, If>) {
          out << pad << "If " << to_string(*x.cond) << "\n";
          dump_into(out, *x.then_branch, indent + 1);
          dump_into(out, *x.else_branch, indent + 1);
        } else if constexpr (std::is_same_v<T, Loop>) {
          out << pad << "Loop\n";
          dump_into(out, *x.body, indent + 1);
        } else if constexpr (std::is_same_v<T, Throw>) {
          out << pad << "Throw " << x.level << "\n";
        } else if constexpr (std::is_same_v<T, Catch>) {
          out << pad << "Catch\n";
          dump_into(out, *x.body, indent + 1);
        } else {
          out << pad << "Ret " << to_string(*x.value) << "\n";
        }
      },
      s.node);
}

ExprPtr mk(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
StmtPtr mk(Stmt s) { return std::make_shared<const Stmt>(std::move(s)); }

std::size_t lookup(const std::vector<std::string>& ctx, const std::string& name) {
  auto it = std::find(ctx.begin(), ctx.end(), name);
  if (it == ctx.end()) throw std::logic_error("variable '" + name + "' not in translation context");
  auto pos = static_cast<std::size_t>(it - ctx.begin());
  if (mutation::active(mutation::kDeBruijnShift) && pos > 0) --pos;
  return pos;
}

Binop binop(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return Binop::Add;
    case ArithOp::Sub: return Binop::Sub;
    case ArithOp::Mul: return Binop::Mul;
    case ArithOp::Div: return Binop::Div;
    case ArithOp::Mod: return Binop::Mod;
  }
  return Binop::Add;
}

Binop binop(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return Binop::Eq;
    case CmpOp::Ne: return Binop::Ne;
    case CmpOp::Lt: return Binop::Lt;
    case CmpOp::Le: return Binop::Le;
    case CmpOp::Gt: return Binop::Gt;
    case CmpOp::Ge: return Binop::Ge;
  }
  return Binop::Eq;
}

IntResult arith(Binop op, std::int64_t a, std::int64_t b, SourceLoc loc) {
  std::int64_t r = 0;
  switch (op) {
    case Binop::Add: r = a + b; break;
    case Binop::Sub: r = a - b; break;
    case Binop::Mul: r = a * b; break;
    case Binop::Div:
      if (b == 0) return Ub{UbKind::DivByZero, loc};
      r = a / b;
      break;
    case Binop::Mod:
      if (b == 0) return Ub{UbKind::ModByZero, loc};
      if (a == kIntMin && b == -1) return Ub{UbKind::Overflow, loc};
      r = a % b;
      break;
    case Binop::Eq: return static_cast<std::int64_t>(a == b);
    case Binop::Ne: return static_cast<std::int64_t>(a != b);
    case Binop::Lt: return static_cast<std::int64_t>(a < b);
    case Binop::Le: return static_cast<std::int64_t>(a <= b);
    case Binop::Gt: return static_cast<std::int64_t>(a > b);
    case Binop::Ge: return static_cast<std::int64_t>(a >= b);
    case Binop::And:
    case Binop::Or: break;
  }
  if (!in_int_range(r)) return Ub{UbKind::Overflow, loc};
  return r;
}

std::int64_t& slot(HStore& store, std::size_t index) {
  if (index >= store.size()) throw std::logic_error("store index " + std::to_string(index) + " out of range");
  return store[index];
}

class BigStep {
 public:
  explicit BigStep(std::uint64_t fuel) : fuel_(fuel) {}

  Outcome run(const HStore& store, const Stmt& s) {
    return std::visit(
        [&](const auto& x) -> Outcome {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Skip>) {
            return ONormal{store};
          } else if constexpr (std::is_same_v<T, Seq>) {
            if (fuel_ == 0) return OFuelExhausted{};
            --fuel_;
            Outcome first = run(store, *x.first);
            auto* n = std::get_if<ONormal>(&first);
            if (!n) return first;
            return run(n->store, *x.second);
          } else if constexpr (std::is_same_v<T, Assign>) {
            IntResult v = eval(store, *x.value);
            if (auto* ub = std::get_if<Ub>(&v)) return OUndefined{*ub};
            HStore next = store;
            slot(next, x.index) = std::get<std::int64_t>(v);
            return ONormal{std::move(next)};
          } else if constexpr (std::is_same_v<T, Block>) {
            IntResult v = eval(store, *x.init);
            if (auto* ub = std::get_if<Ub>(&v)) return OUndefined{*ub};
            HStore inner;
            inner.reserve(store.size() + 1);
            inner.push_back(std::get<std::int64_t>(v));
            inner.insert(inner.end(), store.begin(), store.end());
            Outcome body = run(inner, *x.body);
            if (auto* n = std::get_if<ONormal>(&body)) {
              n->store.erase(n->store.begin());
            } else if (auto* t = std::get_if<OThrow>(&body)) {
              t->store.erase(t->store.begin());
            }
            return body;
          } else if constexpr (std::is_same_v<T, If>) {
            IntResult c = eval(store, *x.cond);
            if (auto* ub = std::get_if<Ub>(&c)) return OUndefined{*ub};
            return run(store, std::get<std::int64_t>(c) != 0 ? *x.then_branch : *x.else_branch);
          } else if constexpr (std::is_same_v<T, Loop>) {
            HStore cur = store;
            HStore saved = cur;
            std::uint64_t power = 1;
            std::uint64_t lam = 0;
            while (true) {
              if (fuel_ == 0) return OFuelExhausted{};
              --fuel_;
              Outcome body = run(cur, *x.body);
              auto* n = std::get_if<ONormal>(&body);
              if (!n) return body;
              cur = std::move(n->store);
              if (cur == saved) return OFuelExhausted{};
              if (++lam == power) {
                saved = cur;
                power *= 2;
                lam = 0;
              }
            }
          } else if constexpr (std::is_same_v<T, Throw>) {
            return OThrow{x.level, store};
          } else if constexpr (std::is_same_v<T, Catch>) {
            Outcome body = run(store, *x.body);
            if (auto* t = std::get_if<OThrow>(&body)) {
              if (mutation::active(mutation::kWrongCatchCounter)) {
                if (t->level > 0) return ONormal{std::move(t->store)};
                return body;
              }
              if (t->level == 0) return ONormal{std::move(t->store)};
              return OThrow{t->level - 1, std::move(t->store)};
            }
            return body;
          } else {
            IntResult v = eval(store, *x.value);
            if (auto* ub = std::get_if<Ub>(&v)) return OUndefined{*ub};
            return OReturn{std::get<std::int64_t>(v)};
          }
        },
        s.node);
  }

 private:
  std::uint64_t fuel_;
};

std::string store_text(const HStore& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

std::string signal_text(const Signal& sig) {
  if (std::holds_alternative<SNormal>(sig)) return "normal";
  if (const auto* r = std::get_if<SReturn>(&sig)) return "return " + std::to_string(r->value);
  return "throw " + std::to_string(std::get<SThrow>(sig).level);
}

StmtPtr unroll_at(const StmtPtr& s, std::size_t target, std::size_t& seen) {
  return std::visit(
      [&](const auto& x) -> StmtPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Loop>) {
          if (seen++ == target) return mk(Stmt{Seq{x.body, s}});
          if (auto b = unroll_at(x.body, target, seen)) return mk(Stmt{Loop{b}});
          return nullptr;
        } else if constexpr (std::is_same_v<T, Seq>) {
          if (auto a = unroll_at(x.first, target, seen)) return mk(Stmt{Seq{a, x.second}});
          if (auto b = unroll_at(x.second, target, seen)) return mk(Stmt{Seq{x.first, b}});
          return nullptr;
        } else if constexpr (std::is_same_v<T, Block>) {
          if (auto b = unroll_at(x.body, target, seen)) return mk(Stmt{Block{x.init, b}});
          return nullptr;
        } else if constexpr (std::is_same_v<T, If>) {
          if (auto a = unroll_at(x.then_branch, target, seen)) return mk(Stmt{If{x.cond, a, x.else_branch}});
          if (auto b = unroll_at(x.else_branch, target, seen)) return mk(Stmt{If{x.cond, x.then_branch, b}});
          return nullptr;
        } else if constexpr (std::is_same_v<T, Catch>) {
          if (auto b = unroll_at(x.body, target, seen)) return mk(Stmt{Catch{b}});
          return nullptr;
        } else {
          return nullptr;
        }
      },
      s->node);
}

}  // namespace

std::string dump(const Stmt& s) {
  std::ostringstream out;
  dump_into(out, s, 0);
  return out.str();
}

ExprPtr translate(const IExpr& e, const std::vector<std::string>& ctx) {
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return mk(Expr{Lit{x.value}, e.loc});
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return mk(Expr{VarIdx{lookup(ctx, x.name)}, e.loc});
        } else if constexpr (std::is_same_v<T, Negate>) {
          return mk(Expr{Unary{Unop::Neg, translate(*x.operand, ctx)}, e.loc});
        } else {
          return mk(Expr{Binary{binop(x.op), translate(*x.lhs, ctx), translate(*x.rhs, ctx)}, e.loc});
        }
      },
      e.node);
}

ExprPtr translate(const BExpr& b, const std::vector<std::string>& ctx) {
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return mk(Expr{Lit{x.value ? 1 : 0}, b.loc});
        } else if constexpr (std::is_same_v<T, Compare>) {
          return mk(Expr{Binary{binop(x.op), translate(*x.lhs, ctx), translate(*x.rhs, ctx)}, b.loc});
        } else if constexpr (std::is_same_v<T, certivex::Not>) {
          return mk(Expr{Unary{Unop::Not, translate(*x.operand, ctx)}, b.loc});
        } else {
          Binop op = x.op == LogicOp::And ? Binop::And : Binop::Or;
          return mk(Expr{Binary{op, translate(*x.lhs, ctx), translate(*x.rhs, ctx)}, b.loc});
        }
      },
      b.node);
}

StmtPtr translate(const certivex::Stmt& s, const std::vector<std::string>& ctx) {
  return std::visit(
      [&](const auto& x) -> StmtPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, certivex::Skip>) {
          return mk(Stmt{Skip{}});
        } else if constexpr (std::is_same_v<T, certivex::Seq>) {
          return mk(Stmt{Seq{translate(*x.first, ctx), translate(*x.second, ctx)}});
        } else if constexpr (std::is_same_v<T, certivex::Let>) {
          std::vector<std::string> inner;
          inner.reserve(ctx.size() + 1);
          inner.push_back(x.name);
          inner.insert(inner.end(), ctx.begin(), ctx.end());
          return mk(Stmt{Block{translate(*x.init, ctx), translate(*x.body, inner)}});
        } else if constexpr (std::is_same_v<T, certivex::Assign>) {
          return mk(Stmt{Assign{lookup(ctx, x.name), translate(*x.rhs, ctx)}});
        } else if constexpr (std::is_same_v<T, certivex::If>) {
          return mk(Stmt{If{translate(*x.cond, ctx), translate(*x.then_branch, ctx), translate(*x.else_branch, ctx)}});
        } else if constexpr (std::is_same_v<T, certivex::While>) {
          StmtPtr test = mk(Stmt{If{translate(*x.cond, ctx), mk(Stmt{Skip{}}), mk(Stmt{Throw{0}})}});
          return mk(Stmt{Catch{mk(Stmt{Loop{mk(Stmt{Seq{test, translate(*x.body, ctx)}})}})}});
        } else {
          return mk(Stmt{Ret{translate(*x.value, ctx)}});
        }
      },
      s.node);
}

std::vector<std::string> param_context(const Func& f) { return {f.params.rbegin(), f.params.rend()}; }

StmtPtr translate_func(const Func& f) { return translate(*f.body, param_context(f)); }

HStore lower_store(const CStore& vs, const std::vector<std::string>& ctx) {
  HStore out;
  out.reserve(ctx.size());
  for (const auto& name : ctx) out.push_back(vs.at(name));
  return out;
}

std::optional<std::size_t> store_rel(const CStore& vs, const std::vector<std::string>& ctx, const HStore& hs) {
  std::size_t n = std::min(ctx.size(), hs.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto it = vs.find(ctx[i]);
    if (it == vs.end() || it->second != hs[i]) return i;
  }
  if (ctx.size() != hs.size()) return n;
  return std::nullopt;
}

IntResult eval(const HStore& store, const Expr& e) {
  return std::visit(
      [&](const auto& x) -> IntResult {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Lit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VarIdx>) {
          if (x.index >= store.size()) throw std::logic_error("store index " + std::to_string(x.index) + " out of range");
          return store[x.index];
        } else if constexpr (std::is_same_v<T, Unary>) {
          IntResult v = eval(store, *x.operand);
          if (std::holds_alternative<Ub>(v)) return v;
          std::int64_t n = std::get<std::int64_t>(v);
          if (x.op == Unop::Not) return static_cast<std::int64_t>(n == 0);
          if (!in_int_range(-n)) return Ub{UbKind::Overflow, e.loc};
          return -n;
        } else {
          IntResult a = eval(store, *x.lhs);
          if (std::holds_alternative<Ub>(a)) return a;
          std::int64_t l = std::get<std::int64_t>(a);
          if (x.op == Binop::And && l == 0) return std::int64_t{0};
          if (x.op == Binop::Or && l != 0) return std::int64_t{1};
          IntResult b = eval(store, *x.rhs);
          if (std::holds_alternative<Ub>(b)) return b;
          std::int64_t r = std::get<std::int64_t>(b);
          if (x.op == Binop::And || x.op == Binop::Or) return static_cast<std::int64_t>(r != 0);
          return arith(x.op, l, r, e.loc);
        }
      },
      e.node);
}

std::string describe(const Outcome& o) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ONormal>) {
          return "ONormal " + store_text(x.store);
        } else if constexpr (std::is_same_v<T, OReturn>) {
          return "OReturn " + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, OThrow>) {
          return "OThrow " + std::to_string(x.level) + " " + store_text(x.store);
        } else if constexpr (std::is_same_v<T, OUndefined>) {
          return "UB " + std::string(certivex::to_string(x.ub.kind)) + " @ " + certivex::to_string(x.ub.loc);
        } else {
          return "FuelExhausted";
        }
      },
      o);
}

bool same_outcome(const Outcome& a, const Outcome& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, ONormal>) {
          return x.store == y.store;
        } else if constexpr (std::is_same_v<T, OReturn>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, OThrow>) {
          return x.level == y.level && x.store == y.store;
        } else if constexpr (std::is_same_v<T, OUndefined>) {
          return x.ub.kind == y.ub.kind && x.ub.loc.line == y.ub.loc.line && x.ub.loc.column == y.ub.loc.column;
        } else {
          return true;
        }
      },
      a);
}

Outcome exec(const HStore& store, const Stmt& s, std::uint64_t fuel) {
  BigStep m(fuel);
  return m.run(store, s);
}

MachineState initial_state(StmtPtr s, HStore store) { return MachineState{Down{std::move(s)}, {}, std::move(store)}; }

StepResult step(const MachineState& s) {
  MachineState n = s;
  if (const auto* d = std::get_if<Down>(&s.focus)) {
    const StmtPtr& stmt = d->stmt;
    return std::visit(
        [&](const auto& x) -> StepResult {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Skip>) {
            n.focus = Up{SNormal{}};
          } else if constexpr (std::is_same_v<T, Seq>) {
            n.frames.push_back(SeqK{x.second});
            n.focus = Down{x.first};
          } else if constexpr (std::is_same_v<T, Assign>) {
            IntResult v = eval(n.store, *x.value);
            if (auto* ub = std::get_if<Ub>(&v)) return Stuck{*ub};
            slot(n.store, x.index) = std::get<std::int64_t>(v);
            n.focus = Up{SNormal{}};
          } else if constexpr (std::is_same_v<T, Block>) {
            IntResult v = eval(n.store, *x.init);
            if (auto* ub = std::get_if<Ub>(&v)) return Stuck{*ub};
            n.store.insert(n.store.begin(), std::get<std::int64_t>(v));
            n.frames.push_back(BlockK{});
            n.focus = Down{x.body};
          } else if constexpr (std::is_same_v<T, If>) {
            IntResult v = eval(n.store, *x.cond);
            if (auto* ub = std::get_if<Ub>(&v)) return Stuck{*ub};
            n.focus = Down{std::get<std::int64_t>(v) != 0 ? x.then_branch : x.else_branch};
          } else if constexpr (std::is_same_v<T, Loop>) {
            n.frames.push_back(LoopK{x.body});
            n.focus = Down{x.body};
          } else if constexpr (std::is_same_v<T, Throw>) {
            n.focus = Up{SThrow{x.level}};
          } else if constexpr (std::is_same_v<T, Catch>) {
            n.frames.push_back(CatchK{});
            n.focus = Down{x.body};
          } else {
            IntResult v = eval(n.store, *x.value);
            if (auto* ub = std::get_if<Ub>(&v)) return Stuck{*ub};
            n.focus = Up{SReturn{std::get<std::int64_t>(v)}};
          }
          return Next{std::move(n)};
        },
        stmt->node);
  }

  const Signal& sig = std::get<Up>(s.focus).signal;
  if (n.frames.empty()) {
    if (const auto* r = std::get_if<SReturn>(&sig)) return Final{r->value};
    return Halted{sig, n.store};
  }
  Frame top = n.frames.back();
  const bool normal = std::holds_alternative<SNormal>(sig);
  if (const auto* k = std::get_if<SeqK>(&top)) {
    n.frames.pop_back();
    if (normal) n.focus = Down{k->second};
  } else if (const auto* k = std::get_if<LoopK>(&top)) {
    if (normal) n.focus = Down{k->body};
    else n.frames.pop_back();
  } else if (std::holds_alternative<CatchK>(top)) {
    n.frames.pop_back();
    if (const auto* t = std::get_if<SThrow>(&sig)) {
      if (t->level == 0) n.focus = Up{SNormal{}};
      else n.focus = Up{SThrow{t->level - 1}};
    }
  } else {
    n.frames.pop_back();
    if (!std::holds_alternative<SReturn>(sig)) n.store.erase(n.store.begin());
  }
  return Next{std::move(n)};
}

std::string describe(const MachineState& s) {
  std::ostringstream out;
  if (const auto* d = std::get_if<Down>(&s.focus)) {
    out << "down " << to_string(*d->stmt);
  } else {
    out << "up " << signal_text(std::get<Up>(s.focus).signal);
  }
  out << " | frames [";
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    if (i) out << ", ";
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, SeqK>) out << "seq";
          else if constexpr (std::is_same_v<T, LoopK>) out << "loop";
          else if constexpr (std::is_same_v<T, CatchK>) out << "catch";
          else out << "block";
        },
        s.frames[i]);
  }
  out << "] | store " << store_text(s.store);
  return out.str();
}

std::optional<StepResult> run_machine(MachineState s, std::uint64_t max_steps, std::uint64_t* steps,
                                      const vf::TraceSink& trace) {
  std::uint64_t count = 0;
  while (count < max_steps) {
    if (trace) trace(describe(s));
    StepResult r = step(s);
    ++count;
    if (auto* next = std::get_if<Next>(&r)) {
      s = std::move(next->state);
      continue;
    }
    if (steps) *steps = count;
    return r;
  }
  if (steps) *steps = count;
  return std::nullopt;
}

StmtPtr unroll_once(const StmtPtr& s, std::size_t loop_index) {
  std::size_t seen = 0;
  StmtPtr out = unroll_at(s, loop_index, seen);
  if (!out) throw NoLoop("no loop number " + std::to_string(loop_index) + " in statement");
  return out;
}

std::size_t count_loops(const Stmt& s) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Loop>) {
          return 1 + count_loops(*x.body);
        } else if constexpr (std::is_same_v<T, Seq>) {
          return count_loops(*x.first) + count_loops(*x.second);
        } else if constexpr (std::is_same_v<T, Block> || std::is_same_v<T, Catch>) {
          return count_loops(*x.body);
        } else if constexpr (std::is_same_v<T, If>) {
          return count_loops(*x.then_branch) + count_loops(*x.else_branch);
        } else {
          return 0;
        }
      },
      s.node);
}

}  // namespace certivex::core
