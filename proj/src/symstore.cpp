#include "certivex/symstore.hpp"

namespace certivex::sym {

Term lit(BigInt v) { return std::make_shared<TermNode>(TermNode{Lit{std::move(v)}}); }

Term symbol(SymbolId id) { return std::make_shared<TermNode>(TermNode{Symbol{id}}); }

Term negate(Term t) {
  if (const auto* l = std::get_if<Lit>(&t->node)) return lit(-l->value);
  return std::make_shared<TermNode>(TermNode{Neg{std::move(t)}});
}

Term arith(ArithOp op, Term a, Term b) {
  const auto* la = std::get_if<Lit>(&a->node);
  const auto* lb = std::get_if<Lit>(&b->node);
  if (la && lb) {
    switch (op) {
      case ArithOp::Add: return lit(la->value + lb->value);
      case ArithOp::Sub: return lit(la->value - lb->value);
      case ArithOp::Mul: return lit(la->value * lb->value);
      case ArithOp::Div:
        if (lb->value != 0) return lit(quot(la->value, lb->value));
        break;
      case ArithOp::Mod:
        if (lb->value != 0) return lit(rem(la->value, lb->value));
        break;
    }
  }
  return std::make_shared<TermNode>(TermNode{Bin{op, std::move(a), std::move(b)}});
}

Prop truth(bool v) { return std::make_shared<PropNode>(PropNode{Truth{v}}); }

Prop compare(CmpOp op, Term a, Term b) {
  return std::make_shared<PropNode>(PropNode{Cmp{op, std::move(a), std::move(b)}});
}

Prop negation(Prop p) { return std::make_shared<PropNode>(PropNode{PNot{std::move(p)}}); }

Prop conj(Prop a, Prop b) {
  return std::make_shared<PropNode>(PropNode{PLogic{LogicOp::And, std::move(a), std::move(b)}});
}

Prop disj(Prop a, Prop b) {
  return std::make_shared<PropNode>(PropNode{PLogic{LogicOp::Or, std::move(a), std::move(b)}});
}

Prop int_range(const Term& t) {
  return conj(compare(CmpOp::Le, lit(kIntMin), t), compare(CmpOp::Le, t, lit(kIntMax)));
}

bool is_true(const Prop& p) {
  const auto* t = std::get_if<Truth>(&p->node);
  return t && t->value;
}

std::string to_string(const Term& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Lit>) {
          return x.value.str();
        } else if constexpr (std::is_same_v<T, Symbol>) {
          return "s" + std::to_string(x.id);
        } else if constexpr (std::is_same_v<T, Neg>) {
          return "(-" + to_string(x.operand) + ")";
        } else {
          return "(" + to_string(x.lhs) + " " + std::string(symbol(x.op)) + " " + to_string(x.rhs) + ")";
        }
      },
      t->node);
}

std::string to_string(const Prop& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Truth>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Cmp>) {
          return "(" + to_string(x.lhs) + " " + std::string(symbol(x.op)) + " " + to_string(x.rhs) + ")";
        } else if constexpr (std::is_same_v<T, PNot>) {
          return "!" + to_string(x.operand);
        } else {
          return "(" + to_string(x.lhs) + " " + std::string(symbol(x.op)) + " " + to_string(x.rhs) + ")";
        }
      },
      p->node);
}

bool equal(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Lit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Symbol>) {
          return x.id == y.id;
        } else if constexpr (std::is_same_v<T, Neg>) {
          return equal(x.operand, y.operand);
        } else {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        }
      },
      a->node);
}

bool equal(const Prop& a, const Prop& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Truth>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Cmp>) {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, PNot>) {
          return equal(x.operand, y.operand);
        } else {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        }
      },
      a->node);
}

void collect_symbols(const Term& t, std::set<SymbolId>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Symbol>) {
          out.insert(x.id);
        } else if constexpr (std::is_same_v<T, Neg>) {
          collect_symbols(x.operand, out);
        } else if constexpr (std::is_same_v<T, Bin>) {
          collect_symbols(x.lhs, out);
          collect_symbols(x.rhs, out);
        }
      },
      t->node);
}

void collect_symbols(const Prop& p, std::set<SymbolId>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmp>) {
          collect_symbols(x.lhs, out);
          collect_symbols(x.rhs, out);
        } else if constexpr (std::is_same_v<T, PNot>) {
          collect_symbols(x.operand, out);
        } else if constexpr (std::is_same_v<T, PLogic>) {
          collect_symbols(x.lhs, out);
          collect_symbols(x.rhs, out);
        }
      },
      p->node);
}

UnboundVariable::UnboundVariable(const std::string& name)
    : std::logic_error("unbound variable '" + name + "' in symbolic store") {}

Term eval_int(const Store& store, const IExpr& e) {
  return std::visit(
      [&](const auto& x) -> Term {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return lit(x.value);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          auto it = store.find(x.name);
          if (it == store.end()) throw UnboundVariable(x.name);
          return it->second;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return negate(eval_int(store, *x.operand));
        } else {
          return arith(x.op, eval_int(store, *x.lhs), eval_int(store, *x.rhs));
        }
      },
      e.node);
}

Prop eval_bool(const Store& store, const BExpr& b) {
  return std::visit(
      [&](const auto& x) -> Prop {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return truth(x.value);
        } else if constexpr (std::is_same_v<T, Compare>) {
          return compare(x.op, eval_int(store, *x.lhs), eval_int(store, *x.rhs));
        } else if constexpr (std::is_same_v<T, Not>) {
          return negation(eval_bool(store, *x.operand));
        } else {
          auto lhs = eval_bool(store, *x.lhs);
          auto rhs = eval_bool(store, *x.rhs);
          return x.op == LogicOp::And ? conj(lhs, rhs) : disj(lhs, rhs);
        }
      },
      b.node);
}

BigInt evaluate(const Term& t, const Valuation& nu) {
  return std::visit(
      [&](const auto& x) -> BigInt {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Lit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Symbol>) {
          auto it = nu.find(x.id);
          if (it == nu.end()) throw std::out_of_range("no value for symbol s" + std::to_string(x.id));
          return it->second;
        } else if constexpr (std::is_same_v<T, Neg>) {
          return -evaluate(x.operand, nu);
        } else {
          BigInt a = evaluate(x.lhs, nu);
          BigInt b = evaluate(x.rhs, nu);
          switch (x.op) {
            case ArithOp::Add: return a + b;
            case ArithOp::Sub: return a - b;
            case ArithOp::Mul: return a * b;
            case ArithOp::Div: return quot(a, b);
            case ArithOp::Mod: return rem(a, b);
          }
          return 0;
        }
      },
      t->node);
}

namespace {

bool holds(CmpOp op, const BigInt& a, const BigInt& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

}  // namespace

bool evaluate(const Prop& p, const Valuation& nu) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Truth>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Cmp>) {
          return holds(x.op, evaluate(x.lhs, nu), evaluate(x.rhs, nu));
        } else if constexpr (std::is_same_v<T, PNot>) {
          return !evaluate(x.operand, nu);
        } else if (x.op == LogicOp::And) {
          return evaluate(x.lhs, nu) && evaluate(x.rhs, nu);
        } else {
          return evaluate(x.lhs, nu) || evaluate(x.rhs, nu);
        }
      },
      p->node);
}

}  // namespace certivex::sym
