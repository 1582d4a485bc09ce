#include "certivex/vfsem.hpp"

#include <sstream>

#include "certivex/bigint.hpp"

namespace certivex {

std::string_view to_string(UbKind k) {
  switch (k) {
    case UbKind::Overflow: return "Overflow";
    case UbKind::DivByZero: return "DivByZero";
    case UbKind::ModByZero: return "ModByZero";
  }
  return "Unknown";
}

namespace vf {

namespace {

std::string store_text(const CStore& s) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    out << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  out << "}";
  return out.str();
}

std::string diff_text(const CStore& before, const CStore& after) {
  std::ostringstream out;
  for (const auto& [k, v] : after) {
    auto it = before.find(k);
    if (it == before.end()) out << " +" << k << "=" << v;
    else if (it->second != v) out << " " << k << ":" << it->second << "->" << v;
  }
  for (const auto& [k, v] : before) {
    if (!after.count(k)) out << " -" << k;
  }
  return out.str();
}

IntResult arith(ArithOp op, std::int64_t a, std::int64_t b, SourceLoc loc) {
  std::int64_t r = 0;
  switch (op) {
    case ArithOp::Add: r = a + b; break;
    case ArithOp::Sub: r = a - b; break;
    case ArithOp::Mul: r = a * b; break;
    case ArithOp::Div:
      if (b == 0) return Ub{UbKind::DivByZero, loc};
      r = a / b;
      break;
    case ArithOp::Mod:
      if (b == 0) return Ub{UbKind::ModByZero, loc};
      // INT_MIN % -1 is undefined in C because INT_MIN / -1 is.
      if (a == kIntMin && b == -1) return Ub{UbKind::Overflow, loc};
      r = a % b;
      break;
  }
  if (!in_int_range(r)) return Ub{UbKind::Overflow, loc};
  return r;
}

bool compare(CmpOp op, std::int64_t a, std::int64_t b) {
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

class Machine {
 public:
  Machine(std::uint64_t fuel, const TraceSink& trace) : fuel_(fuel), trace_(trace) {}

  Outcome run(const CStore& store, const Stmt& s) {
    return std::visit(
        [&](const auto& x) -> Outcome {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Skip>) {
            note("skip", store, store);
            return Normal{store};
          } else if constexpr (std::is_same_v<T, Seq>) {
            if (fuel_ == 0) return FuelExhausted{};
            --fuel_;
            Outcome first = run(store, *x.first);
            auto* n = std::get_if<Normal>(&first);
            if (!n) return first;
            return run(n->store, *x.second);
          } else if constexpr (std::is_same_v<T, Let>) {
            IntResult v = eval_int(store, *x.init);
            if (auto* ub = std::get_if<Ub>(&v)) return Undefined{*ub};
            CStore inner = store;
            inner[x.name] = std::get<std::int64_t>(v);
            note("let " + x.name, store, inner);
            Outcome body = run(inner, *x.body);
            if (auto* n = std::get_if<Normal>(&body)) {
              CStore outer = n->store;
              outer.erase(x.name);
              note("end " + x.name, n->store, outer);
              return Normal{outer};
            }
            return body;
          } else if constexpr (std::is_same_v<T, Assign>) {
            IntResult v = eval_int(store, *x.rhs);
            if (auto* ub = std::get_if<Ub>(&v)) return Undefined{*ub};
            CStore next = store;
            next[x.name] = std::get<std::int64_t>(v);
            note("assign", store, next);
            return Normal{next};
          } else if constexpr (std::is_same_v<T, If>) {
            BoolResult c = eval_bool(store, *x.cond);
            if (auto* ub = std::get_if<Ub>(&c)) return Undefined{*ub};
            bool taken = std::get<bool>(c);
            note(taken ? "if-true" : "if-false", store, store);
            return run(store, taken ? *x.then_branch : *x.else_branch);
          } else if constexpr (std::is_same_v<T, While>) {
            CStore cur = store;
            // Brent's cycle detection over the stores at the loop head.
            CStore saved = cur;
            std::uint64_t power = 1;
            std::uint64_t lam = 0;
            while (true) {
              BoolResult c = eval_bool(cur, *x.cond);
              if (auto* ub = std::get_if<Ub>(&c)) return Undefined{*ub};
              if (!std::get<bool>(c)) {
                note("while-exit", cur, cur);
                return Normal{cur};
              }
              if (fuel_ == 0) return FuelExhausted{};
              --fuel_;
              note("while-iter", cur, cur);
              Outcome body = run(cur, *x.body);
              auto* n = std::get_if<Normal>(&body);
              if (!n) return body;
              cur = std::move(n->store);
              if (cur == saved) return FuelExhausted{};
              if (++lam == power) {
                saved = cur;
                power *= 2;
                lam = 0;
              }
            }
          } else {
            IntResult v = eval_int(store, *x.value);
            if (auto* ub = std::get_if<Ub>(&v)) return Undefined{*ub};
            note("return " + std::to_string(std::get<std::int64_t>(v)), store, store);
            return Returned{std::get<std::int64_t>(v), store};
          }
        },
        s.node);
  }

 private:
  void note(const std::string& rule, const CStore& before, const CStore& after) {
    if (trace_) trace_(rule + diff_text(before, after));
  }

  std::uint64_t fuel_;
  const TraceSink& trace_;
};

BigInt annot_int(const CStore& store, const IExpr& e) {
  return std::visit(
      [&](const auto& x) -> BigInt {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return store.at(x.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -annot_int(store, *x.operand);
        } else {
          BigInt a = annot_int(store, *x.lhs);
          BigInt b = annot_int(store, *x.rhs);
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
      e.node);
}

}  // namespace

std::string describe(const Outcome& o) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return "Normal " + store_text(x.store);
        } else if constexpr (std::is_same_v<T, Returned>) {
          return "Return " + std::to_string(x.value) + " " + store_text(x.store);
        } else if constexpr (std::is_same_v<T, Undefined>) {
          return "UB " + std::string(to_string(x.ub.kind)) + " @ " + to_string(x.ub.loc);
        } else {
          return "FuelExhausted";
        }
      },
      o);
}

IntResult eval_int(const CStore& store, const IExpr& e) {
  return std::visit(
      [&](const auto& x) -> IntResult {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return store.at(x.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          IntResult v = eval_int(store, *x.operand);
          if (std::holds_alternative<Ub>(v)) return v;
          std::int64_t r = -std::get<std::int64_t>(v);
          if (!in_int_range(r)) return Ub{UbKind::Overflow, e.loc};
          return r;
        } else {
          IntResult a = eval_int(store, *x.lhs);
          if (std::holds_alternative<Ub>(a)) return a;
          IntResult b = eval_int(store, *x.rhs);
          if (std::holds_alternative<Ub>(b)) return b;
          return arith(x.op, std::get<std::int64_t>(a), std::get<std::int64_t>(b), e.loc);
        }
      },
      e.node);
}

BoolResult eval_bool(const CStore& store, const BExpr& b) {
  return std::visit(
      [&](const auto& x) -> BoolResult {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          IntResult l = eval_int(store, *x.lhs);
          if (auto* ub = std::get_if<Ub>(&l)) return *ub;
          IntResult r = eval_int(store, *x.rhs);
          if (auto* ub = std::get_if<Ub>(&r)) return *ub;
          return compare(x.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r));
        } else if constexpr (std::is_same_v<T, Not>) {
          BoolResult v = eval_bool(store, *x.operand);
          if (auto* ub = std::get_if<Ub>(&v)) return *ub;
          return !std::get<bool>(v);
        } else {
          BoolResult l = eval_bool(store, *x.lhs);
          if (auto* ub = std::get_if<Ub>(&l)) return *ub;
          bool lv = std::get<bool>(l);
          if (x.op == LogicOp::And && !lv) return false;
          if (x.op == LogicOp::Or && lv) return true;
          return eval_bool(store, *x.rhs);
        }
      },
      b.node);
}

Outcome exec(const CStore& store, const Stmt& s, std::uint64_t fuel, const TraceSink& trace) {
  Machine m(fuel, trace);
  return m.run(store, s);
}

bool holds(const CStore& store, const BExpr& b) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          BigInt l = annot_int(store, *x.lhs);
          BigInt r = annot_int(store, *x.rhs);
          switch (x.op) {
            case CmpOp::Eq: return l == r;
            case CmpOp::Ne: return l != r;
            case CmpOp::Lt: return l < r;
            case CmpOp::Le: return l <= r;
            case CmpOp::Gt: return l > r;
            case CmpOp::Ge: return l >= r;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Not>) {
          return !holds(store, *x.operand);
        } else if (x.op == LogicOp::And) {
          return holds(store, *x.lhs) && holds(store, *x.rhs);
        } else {
          return holds(store, *x.lhs) || holds(store, *x.rhs);
        }
      },
      b.node);
}

OracleResult func_correct(const Func& f, const CStore& args, std::uint64_t fuel, const TraceSink& trace) {
  Outcome o = exec(args, *f.body, fuel, trace);
  if (std::holds_alternative<FuelExhausted>(o)) return {true, "fuel exhausted", o};
  if (auto* u = std::get_if<Undefined>(&o)) {
    return {false, "undefined behaviour: " + std::string(to_string(u->ub.kind)) + " at " + to_string(u->ub.loc), o};
  }
  if (std::holds_alternative<Normal>(o)) return {false, "fell off the end without returning", o};
  const auto& r = std::get<Returned>(o);
  CStore post_store = r.store;
  post_store[std::string(kResultName)] = r.value;
  if (!holds(post_store, *f.post)) return {false, "postcondition false for result " + std::to_string(r.value), o};
  return {true, "returned " + std::to_string(r.value), o};
}

}  // namespace vf

}  // namespace certivex
