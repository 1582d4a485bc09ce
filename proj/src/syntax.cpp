#include "certivex/syntax.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace certivex {

std::string to_string(SourceLoc loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::string_view symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
  }
  return "?";
}

std::string_view symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

std::string_view symbol(LogicOp op) { return op == LogicOp::And ? "&&" : "||"; }

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

// Structural equality. Locations are deliberately not compared.

namespace {

template <typename T>
bool same_ptr(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace

bool operator==(const IExpr& a, const IExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return same_ptr(x.operand, y.operand);
        } else {
          return x.op == y.op && same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
        }
      },
      a.node);
}

bool operator==(const BExpr& a, const BExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return x.op == y.op && same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Not>) {
          return same_ptr(x.operand, y.operand);
        } else {
          return x.op == y.op && same_ptr(x.lhs, y.lhs) && same_ptr(x.rhs, y.rhs);
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
          return same_ptr(x.first, y.first) && same_ptr(x.second, y.second);
        } else if constexpr (std::is_same_v<T, Let>) {
          return x.name == y.name && same_ptr(x.init, y.init) && same_ptr(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return x.name == y.name && same_ptr(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, If>) {
          return same_ptr(x.cond, y.cond) && same_ptr(x.then_branch, y.then_branch) &&
                 same_ptr(x.else_branch, y.else_branch);
        } else if constexpr (std::is_same_v<T, While>) {
          return same_ptr(x.cond, y.cond) && same_ptr(x.invariant, y.invariant) &&
                 same_ptr(x.body, y.body);
        } else {
          return same_ptr(x.value, y.value);
        }
      },
      a.node);
}

bool operator==(const Func& a, const Func& b) {
  return a.name == b.name && a.params == b.params && same_ptr(a.pre, b.pre) &&
         same_ptr(a.post, b.post) && same_ptr(a.body, b.body);
}

bool operator==(const Program& a, const Program& b) { return a.main == b.main; }

ParseError::ParseError(SourceLoc loc, const std::string& message)
    : std::runtime_error(to_string(loc) + ": " + message), loc_(loc), message_(message) {}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name[0])) return false;
  return std::all_of(name.begin() + 1, name.end(), [&](char c) { return alpha(c) || digit(c); });
}

bool is_reserved(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kReserved = {
      "int", "void", "if", "else", "while", "return", "true", "false",
      "requires", "ensures", "invariant", "result"};
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

namespace {

class ScopeChecker {
 public:
  void expr(const IExpr& e, const std::set<std::string>& visible) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            if (!in_int_range(x.value)) {
              throw ParseError(e.loc, "integer literal " + std::to_string(x.value) +
                                          " is outside the int range");
            }
          } else if constexpr (std::is_same_v<T, VarRef>) {
            if (!visible.contains(x.name)) {
              throw ParseError(e.loc, "unbound variable '" + x.name + "'");
            }
          } else if constexpr (std::is_same_v<T, Negate>) {
            expr(*x.operand, visible);
          } else {
            expr(*x.lhs, visible);
            expr(*x.rhs, visible);
          }
        },
        e.node);
  }

  void cond(const BExpr& b, const std::set<std::string>& visible) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Compare>) {
            expr(*x.lhs, visible);
            expr(*x.rhs, visible);
          } else if constexpr (std::is_same_v<T, Not>) {
            cond(*x.operand, visible);
          } else if constexpr (std::is_same_v<T, Logic>) {
            cond(*x.lhs, visible);
            cond(*x.rhs, visible);
          }
        },
        b.node);
  }

  void stmt(const Stmt& s, std::set<std::string>& scope) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Seq>) {
            stmt(*x.first, scope);
            stmt(*x.second, scope);
          } else if constexpr (std::is_same_v<T, Let>) {
            declare(x.name, s.loc, scope);
            expr(*x.init, scope);
            scope.insert(x.name);
            stmt(*x.body, scope);
            scope.erase(x.name);
          } else if constexpr (std::is_same_v<T, Assign>) {
            if (!scope.contains(x.name)) {
              throw ParseError(s.loc, "assignment to undeclared variable '" + x.name + "'");
            }
            expr(*x.rhs, scope);
          } else if constexpr (std::is_same_v<T, If>) {
            cond(*x.cond, scope);
            stmt(*x.then_branch, scope);
            stmt(*x.else_branch, scope);
          } else if constexpr (std::is_same_v<T, While>) {
            if (!x.invariant) throw ParseError(s.loc, "while loop without an invariant");
            cond(*x.cond, scope);
            cond(*x.invariant, scope);
            stmt(*x.body, scope);
          } else if constexpr (std::is_same_v<T, Return>) {
            expr(*x.value, scope);
          }
        },
        s.node);
  }

  void declare(const std::string& name, SourceLoc loc, const std::set<std::string>& scope) const {
    if (!is_identifier(name)) throw ParseError(loc, "invalid identifier '" + name + "'");
    if (is_reserved(name)) throw ParseError(loc, "'" + name + "' is reserved");
    if (scope.contains(name)) throw ParseError(loc, "declaration of '" + name + "' shadows an outer variable");
  }
};

}  // namespace

void check_well_formed(const Func& f) {
  ScopeChecker checker;
  if (!is_identifier(f.name)) throw ParseError(f.loc, "invalid function name '" + f.name + "'");
  if (!f.pre || !f.post || !f.body) throw ParseError(f.loc, "incomplete function");
  std::set<std::string> params;
  for (const auto& p : f.params) {
    checker.declare(p, f.loc, params);
    params.insert(p);
  }
  checker.cond(*f.pre, params);
  auto with_result = params;
  with_result.insert(std::string(kResultName));
  checker.cond(*f.post, with_result);
  auto scope = params;
  checker.stmt(*f.body, scope);
}

StmtPtr simplify(const StmtPtr& s) {
  return std::visit(
      [&](const auto& x) -> StmtPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Seq>) {
          auto first = simplify(x.first);
          auto second = simplify(x.second);
          if (std::holds_alternative<Skip>(second->node)) return first;
          return std::make_shared<Stmt>(Stmt{Seq{first, second}, s->loc});
        } else if constexpr (std::is_same_v<T, Let>) {
          return std::make_shared<Stmt>(Stmt{Let{x.name, x.init, simplify(x.body)}, s->loc});
        } else if constexpr (std::is_same_v<T, If>) {
          return std::make_shared<Stmt>(
              Stmt{If{x.cond, simplify(x.then_branch), simplify(x.else_branch)}, s->loc});
        } else if constexpr (std::is_same_v<T, While>) {
          return std::make_shared<Stmt>(Stmt{While{x.cond, x.invariant, simplify(x.body)}, s->loc});
        } else {
          return s;
        }
      },
      s->node);
}

Func simplified(const Func& f) {
  Func out = f;
  out.body = simplify(f.body);
  return out;
}

namespace {

void collect_assigned(const Stmt& s, std::set<std::string>& declared, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Seq>) {
          collect_assigned(*x.first, declared, out);
          collect_assigned(*x.second, declared, out);
        } else if constexpr (std::is_same_v<T, Let>) {
          declared.insert(x.name);
          collect_assigned(*x.body, declared, out);
          declared.erase(x.name);
        } else if constexpr (std::is_same_v<T, Assign>) {
          if (!declared.contains(x.name) &&
              std::find(out.begin(), out.end(), x.name) == out.end()) {
            out.push_back(x.name);
          }
        } else if constexpr (std::is_same_v<T, If>) {
          collect_assigned(*x.then_branch, declared, out);
          collect_assigned(*x.else_branch, declared, out);
        } else if constexpr (std::is_same_v<T, While>) {
          collect_assigned(*x.body, declared, out);
        }
      },
      s.node);
}

}  // namespace

std::vector<std::string> assigned_variables(const Stmt& s) {
  std::set<std::string> declared;
  std::vector<std::string> out;
  collect_assigned(s, declared, out);
  return out;
}

namespace build {

IExprPtr lit(std::int64_t v, SourceLoc loc) { return std::make_shared<IExpr>(IExpr{IntLit{v}, loc}); }
IExprPtr var(std::string name, SourceLoc loc) {
  return std::make_shared<IExpr>(IExpr{VarRef{std::move(name)}, loc});
}
IExprPtr neg(IExprPtr e, SourceLoc loc) { return std::make_shared<IExpr>(IExpr{Negate{std::move(e)}, loc}); }
IExprPtr arith(ArithOp op, IExprPtr a, IExprPtr b, SourceLoc loc) {
  return std::make_shared<IExpr>(IExpr{Arith{op, std::move(a), std::move(b)}, loc});
}
IExprPtr add(IExprPtr a, IExprPtr b) { return arith(ArithOp::Add, std::move(a), std::move(b)); }
IExprPtr sub(IExprPtr a, IExprPtr b) { return arith(ArithOp::Sub, std::move(a), std::move(b)); }
IExprPtr mul(IExprPtr a, IExprPtr b) { return arith(ArithOp::Mul, std::move(a), std::move(b)); }
IExprPtr div(IExprPtr a, IExprPtr b) { return arith(ArithOp::Div, std::move(a), std::move(b)); }
IExprPtr mod(IExprPtr a, IExprPtr b) { return arith(ArithOp::Mod, std::move(a), std::move(b)); }

BExprPtr boolean(bool v, SourceLoc loc) { return std::make_shared<BExpr>(BExpr{BoolLit{v}, loc}); }
BExprPtr cmp(CmpOp op, IExprPtr a, IExprPtr b, SourceLoc loc) {
  return std::make_shared<BExpr>(BExpr{Compare{op, std::move(a), std::move(b)}, loc});
}
BExprPtr eq(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Eq, std::move(a), std::move(b)); }
BExprPtr ne(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Ne, std::move(a), std::move(b)); }
BExprPtr lt(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Lt, std::move(a), std::move(b)); }
BExprPtr le(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Le, std::move(a), std::move(b)); }
BExprPtr gt(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Gt, std::move(a), std::move(b)); }
BExprPtr ge(IExprPtr a, IExprPtr b) { return cmp(CmpOp::Ge, std::move(a), std::move(b)); }
BExprPtr lnot(BExprPtr b, SourceLoc loc) { return std::make_shared<BExpr>(BExpr{Not{std::move(b)}, loc}); }
BExprPtr logic(LogicOp op, BExprPtr a, BExprPtr b, SourceLoc loc) {
  return std::make_shared<BExpr>(BExpr{Logic{op, std::move(a), std::move(b)}, loc});
}
BExprPtr land(BExprPtr a, BExprPtr b) { return logic(LogicOp::And, std::move(a), std::move(b)); }
BExprPtr lor(BExprPtr a, BExprPtr b) { return logic(LogicOp::Or, std::move(a), std::move(b)); }

StmtPtr skip(SourceLoc loc) { return std::make_shared<Stmt>(Stmt{Skip{}, loc}); }
StmtPtr seq(StmtPtr a, StmtPtr b, SourceLoc loc) {
  return std::make_shared<Stmt>(Stmt{Seq{std::move(a), std::move(b)}, loc});
}
StmtPtr let(std::string name, IExprPtr init, StmtPtr body, SourceLoc loc) {
  return std::make_shared<Stmt>(Stmt{Let{std::move(name), std::move(init), std::move(body)}, loc});
}
StmtPtr assign(std::string name, IExprPtr rhs, SourceLoc loc) {
  return std::make_shared<Stmt>(Stmt{Assign{std::move(name), std::move(rhs)}, loc});
}
StmtPtr if_(BExprPtr c, StmtPtr t, StmtPtr e, SourceLoc loc) {
  return std::make_shared<Stmt>(Stmt{If{std::move(c), std::move(t), std::move(e)}, loc});
}
StmtPtr while_(BExprPtr c, BExprPtr inv, StmtPtr body, SourceLoc loc) {
  return std::make_shared<Stmt>(Stmt{While{std::move(c), std::move(inv), std::move(body)}, loc});
}
StmtPtr ret(IExprPtr e, SourceLoc loc) { return std::make_shared<Stmt>(Stmt{Return{std::move(e)}, loc}); }

}  // namespace build

}  // namespace certivex
