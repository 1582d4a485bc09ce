#include "certivex/pretty.hpp"

#include <sstream>

namespace certivex {

namespace {

int precedence(const IExpr& e) {
  if (const auto* a = std::get_if<Arith>(&e.node)) {
    return a->op == ArithOp::Add || a->op == ArithOp::Sub ? 1 : 2;
  }
  if (std::holds_alternative<Negate>(e.node)) return 3;
  return 4;
}

int precedence(const BExpr& b) {
  if (const auto* l = std::get_if<Logic>(&b.node)) return l->op == LogicOp::Or ? 1 : 2;
  if (std::holds_alternative<Not>(b.node)) return 3;
  return 4;
}

std::string wrap_if(bool cond, const std::string& s) { return cond ? "(" + s + ")" : s; }

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

void contents(std::ostringstream& out, const Stmt& s, int indent);

void item(std::ostringstream& out, const Stmt& s, int indent) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Skip>) {
          out << pad(indent) << ";\n";
        } else if constexpr (std::is_same_v<T, Seq> || std::is_same_v<T, Let>) {
          out << pad(indent) << "{\n";
          contents(out, s, indent + 1);
          out << pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, Assign>) {
          out << pad(indent) << x.name << " = " << pretty(*x.rhs) << ";\n";
        } else if constexpr (std::is_same_v<T, If>) {
          out << pad(indent) << "if (" << pretty(*x.cond) << ") {\n";
          contents(out, *x.then_branch, indent + 1);
          out << pad(indent) << "} else {\n";
          contents(out, *x.else_branch, indent + 1);
          out << pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, While>) {
          out << pad(indent) << "while (" << pretty(*x.cond) << ")\n";
          out << pad(indent) << "//@ invariant " << pretty(*x.invariant) << ";\n";
          out << pad(indent) << "{\n";
          contents(out, *x.body, indent + 1);
          out << pad(indent) << "}\n";
        } else if constexpr (std::is_same_v<T, Return>) {
          out << pad(indent) << "return " << pretty(*x.value) << ";\n";
        }
      },
      s.node);
}

// The statements of a block body. A trailing Skip after a sequence must be
// printed as `;` so the sequence node survives re-parsing.
void contents(std::ostringstream& out, const Stmt& s, int indent) {
  if (const auto* seq = std::get_if<Seq>(&s.node)) {
    item(out, *seq->first, indent);
    if (std::holds_alternative<Skip>(seq->second->node)) {
      out << pad(indent) << ";\n";
    } else {
      contents(out, *seq->second, indent);
    }
  } else if (const auto* let = std::get_if<Let>(&s.node)) {
    out << pad(indent) << "int " << let->name << " = " << pretty(*let->init) << ";\n";
    contents(out, *let->body, indent);
  } else if (!std::holds_alternative<Skip>(s.node)) {
    item(out, s, indent);
  }
}

}  // namespace

std::string pretty(const IExpr& e) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          // `-5` would re-parse as a literal, and `--x` reads badly.
          bool bare = std::holds_alternative<VarRef>(x.operand->node);
          return "-" + wrap_if(!bare, pretty(*x.operand));
        } else {
          int p = precedence(e);
          std::string lhs = wrap_if(precedence(*x.lhs) < p, pretty(*x.lhs));
          std::string rhs = wrap_if(precedence(*x.rhs) <= p, pretty(*x.rhs));
          return lhs + " " + std::string(symbol(x.op)) + " " + rhs;
        }
      },
      e.node);
}

std::string pretty(const BExpr& b) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Compare>) {
          return pretty(*x.lhs) + " " + std::string(symbol(x.op)) + " " + pretty(*x.rhs);
        } else if constexpr (std::is_same_v<T, Not>) {
          return "!(" + pretty(*x.operand) + ")";
        } else {
          int p = precedence(b);
          std::string lhs = wrap_if(precedence(*x.lhs) < p, pretty(*x.lhs));
          std::string rhs = wrap_if(precedence(*x.rhs) <= p, pretty(*x.rhs));
          return lhs + " " + std::string(symbol(x.op)) + " " + rhs;
        }
      },
      b.node);
}

std::string pretty(const Stmt& s, int indent) {
  std::ostringstream out;
  contents(out, s, indent);
  return out.str();
}

std::string pretty(const Func& f) {
  std::ostringstream out;
  out << "int " << f.name << "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) out << ", ";
    out << "int " << f.params[i];
  }
  out << ")\n";
  out << "//@ requires " << pretty(*f.pre) << ";\n";
  out << "//@ ensures " << pretty(*f.post) << ";\n";
  out << "{\n";
  contents(out, *f.body, 1);
  out << "}\n";
  return out.str();
}

std::string pretty(const Program& p) { return pretty(p.main); }

}  // namespace certivex
