#pragma once

// Symbolic terms and propositions, symbolic stores and path conditions.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "certivex/bigint.hpp"
#include "certivex/syntax.hpp"

namespace certivex::sym {

using SymbolId = std::uint32_t;

struct TermNode;
struct PropNode;
using Term = std::shared_ptr<const TermNode>;
using Prop = std::shared_ptr<const PropNode>;

struct Lit {
  BigInt value;
};
struct Symbol {
  SymbolId id;
};
struct Neg {
  Term operand;
};
struct Bin {
  ArithOp op;
  Term lhs;
  Term rhs;
};

struct TermNode {
  std::variant<Lit, Symbol, Neg, Bin> node;
};

struct Truth {
  bool value;
};
struct Cmp {
  CmpOp op;
  Term lhs;
  Term rhs;
};
struct PNot {
  Prop operand;
};
struct PLogic {
  LogicOp op;
  Prop lhs;
  Prop rhs;
};

struct PropNode {
  std::variant<Truth, Cmp, PNot, PLogic> node;
};

Term lit(BigInt v);
Term symbol(SymbolId id);
/// Builders fold literal operands; division and remainder by a literal zero
/// stay symbolic so the safety check still sees them.
Term negate(Term t);
Term arith(ArithOp op, Term a, Term b);

Prop truth(bool v);
Prop compare(CmpOp op, Term a, Term b);
Prop negation(Prop p);
Prop conj(Prop a, Prop b);
Prop disj(Prop a, Prop b);

/// INT_MIN <= t && t <= INT_MAX
Prop int_range(const Term& t);

bool is_true(const Prop& p);

// Canonical, fully parenthesized text; symbols print as s0, s1, ...
std::string to_string(const Term& t);
std::string to_string(const Prop& p);

bool equal(const Term& a, const Term& b);
bool equal(const Prop& a, const Prop& b);

void collect_symbols(const Term& t, std::set<SymbolId>& out);
void collect_symbols(const Prop& p, std::set<SymbolId>& out);

using Store = std::map<std::string, Term>;

/// Accumulated assumptions in arrival order. Never holds a literal `true`.
using PathCond = std::vector<Prop>;

class FreshCounter {
 public:
  SymbolId pick() { return next_++; }
  SymbolId peek() const { return next_; }

 private:
  SymbolId next_ = 0;
};

class UnboundVariable : public std::logic_error {
 public:
  explicit UnboundVariable(const std::string& name);
};

Term eval_int(const Store& store, const IExpr& e);
Prop eval_bool(const Store& store, const BExpr& b);

using Valuation = std::map<SymbolId, BigInt>;

/// Concrete value under a valuation of the symbols. Division follows quot/rem.
BigInt evaluate(const Term& t, const Valuation& nu);
bool evaluate(const Prop& p, const Valuation& nu);

}  // namespace certivex::sym
