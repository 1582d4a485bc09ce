#pragma once

// Abstract syntax of the annotated C dialect.
//
// Integer expressions (IExpr) and boolean expressions (BExpr) are separate
// categories: a BExpr can only appear as a condition or an annotation, so the
// grammar itself keeps booleans out of assignments and declarations.
//
// All nodes are immutable and shared; structural equality ignores source
// locations.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace certivex {

inline constexpr std::int64_t kIntMin = -2147483648LL;
inline constexpr std::int64_t kIntMax = 2147483647LL;

inline constexpr bool in_int_range(std::int64_t v) { return v >= kIntMin && v <= kIntMax; }

/// Name under which the return value is visible in a postcondition.
inline constexpr std::string_view kResultName = "result";

struct SourceLoc {
  int line = 0;
  int column = 0;
};

std::string to_string(SourceLoc loc);

enum class ArithOp { Add, Sub, Mul, Div, Mod };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or };

std::string_view symbol(ArithOp op);
std::string_view symbol(CmpOp op);
std::string_view symbol(LogicOp op);

/// The comparison that holds exactly when `op` does not.
CmpOp negate(CmpOp op);

struct IExpr;
struct BExpr;
struct Stmt;
using IExprPtr = std::shared_ptr<const IExpr>;
using BExprPtr = std::shared_ptr<const BExpr>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct IntLit {
  std::int64_t value;
};
struct VarRef {
  std::string name;
};
struct Negate {
  IExprPtr operand;
};
struct Arith {
  ArithOp op;
  IExprPtr lhs;
  IExprPtr rhs;
};

struct IExpr {
  std::variant<IntLit, VarRef, Negate, Arith> node;
  SourceLoc loc;
};

struct BoolLit {
  bool value;
};
struct Compare {
  CmpOp op;
  IExprPtr lhs;
  IExprPtr rhs;
};
struct Not {
  BExprPtr operand;
};
struct Logic {
  LogicOp op;
  BExprPtr lhs;
  BExprPtr rhs;
};

struct BExpr {
  std::variant<BoolLit, Compare, Not, Logic> node;
  SourceLoc loc;
};

struct Skip {};
struct Seq {
  StmtPtr first;
  StmtPtr second;
};
/// `int name = init;` scoping over `body`.
struct Let {
  std::string name;
  IExprPtr init;
  StmtPtr body;
};
struct Assign {
  std::string name;
  IExprPtr rhs;
};
struct If {
  BExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;
};
struct While {
  BExprPtr cond;
  BExprPtr invariant;
  StmtPtr body;
};
struct Return {
  IExprPtr value;
};

struct Stmt {
  std::variant<Skip, Seq, Let, Assign, If, While, Return> node;
  SourceLoc loc;
};

struct Func {
  std::string name;
  std::vector<std::string> params;
  BExprPtr pre;
  BExprPtr post;
  StmtPtr body;
  SourceLoc loc;
};

struct Program {
  Func main;
};

bool operator==(const IExpr& a, const IExpr& b);
bool operator==(const BExpr& a, const BExpr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const Func& a, const Func& b);
bool operator==(const Program& a, const Program& b);

/// Lexical, syntactic, scoping and range errors in dialect source.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, const std::string& message);

  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  SourceLoc loc_;
  std::string message_;
};

bool is_identifier(std::string_view name);
bool is_reserved(std::string_view name);

/// Throws ParseError on the first violation: bad identifiers, literals outside
/// the int range, unbound or shadowed variables, `result` outside the
/// postcondition, or a precondition mentioning non-parameters.
void check_well_formed(const Func& f);

/// Removes every `Seq(x, Skip)` by rewriting to `x`, bottom-up.
StmtPtr simplify(const StmtPtr& s);
Func simplified(const Func& f);

/// Variables assigned anywhere in `s` that are not declared inside `s`,
/// in order of first occurrence.
std::vector<std::string> assigned_variables(const Stmt& s);

/// Shorthand constructors, mostly for tests and the program generator.
namespace build {

IExprPtr lit(std::int64_t v, SourceLoc loc = {});
IExprPtr var(std::string name, SourceLoc loc = {});
IExprPtr neg(IExprPtr e, SourceLoc loc = {});
IExprPtr arith(ArithOp op, IExprPtr a, IExprPtr b, SourceLoc loc = {});
IExprPtr add(IExprPtr a, IExprPtr b);
IExprPtr sub(IExprPtr a, IExprPtr b);
IExprPtr mul(IExprPtr a, IExprPtr b);
IExprPtr div(IExprPtr a, IExprPtr b);
IExprPtr mod(IExprPtr a, IExprPtr b);

BExprPtr boolean(bool v, SourceLoc loc = {});
BExprPtr cmp(CmpOp op, IExprPtr a, IExprPtr b, SourceLoc loc = {});
BExprPtr eq(IExprPtr a, IExprPtr b);
BExprPtr ne(IExprPtr a, IExprPtr b);
BExprPtr lt(IExprPtr a, IExprPtr b);
BExprPtr le(IExprPtr a, IExprPtr b);
BExprPtr gt(IExprPtr a, IExprPtr b);
BExprPtr ge(IExprPtr a, IExprPtr b);
BExprPtr lnot(BExprPtr b, SourceLoc loc = {});
BExprPtr logic(LogicOp op, BExprPtr a, BExprPtr b, SourceLoc loc = {});
BExprPtr land(BExprPtr a, BExprPtr b);
BExprPtr lor(BExprPtr a, BExprPtr b);

StmtPtr skip(SourceLoc loc = {});
StmtPtr seq(StmtPtr a, StmtPtr b, SourceLoc loc = {});
StmtPtr let(std::string name, IExprPtr init, StmtPtr body, SourceLoc loc = {});
StmtPtr assign(std::string name, IExprPtr rhs, SourceLoc loc = {});
StmtPtr if_(BExprPtr c, StmtPtr t, StmtPtr e, SourceLoc loc = {});
StmtPtr while_(BExprPtr c, BExprPtr inv, StmtPtr body, SourceLoc loc = {});
StmtPtr ret(IExprPtr e, SourceLoc loc = {});

}  // namespace build

}  // namespace certivex
