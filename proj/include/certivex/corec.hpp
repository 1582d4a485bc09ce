#pragma once

// Core IR with de Bruijn indexed variables: translation from the dialect, a
// fueled big-step interpreter, and a small-step machine.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "certivex/syntax.hpp"
#include "certivex/vfsem.hpp"

namespace certivex::core {

enum class Unop { Neg, Not };
enum class Binop { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view name(Unop op);
std::string_view name(Binop op);

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Lit {
  std::int64_t value;
};
struct VarIdx {
  std::size_t index;
};
struct Unary {
  Unop op;
  ExprPtr operand;
};
/// And and Or short-circuit; booleans are 0 and 1.
struct Binary {
  Binop op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<Lit, VarIdx, Unary, Binary> node;
  SourceLoc loc;
};

struct Skip {};
struct Seq {
  StmtPtr first;
  StmtPtr second;
};
struct Assign {
  std::size_t index;
  ExprPtr value;
};
/// Evaluates `init`, then runs `body` with the value bound at index 0.
struct Block {
  ExprPtr init;
  StmtPtr body;
};
struct If {
  ExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;
};
struct Loop {
  StmtPtr body;
};
struct Throw {
  std::size_t level;
};
struct Catch {
  StmtPtr body;
};
struct Ret {
  ExprPtr value;
};

struct Stmt {
  std::variant<Skip, Seq, Assign, Block, If, Loop, Throw, Catch, Ret> node;
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);

/// Index 0 is the innermost binding.
using HStore = std::vector<std::int64_t>;

/// Compact one-line form, e.g. `Block(Lit 1, Ret(Var 0))`.
std::string to_string(const Expr& e);
std::string to_string(const Stmt& s);
/// One constructor per line.
std::string dump(const Stmt& s);

/// `ctx` lists the variables in scope, innermost first.
ExprPtr translate(const IExpr& e, const std::vector<std::string>& ctx);
ExprPtr translate(const BExpr& b, const std::vector<std::string>& ctx);
StmtPtr translate(const certivex::Stmt& s, const std::vector<std::string>& ctx);

/// The body under the parameter context (last parameter innermost).
std::vector<std::string> param_context(const Func& f);
StmtPtr translate_func(const Func& f);

/// The store related to `vs` under `ctx`.
HStore lower_store(const CStore& vs, const std::vector<std::string>& ctx);

/// Empty when related, otherwise the first mismatching position (the store
/// length when only the lengths differ).
std::optional<std::size_t> store_rel(const CStore& vs, const std::vector<std::string>& ctx, const HStore& hs);

using IntResult = std::variant<std::int64_t, Ub>;
IntResult eval(const HStore& store, const Expr& e);

struct ONormal {
  HStore store;
};
struct OReturn {
  std::int64_t value;
};
struct OThrow {
  std::size_t level;
  HStore store;
};
struct OUndefined {
  Ub ub;
};
struct OFuelExhausted {};

using Outcome = std::variant<ONormal, OReturn, OThrow, OUndefined, OFuelExhausted>;

std::string describe(const Outcome& o);
bool same_outcome(const Outcome& a, const Outcome& b);

/// Fuel is spent once per loop iteration and once per sequence step; a loop
/// whose store repeats at the start of an iteration is reported as
/// FuelExhausted.
Outcome exec(const HStore& store, const Stmt& s, std::uint64_t fuel);

// ---- small-step machine ----

struct Down {
  StmtPtr stmt;
};
struct SNormal {};
struct SReturn {
  std::int64_t value;
};
struct SThrow {
  std::size_t level;
};
using Signal = std::variant<SNormal, SReturn, SThrow>;
struct Up {
  Signal signal;
};

struct SeqK {
  StmtPtr second;
};
struct LoopK {
  StmtPtr body;
};
struct CatchK {};
struct BlockK {};
using Frame = std::variant<SeqK, LoopK, CatchK, BlockK>;

struct MachineState {
  std::variant<Down, Up> focus;
  std::vector<Frame> frames;  // innermost last
  HStore store;
};

MachineState initial_state(StmtPtr s, HStore store);

struct Next {
  MachineState state;
};
struct Stuck {
  Ub ub;
};
struct Final {
  std::int64_t value;
};
/// No frames left and the signal is not a return.
struct Halted {
  Signal signal;
  HStore store;
};
using StepResult = std::variant<Next, Stuck, Final, Halted>;

StepResult step(const MachineState& s);

std::string describe(const MachineState& s);

/// Steps until Stuck, Final or Halted, or until `max_steps` steps were taken
/// (then nullopt). `steps` receives the number of steps taken.
std::optional<StepResult> run_machine(MachineState s, std::uint64_t max_steps, std::uint64_t* steps = nullptr,
                                      const vf::TraceSink& trace = {});

class NoLoop : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Replaces the loop_index-th Loop in pre-order, `Loop b`, by
/// `Seq(b, Loop b)`. Throws NoLoop if there is no such loop.
StmtPtr unroll_once(const StmtPtr& s, std::size_t loop_index = 0);

std::size_t count_loops(const Stmt& s);

}  // namespace certivex::core
