#pragma once

// Concrete big-step semantics of the dialect with fuel and explicit undefined
// behaviour.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "certivex/syntax.hpp"

namespace certivex {

enum class UbKind { Overflow, DivByZero, ModByZero };

std::string_view to_string(UbKind k);

struct Ub {
  UbKind kind;
  SourceLoc loc;
};

/// Values are always within the int range.
using CStore = std::map<std::string, std::int64_t>;

namespace vf {

struct Normal {
  CStore store;
};
struct Returned {
  std::int64_t value;
  CStore store;
};
struct Undefined {
  Ub ub;
};
struct FuelExhausted {};

using Outcome = std::variant<Normal, Returned, Undefined, FuelExhausted>;

std::string describe(const Outcome& o);

/// Receives one line per rule fired.
using TraceSink = std::function<void(const std::string&)>;

using IntResult = std::variant<std::int64_t, Ub>;
using BoolResult = std::variant<bool, Ub>;

/// Per-operation range checks; && and || short-circuit.
IntResult eval_int(const CStore& store, const IExpr& e);
BoolResult eval_bool(const CStore& store, const BExpr& b);

/// Fuel is spent once per loop iteration and once per sequence step. A loop
/// whose store at the head of an iteration repeats an earlier one diverges
/// and is reported as FuelExhausted as soon as the repetition is seen.
Outcome exec(const CStore& store, const Stmt& s, std::uint64_t fuel, const TraceSink& trace = {});

/// Annotation semantics: unbounded integers, division truncating with
/// x / 0 = 0 and x % 0 = x. Every variable must be bound.
bool holds(const CStore& store, const BExpr& b);

struct OracleResult {
  bool pass;
  std::string reason;
  Outcome outcome;
};

/// Runs the body from the store binding exactly the parameters. Passes on
/// FuelExhausted or on a return value satisfying the postcondition.
OracleResult func_correct(const Func& f, const CStore& args, std::uint64_t fuel, const TraceSink& trace = {});

}  // namespace vf

}  // namespace certivex
