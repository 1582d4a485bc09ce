#pragma once

// Symbolic execution of a function into a tree of Assume/Assert/Fresh/Branch
// steps, whose Assert nodes are the proof obligations of the run.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "certivex/solver.hpp"
#include "certivex/symstore.hpp"
#include "certivex/syntax.hpp"

namespace certivex {

/// Why an assertion was emitted.
enum class Origin { InvariantEntry, InvariantPreserved, Postcondition, Overflow, DivisionByZero, MissingReturn };

std::string_view to_string(Origin o);
std::optional<Origin> origin_from_string(std::string_view s);

struct SepNode;
using SepPtr = std::shared_ptr<const SepNode>;

struct SepAssume {
  sym::Prop prop;
  SepPtr rest;
};
struct SepAssert {
  sym::Prop prop;
  Origin origin;
  SourceLoc loc;
  SepPtr rest;
};
/// Binds symbols first .. first+count-1.
struct SepFresh {
  sym::SymbolId first;
  std::uint32_t count;
  SepPtr rest;
};
struct SepBranch {
  SepPtr left;
  SepPtr right;
};
struct SepDone {};

struct SepNode {
  std::variant<SepAssume, SepAssert, SepFresh, SepBranch, SepDone> node;
};

/// Fresh symbols for the parameters, the precondition assumed, then the body.
/// `f` is expected to be simplified.
SepPtr exec_func(const Func& f);

bool equal(const SepNode& a, const SepNode& b);

/// One node per line, branches indented.
std::string dump(const SepNode& t);

struct Obligation {
  /// Counts of single-child nodes passed, separated by L/R at each branch,
  /// e.g. "4.L.1".
  std::string path;
  Origin origin;
  SourceLoc loc;
  sym::PathCond hypotheses;
  sym::Prop goal;
};

/// All Assert nodes, depth first, left before right.
std::vector<Obligation> collect_obligations(const SepNode& t);

std::string describe(const Obligation& o);

struct Verified {
  SepPtr tree;
  std::vector<Obligation> obligations;
  std::vector<solver::Proof> proofs;
};
struct Rejected {
  Obligation failed;
  sym::Valuation countermodel;
};
struct SolverIncomplete {
  Obligation failed;
  std::string reason;
};
using Verdict = std::variant<Verified, Rejected, SolverIncomplete>;

/// Symbolically executes the simplified body and discharges every obligation
/// in order; the first one not proved decides the verdict.
Verdict verify_func(const Func& f, const solver::Options& opts = {});

}  // namespace certivex
