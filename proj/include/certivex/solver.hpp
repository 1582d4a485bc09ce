#pragma once

// Decision procedure for linear integer entailments with checkable witnesses.
//
// An obligation `hyps |= goal` is turned into a disjunction of clauses, each a
// conjunction of linear atoms `sum(c_i * s_i) + k >= 0`, whose joint
// satisfiability is exactly the failure of the obligation. A proof is one
// witness per clause showing that clause has no integer solution.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "certivex/bigint.hpp"
#include "certivex/symstore.hpp"

namespace certivex::solver {

using sym::SymbolId;

/// sum(coeffs) + constant >= 0. Coefficients are sorted by symbol and nonzero.
struct LinAtom {
  std::vector<std::pair<SymbolId, BigInt>> coeffs;
  BigInt constant;

  BigInt coeff(SymbolId s) const;
  bool operator==(const LinAtom& other) const = default;
};

bool operator<(const LinAtom& a, const LinAtom& b);
std::string to_string(const LinAtom& a);

using Clause = std::vector<LinAtom>;
using Dnf = std::vector<Clause>;

/// Raised when an input leaves the supported fragment or a size limit.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t max_clauses = 4096;
  std::size_t max_rows = 4000;
  std::size_t max_nodes = 400;
  std::uint64_t enum_limit = 1U << 16;
  bool force_enum = false;
};

/// Largest box the witness checker is willing to enumerate.
inline constexpr std::uint64_t kMaxEnumBox = 1U << 16;

/// DNF of `p` over canonical atoms. Clauses that are trivially false are
/// dropped and trivially true atoms removed. Throws Unsupported on Div, Mod
/// or a product of two non-constant terms.
Dnf normalize(const sym::Prop& p, const Options& opts = {});

/// Canonical clause: atoms divided by the gcd of their coefficients with the
/// constant rounded down, sorted, one atom per coefficient vector (the
/// tightest). Returns false if the clause is trivially unsatisfiable.
bool canonicalize(Clause& c);

struct Problem {
  Dnf clauses;
  /// Symbols occurring in the obligation; each is assumed to hold an int.
  std::vector<SymbolId> symbols;
  /// Top-level conjuncts of hypotheses left out as outside the fragment.
  std::size_t dropped = 0;
};

/// The clauses of `hyps && !goal`, plus the int range of every symbol.
/// Division and remainder by constants are replaced by fresh symbols with
/// defining constraints. Hypothesis conjuncts outside the fragment are
/// dropped, which only weakens the assumptions. Throws Unsupported when the
/// goal is outside the fragment.
Problem build_problem(const sym::PathCond& hyps, const sym::Prop& goal, const Options& opts = {});

struct Witness;
using WitnessPtr = std::shared_ptr<const Witness>;

/// The combination sums to the constant `slack` < 0 with every coefficient
/// cancelled. Indices strictly increase; multipliers are positive.
struct Farkas {
  std::vector<std::pair<std::size_t, BigInt>> combination;
  BigInt slack;
};

/// `below` refutes the clause plus `pivot - symbol >= 0`, `above` the clause
/// plus `symbol - pivot - 1 >= 0`; the added atom takes the next index and
/// each branch must use it.
struct CaseSplit {
  SymbolId symbol;
  BigInt pivot;
  WitnessPtr below;
  WitnessPtr above;
};

/// `lo_proof` refutes the clause plus `lo - 1 - symbol >= 0`, `hi_proof` the
/// clause plus `symbol - hi - 1 >= 0`.
struct EnumBound {
  SymbolId symbol;
  BigInt lo;
  BigInt hi;
  WitnessPtr lo_proof;
  WitnessPtr hi_proof;
};

/// Bounds for every symbol of the clause, sorted by symbol; no point of the
/// box satisfies the clause. Only allowed as the root witness of a clause.
struct Enum {
  std::vector<EnumBound> bounds;
};

struct Witness {
  std::variant<Farkas, CaseSplit, Enum> node;
};

struct Proof {
  std::vector<WitnessPtr> clauses;
};

/// Whether a witness references atom `index`.
bool uses(const Witness& w, std::size_t index);

enum class Reject {
  BadIndex,
  NonPositiveMultiplier,
  UnsortedCombination,
  NotContradictory,
  UnusedCaseAtom,
  EnumNotAtRoot,
  BoxMismatch,
  BoxNotImplied,
  BoxTooLarge,
  BoxCounterexample,
  ClauseCountMismatch,
  Unsupported,
};

std::string_view to_string(Reject r);

struct CheckResult {
  bool ok = true;
  Reject reason = Reject::BadIndex;
  std::string detail;

  explicit operator bool() const { return ok; }
};

CheckResult check_witness(const Clause& clause, const Witness& w);
CheckResult check_proof(const sym::PathCond& hyps, const sym::Prop& goal, const Proof& proof);

struct Valid {
  Proof proof;
};
struct Invalid {
  sym::Valuation countermodel;
};
struct Incomplete {
  std::string reason;
};
using Decision = std::variant<Valid, Invalid, Incomplete>;

/// Valid carries a proof accepted by check_proof; Invalid carries a valuation
/// of the obligation's symbols under which every hypothesis holds and the
/// goal fails.
Decision decide(const sym::PathCond& hyps, const sym::Prop& goal, const Options& opts = {});

std::string describe(const Witness& w);

}  // namespace certivex::solver
