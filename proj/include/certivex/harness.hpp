#pragma once

// Random program generation, shrinking, and the differential property suites
// that test the verifier against the concrete semantics.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "certivex/solver.hpp"
#include "certivex/syntax.hpp"
#include "certivex/vfsem.hpp"

namespace certivex::harness {

using Rng = std::mt19937_64;

struct GenOptions {
  int max_params = 3;
  int max_depth = 3;
  int max_items = 5;
  /// Chance that a loop is built from a template known to verify.
  double template_loop = 0.5;
};

/// A well-formed function; printing and re-parsing it gives it back.
Func generate_func(Rng& rng, const GenOptions& opts = {});

/// `count` programs from `seed`, each round-tripped through the parser.
std::vector<Program> generate_corpus(std::uint64_t seed, std::size_t count, const GenOptions& opts = {});

/// Up to `count` distinct argument stores satisfying the precondition.
std::vector<CStore> sample_valuations(const Func& f, Rng& rng, std::size_t count);

/// Greedy structural shrinking while `still_fails` holds, at most `max_steps`
/// candidate evaluations.
Func shrink(const Func& f, const std::function<bool(const Func&)>& still_fails, int max_steps = 1000);

struct SuiteReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t counterexamples = 0;
  std::vector<std::string> examples;
  /// Suite-specific counts, e.g. how many programs verified.
  std::vector<std::pair<std::string, std::size_t>> stats;

  std::size_t stat(const std::string& key) const;
  void note(const std::string& key, std::size_t value);
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  std::uint64_t fuel = 1000000;
  std::size_t valuations = 256;
  bool shrink = true;
  std::size_t max_examples = 3;
  solver::Options solver;
};

/// Verified programs never show UB, a missing return or a false
/// postcondition on sampled arguments.
SuiteReport soundness_suite(const std::vector<Program>& corpus, const SuiteOptions& opts);

/// The dialect and the translated core program agree on outcomes.
SuiteReport translation_suite(const std::vector<Program>& corpus, const SuiteOptions& opts);

/// Terminating or undefined big-step core runs are matched by the machine.
SuiteReport bigsmall_suite(const std::vector<Program>& corpus, const SuiteOptions& opts);

/// Unrolling one loop once preserves terminating outcomes, on up to
/// `programs` loop-containing translations.
SuiteReport unrolling_suite(const std::vector<Program>& corpus, const SuiteOptions& opts, std::size_t programs = 100);

/// Single-field mutations of accepted certificates are all rejected.
SuiteReport tamper_suite(const std::vector<Program>& corpus, const SuiteOptions& opts, std::size_t mutations = 1000);

/// decide against brute force on bounded random instances, plus witnesses
/// forged for or transplanted onto invalid instances.
SuiteReport solver_suite(const SuiteOptions& opts, std::size_t instances = 10000);

nlohmann::json to_json(const SuiteReport& r);

}  // namespace certivex::harness
