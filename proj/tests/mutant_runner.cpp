// Runs the property suites against whichever library build this binary is
// linked with and prints one JSON object with the counterexample counts.

#include <cstdlib>
#include <iostream>

#include "certivex/harness.hpp"

using namespace certivex;

int main(int argc, char** argv) {
  std::size_t programs = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 300;
  harness::SuiteOptions opts;
  opts.seed = 42;
  opts.valuations = 32;
  opts.max_examples = 1;

  auto corpus = harness::generate_corpus(opts.seed, programs);
  std::vector<harness::SuiteReport> reports = {
      harness::soundness_suite(corpus, opts),  harness::translation_suite(corpus, opts),
      harness::bigsmall_suite(corpus, opts),   harness::unrolling_suite(corpus, opts),
      harness::tamper_suite(corpus, opts, 300), harness::solver_suite(opts, 2000),
  };
  nlohmann::json out;
  out["mutation"] = CERTIVEX_MUTATION;
  for (const auto& r : reports) out["suites"][r.name] = harness::to_json(r);
  std::cout << out.dump() << "\n";
  return 0;
}
