// certivex: verify annotated C functions, emit and check certificates, run
// programs, show their core translation, and run the differential tests.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "certivex/cert.hpp"
#include "certivex/corec.hpp"
#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "certivex/pretty.hpp"
#include "certivex/symexec.hpp"
#include "certivex/vfsem.hpp"

namespace {

using namespace certivex;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitIncomplete = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;
constexpr int kExitUsage = 64;

struct Config {
  std::uint64_t fuel = 1000000;
  std::uint64_t seed = 42;
  std::size_t samples = 256;
  std::size_t valuations = 256;
  bool json = false;
  bool trace = false;
};

struct IoError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError{"cannot write " + path};
  out << text;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int parse_error(const Config& cfg, const std::string& file, const ParseError& e) {
  if (cfg.json) {
    print_json({{"verdict", "parse-error"}, {"location", to_string(e.loc())}, {"message", e.message()}});
  } else {
    std::cerr << file << ":" << to_string(e.loc()) << ": error: " << e.message() << "\n";
  }
  return kExitParse;
}

json valuation_json(const sym::Valuation& nu) {
  json j = json::object();
  for (const auto& [s, v] : nu) j["s" + std::to_string(s)] = cert::to_json(v);
  return j;
}

json obligation_json(const Obligation& o) {
  json hyps = json::array();
  for (const auto& h : o.hypotheses) hyps.push_back(sym::to_string(h));
  return {{"path", o.path},
          {"origin", std::string(to_string(o.origin))},
          {"loc", to_string(o.loc)},
          {"hypotheses", hyps},
          {"goal", sym::to_string(o.goal)}};
}

int cmd_verify(const Config& cfg, const std::string& file, const std::string& emit_path) {
  Program p;
  try {
    p = parse_program(read_file(file));
  } catch (const ParseError& e) {
    return parse_error(cfg, file, e);
  }
  Verdict verdict = verify_func(p.main);

  if (const auto* v = std::get_if<Verified>(&verdict)) {
    if (!emit_path.empty()) write_file(emit_path, cert::serialize(cert::emit(p, *v)));
    if (cfg.json) {
      json out = {{"verdict", "verified"}, {"obligations", v->obligations.size()}};
      if (!emit_path.empty()) out["certificate"] = emit_path;
      print_json(out);
    } else {
      std::cout << "verified: " << v->obligations.size() << " obligations proved\n";
      if (cfg.trace) {
        std::cout << dump(*v->tree);
        for (std::size_t i = 0; i < v->obligations.size(); ++i) {
          std::cout << describe(v->obligations[i]) << "\n";
          for (const auto& w : v->proofs[i].clauses) std::cout << solver::describe(*w);
        }
      }
      if (!emit_path.empty()) std::cout << "certificate written to " << emit_path << "\n";
    }
    return kExitOk;
  }
  if (const auto* r = std::get_if<Rejected>(&verdict)) {
    if (cfg.json) {
      print_json({{"verdict", "rejected"}, {"failed", obligation_json(r->failed)},
                  {"countermodel", valuation_json(r->countermodel)}});
    } else {
      std::cout << "rejected: " << describe(r->failed) << "\n";
      std::cout << "countermodel:";
      if (r->countermodel.empty()) std::cout << " (any)";
      for (const auto& [s, v] : r->countermodel) std::cout << " s" << s << " = " << v;
      std::cout << "\n";
    }
    return kExitFailed;
  }
  const auto& inc = std::get<SolverIncomplete>(verdict);
  if (cfg.json) {
    print_json({{"verdict", "incomplete"}, {"failed", obligation_json(inc.failed)}, {"reason", inc.reason}});
  } else {
    std::cout << "incomplete: " << describe(inc.failed) << "\n  " << inc.reason << "\n";
  }
  return kExitIncomplete;
}

int cmd_check(const Config& cfg, const std::string& file, const std::string& cert_file) {
  std::string source = read_file(file);
  std::string text = read_file(cert_file);
  auto report = cert::check_text(source, text);
  if (cfg.json) {
    json out = {{"accepted", report.accepted}, {"steps", report.steps}};
    if (report.accepted) {
      out["replay_hash"] = report.replay_hash;
    } else {
      out["phase"] = report.phase;
      out["location"] = report.location;
      out["reason"] = report.reason;
    }
    print_json(out);
  } else if (report.accepted) {
    std::cout << "accepted (" << report.steps << " witness steps, replay " << report.replay_hash.substr(0, 16)
              << ")\n";
  } else {
    std::cout << "rejected in phase " << report.phase;
    if (!report.location.empty()) std::cout << " at " << report.location;
    std::cout << ": " << report.reason << "\n";
  }
  return report.accepted ? kExitOk : kExitFailed;
}

// `name=value` pairs into a store for the function's parameters.
bool parse_args(const Func& f, const std::vector<std::string>& args, CStore& store, std::string& error) {
  for (const auto& a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos) {
      error = "expected name=value, got '" + a + "'";
      return false;
    }
    std::string name = a.substr(0, eq);
    if (std::find(f.params.begin(), f.params.end(), name) == f.params.end()) {
      error = "'" + name + "' is not a parameter";
      return false;
    }
    try {
      std::size_t used = 0;
      long long v = std::stoll(a.substr(eq + 1), &used);
      if (used != a.size() - eq - 1 || !in_int_range(v)) throw std::out_of_range("value");
      store[name] = v;
    } catch (const std::exception&) {
      error = "bad int value in '" + a + "'";
      return false;
    }
  }
  for (const auto& p : f.params) {
    if (!store.count(p)) {
      error = "missing --arg " + p + "=<value>";
      return false;
    }
  }
  return true;
}

int cmd_run(const Config& cfg, const std::string& file, const std::vector<std::string>& args) {
  Program p;
  try {
    p = parse_program(read_file(file));
  } catch (const ParseError& e) {
    return parse_error(cfg, file, e);
  }
  CStore store;
  std::string error;
  if (!parse_args(p.main, args, store, error)) {
    std::cerr << "error: " << error << "\n";
    return kExitUsage;
  }
  if (!vf::holds(store, *p.main.pre)) {
    std::cerr << "error: the precondition does not hold for these arguments\n";
    return kExitUsage;
  }
  vf::TraceSink trace;
  if (cfg.trace && !cfg.json) trace = [](const std::string& line) { std::cout << "  " << line << "\n"; };
  auto res = vf::func_correct(p.main, store, cfg.fuel, trace);
  if (cfg.json) {
    print_json({{"outcome", vf::describe(res.outcome)}, {"pass", res.pass}, {"reason", res.reason}});
  } else {
    std::cout << vf::describe(res.outcome) << "\n";
    std::cout << (res.pass ? "ok: " : "fail: ") << res.reason << "\n";
  }
  return res.pass ? kExitOk : kExitFailed;
}

int cmd_translate(const Config& cfg, const std::string& file, const std::vector<std::string>& args) {
  Program p;
  try {
    p = parse_program(read_file(file));
  } catch (const ParseError& e) {
    return parse_error(cfg, file, e);
  }
  Func f = simplified(p.main);
  auto t = core::translate_func(f);
  if (cfg.json) {
    print_json({{"translation", cert::to_json(*t)}, {"text", core::to_string(*t)}});
  } else {
    std::cout << core::to_string(*t) << "\n\n" << core::dump(*t);
  }
  if (!cfg.trace) return kExitOk;

  CStore store;
  std::string error;
  if (!parse_args(f, args, store, error)) {
    std::cerr << "error: " << error << "\n";
    return kExitUsage;
  }
  std::cout << "\n";
  std::uint64_t steps = 0;
  auto trace = [](const std::string& line) { std::cout << line << "\n"; };
  auto result = core::run_machine(core::initial_state(t, core::lower_store(store, core::param_context(f))),
                                  cfg.fuel, &steps, trace);
  if (!result) {
    std::cout << "no final state after " << steps << " steps\n";
    return kExitOk;
  }
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, core::Final>) {
          std::cout << "Final " << x.value;
        } else if constexpr (std::is_same_v<T, core::Stuck>) {
          std::cout << "Stuck UB " << to_string(x.ub.kind) << " @ " << to_string(x.ub.loc);
        } else if constexpr (std::is_same_v<T, core::Halted>) {
          std::cout << "Halted";
        }
      },
      *result);
  std::cout << " after " << steps << " steps\n";
  return kExitOk;
}

int cmd_difftest(const Config& cfg, bool all) {
  auto corpus = harness::generate_corpus(cfg.seed, cfg.samples);
  harness::SuiteOptions opts;
  opts.seed = cfg.seed;
  opts.fuel = cfg.fuel;
  opts.valuations = cfg.valuations;

  std::vector<harness::SuiteReport> reports;
  reports.push_back(harness::soundness_suite(corpus, opts));
  reports.push_back(harness::translation_suite(corpus, opts));
  reports.push_back(harness::bigsmall_suite(corpus, opts));
  if (all) {
    reports.push_back(harness::unrolling_suite(corpus, opts));
    reports.push_back(harness::tamper_suite(corpus, opts));
    reports.push_back(harness::solver_suite(opts));
  }
  std::size_t total = 0;
  for (const auto& r : reports) total += r.counterexamples;

  if (cfg.json) {
    json out = {{"seed", cfg.seed}, {"programs", corpus.size()}, {"counterexamples", total}};
    out["suites"] = json::array();
    for (const auto& r : reports) out["suites"].push_back(harness::to_json(r));
    print_json(out);
  } else {
    std::cout << "seed " << cfg.seed << ", " << corpus.size() << " programs\n";
    for (const auto& r : reports) {
      std::cout << r.name << ": " << r.cases << " cases, " << r.counterexamples << " counterexamples";
      for (const auto& [k, v] : r.stats) std::cout << ", " << k << "=" << v;
      std::cout << "\n";
      for (const auto& e : r.examples) std::cout << e << "\n";
    }
    std::cout << total << " counterexamples\n";
  }
  return total == 0 ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certivex: certified verification of annotated C functions"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--fuel", cfg.fuel, "Loop iteration budget")
      ->envname("CERTIVEX_FUEL")
      ->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
  app.add_option("--seed", cfg.seed, "Seed for program generation")->envname("CERTIVEX_SEED");
  app.add_option("--samples", cfg.samples, "Number of generated programs")
      ->envname("CERTIVEX_SAMPLES")
      ->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  app.add_option("--valuations", cfg.valuations, "Argument valuations per program")
      ->envname("CERTIVEX_VALUATIONS")
      ->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  app.add_flag("--json", cfg.json, "Machine-readable output")->envname("CERTIVEX_JSON");
  app.add_flag("--trace", cfg.trace, "Trace execution")->envname("CERTIVEX_TRACE");

  std::string file;
  std::string cert_file;
  std::string emit_path;
  std::vector<std::string> args;
  bool all = false;

  auto* verify = app.add_subcommand("verify", "Verify a program; exit 0 verified, 1 rejected, 2 incomplete, 3 parse error");
  verify->add_option("file", file, "Source file")->required();
  verify->add_option("--emit-cert", emit_path, "Write the certificate here");

  auto* check = app.add_subcommand("check-cert", "Check a certificate against its source");
  check->add_option("file", file, "Source file")->required();
  check->add_option("cert", cert_file, "Certificate file")->required();

  auto* run = app.add_subcommand("run", "Run a program under the concrete semantics");
  run->add_option("file", file, "Source file")->required();
  run->add_option("--arg", args, "Parameter value, name=value");

  auto* translate = app.add_subcommand("translate", "Print the core translation");
  translate->add_option("file", file, "Source file")->required();
  translate->add_option("--arg", args, "Parameter value for --trace, name=value");

  auto* difftest = app.add_subcommand("difftest", "Differential tests on generated programs");
  difftest->add_flag("--all", all, "Also run the unrolling, tamper and solver suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(cfg, file, emit_path);
    if (*check) return cmd_check(cfg, file, cert_file);
    if (*run) return cmd_run(cfg, file, args);
    if (*translate) return cmd_translate(cfg, file, args);
    if (*difftest) return cmd_difftest(cfg, all);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
