// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "certivex/cert.hpp"
#include "certivex/corec.hpp"
#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "certivex/symexec.hpp"
#include "certivex/vfsem.hpp"
#include "support.hpp"

using namespace certivex;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr std::size_t kPrograms = 500;
constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kValuations = 256;
constexpr std::uint64_t kFuel = 1000000;
constexpr std::size_t kMinVerified = 50;
constexpr std::size_t kUnrollPrograms = 100;
constexpr std::size_t kTamperMutations = 1000;
constexpr std::size_t kSolverInstances = 10000;
constexpr double kGoldenSeconds = 1.0;
constexpr double kCheckSeconds = 0.25;
constexpr std::size_t kMaxCounterexamples = 0;

struct Line {
  int n;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int n, bool pass, const std::string& detail) {
  lines.push_back({n, pass, detail});
  std::cout << "C" << n << " " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Spawned {
  int code;
  std::string out;
};

Spawned spawn(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::fixed << v;
  return ss.str();
}

std::string suite_detail(const harness::SuiteReport& r) {
  std::string s = std::to_string(r.cases) + " cases, " + std::to_string(r.counterexamples) + " counterexamples";
  for (const auto& [k, v] : r.stats) s += ", " + k + "=" + std::to_string(v);
  if (!r.examples.empty()) s += "; first: " + r.examples.front();
  return s;
}

// ---- criterion 1

bool golden_tree(const Verified& v, std::string& why) {
  std::size_t branches = 0;
  std::function<void(const SepNode&)> walk = [&](const SepNode& n) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SepBranch>) {
            ++branches;
            walk(*x.left);
            walk(*x.right);
          } else if constexpr (!std::is_same_v<T, SepDone>) {
            walk(*x.rest);
          }
        },
        n.node);
  };
  walk(*v.tree);
  if (branches != 1) {
    why = std::to_string(branches) + " branch nodes";
    return false;
  }

  auto texts = [](const sym::PathCond& pc) {
    std::vector<std::string> out;
    for (const auto& h : pc) out.push_back(sym::to_string(h));
    return out;
  };
  const Obligation* body = nullptr;
  const Obligation* exit = nullptr;
  for (const auto& o : v.obligations) {
    if (o.origin == Origin::InvariantPreserved) body = &o;
    if (o.origin == Origin::Postcondition) exit = &o;
    if (o.origin != Origin::InvariantPreserved && o.origin != Origin::Postcondition &&
        o.origin != Origin::InvariantEntry && o.origin != Origin::Overflow) {
      why = "unexpected obligation " + describe(o);
      return false;
    }
  }
  if (!body || !exit) {
    why = "missing branch obligation";
    return false;
  }
  if (texts(body->hypotheses) != std::vector<std::string>{"(0 <= s0)", "(0 < s0)"} ||
      sym::to_string(body->goal) != "(0 <= (s0 - 1))" || body->path.find(".L.") == std::string::npos) {
    why = "loop-body branch differs: " + describe(*body);
    return false;
  }
  if (texts(exit->hypotheses) != std::vector<std::string>{"(0 <= s0)", "!(0 < s0)"} ||
      sym::to_string(exit->goal) != "(s0 == 0)" || exit->path.find(".R.") == std::string::npos) {
    why = "loop-exit branch differs: " + describe(*exit);
    return false;
  }
  return true;
}

void criterion1() {
  auto start = Clock::now();
  std::string src = testing::read_source("countdown.c");
  std::string why;
  bool ok = true;

  Program p = parse_program(src);
  Verdict verdict = verify_func(p.main);
  const auto* v = std::get_if<Verified>(&verdict);
  if (!v) {
    report(1, false, "countdown not verified");
    return;
  }
  ok = golden_tree(*v, why);

  Verdict again = verify_func(p.main);
  if (ok && dump(*std::get<Verified>(again).tree) != dump(*v->tree)) {
    ok = false;
    why = "tree not deterministic";
  }

  auto cr = cert::check_text(src, cert::serialize(cert::emit(p, *v)));
  if (ok && !cr.accepted) {
    ok = false;
    why = "certificate rejected in phase " + cr.phase;
  }

  auto run = vf::func_correct(p.main, {}, 100000);
  const auto* ret = std::get_if<vf::Returned>(&run.outcome);
  if (ok && (!ret || ret->value != 0)) {
    ok = false;
    why = "run: " + vf::describe(run.outcome);
  }
  double in_process = seconds_since(start);

  auto cli_start = Clock::now();
  std::string cert_path = (std::filesystem::temp_directory_path() / "certivex_acceptance_countdown.json").string();
  std::string file = std::string(CERTIVEX_TEST_DIR) + "/countdown.c";
  auto a = spawn(std::string(CERTIVEX_CLI) + " verify " + file + " --emit-cert " + cert_path);
  auto b = spawn(std::string(CERTIVEX_CLI) + " check-cert " + file + " " + cert_path);
  auto c = spawn(std::string(CERTIVEX_CLI) + " --fuel 100000 run " + file);
  double cli = seconds_since(cli_start);
  std::filesystem::remove(cert_path);
  if (ok && (a.code != 0 || b.code != 0 || c.code != 0 || c.out.rfind("Return 0", 0) != 0)) {
    ok = false;
    why = "cli exit codes " + std::to_string(a.code) + "/" + std::to_string(b.code) + "/" + std::to_string(c.code);
  }
  if (ok && (in_process >= kGoldenSeconds || cli >= kGoldenSeconds)) {
    ok = false;
    why = "too slow";
  }
  report(1, ok,
         (ok ? std::string("tree shape, certificate and run match") : why) + "; " +
             std::to_string(v->obligations.size()) + " obligations, in-process " + fmt(in_process) + " s, cli " +
             fmt(cli) + " s (limit " + fmt(kGoldenSeconds) + " s)");
}

// ---- criterion 8

void criterion8() {
  bool ok = true;
  std::string detail;
  for (int m = 1; m <= 5; ++m) {
    std::string exe = std::string(CERTIVEX_RUNNER_PREFIX) + std::to_string(m);
    auto r = spawn(exe);
    std::vector<std::string> caught;
    try {
      auto j = nlohmann::json::parse(r.out);
      for (const auto& [name, s] : j["suites"].items()) {
        auto n = s["counterexamples"].get<std::size_t>();
        if (n > 0) caught.push_back(name + "=" + std::to_string(n));
      }
    } catch (const std::exception& e) {
      caught.clear();
    }
    if (r.code != 0 || caught.empty()) ok = false;
    detail += (m > 1 ? "; " : "") + std::string("mutant ") + std::to_string(m) + ": ";
    if (caught.empty()) detail += "not caught";
    for (std::size_t i = 0; i < caught.size(); ++i) detail += (i ? " " : "") + caught[i];
  }
  report(8, ok, detail);
}

}  // namespace

int main() {
  auto total = Clock::now();
  criterion1();

  harness::SuiteOptions opts;
  opts.seed = kSeed;
  opts.fuel = kFuel;
  opts.valuations = kValuations;
  auto corpus = harness::generate_corpus(kSeed, kPrograms);

  auto t = Clock::now();
  auto sound = harness::soundness_suite(corpus, opts);
  std::size_t full = sound.stat("verified") - sound.stat("exhausted_pre");
  report(2, corpus.size() >= kPrograms && full >= kMinVerified && sound.counterexamples <= kMaxCounterexamples,
         std::to_string(corpus.size()) + " programs, " + std::to_string(full) + " verified with " +
             std::to_string(kValuations) + " distinct valuations (need " + std::to_string(kMinVerified) + "); " +
             suite_detail(sound) + " (" + fmt(seconds_since(t)) + " s)");

  t = Clock::now();
  auto tr = harness::translation_suite(corpus, opts);
  report(3, tr.cases > 0 && tr.counterexamples <= kMaxCounterexamples,
         suite_detail(tr) + " (" + fmt(seconds_since(t)) + " s)");

  t = Clock::now();
  auto bs = harness::bigsmall_suite(corpus, opts);
  report(4, bs.cases > 0 && bs.counterexamples <= kMaxCounterexamples,
         suite_detail(bs) + " (" + fmt(seconds_since(t)) + " s)");

  t = Clock::now();
  auto un = harness::unrolling_suite(corpus, opts, kUnrollPrograms);
  report(5, un.stat("programs") == kUnrollPrograms && un.counterexamples <= kMaxCounterexamples,
         suite_detail(un) + " (" + fmt(seconds_since(t)) + " s)");

  t = Clock::now();
  auto tm = harness::tamper_suite(corpus, opts, kTamperMutations);
  Program golden = testing::load("countdown.c");
  std::string src = testing::read_source("countdown.c");
  std::string cert_text =
      cert::serialize(cert::emit(golden, std::get<Verified>(verify_func(golden.main)), "2026-01-01T00:00:00Z"));
  auto ct = Clock::now();
  bool accepted = cert::check_text(src, cert_text).accepted;
  double check_time = seconds_since(ct);
  report(6,
         tm.cases == kTamperMutations && tm.counterexamples <= kMaxCounterexamples && accepted &&
             check_time < kCheckSeconds,
         suite_detail(tm) + "; golden certificate " + std::to_string(cert_text.size()) + " bytes checked in " +
             fmt(check_time) + " s (limit " + fmt(kCheckSeconds) + " s) (" + fmt(seconds_since(t)) + " s)");

  t = Clock::now();
  auto sv = harness::solver_suite(opts, kSolverInstances);
  report(7, sv.cases == kSolverInstances && sv.counterexamples <= kMaxCounterexamples,
         suite_detail(sv) + " (" + fmt(seconds_since(t)) + " s)");

  criterion8();

  std::size_t passed = 0;
  for (const auto& l : lines) passed += l.pass;
  std::cout << passed << "/" << lines.size() << " criteria passed in " << fmt(seconds_since(total)) << " s"
            << std::endl;
  return passed == lines.size() ? 0 : 1;
}
