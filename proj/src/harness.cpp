#include "certivex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "certivex/cert.hpp"
#include "certivex/corec.hpp"
#include "certivex/parser.hpp"
#include "certivex/pretty.hpp"
#include "certivex/symexec.hpp"

namespace certivex::harness {

namespace {

using namespace certivex::build;
using sym::SymbolId;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng derive(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  return Rng(splitmix(splitmix(seed ^ splitmix(tag)) + index));
}

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& choose(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

// Runs f(0..n-1) on a small pool; callers store per-index results and merge
// them in index order afterwards.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- generator

class Generator {
 public:
  Generator(Rng& rng, const GenOptions& o) : rng_(rng), o_(o) {}

  Func func() {
    Func f;
    f.name = "main";
    int n = static_cast<int>(uniform(rng_, 0, o_.max_params));
    static const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
    for (int i = 0; i < n && i < static_cast<int>(names.size()); ++i) f.params.push_back(names[i]);
    params_ = f.params;
    f.pre = precondition();
    f.post = postcondition();
    Scope sc{f.params, {}};
    f.body = items(sc, static_cast<int>(uniform(rng_, 1, o_.max_items)), o_.max_depth, chance(rng_, 0.9));
    return f;
  }

 private:
  struct Scope {
    std::vector<std::string> vars;
    std::vector<std::string> frozen;

    std::vector<std::string> assignable() const {
      std::vector<std::string> out;
      for (const auto& v : vars) {
        if (std::find(frozen.begin(), frozen.end(), v) == frozen.end()) out.push_back(v);
      }
      return out;
    }
  };

  Rng& rng_;
  const GenOptions& o_;
  std::vector<std::string> params_;
  int next_local_ = 0;

  std::string fresh() { return "x" + std::to_string(next_local_++); }

  std::int64_t literal() {
    int r = static_cast<int>(uniform(rng_, 0, 99));
    if (r < 80) return uniform(rng_, -10, 10);
    if (r < 92) return uniform(rng_, -1000, 1000);
    static const std::vector<std::int64_t> edge = {kIntMax, kIntMin, kIntMax - 1, kIntMin + 1, 65535, -65536, 1000000};
    return choose(rng_, edge);
  }

  IExprPtr leaf(const std::vector<std::string>& vars) {
    if (!vars.empty() && chance(rng_, 0.55)) return var(choose(rng_, vars));
    return lit(literal());
  }

  IExprPtr iexpr(const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || chance(rng_, 0.35)) return leaf(vars);
    int r = static_cast<int>(uniform(rng_, 0, 99));
    if (r < 8) return neg(iexpr(vars, depth - 1));
    if (r < 43) return add(iexpr(vars, depth - 1), iexpr(vars, depth - 1));
    if (r < 73) return sub(iexpr(vars, depth - 1), iexpr(vars, depth - 1));
    if (r < 85) {
      // Mostly a literal factor; a product of two variables is out of the
      // solver's fragment.
      if (chance(rng_, 0.75)) return mul(lit(uniform(rng_, -5, 5)), iexpr(vars, depth - 1));
      return mul(iexpr(vars, depth - 1), iexpr(vars, depth - 1));
    }
    ArithOp op = chance(rng_, 0.5) ? ArithOp::Div : ArithOp::Mod;
    IExprPtr divisor;
    int d = static_cast<int>(uniform(rng_, 0, 99));
    if (d < 75) {
      std::int64_t k = uniform(rng_, 1, 7);
      divisor = lit(chance(rng_, 0.2) ? -k : k);
    } else if (d < 95) {
      divisor = leaf(vars);
    } else {
      divisor = lit(0);
    }
    return arith(op, iexpr(vars, depth - 1), divisor);
  }

  CmpOp cmp_op() {
    static const std::vector<CmpOp> ops = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
    return choose(rng_, ops);
  }

  BExprPtr bexpr(const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || chance(rng_, 0.5)) {
      if (chance(rng_, 0.08)) return boolean(chance(rng_, 0.5));
      return cmp(cmp_op(), iexpr(vars, 1), iexpr(vars, 1));
    }
    if (chance(rng_, 0.25)) return lnot(bexpr(vars, depth - 1));
    return logic(chance(rng_, 0.5) ? LogicOp::And : LogicOp::Or, bexpr(vars, depth - 1), bexpr(vars, depth - 1));
  }

  static BExprPtr conjoin(BExprPtr acc, BExprPtr b) { return acc ? land(acc, b) : b; }

  BExprPtr precondition() {
    BExprPtr pre;
    for (const auto& p : params_) {
      int r = static_cast<int>(uniform(rng_, 0, 99));
      if (r < 60) {
        std::int64_t lo = uniform(rng_, -50, 0);
        std::int64_t hi = uniform(rng_, 0, 50);
        pre = conjoin(pre, land(le(lit(lo), var(p)), le(var(p), lit(hi))));
      } else if (r < 75) {
        pre = conjoin(pre, le(lit(0), var(p)));
      } else if (r < 82) {
        pre = conjoin(pre, cmp(cmp_op(), var(p), lit(uniform(rng_, -20, 20))));
      }
    }
    return pre ? pre : boolean(true);
  }

  BExprPtr postcondition() {
    if (chance(rng_, 0.3)) return boolean(true);
    std::vector<std::string> vars = params_;
    vars.emplace_back(kResultName);
    IExprPtr rhs = !params_.empty() && chance(rng_, 0.25) ? var(choose(rng_, params_)) : lit(uniform(rng_, -3, 3));
    BExprPtr post = cmp(cmp_op(), var(std::string(kResultName)), rhs);
    if (chance(rng_, 0.2)) post = logic(chance(rng_, 0.5) ? LogicOp::And : LogicOp::Or, post, bexpr(vars, 1));
    return post;
  }

  // `count` more statements, optionally ending in a return.
  StmtPtr items(Scope sc, int count, int depth, bool must_return) {
    if (count <= 0) return must_return ? ret(iexpr(sc.vars, 2)) : skip();
    auto rest = [&](Scope s) { return items(std::move(s), count - 1, depth, must_return); };
    auto then_rest = [&](StmtPtr head, Scope s) {
      StmtPtr tail = rest(std::move(s));
      return std::holds_alternative<Skip>(tail->node) ? head : seq(head, tail);
    };
    auto assignable = sc.assignable();

    int r = static_cast<int>(uniform(rng_, 0, 99));
    if (r < 30) {
      std::string x = fresh();
      IExprPtr init = iexpr(sc.vars, 2);
      Scope inner = sc;
      inner.vars.push_back(x);
      return let(x, init, rest(inner));
    }
    if (r < 55 && !assignable.empty()) {
      return then_rest(assign(choose(rng_, assignable), iexpr(sc.vars, 2)), sc);
    }
    if (r < 70 && depth > 0) {
      int n = static_cast<int>(uniform(rng_, 0, 2));
      StmtPtr t = items(sc, n, depth - 1, chance(rng_, 0.15));
      StmtPtr e = items(sc, static_cast<int>(uniform(rng_, 0, 2)), depth - 1, chance(rng_, 0.15));
      return then_rest(if_(bexpr(sc.vars, 2), t, e), sc);
    }
    if (r < 90 && depth > 0) {
      return chance(rng_, o_.template_loop) ? template_loop(sc, count, depth, must_return)
                                            : random_loop(sc, count, depth, must_return);
    }
    if (r < 94) return ret(iexpr(sc.vars, 2));
    if (!assignable.empty()) return then_rest(assign(choose(rng_, assignable), iexpr(sc.vars, 1)), sc);
    return rest(sc);
  }

  // Loop bound: a small literal or a variable reduced mod 16.
  IExprPtr bound(const std::vector<std::string>& candidates) {
    if (!candidates.empty() && chance(rng_, 0.4)) return mod(var(choose(rng_, candidates)), lit(16));
    return lit(uniform(rng_, 0, 12));
  }

  // Counter-driven loops whose invariant and body are known to go together.
  StmtPtr template_loop(Scope sc, int count, int depth, bool must_return) {
    int kind = static_cast<int>(uniform(rng_, 0, 2));
    std::string c = fresh();
    Scope after = sc;
    after.vars.push_back(c);

    if (kind == 0) {
      // Counting up under a trivial invariant; the guard keeps c + 1 in range.
      auto targets = sc.assignable();
      std::string target = targets.empty() || chance(rng_, 0.5) ? "" : choose(rng_, targets);
      std::vector<std::string> bound_vars;
      for (const auto& v : sc.vars) {
        if (v != target) bound_vars.push_back(v);
      }
      StmtPtr body = assign(c, add(var(c), lit(1)));
      if (!target.empty()) {
        body = seq(assign(target, chance(rng_, 0.5) ? var(c) : lit(uniform(rng_, -5, 5))), body);
      }
      StmtPtr loop = while_(lt(var(c), bound(bound_vars)), boolean(true), body);
      return let(c, lit(0), seq(loop, items(after, count - 1, depth, must_return)));
    }
    if (kind == 1) {
      // Counting down to zero under a trivial invariant.
      IExprPtr init = !sc.vars.empty() && chance(rng_, 0.5) ? mod(var(choose(rng_, sc.vars)), lit(16))
                                                             : lit(uniform(rng_, 0, 30));
      StmtPtr loop = while_(lt(lit(0), var(c)), boolean(true), assign(c, sub(var(c), lit(1))));
      return let(c, init, seq(loop, items(after, count - 1, depth, must_return)));
    }
    // Bounded accumulation: 0 <= s <= k * c.
    std::string s = fresh();
    after.vars.push_back(s);
    std::int64_t n = uniform(rng_, 0, 12);
    std::int64_t k = uniform(rng_, 1, 5);
    std::int64_t step = uniform(rng_, 0, k);
    BExprPtr inv = land(land(le(lit(0), var(c)), le(var(c), lit(n))),
                        land(le(lit(0), var(s)), le(var(s), mul(lit(k), var(c)))));
    StmtPtr body = seq(assign(s, add(var(s), lit(step))), assign(c, add(var(c), lit(1))));
    StmtPtr loop = while_(lt(var(c), lit(n)), inv, body);
    return let(c, lit(0), let(s, lit(0), seq(loop, items(after, count - 1, depth, must_return))));
  }

  // A counter-driven loop with a random invariant and body.
  StmtPtr random_loop(Scope sc, int count, int depth, bool must_return) {
    std::string c = fresh();
    Scope inner = sc;
    inner.vars.push_back(c);
    inner.frozen.push_back(c);
    std::int64_t n = uniform(rng_, 0, 10);
    BExprPtr cond = lt(var(c), lit(n));
    if (chance(rng_, 0.3)) cond = land(cond, bexpr(inner.vars, 1));
    BExprPtr inv;
    int r = static_cast<int>(uniform(rng_, 0, 99));
    if (r < 35) {
      inv = boolean(true);
    } else if (r < 60) {
      inv = land(le(lit(0), var(c)), le(var(c), lit(n)));
    } else {
      inv = bexpr(inner.vars, 1);
    }
    StmtPtr body = items(inner, static_cast<int>(uniform(rng_, 0, 2)), depth - 1, chance(rng_, 0.1));
    StmtPtr step = assign(c, add(var(c), lit(1)));
    body = std::holds_alternative<Skip>(body->node) ? step : seq(body, step);
    Scope after = sc;
    after.vars.push_back(c);
    StmtPtr loop = while_(cond, inv, body);
    return let(c, lit(0), seq(loop, items(after, count - 1, depth, must_return)));
  }
};

// ---------------------------------------------------------------- shrinking

std::vector<IExprPtr> variants(const IExprPtr& e) {
  std::vector<IExprPtr> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          if (x.value != 0) out.push_back(lit(0, e->loc));
          if (x.value > 1 || x.value < -1) out.push_back(lit(x.value / 2, e->loc));
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out.push_back(lit(0, e->loc));
        } else if constexpr (std::is_same_v<T, Negate>) {
          out.push_back(lit(0, e->loc));
          out.push_back(x.operand);
          for (auto& v : variants(x.operand)) out.push_back(neg(v, e->loc));
        } else {
          out.push_back(lit(0, e->loc));
          out.push_back(x.lhs);
          out.push_back(x.rhs);
          for (auto& v : variants(x.lhs)) out.push_back(arith(x.op, v, x.rhs, e->loc));
          for (auto& v : variants(x.rhs)) out.push_back(arith(x.op, x.lhs, v, e->loc));
        }
      },
      e->node);
  return out;
}

std::vector<BExprPtr> variants(const BExprPtr& b) {
  std::vector<BExprPtr> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          if (!x.value) out.push_back(boolean(true, b->loc));
        } else if constexpr (std::is_same_v<T, Compare>) {
          out.push_back(boolean(true, b->loc));
          out.push_back(boolean(false, b->loc));
          for (auto& v : variants(x.lhs)) out.push_back(cmp(x.op, v, x.rhs, b->loc));
          for (auto& v : variants(x.rhs)) out.push_back(cmp(x.op, x.lhs, v, b->loc));
        } else if constexpr (std::is_same_v<T, Not>) {
          out.push_back(boolean(true, b->loc));
          out.push_back(x.operand);
          for (auto& v : variants(x.operand)) out.push_back(lnot(v, b->loc));
        } else {
          out.push_back(boolean(true, b->loc));
          out.push_back(x.lhs);
          out.push_back(x.rhs);
          for (auto& v : variants(x.lhs)) out.push_back(logic(x.op, v, x.rhs, b->loc));
          for (auto& v : variants(x.rhs)) out.push_back(logic(x.op, x.lhs, v, b->loc));
        }
      },
      b->node);
  return out;
}

std::vector<StmtPtr> variants(const StmtPtr& s) {
  std::vector<StmtPtr> out;
  SourceLoc loc = s->loc;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Skip>) {
        } else if constexpr (std::is_same_v<T, Seq>) {
          out.push_back(x.first);
          out.push_back(x.second);
          for (auto& v : variants(x.first)) out.push_back(seq(v, x.second, loc));
          for (auto& v : variants(x.second)) out.push_back(seq(x.first, v, loc));
        } else if constexpr (std::is_same_v<T, Let>) {
          out.push_back(x.body);
          for (auto& v : variants(x.init)) out.push_back(let(x.name, v, x.body, loc));
          for (auto& v : variants(x.body)) out.push_back(let(x.name, x.init, v, loc));
        } else if constexpr (std::is_same_v<T, Assign>) {
          out.push_back(skip(loc));
          for (auto& v : variants(x.rhs)) out.push_back(assign(x.name, v, loc));
        } else if constexpr (std::is_same_v<T, If>) {
          out.push_back(skip(loc));
          out.push_back(x.then_branch);
          out.push_back(x.else_branch);
          for (auto& v : variants(x.cond)) out.push_back(if_(v, x.then_branch, x.else_branch, loc));
          for (auto& v : variants(x.then_branch)) out.push_back(if_(x.cond, v, x.else_branch, loc));
          for (auto& v : variants(x.else_branch)) out.push_back(if_(x.cond, x.then_branch, v, loc));
        } else if constexpr (std::is_same_v<T, While>) {
          out.push_back(skip(loc));
          for (auto& v : variants(x.cond)) out.push_back(while_(v, x.invariant, x.body, loc));
          for (auto& v : variants(x.invariant)) out.push_back(while_(x.cond, v, x.body, loc));
          for (auto& v : variants(x.body)) out.push_back(while_(x.cond, x.invariant, v, loc));
        } else {
          for (auto& v : variants(x.value)) out.push_back(ret(v, loc));
        }
      },
      s->node);
  return out;
}

std::vector<Func> variants(const Func& f) {
  std::vector<Func> out;
  for (auto& v : variants(f.body)) {
    Func g = f;
    g.body = v;
    out.push_back(std::move(g));
  }
  for (auto& v : variants(f.pre)) {
    Func g = f;
    g.pre = v;
    out.push_back(std::move(g));
  }
  for (auto& v : variants(f.post)) {
    Func g = f;
    g.post = v;
    out.push_back(std::move(g));
  }
  return out;
}

std::string store_text(const CStore& s) {
  std::string out = "{";
  for (const auto& [k, v] : s) {
    if (out.size() > 1) out += ", ";
    out += k + "=" + std::to_string(v);
  }
  return out + "}";
}

// ---------------------------------------------------------------- suites

struct CaseResult {
  std::size_t cases = 0;
  std::vector<std::string> failures;
  std::map<std::string, std::size_t> stats;
};

void merge(SuiteReport& r, const std::vector<CaseResult>& parts, std::size_t max_examples) {
  std::map<std::string, std::size_t> stats;
  for (const auto& p : parts) {
    r.cases += p.cases;
    r.counterexamples += p.failures.size();
    for (const auto& f : p.failures) {
      if (r.examples.size() < max_examples) r.examples.push_back(f);
    }
    for (const auto& [k, v] : p.stats) stats[k] += v;
  }
  for (const auto& [k, v] : stats) r.note(k, v);
}

template <class F>
SuiteReport run_suite(const std::string& name, std::size_t n, const SuiteOptions& opts, F&& per_case) {
  std::vector<CaseResult> parts(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      per_case(i, parts[i]);
    } catch (const std::exception& e) {
      parts[i].failures.push_back("case " + std::to_string(i) + ": internal error: " + e.what());
    }
  });
  SuiteReport r;
  r.name = name;
  merge(r, parts, opts.max_examples);
  return r;
}

std::string counterexample(std::size_t index, const CStore& args, const std::string& what, const Func& f) {
  return "program " + std::to_string(index) + " args " + store_text(args) + ": " + what + "\n" + pretty(f);
}

Func shrink_if(const SuiteOptions& opts, const Func& f, const std::function<bool(const Func&)>& fails) {
  return opts.shrink ? shrink(f, fails) : f;
}

// Candidates met while shrinking may diverge, so they run on a smaller budget.
std::uint64_t shrink_fuel(const SuiteOptions& opts) { return std::min<std::uint64_t>(opts.fuel, 10000); }

bool oracle_fails(const Func& f, const CStore& args, std::uint64_t fuel, const solver::Options& sopts) {
  if (!std::holds_alternative<Verified>(verify_func(f, sopts))) return false;
  return !vf::func_correct(f, args, fuel).pass;
}

// Outcome correspondence between the dialect and its translation; nullopt
// when related, else a description of the mismatch.
std::optional<std::string> correspond(const vf::Outcome& a, const core::Outcome& b,
                                      const std::vector<std::string>& ctx) {
  auto mismatch = [&] { return vf::describe(a) + " vs " + core::describe(b); };
  if (const auto* n = std::get_if<vf::Normal>(&a)) {
    const auto* m = std::get_if<core::ONormal>(&b);
    if (!m) return mismatch();
    if (auto pos = core::store_rel(n->store, ctx, m->store)) {
      return mismatch() + " (stores differ at " + std::to_string(*pos) + ")";
    }
    return std::nullopt;
  }
  if (const auto* r = std::get_if<vf::Returned>(&a)) {
    const auto* m = std::get_if<core::OReturn>(&b);
    if (!m || m->value != r->value) return mismatch();
    return std::nullopt;
  }
  if (const auto* u = std::get_if<vf::Undefined>(&a)) {
    const auto* m = std::get_if<core::OUndefined>(&b);
    if (!m || m->ub.kind != u->ub.kind || m->ub.loc.line != u->ub.loc.line || m->ub.loc.column != u->ub.loc.column) {
      return mismatch();
    }
    return std::nullopt;
  }
  if (!std::holds_alternative<core::OFuelExhausted>(b)) return mismatch();
  return std::nullopt;
}

std::optional<std::string> translation_mismatch(const Func& f, const CStore& args, std::uint64_t fuel) {
  auto ctx = core::param_context(f);
  auto t = core::translate_func(f);
  auto hs = core::lower_store(args, ctx);
  auto a = vf::exec(args, *f.body, fuel);
  auto b = core::exec(hs, *t, fuel);
  bool ea = std::holds_alternative<vf::FuelExhausted>(a);
  bool eb = std::holds_alternative<core::OFuelExhausted>(b);
  if (ea != eb) {
    a = vf::exec(args, *f.body, fuel * 10);
    b = core::exec(hs, *t, fuel * 10);
  }
  return correspond(a, b, ctx);
}

// Big-step versus machine; nullopt when they agree or the big-step run
// exhausted its fuel. `compared` is set when a comparison took place.
std::optional<std::string> machine_mismatch(const core::StmtPtr& t, const core::HStore& hs, std::uint64_t fuel,
                                            bool* compared) {
  auto big = core::exec(hs, *t, fuel);
  *compared = false;
  if (std::holds_alternative<core::OFuelExhausted>(big)) return std::nullopt;
  *compared = true;
  auto small = core::run_machine(core::initial_state(t, hs), 64 * fuel + 1024);
  std::string head = "big-step " + core::describe(big) + ", machine ";
  if (!small) return head + "did not finish";
  bool ok = std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, core::OReturn>) {
          const auto* fin = std::get_if<core::Final>(&*small);
          return fin && fin->value == x.value;
        } else if constexpr (std::is_same_v<T, core::OUndefined>) {
          const auto* st = std::get_if<core::Stuck>(&*small);
          return st && st->ub.kind == x.ub.kind && st->ub.loc.line == x.ub.loc.line &&
                 st->ub.loc.column == x.ub.loc.column;
        } else if constexpr (std::is_same_v<T, core::ONormal>) {
          const auto* h = std::get_if<core::Halted>(&*small);
          return h && std::holds_alternative<core::SNormal>(h->signal) && h->store == x.store;
        } else if constexpr (std::is_same_v<T, core::OThrow>) {
          const auto* h = std::get_if<core::Halted>(&*small);
          const auto* th = h ? std::get_if<core::SThrow>(&h->signal) : nullptr;
          return th && th->level == x.level && h->store == x.store;
        } else {
          return true;
        }
      },
      big);
  if (ok) return std::nullopt;
  std::string got = std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, core::Final>) {
          return "Final " + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, core::Stuck>) {
          return "Stuck " + std::string(to_string(x.ub.kind)) + " @ " + to_string(x.ub.loc);
        } else if constexpr (std::is_same_v<T, core::Halted>) {
          return "Halted";
        } else {
          return "Next";
        }
      },
      *small);
  return head + got;
}

// ---------------------------------------------------------------- solver oracle

struct Instance {
  std::size_t symbols = 0;
  std::vector<std::int64_t> lo, hi;
  sym::PathCond hyps;
  sym::Prop goal;
};

sym::Term linear(Rng& rng, std::size_t symbols, bool allow_div) {
  sym::Term t = sym::lit(BigInt(uniform(rng, -20, 20)));
  for (std::size_t i = 0; i < symbols; ++i) {
    if (!chance(rng, 0.6)) continue;
    std::int64_t c = uniform(rng, -8, 8);
    if (c == 0) continue;
    sym::Term s = sym::symbol(static_cast<sym::SymbolId>(i));
    if (allow_div && chance(rng, 0.1)) {
      static const std::vector<std::int64_t> ds = {2, 3, 5, -2, -3};
      s = sym::arith(chance(rng, 0.5) ? ArithOp::Div : ArithOp::Mod, s, sym::lit(BigInt(choose(rng, ds))));
    }
    t = sym::arith(ArithOp::Add, t, sym::arith(ArithOp::Mul, sym::lit(BigInt(c)), s));
  }
  return t;
}

sym::Prop atom(Rng& rng, std::size_t symbols) {
  static const std::vector<CmpOp> ops = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
  sym::Term rhs = chance(rng, 0.5) ? sym::lit(BigInt(uniform(rng, -20, 20))) : linear(rng, symbols, true);
  return sym::compare(choose(rng, ops), linear(rng, symbols, true), rhs);
}

sym::Prop formula(Rng& rng, std::size_t symbols) {
  int r = static_cast<int>(uniform(rng, 0, 99));
  if (r < 65) return atom(rng, symbols);
  if (r < 75) return sym::negation(atom(rng, symbols));
  if (r < 88) return sym::conj(atom(rng, symbols), atom(rng, symbols));
  return sym::disj(atom(rng, symbols), atom(rng, symbols));
}

Instance make_instance(Rng& rng) {
  Instance in;
  in.symbols = static_cast<std::size_t>(uniform(rng, 1, 3));
  for (std::size_t i = 0; i < in.symbols; ++i) {
    std::int64_t lo = uniform(rng, -64, 64);
    std::int64_t hi = std::min<std::int64_t>(64, lo + uniform(rng, 0, 20));
    in.lo.push_back(lo);
    in.hi.push_back(hi);
    sym::Term s = sym::symbol(static_cast<sym::SymbolId>(i));
    in.hyps.push_back(sym::compare(CmpOp::Le, sym::lit(BigInt(lo)), s));
    in.hyps.push_back(sym::compare(CmpOp::Le, s, sym::lit(BigInt(hi))));
  }
  int extra = static_cast<int>(uniform(rng, 0, 3));
  for (int i = 0; i < extra; ++i) in.hyps.push_back(formula(rng, in.symbols));
  in.goal = formula(rng, in.symbols);
  return in;
}

// Plain 64-bit evaluation, separate from the symbolic layer's evaluator.
std::int64_t brute_term(const sym::Term& t, const std::vector<std::int64_t>& point) {
  return std::visit(
      [&](const auto& x) -> std::int64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sym::Lit>) {
          return x.value.template convert_to<std::int64_t>();
        } else if constexpr (std::is_same_v<T, sym::Symbol>) {
          return point.at(x.id);
        } else if constexpr (std::is_same_v<T, sym::Neg>) {
          return -brute_term(x.operand, point);
        } else {
          std::int64_t a = brute_term(x.lhs, point);
          std::int64_t b = brute_term(x.rhs, point);
          switch (x.op) {
            case ArithOp::Add: return a + b;
            case ArithOp::Sub: return a - b;
            case ArithOp::Mul: return a * b;
            case ArithOp::Div: return b == 0 ? 0 : a / b;
            case ArithOp::Mod: return b == 0 ? a : a % b;
          }
          return 0;
        }
      },
      t->node);
}

bool brute_prop(const sym::Prop& p, const std::vector<std::int64_t>& point) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sym::Truth>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, sym::Cmp>) {
          std::int64_t a = brute_term(x.lhs, point);
          std::int64_t b = brute_term(x.rhs, point);
          switch (x.op) {
            case CmpOp::Eq: return a == b;
            case CmpOp::Ne: return a != b;
            case CmpOp::Lt: return a < b;
            case CmpOp::Le: return a <= b;
            case CmpOp::Gt: return a > b;
            case CmpOp::Ge: return a >= b;
          }
          return false;
        } else if constexpr (std::is_same_v<T, sym::PNot>) {
          return !brute_prop(x.operand, point);
        } else {
          return x.op == LogicOp::And ? brute_prop(x.lhs, point) && brute_prop(x.rhs, point)
                                      : brute_prop(x.lhs, point) || brute_prop(x.rhs, point);
        }
      },
      p->node);
}

bool brute_counterexample(const Instance& in, const std::vector<std::int64_t>& point) {
  for (const auto& h : in.hyps) {
    if (!brute_prop(h, point)) return false;
  }
  return !brute_prop(in.goal, point);
}

bool brute_valid(const Instance& in) {
  std::vector<std::int64_t> point(in.lo);
  for (;;) {
    if (brute_counterexample(in, point)) return false;
    std::size_t i = 0;
    while (i < in.symbols && point[i] == in.hi[i]) {
      point[i] = in.lo[i];
      ++i;
    }
    if (i == in.symbols) return true;
    ++point[i];
  }
}

// A Farkas combination of at most two atoms with multipliers in [-2, 2]
// summing to a negative constant, preferring positive multipliers.
solver::WitnessPtr forge(const solver::Clause& clause) {
  solver::WitnessPtr negative;
  static const std::vector<int> ms = {1, 2, -1, -2};
  auto try_combo = [&](std::vector<std::pair<std::size_t, int>> combo) -> solver::WitnessPtr {
    std::map<SymbolId, BigInt> sum;
    BigInt constant = 0;
    for (auto [i, m] : combo) {
      for (const auto& [s, c] : clause[i].coeffs) sum[s] += c * m;
      constant += clause[i].constant * m;
    }
    for (const auto& [s, c] : sum) {
      if (c != 0) return nullptr;
    }
    if (constant >= 0) return nullptr;
    solver::Farkas fk;
    for (auto [i, m] : combo) fk.combination.emplace_back(i, BigInt(m));
    fk.slack = constant;
    return std::make_shared<solver::Witness>(solver::Witness{fk});
  };
  for (std::size_t i = 0; i < clause.size(); ++i) {
    for (int mi : ms) {
      if (auto w = try_combo({{i, mi}})) {
        if (mi > 0) return w;
        if (!negative) negative = w;
      }
      for (std::size_t j = i + 1; j < clause.size(); ++j) {
        for (int mj : ms) {
          if (auto w = try_combo({{i, mi}, {j, mj}})) {
            if (mi > 0 && mj > 0) return w;
            if (!negative) negative = w;
          }
        }
      }
    }
  }
  return negative;
}

std::string instance_text(const Instance& in) {
  std::string out;
  for (const auto& h : in.hyps) out += sym::to_string(h) + ", ";
  return out + "|- " + sym::to_string(in.goal);
}

void enumerate_pointers(const nlohmann::json& j, const nlohmann::json::json_pointer& at,
                        std::vector<nlohmann::json::json_pointer>& out) {
  if (!at.empty()) out.push_back(at);
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) enumerate_pointers(it.value(), at / it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) enumerate_pointers(j[i], at / i, out);
  }
}

nlohmann::json mutate_value(const nlohmann::json& v, Rng& rng) {
  using nlohmann::json;
  int r = static_cast<int>(uniform(rng, 0, 99));
  if (r < 5) return nullptr;
  if (v.is_number_integer()) {
    auto n = v.get<std::int64_t>();
    switch (uniform(rng, 0, 5)) {
      case 0: return n + 1;
      case 1: return n - 1;
      case 2: return -n;
      case 3: return n * 2;
      case 4: return std::to_string(n);
      default: return 0;
    }
  }
  if (v.is_string()) {
    auto s = v.get<std::string>();
    switch (uniform(rng, 0, 3)) {
      case 0: return s + "x";
      case 1: return std::string();
      case 2:
        if (!s.empty()) {
          auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(s.size()) - 1));
          s[i] = s[i] == '0' ? '1' : '0';
          return s;
        }
        return "0";
      default: return 0;
    }
  }
  if (v.is_boolean()) return !v.get<bool>();
  if (v.is_array()) {
    json a = v;
    if (a.empty()) return json::array({0});
    auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(a.size()) - 1));
    switch (uniform(rng, 0, 3)) {
      case 0: a.erase(i); return a;
      case 1: a.push_back(a[i]); return a;
      case 2: {
        auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(a.size()) - 1));
        std::swap(a[i], a[j]);
        return a;
      }
      default: return json::array();
    }
  }
  if (v.is_object()) {
    json o = v;
    if (o.empty() || chance(rng, 0.3)) {
      o["extra"] = 1;
      return o;
    }
    auto k = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(o.size()) - 1));
    auto it = o.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(k));
    std::string key = it.key();
    json val = it.value();
    o.erase(key);
    if (chance(rng, 0.5)) o[key + "_"] = val;
    return o;
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------- public API

Func generate_func(Rng& rng, const GenOptions& opts) { return Generator(rng, opts).func(); }

std::vector<Program> generate_corpus(std::uint64_t seed, std::size_t count, const GenOptions& opts) {
  std::vector<Program> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = derive(seed, i, 1);
    Program p{generate_func(rng, opts)};
    out.push_back(parse_program(pretty(p)));
  }
  return out;
}

std::vector<CStore> sample_valuations(const Func& f, Rng& rng, std::size_t count) {
  std::vector<CStore> out;
  if (count == 0) return out;
  if (f.params.empty()) {
    if (vf::holds({}, *f.pre)) out.emplace_back();
    return out;
  }
  static const std::vector<std::int64_t> edge = {kIntMin, kIntMin + 1, -1, 0, 1, kIntMax - 1, kIntMax};
  std::set<CStore> seen;
  std::size_t attempts = std::max<std::size_t>(count * 32, 1024);
  for (std::size_t k = 0; k < attempts && out.size() < count; ++k) {
    CStore s;
    for (const auto& p : f.params) {
      int r = static_cast<int>(uniform(rng, 0, 99));
      std::int64_t v;
      if (r < 35) {
        v = uniform(rng, -20, 20);
      } else if (r < 55) {
        v = uniform(rng, -64, 64);
      } else if (r < 70) {
        v = choose(rng, edge);
      } else if (r < 85) {
        v = uniform(rng, -1000, 1000);
      } else {
        v = uniform(rng, kIntMin, kIntMax);
      }
      s[p] = v;
    }
    if (seen.count(s) || !vf::holds(s, *f.pre)) continue;
    seen.insert(s);
    out.push_back(std::move(s));
  }
  // Small preconditions: sweep a box around zero so that every satisfying
  // point in it is used.
  const std::int64_t radius = f.params.size() <= 2 ? 64 : 16;
  std::vector<std::int64_t> point(f.params.size(), -radius);
  while (out.size() < count) {
    CStore s;
    for (std::size_t i = 0; i < point.size(); ++i) s[f.params[i]] = point[i];
    if (!seen.count(s) && vf::holds(s, *f.pre)) {
      seen.insert(s);
      out.push_back(std::move(s));
    }
    std::size_t i = 0;
    while (i < point.size() && point[i] == radius) point[i++] = -radius;
    if (i == point.size()) break;
    ++point[i];
  }
  return out;
}

Func shrink(const Func& f, const std::function<bool(const Func&)>& still_fails, int max_steps) {
  Func current = f;
  int steps = 0;
  bool progress = true;
  while (progress && steps < max_steps) {
    progress = false;
    for (auto& cand : variants(current)) {
      if (cand == current) continue;
      try {
        check_well_formed(cand);
      } catch (const ParseError&) {
        continue;
      }
      if (++steps > max_steps) break;
      if (still_fails(cand)) {
        current = std::move(cand);
        progress = true;
        break;
      }
    }
  }
  return current;
}

std::size_t SuiteReport::stat(const std::string& key) const {
  for (const auto& [k, v] : stats) {
    if (k == key) return v;
  }
  return 0;
}

void SuiteReport::note(const std::string& key, std::size_t value) {
  for (auto& [k, v] : stats) {
    if (k == key) {
      v = value;
      return;
    }
  }
  stats.emplace_back(key, value);
}

SuiteReport soundness_suite(const std::vector<Program>& corpus, const SuiteOptions& opts) {
  return run_suite("soundness", corpus.size(), opts, [&](std::size_t i, CaseResult& out) {
    const Func& f = corpus[i].main;
    auto verdict = verify_func(f, opts.solver);
    if (std::holds_alternative<Rejected>(verdict)) {
      out.stats["rejected"] = 1;
      return;
    }
    if (std::holds_alternative<SolverIncomplete>(verdict)) {
      out.stats["incomplete"] = 1;
      return;
    }
    out.stats["verified"] = 1;
    Rng rng = derive(opts.seed, i, 2);
    auto valuations = sample_valuations(f, rng, opts.valuations);
    if (valuations.size() < opts.valuations) out.stats["exhausted_pre"] = 1;
    for (const auto& args : valuations) {
      ++out.cases;
      auto res = vf::func_correct(f, args, opts.fuel);
      if (res.pass) continue;
      Func small = shrink_if(opts, f, [&](const Func& g) { return oracle_fails(g, args, shrink_fuel(opts), opts.solver); });
      out.failures.push_back(counterexample(i, args, res.reason, small));
      return;
    }
  });
}

SuiteReport translation_suite(const std::vector<Program>& corpus, const SuiteOptions& opts) {
  return run_suite("translation", corpus.size(), opts, [&](std::size_t i, CaseResult& out) {
    const Func& f = corpus[i].main;
    Rng rng = derive(opts.seed, i, 3);
    for (const auto& args : sample_valuations(f, rng, opts.valuations)) {
      ++out.cases;
      auto bad = translation_mismatch(f, args, opts.fuel);
      if (!bad) continue;
      Func small = shrink_if(opts, f, [&](const Func& g) { return translation_mismatch(g, args, shrink_fuel(opts)).has_value(); });
      out.failures.push_back(counterexample(i, args, *bad, small));
      return;
    }
  });
}

SuiteReport bigsmall_suite(const std::vector<Program>& corpus, const SuiteOptions& opts) {
  return run_suite("bigsmall", corpus.size(), opts, [&](std::size_t i, CaseResult& out) {
    const Func& f = corpus[i].main;
    auto ctx = core::param_context(f);
    auto t = core::translate_func(f);
    Rng rng = derive(opts.seed, i, 4);
    for (const auto& args : sample_valuations(f, rng, opts.valuations)) {
      bool compared = false;
      auto bad = machine_mismatch(t, core::lower_store(args, ctx), opts.fuel, &compared);
      if (compared) ++out.cases;
      if (!bad) continue;
      Func small = shrink_if(opts, f, [&](const Func& g) {
        bool c = false;
        return machine_mismatch(core::translate_func(g), core::lower_store(args, core::param_context(g)), shrink_fuel(opts), &c)
            .has_value();
      });
      out.failures.push_back(counterexample(i, args, *bad, small));
      return;
    }
  });
}

SuiteReport unrolling_suite(const std::vector<Program>& corpus, const SuiteOptions& opts, std::size_t programs) {
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < corpus.size() && picked.size() < programs; ++i) {
    if (core::count_loops(*core::translate_func(corpus[i].main)) > 0) picked.push_back(i);
  }
  auto r = run_suite("unrolling", picked.size(), opts, [&](std::size_t k, CaseResult& out) {
    std::size_t i = picked[k];
    const Func& f = corpus[i].main;
    auto ctx = core::param_context(f);
    auto t = core::translate_func(f);
    std::size_t loops = core::count_loops(*t);
    Rng rng = derive(opts.seed, i, 5);
    for (const auto& args : sample_valuations(f, rng, std::min<std::size_t>(opts.valuations, 16))) {
      auto hs = core::lower_store(args, ctx);
      auto before = core::exec(hs, *t, opts.fuel);
      if (std::holds_alternative<core::OFuelExhausted>(before)) continue;
      for (std::size_t l = 0; l < loops; ++l) {
        ++out.cases;
        auto after = core::exec(hs, *core::unroll_once(t, l), opts.fuel + 1);
        if (core::same_outcome(before, after)) continue;
        out.failures.push_back(counterexample(i, args,
                                              "loop " + std::to_string(l) + ": " + core::describe(before) +
                                                  " vs unrolled " + core::describe(after),
                                              f));
        return;
      }
    }
  });
  r.note("programs", picked.size());
  return r;
}

SuiteReport tamper_suite(const std::vector<Program>& corpus, const SuiteOptions& opts, std::size_t mutations) {
  SuiteReport r;
  r.name = "tamper";
  struct Base {
    std::string source;
    nlohmann::json cert;
    std::vector<nlohmann::json::json_pointer> pointers;
  };
  std::vector<Base> bases;
  for (std::size_t i = 0; i < corpus.size() && bases.size() < 8; ++i) {
    auto verdict = verify_func(corpus[i].main, opts.solver);
    const auto* v = std::get_if<Verified>(&verdict);
    if (!v || v->obligations.empty()) continue;
    Base b;
    b.source = pretty(corpus[i]);
    b.cert = cert::emit(corpus[i], *v);
    auto report = cert::check(b.source, b.cert);
    if (!report.accepted) {
      ++r.counterexamples;
      r.examples.push_back("program " + std::to_string(i) + ": emitted certificate rejected in phase " +
                           report.phase + ": " + report.reason);
      continue;
    }
    // An accepted certificate must describe a program the oracle agrees with.
    Rng rng = derive(opts.seed, i, 6);
    for (const auto& args : sample_valuations(corpus[i].main, rng, std::min<std::size_t>(opts.valuations, 32))) {
      auto res = vf::func_correct(corpus[i].main, args, opts.fuel);
      if (!res.pass) {
        ++r.counterexamples;
        r.examples.push_back(counterexample(i, args, "certified program fails: " + res.reason, corpus[i].main));
        break;
      }
    }
    enumerate_pointers(b.cert, nlohmann::json::json_pointer(), b.pointers);
    bases.push_back(std::move(b));
  }
  r.note("certificates", bases.size());
  if (bases.empty()) return r;

  Rng rng = derive(opts.seed, 0, 7);
  std::size_t attempts = 0;
  std::size_t skipped = 0;
  const nlohmann::json::json_pointer timestamp("/metadata/timestamp");
  while (r.cases < mutations && attempts < mutations * 20) {
    ++attempts;
    const Base& b = choose(rng, bases);
    const auto& ptr = choose(rng, b.pointers);
    if (ptr == timestamp) {
      ++skipped;
      continue;
    }
    nlohmann::json mutated = b.cert;
    mutated[ptr] = mutate_value(b.cert[ptr], rng);
    if (mutated == b.cert) continue;
    ++r.cases;
    auto report = cert::check(b.source, mutated);
    if (report.accepted) {
      ++r.counterexamples;
      if (r.examples.size() < opts.max_examples) {
        r.examples.push_back("accepted mutation at " + ptr.to_string() + ": " + b.cert[ptr].dump() + " -> " +
                             mutated[ptr].dump());
      }
    }
  }
  r.note("timestamp_skipped", skipped);
  return r;
}

SuiteReport solver_suite(const SuiteOptions& opts, std::size_t instances) {
  return run_suite("solver", instances, opts, [&](std::size_t i, CaseResult& out) {
    Rng rng = derive(opts.seed, i, 8);
    Instance in = make_instance(rng);
    ++out.cases;
    bool valid = brute_valid(in);
    auto decision = solver::decide(in.hyps, in.goal, opts.solver);
    auto fail = [&](const std::string& what) {
      out.failures.push_back("instance " + std::to_string(i) + ": " + what + "\n  " + instance_text(in));
    };
    if (const auto* v = std::get_if<solver::Valid>(&decision)) {
      out.stats["valid"] = 1;
      if (!valid) return fail("decide says Valid, brute force finds a counterexample");
      auto chk = solver::check_proof(in.hyps, in.goal, v->proof);
      if (!chk) return fail("proof rejected: " + std::string(solver::to_string(chk.reason)) + " " + chk.detail);
      // Negating a multiplier must break a Farkas witness.
      for (std::size_t c = 0; c < v->proof.clauses.size(); ++c) {
        const auto* fk = std::get_if<solver::Farkas>(&v->proof.clauses[c]->node);
        if (!fk || fk->combination.empty()) continue;
        solver::Farkas bad = *fk;
        auto k = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(bad.combination.size()) - 1));
        bad.combination[k].second = -bad.combination[k].second;
        solver::Proof p = v->proof;
        p.clauses[c] = std::make_shared<solver::Witness>(solver::Witness{bad});
        ++out.stats["mutated_witnesses"];
        if (solver::check_proof(in.hyps, in.goal, p)) return fail("witness with a negated multiplier accepted");
        break;
      }
      return;
    }
    if (const auto* inv = std::get_if<solver::Invalid>(&decision)) {
      out.stats["invalid"] = 1;
      if (valid) return fail("decide says Invalid, brute force finds none");
      std::vector<std::int64_t> point;
      for (std::size_t s = 0; s < in.symbols; ++s) {
        auto it = inv->countermodel.find(static_cast<SymbolId>(s));
        if (it == inv->countermodel.end()) return fail("countermodel misses s" + std::to_string(s));
        point.push_back(it->second.convert_to<std::int64_t>());
      }
      if (!brute_counterexample(in, point)) return fail("countermodel does not refute the goal");

      // No proof at all may be accepted for this instance.
      solver::Problem prob = solver::build_problem(in.hyps, in.goal, opts.solver);
      solver::Proof forged;
      for (const auto& clause : prob.clauses) {
        auto w = forge(clause);
        if (!w) break;
        forged.clauses.push_back(w);
      }
      if (forged.clauses.size() == prob.clauses.size()) {
        ++out.stats["forged_proofs"];
        if (solver::check_proof(in.hyps, in.goal, forged)) return fail("forged proof accepted");
      }
      sym::Prop implied = sym::compare(CmpOp::Le, sym::lit(BigInt(in.lo[0])), sym::symbol(0));
      auto donor = solver::decide(in.hyps, implied, opts.solver);
      if (const auto* dv = std::get_if<solver::Valid>(&donor)) {
        ++out.stats["transplanted_proofs"];
        if (solver::check_proof(in.hyps, in.goal, dv->proof)) return fail("transplanted proof accepted");
      }
      return;
    }
    fail("decide incomplete: " + std::get<solver::Incomplete>(decision).reason);
  });
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json j;
  j["suite"] = r.name;
  j["cases"] = r.cases;
  j["counterexamples"] = r.counterexamples;
  j["examples"] = r.examples;
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  j["stats"] = stats;
  return j;
}

}  // namespace certivex::harness
