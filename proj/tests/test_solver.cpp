#include <doctest.h>

#include "certivex/harness.hpp"
#include "certivex/solver.hpp"

using namespace certivex;
using namespace certivex::solver;

namespace {

sym::Term s(sym::SymbolId i) { return sym::symbol(i); }
sym::Term k(std::int64_t v) { return sym::lit(BigInt(v)); }
sym::Prop cmp(CmpOp op, sym::Term a, sym::Term b) { return sym::compare(op, std::move(a), std::move(b)); }
sym::Term minus(sym::Term a, sym::Term b) { return sym::arith(ArithOp::Sub, std::move(a), std::move(b)); }

// Every point of the box satisfies hyps => goal.
bool brute_valid(const sym::PathCond& hyps, const sym::Prop& goal, std::int64_t lo, std::int64_t hi) {
  for (std::int64_t v = lo; v <= hi; ++v) {
    sym::Valuation nu{{0, BigInt(v)}};
    bool all = true;
    for (const auto& h : hyps) all = all && sym::evaluate(h, nu);
    if (all && !sym::evaluate(goal, nu)) return false;
  }
  return true;
}

const Proof& valid_proof(const Decision& d) {
  REQUIRE(std::holds_alternative<Valid>(d));
  return std::get<Valid>(d).proof;
}

std::string proof_text(const Decision& d) {
  std::string out;
  if (const auto* v = std::get_if<Valid>(&d)) {
    for (const auto& w : v->proof.clauses) out += describe(*w);
  }
  return out;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("loop-body obligation of the countdown") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(0), s(0)), cmp(CmpOp::Lt, k(0), s(0))};
    sym::Prop goal = cmp(CmpOp::Le, k(0), minus(s(0), k(1)));
    REQUIRE(brute_valid(hyps, goal, -1000, 1000));
    auto d = decide(hyps, goal);
    CHECK(check_proof(hyps, goal, valid_proof(d)).ok);
  }

  TEST_CASE("loop-exit obligation of the countdown") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(0), s(0)), sym::negation(cmp(CmpOp::Lt, k(0), s(0)))};
    sym::Prop goal = cmp(CmpOp::Eq, s(0), k(0));
    REQUIRE(brute_valid(hyps, goal, -1000, 1000));
    auto d = decide(hyps, goal);
    CHECK(check_proof(hyps, goal, valid_proof(d)).ok);
  }

  TEST_CASE("an unconstrained equation has a countermodel") {
    sym::Prop goal = cmp(CmpOp::Eq, s(0), k(0));
    auto d = decide({}, goal);
    REQUIRE(std::holds_alternative<Invalid>(d));
    const auto& nu = std::get<Invalid>(d).countermodel;
    CHECK_FALSE(sym::evaluate(goal, nu));
    CHECK(nu.at(0) == 1);
  }

  TEST_CASE("witness checking rejects tampering") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(0), s(0)), cmp(CmpOp::Lt, k(0), s(0))};
    sym::Prop goal = cmp(CmpOp::Le, k(0), minus(s(0), k(1)));
    auto d = decide(hyps, goal);
    Proof p = valid_proof(d);
    REQUIRE(p.clauses.size() == 1);
    const auto* fk = std::get_if<Farkas>(&p.clauses[0]->node);
    REQUIRE(fk);

    Farkas negated = *fk;
    negated.combination[0].second = -negated.combination[0].second;
    Proof bad = p;
    bad.clauses[0] = std::make_shared<Witness>(Witness{negated});
    auto r = check_proof(hyps, goal, bad);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == Reject::NonPositiveMultiplier);

    Farkas far = *fk;
    far.combination.back().first = 7;
    bad.clauses[0] = std::make_shared<Witness>(Witness{far});
    r = check_proof(hyps, goal, bad);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == Reject::BadIndex);

    Farkas slack = *fk;
    slack.slack -= 1;
    bad.clauses[0] = std::make_shared<Witness>(Witness{slack});
    CHECK_FALSE(check_proof(hyps, goal, bad).ok);

    r = check_proof(hyps, goal, Proof{});
    CHECK_FALSE(r.ok);
    CHECK(r.reason == Reject::ClauseCountMismatch);
  }

  TEST_CASE("canonical atoms are equivalent over the integers") {
    // 2*s0 + 3 >= 0
    Clause c{LinAtom{{{0, BigInt(2)}}, BigInt(3)}};
    Clause original = c;
    REQUIRE(canonicalize(c));
    REQUIRE(c.size() == 1);
    for (std::int64_t x = -20; x <= 20; ++x) {
      BigInt before = original[0].coeff(0) * x + original[0].constant;
      BigInt after = c[0].coeff(0) * x + c[0].constant;
      CHECK((before >= 0) == (after >= 0));
    }
    CHECK(c[0].coeff(0) == 1);

    Clause contradiction{LinAtom{{}, BigInt(-1)}};
    CHECK_FALSE(canonicalize(contradiction));
  }

  TEST_CASE("division by constants is eliminated") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(-10), s(0)), cmp(CmpOp::Le, s(0), k(10))};
    sym::Prop half = cmp(CmpOp::Le, sym::arith(ArithOp::Div, s(0), k(2)), k(5));
    REQUIRE(brute_valid(hyps, half, -10, 10));
    CHECK(check_proof(hyps, half, valid_proof(decide(hyps, half))).ok);

    sym::Prop rem = cmp(CmpOp::Lt, sym::arith(ArithOp::Mod, s(0), k(3)), k(2));
    REQUIRE_FALSE(brute_valid(hyps, rem, -10, 10));
    auto d = decide(hyps, rem);
    REQUIRE(std::holds_alternative<Invalid>(d));
    const auto& nu = std::get<Invalid>(d).countermodel;
    for (const auto& h : hyps) CHECK(sym::evaluate(h, nu));
    CHECK_FALSE(sym::evaluate(rem, nu));

    sym::Prop neg = cmp(CmpOp::Ge, sym::arith(ArithOp::Mod, s(0), k(-3)), k(-2));
    REQUIRE(brute_valid(hyps, neg, -10, 10));
    CHECK(check_proof(hyps, neg, valid_proof(decide(hyps, neg))).ok);
  }

  TEST_CASE("integer reasoning beyond rationals") {
    // y = 2x and y = 2z + 1 have rational but no integer solutions.
    sym::Term x = s(0), y = s(1), z = s(2);
    sym::Term two_x = sym::arith(ArithOp::Mul, k(2), x);
    sym::Term two_z1 = sym::arith(ArithOp::Add, sym::arith(ArithOp::Mul, k(2), z), k(1));
    sym::PathCond hyps{cmp(CmpOp::Le, k(-10), x), cmp(CmpOp::Le, x, k(10)), cmp(CmpOp::Eq, y, two_x),
                       cmp(CmpOp::Eq, y, two_z1)};
    auto d = decide(hyps, sym::truth(false));
    CHECK(check_proof(hyps, sym::truth(false), valid_proof(d)).ok);
  }

  TEST_CASE("hypotheses outside the fragment are dropped") {
    sym::Prop product = cmp(CmpOp::Gt, sym::arith(ArithOp::Mul, s(0), s(1)), k(1));
    sym::PathCond hyps{sym::conj(cmp(CmpOp::Lt, k(3), s(0)), product)};
    sym::Prop goal = cmp(CmpOp::Le, k(3), s(0));
    CHECK(check_proof(hyps, goal, valid_proof(decide(hyps, goal))).ok);
    CHECK(build_problem(hyps, goal).dropped == 1);

    sym::Prop weak = cmp(CmpOp::Le, k(5), s(0));
    CHECK(std::holds_alternative<Incomplete>(decide(hyps, weak)));
  }

  TEST_CASE("enumeration witnesses") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(0), s(0)), cmp(CmpOp::Le, s(0), k(5)),
                       cmp(CmpOp::Eq, sym::arith(ArithOp::Mod, s(0), k(3)), k(1)),
                       cmp(CmpOp::Eq, sym::arith(ArithOp::Mod, s(0), k(2)), k(0))};
    sym::Prop goal = cmp(CmpOp::Eq, s(0), k(4));
    REQUIRE(brute_valid(hyps, goal, -10, 10));
    Options opts;
    opts.force_enum = true;
    auto d = decide(hyps, goal, opts);
    const Proof& p = valid_proof(d);
    CHECK(check_proof(hyps, goal, p).ok);

    bool saw_enum = false;
    for (std::size_t i = 0; i < p.clauses.size(); ++i) {
      const auto* e = std::get_if<Enum>(&p.clauses[i]->node);
      if (!e || e->bounds.empty()) continue;
      saw_enum = true;
      Enum wider = *e;
      wider.bounds[0].hi += 1;
      Proof bad = p;
      bad.clauses[i] = std::make_shared<Witness>(Witness{wider});
      CHECK_FALSE(check_proof(hyps, goal, bad).ok);
    }
    CHECK(saw_enum);
  }

  TEST_CASE("nonlinear products are outside the fragment") {
    sym::Prop goal = cmp(CmpOp::Ge, sym::arith(ArithOp::Mul, s(0), s(1)), k(0));
    CHECK(std::holds_alternative<Incomplete>(decide({}, goal)));
    CHECK_THROWS_AS(normalize(goal), Unsupported);
  }

  TEST_CASE("decide is deterministic") {
    sym::PathCond hyps{cmp(CmpOp::Le, k(-3), s(0)), cmp(CmpOp::Le, s(0), k(4)),
                       cmp(CmpOp::Le, k(-3), s(1)), cmp(CmpOp::Lt, s(1), s(0))};
    sym::Prop goal = cmp(CmpOp::Le, s(1), k(3));
    auto a = decide(hyps, goal);
    auto b = decide(hyps, goal);
    CHECK(proof_text(a) == proof_text(b));
    CHECK_FALSE(proof_text(a).empty());
  }

  TEST_CASE("agreement with brute force on random instances") {
    harness::SuiteOptions opts;
    opts.seed = 3;
    auto r = harness::solver_suite(opts, 1500);
    CHECK(r.cases == 1500);
    CHECK(r.counterexamples == 0);
    CHECK(r.stat("valid") > 0);
    CHECK(r.stat("invalid") > 0);
  }
}
