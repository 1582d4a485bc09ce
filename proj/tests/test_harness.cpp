#include <doctest.h>

#include <set>

#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "certivex/pretty.hpp"
#include "support.hpp"

using namespace certivex;

namespace {

std::size_t size(const Stmt& s);

std::size_t size(const IExpr&) { return 1; }

std::size_t size(const Stmt& s) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Seq>) {
          return 1 + size(*x.first) + size(*x.second);
        } else if constexpr (std::is_same_v<T, Let>) {
          return 1 + size(*x.body);
        } else if constexpr (std::is_same_v<T, If>) {
          return 1 + size(*x.then_branch) + size(*x.else_branch);
        } else if constexpr (std::is_same_v<T, While>) {
          return 1 + size(*x.body);
        } else {
          return 1;
        }
      },
      s.node);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("corpus generation is reproducible") {
    auto a = harness::generate_corpus(5, 40);
    auto b = harness::generate_corpus(5, 40);
    REQUIRE(a.size() == 40);
    CHECK(a == b);
    auto c = harness::generate_corpus(6, 40);
    CHECK_FALSE(a == c);
  }

  TEST_CASE("generated programs are well formed") {
    for (const auto& p : harness::generate_corpus(8, 200)) {
      CHECK(p.main.params.size() <= 3);
      CHECK_NOTHROW(parse_program(pretty(p)));
    }
  }

  TEST_CASE("sampled valuations satisfy the precondition and are distinct") {
    harness::Rng rng(1);
    for (const auto& p : harness::generate_corpus(9, 60)) {
      auto vals = harness::sample_valuations(p.main, rng, 64);
      std::set<CStore> seen(vals.begin(), vals.end());
      CHECK(seen.size() == vals.size());
      CHECK(vals.size() <= 64);
      for (const auto& v : vals) {
        CHECK(v.size() == p.main.params.size());
        for (const auto& [name, value] : v) {
          CHECK(value >= kIntMin);
          CHECK(value <= kIntMax);
        }
        CHECK(vf::holds(v, *p.main.pre));
      }
    }
  }

  TEST_CASE("a box precondition is sampled exhaustively") {
    Func f = parse_program(testing::wrap("0 <= a && a <= 9", "true", "return a;", "int a")).main;
    harness::Rng rng(2);
    auto vals = harness::sample_valuations(f, rng, 256);
    CHECK(vals.size() == 10);
  }

  TEST_CASE("shrinking keeps the failure and reduces size") {
    std::string body =
        "int x = 1; int y = 2;\n"
        "if (a < 0) { x = x + 3; } else { y = y - 1; }\n"
        "x = x + y;\n"
        "return 10 / a;";
    Func f = parse_program(testing::wrap("true", "true", body, "int a")).main;
    auto fails = [](const Func& g) { return !vf::func_correct(g, {{"a", 0}}, 1000).pass; };
    REQUIRE(fails(f));
    Func small = harness::shrink(f, fails);
    CHECK(fails(small));
    CHECK(size(*small.body) < size(*f.body));
    CHECK(size(*small.body) <= 2);
  }

  TEST_CASE("reports serialize") {
    harness::SuiteReport r;
    r.name = "x";
    r.cases = 3;
    r.note("verified", 2);
    r.note("verified", 5);
    CHECK(r.stat("verified") == 5);
    CHECK(r.stat("missing") == 0);
    auto j = harness::to_json(r);
    CHECK(j["cases"] == 3);
    CHECK(j["counterexamples"] == 0);
  }

  TEST_CASE("soundness suite on a small corpus") {
    harness::SuiteOptions opts;
    opts.valuations = 16;
    auto r = harness::soundness_suite(harness::generate_corpus(17, 80), opts);
    CHECK(r.counterexamples == 0);
    CHECK(r.stat("verified") > 0);
  }

  TEST_CASE("tamper suite on a small corpus") {
    harness::SuiteOptions opts;
    opts.valuations = 8;
    auto r = harness::tamper_suite(harness::generate_corpus(18, 80), opts, 150);
    CHECK(r.cases > 0);
    CHECK(r.counterexamples == 0);
  }
}
