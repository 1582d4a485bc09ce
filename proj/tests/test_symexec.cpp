#include <doctest.h>

#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "certivex/symexec.hpp"
#include "support.hpp"

using namespace certivex;

namespace {

template <class T>
const T& as(const SepPtr& n) {
  const T* p = std::get_if<T>(&n->node);
  REQUIRE(p);
  return *p;
}

std::string text(const sym::Prop& p) { return sym::to_string(p); }

// Independent walk: the non-trivial assumptions on the way to each Assert.
void assumptions_at_asserts(const SepNode& n, std::vector<std::string> path, std::vector<std::vector<std::string>>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SepAssume>) {
          if (!sym::is_true(x.prop)) path.push_back(text(x.prop));
          assumptions_at_asserts(*x.rest, path, out);
        } else if constexpr (std::is_same_v<T, SepAssert>) {
          out.push_back(path);
          assumptions_at_asserts(*x.rest, path, out);
        } else if constexpr (std::is_same_v<T, SepFresh>) {
          assumptions_at_asserts(*x.rest, path, out);
        } else if constexpr (std::is_same_v<T, SepBranch>) {
          assumptions_at_asserts(*x.left, path, out);
          assumptions_at_asserts(*x.right, path, out);
        }
      },
      n.node);
}

std::size_t count_branches(const SepNode& n) {
  return std::visit(
      [&](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SepBranch>) {
          return 1 + count_branches(*x.left) + count_branches(*x.right);
        } else if constexpr (std::is_same_v<T, SepDone>) {
          return 0;
        } else {
          return count_branches(*x.rest);
        }
      },
      n.node);
}

}  // namespace

TEST_SUITE("symexec") {
  TEST_CASE("countdown tree shape") {
    Func f = simplified(testing::load("countdown.c").main);
    SepPtr t = exec_func(f);

    CHECK(sym::is_true(as<SepAssume>(t).prop));
    const auto& entry = as<SepAssert>(as<SepAssume>(t).rest);
    CHECK(text(entry.prop) == "(0 <= 32767)");
    CHECK(entry.origin == Origin::InvariantEntry);
    const auto& fresh = as<SepFresh>(entry.rest);
    CHECK(fresh.first == 0);
    CHECK(fresh.count == 1);
    const auto& inv = as<SepAssume>(fresh.rest);
    CHECK(text(inv.prop) == "(0 <= s0)");
    const auto& br = as<SepBranch>(inv.rest);
    CHECK(count_branches(*t) == 1);

    const auto& body = as<SepAssume>(br.left);
    CHECK(text(body.prop) == "(0 < s0)");
    const auto& overflow = as<SepAssert>(body.rest);
    CHECK(overflow.origin == Origin::Overflow);
    const auto& preserved = as<SepAssert>(overflow.rest);
    CHECK(preserved.origin == Origin::InvariantPreserved);
    CHECK(text(preserved.prop) == "(0 <= (s0 - 1))");
    CHECK(std::holds_alternative<SepDone>(preserved.rest->node));

    const auto& exit = as<SepAssume>(br.right);
    CHECK(text(exit.prop) == "!(0 < s0)");
    const auto& post = as<SepAssert>(exit.rest);
    CHECK(post.origin == Origin::Postcondition);
    CHECK(text(post.prop) == "(s0 == 0)");
    CHECK(std::holds_alternative<SepDone>(post.rest->node));
  }

  TEST_CASE("countdown obligations") {
    Func f = simplified(testing::load("countdown.c").main);
    auto obs = collect_obligations(*exec_func(f));
    REQUIRE(obs.size() == 4);
    CHECK(obs[0].hypotheses.empty());
    CHECK(text(obs[0].goal) == "(0 <= 32767)");
    CHECK(obs[0].path == "1");
    for (int i : {1, 2}) {
      REQUIRE(obs[i].hypotheses.size() == 2);
      CHECK(text(obs[i].hypotheses[0]) == "(0 <= s0)");
      CHECK(text(obs[i].hypotheses[1]) == "(0 < s0)");
    }
    CHECK(obs[1].origin == Origin::Overflow);
    CHECK(obs[1].path == "4.L.1");
    CHECK(text(obs[2].goal) == "(0 <= (s0 - 1))");
    CHECK(obs[2].path == "4.L.2");
    REQUIRE(obs[3].hypotheses.size() == 2);
    CHECK(text(obs[3].hypotheses[1]) == "!(0 < s0)");
    CHECK(text(obs[3].goal) == "(s0 == 0)");
    CHECK(obs[3].path == "4.R.1");

    auto v = verify_func(f);
    REQUIRE(std::holds_alternative<Verified>(v));
    CHECK(std::get<Verified>(v).proofs.size() == 4);
  }

  TEST_CASE("minimal program") {
    Func f = parse_program(testing::wrap("true", "result == 0", "return 0;")).main;
    auto obs = collect_obligations(*exec_func(f));
    REQUIRE(obs.size() == 1);
    CHECK(text(obs[0].goal) == "(0 == 0)");
    CHECK(obs[0].origin == Origin::Postcondition);
  }

  TEST_CASE("arithmetic emits a range obligation") {
    Func f = parse_program(testing::wrap("true", "true", "int x = 5; x = x + 1; return 0;")).main;
    auto obs = collect_obligations(*exec_func(simplified(f)));
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].origin == Origin::Overflow);
    CHECK(obs[0].loc.line == 5);
    CHECK(sym::evaluate(obs[0].goal, {}));
  }

  TEST_CASE("wrong postcondition is rejected with a countermodel") {
    Func f = testing::load("data/countdown_wrong_post.c").main;
    auto v = verify_func(f);
    REQUIRE(std::holds_alternative<Rejected>(v));
    const auto& r = std::get<Rejected>(v);
    CHECK(text(r.failed.goal) == "(s0 == 1)");
    CHECK(r.countermodel.at(0) == 0);
    for (const auto& h : r.failed.hypotheses) CHECK(sym::evaluate(h, r.countermodel));
    CHECK_FALSE(sym::evaluate(r.failed.goal, r.countermodel));
  }

  TEST_CASE("division by zero is rejected") {
    auto v = verify_func(testing::load("data/div_zero.c").main);
    REQUIRE(std::holds_alternative<Rejected>(v));
    CHECK(std::get<Rejected>(v).failed.origin == Origin::DivisionByZero);
  }

  TEST_CASE("falling off the end is rejected") {
    auto v = verify_func(parse_program(testing::wrap("true", "true", "int x = 1;")).main);
    REQUIRE(std::holds_alternative<Rejected>(v));
    CHECK(std::get<Rejected>(v).failed.origin == Origin::MissingReturn);
  }

  TEST_CASE("variables not assigned in a loop keep their values") {
    std::string body =
        "int k = 5; int i = 0;\n"
        "while (i < 3) //@ invariant 0 <= i && i <= 3;\n"
        "{ i = i + 1; }\n"
        "return k;";
    auto v = verify_func(parse_program(testing::wrap("true", "result == 5", body)).main);
    CHECK(std::holds_alternative<Verified>(v));
  }

  TEST_CASE("a short-circuit operand is only checked when evaluated") {
    auto f = parse_program(testing::wrap("true", "true", "if (a != 0 && 10 / a > 1) { return 1; } return 0;", "int a"));
    CHECK(std::holds_alternative<Verified>(verify_func(f.main)));
  }

  TEST_CASE("hypotheses are exactly the assumptions on the root path") {
    for (const auto& p : harness::generate_corpus(21, 150)) {
      SepPtr t = exec_func(simplified(p.main));
      auto obs = collect_obligations(*t);
      std::vector<std::vector<std::string>> expected;
      assumptions_at_asserts(*t, {}, expected);
      REQUIRE(obs.size() == expected.size());
      for (std::size_t i = 0; i < obs.size(); ++i) {
        std::vector<std::string> got;
        for (const auto& h : obs[i].hypotheses) got.push_back(text(h));
        CHECK(got == expected[i]);
      }
    }
  }

  TEST_CASE("execution is deterministic") {
    for (const auto& p : harness::generate_corpus(22, 50)) {
      Func f = simplified(p.main);
      CHECK(equal(*exec_func(f), *exec_func(f)));
      CHECK(dump(*exec_func(f)) == dump(*exec_func(f)));
    }
  }
}
