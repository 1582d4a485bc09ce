#include <doctest.h>

#include "certivex/corec.hpp"
#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "support.hpp"

using namespace certivex::core;
using certivex::Func;
using certivex::UbKind;
using certivex::parse_program;
using certivex::simplified;
namespace harness = certivex::harness;

namespace {

ExprPtr lit(std::int64_t v) { return std::make_shared<const Expr>(Expr{Lit{v}, {}}); }
ExprPtr idx(std::size_t i) { return std::make_shared<const Expr>(Expr{VarIdx{i}, {}}); }
ExprPtr bin(Binop op, ExprPtr a, ExprPtr b) { return std::make_shared<const Expr>(Expr{Binary{op, a, b}, {}}); }
template <class T>
StmtPtr mk(T node) {
  return std::make_shared<const Stmt>(Stmt{std::move(node)});
}

std::int64_t final_value(const std::optional<StepResult>& r) {
  REQUIRE(r);
  REQUIRE(std::holds_alternative<Final>(*r));
  return std::get<Final>(*r).value;
}

}  // namespace

TEST_SUITE("corec") {
  TEST_CASE("countdown translation") {
    Func f = simplified(testing::load("countdown.c").main);
    StmtPtr t = translate_func(f);
    CHECK(to_string(*t) ==
          "Block(Lit 32767, Seq(Catch(Loop(Seq(If(Lt(Lit 0, Var 0), Skip, Throw 0), Assign(0, Sub(Var 0, Lit 1))))), "
          "Ret(Var 0)))");
    auto o = exec({}, *t, 100000);
    REQUIRE(std::holds_alternative<OReturn>(o));
    CHECK(std::get<OReturn>(o).value == 0);
  }

  TEST_CASE("variables resolve to de Bruijn indices") {
    Func f = parse_program(testing::wrap("true", "true", "int x = a; int y = b; return x - y;", "int a, int b")).main;
    CHECK(param_context(f) == std::vector<std::string>{"b", "a"});
    CHECK(to_string(*translate_func(f)) == "Block(Var 1, Block(Var 1, Ret(Sub(Var 1, Var 0))))");
    auto o = exec(lower_store({{"a", 9}, {"b", 4}}, param_context(f)), *translate_func(f), 100);
    REQUIRE(std::holds_alternative<OReturn>(o));
    CHECK(std::get<OReturn>(o).value == 5);
  }

  TEST_CASE("throw is caught by the enclosing catch") {
    auto s = mk(Catch{mk(Throw{0})});
    auto o = exec({7}, *s, 10);
    REQUIRE(std::holds_alternative<ONormal>(o));
    CHECK(std::get<ONormal>(o).store == HStore{7});

    auto outer = mk(Catch{mk(Catch{mk(Throw{1})})});
    CHECK(std::holds_alternative<ONormal>(exec({}, *outer, 10)));
    auto escaping = mk(Catch{mk(Throw{1})});
    auto e = exec({}, *escaping, 10);
    REQUIRE(std::holds_alternative<OThrow>(e));
    CHECK(std::get<OThrow>(e).level == 0);
  }

  TEST_CASE("loops consume fuel") {
    auto spin = mk(Loop{mk(Skip{})});
    CHECK(std::holds_alternative<OFuelExhausted>(exec({}, *spin, 50)));
    auto count = mk(Loop{mk(Assign{0, bin(Binop::Add, idx(0), lit(1))})});
    CHECK(std::holds_alternative<OUndefined>(exec({2147483640}, *count, 100)));
    CHECK(std::holds_alternative<OFuelExhausted>(exec({0}, *count, 100)));
  }

  TEST_CASE("machine runs") {
    CHECK(final_value(run_machine(initial_state(mk(Ret{lit(0)}), {}), 100)) == 0);

    auto over = mk(Ret{bin(Binop::Add, lit(2147483647), lit(1))});
    auto r = run_machine(initial_state(over, {}), 100);
    REQUIRE(r);
    REQUIRE(std::holds_alternative<Stuck>(*r));
    CHECK(std::get<Stuck>(*r).ub.kind == UbKind::Overflow);

    std::uint64_t steps = 0;
    StmtPtr t = translate_func(simplified(testing::load("countdown.c").main));
    CHECK(final_value(run_machine(initial_state(t, {}), 10000000, &steps)) == 0);
    CHECK(steps > 32767);

    auto h = run_machine(initial_state(mk(Assign{0, lit(3)}), {1}), 100);
    REQUIRE(h);
    REQUIRE(std::holds_alternative<Halted>(*h));
    CHECK(std::get<Halted>(*h).store == HStore{3});

    CHECK_FALSE(run_machine(initial_state(mk(Loop{mk(Skip{})}), {}), 1000));
  }

  TEST_CASE("single steps") {
    MachineState s = initial_state(mk(Seq{mk(Assign{0, lit(5)}), mk(Ret{idx(0)})}), {0});
    int n = 0;
    while (true) {
      auto r = step(s);
      if (auto* next = std::get_if<Next>(&r)) {
        s = next->state;
        ++n;
        continue;
      }
      REQUIRE(std::holds_alternative<Final>(r));
      CHECK(std::get<Final>(r).value == 5);
      break;
    }
    CHECK(n > 0);
    CHECK_FALSE(describe(s).empty());
  }

  TEST_CASE("unrolling") {
    auto body = mk(Skip{});
    auto loop = mk(Loop{body});
    CHECK(*unroll_once(loop) == *mk(Seq{body, loop}));
    CHECK_THROWS_AS(unroll_once(body), NoLoop);
    CHECK_THROWS_AS(unroll_once(loop, 1), NoLoop);

    auto two = mk(Seq{mk(Loop{mk(Throw{0})}), mk(Loop{mk(Assign{0, lit(1)})})});
    CHECK(count_loops(*two) == 2);
    auto second = unroll_once(two, 1);
    CHECK(count_loops(*second) == 2);
    const auto& s = std::get<Seq>(second->node);
    const auto& t = std::get<Seq>(two->node);
    CHECK(*s.first == *t.first);
    CHECK(*s.second == *mk(Seq{std::get<Loop>(t.second->node).body, t.second}));
    auto nested = mk(Loop{mk(Loop{mk(Skip{})})});
    CHECK(count_loops(*unroll_once(nested, 0)) == 3);
    CHECK(count_loops(*unroll_once(nested, 1)) == 2);
  }

  TEST_CASE("store relation") {
    std::vector<std::string> ctx{"y", "x"};
    CHECK(lower_store({{"x", 1}, {"y", 2}}, ctx) == HStore{2, 1});
    CHECK_FALSE(store_rel({{"x", 1}, {"y", 2}}, ctx, {2, 1}));
    CHECK(store_rel({{"x", 1}, {"y", 2}}, ctx, {2, 9}) == std::optional<std::size_t>(1));
    CHECK(store_rel({{"x", 1}, {"y", 2}}, ctx, {2}) == std::optional<std::size_t>(1));
  }

  TEST_CASE("property suites on a small corpus") {
    auto corpus = harness::generate_corpus(13, 60);
    harness::SuiteOptions opts;
    opts.valuations = 16;
    auto tr = harness::translation_suite(corpus, opts);
    CHECK(tr.cases > 0);
    CHECK(tr.counterexamples == 0);
    auto bs = harness::bigsmall_suite(corpus, opts);
    CHECK(bs.cases > 0);
    CHECK(bs.counterexamples == 0);
    auto un = harness::unrolling_suite(corpus, opts, 20);
    CHECK(un.counterexamples == 0);
  }
}
