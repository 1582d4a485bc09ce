#include <doctest.h>

#include "certivex/harness.hpp"
#include "certivex/parser.hpp"
#include "certivex/vfsem.hpp"
#include "support.hpp"

using namespace certivex;
using namespace certivex::build;

namespace {

std::int64_t value(const vf::IntResult& r) {
  REQUIRE(std::holds_alternative<std::int64_t>(r));
  return std::get<std::int64_t>(r);
}

Ub ub(const vf::IntResult& r) {
  REQUIRE(std::holds_alternative<Ub>(r));
  return std::get<Ub>(r);
}

}  // namespace

TEST_SUITE("vfsem") {
  TEST_CASE("expression evaluation") {
    CHECK(value(vf::eval_int({{"x", 1}}, *parse_iexpr("x - 1"))) == 0);
    CHECK(value(vf::eval_int({}, *parse_iexpr("-7 / 2"))) == -3);
    CHECK(value(vf::eval_int({}, *parse_iexpr("-7 % 2"))) == -1);
    CHECK(ub(vf::eval_int({}, *parse_iexpr("2147483647 + 1"))).kind == UbKind::Overflow);
    CHECK(ub(vf::eval_int({{"x", 7}}, *parse_iexpr("x / 0"))).kind == UbKind::DivByZero);
    CHECK(ub(vf::eval_int({{"x", 7}}, *parse_iexpr("x % 0"))).kind == UbKind::ModByZero);
    CHECK(ub(vf::eval_int({}, *parse_iexpr("-2147483648 / -1"))).kind == UbKind::Overflow);
    CHECK(ub(vf::eval_int({}, *parse_iexpr("-2147483648 % -1"))).kind == UbKind::Overflow);
    CHECK(ub(vf::eval_int({}, *parse_iexpr("-(-2147483648)"))).kind == UbKind::Overflow);
  }

  TEST_CASE("intermediate overflow is undefined even if the result fits") {
    auto r = vf::eval_int({}, *parse_iexpr("2147483647 + 1 - 1"));
    CHECK(ub(r).kind == UbKind::Overflow);
  }

  TEST_CASE("undefined behaviour reports the offending sub-expression") {
    Program p = parse_program(testing::wrap("true", "true", "return 1 + (2 / 0);"));
    auto o = vf::exec({}, *p.main.body, 10);
    REQUIRE(std::holds_alternative<vf::Undefined>(o));
    auto u = std::get<vf::Undefined>(o).ub;
    CHECK(u.kind == UbKind::DivByZero);
    CHECK(u.loc.line == 5);
    CHECK(u.loc.column == 15);
  }

  TEST_CASE("countdown returns zero within fuel") {
    std::int64_t x = 32767;
    std::uint64_t iterations = 0;
    while (0 < x) {
      x = x - 1;
      ++iterations;
    }
    REQUIRE(iterations < 100000);

    Program p = testing::load("countdown.c");
    auto o = vf::exec({}, *p.main.body, 100000);
    REQUIRE(std::holds_alternative<vf::Returned>(o));
    CHECK(std::get<vf::Returned>(o).value == x);
    CHECK(std::get<vf::Returned>(o).store.at("x") == x);
    CHECK(vf::describe(o) == "Return 0 {x=0}");
  }

  TEST_CASE("fuel") {
    auto spin = while_(boolean(true), boolean(true), skip());
    CHECK(std::holds_alternative<vf::FuelExhausted>(vf::exec({}, *spin, 100)));
    CHECK(std::holds_alternative<vf::FuelExhausted>(vf::exec({}, *spin, 1000000)));
    auto o = vf::exec({{"a", 3}}, *skip(), 0);
    REQUIRE(std::holds_alternative<vf::Normal>(o));
    CHECK(std::get<vf::Normal>(o).store == CStore{{"a", 3}});

    Program p = testing::load("data/spin.c");
    CHECK(std::holds_alternative<vf::FuelExhausted>(vf::exec({}, *p.main.body, 100)));
  }

  TEST_CASE("declarations are scoped") {
    auto s = let("y", lit(1), assign("a", add(var("a"), var("y"))));
    auto o = vf::exec({{"a", 4}}, *s, 10);
    REQUIRE(std::holds_alternative<vf::Normal>(o));
    CHECK(std::get<vf::Normal>(o).store == CStore{{"a", 5}});
  }

  TEST_CASE("annotation semantics") {
    CHECK(vf::holds({{"x", 7}}, *parse_bexpr("x / 0 == 0")));
    CHECK(vf::holds({{"x", 7}}, *parse_bexpr("x % 0 == 7")));
    CHECK(vf::holds({}, *parse_bexpr("2147483647 + 1 > 2147483647")));
    CHECK(vf::holds({}, *parse_bexpr("-7 / 2 == -3 && -7 % 2 == -1")));
  }

  TEST_CASE("function correctness oracle") {
    Program p = testing::load("countdown.c");
    CHECK(vf::func_correct(p.main, {}, 100000).pass);
    CHECK_FALSE(vf::func_correct(testing::load("data/countdown_wrong_post.c").main, {}, 100000).pass);
    auto r = vf::func_correct(testing::load("data/div_zero.c").main, {}, 100);
    CHECK_FALSE(r.pass);
    CHECK(vf::describe(r.outcome) == "UB DivByZero @ 5:12");
    CHECK_FALSE(vf::func_correct(parse_program(testing::wrap("true", "true", "int x = 1;")).main, {}, 10).pass);
    CHECK(vf::func_correct(testing::load("data/spin.c").main, {}, 100).pass);
  }

  TEST_CASE("fuel monotonicity on generated programs") {
    harness::Rng rng(9);
    for (const auto& p : harness::generate_corpus(31, 150)) {
      for (const auto& args : harness::sample_valuations(p.main, rng, 8)) {
        auto small = vf::exec(args, *p.main.body, 40);
        if (std::holds_alternative<vf::FuelExhausted>(small)) continue;
        CHECK(vf::describe(vf::exec(args, *p.main.body, 4000)) == vf::describe(small));
      }
    }
  }
}
