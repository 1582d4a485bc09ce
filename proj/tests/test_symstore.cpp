#include <doctest.h>

#include <random>

#include "certivex/parser.hpp"
#include "certivex/symstore.hpp"
#include "certivex/vfsem.hpp"

using namespace certivex;

namespace {

IExprPtr random_iexpr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<std::int64_t> small(-6, 6);
  int r = pick(rng);
  if (depth == 0 || r < 3) {
    if (r % 2) return build::var(r % 3 == 0 ? "a" : "b");
    return build::lit(small(rng));
  }
  if (r == 3) return build::neg(random_iexpr(rng, depth - 1));
  static const ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Mod};
  return build::arith(ops[r % 5], random_iexpr(rng, depth - 1), random_iexpr(rng, depth - 1));
}

}  // namespace

TEST_SUITE("symstore") {
  TEST_CASE("expression evaluation into terms") {
    sym::Store st{{"x", sym::symbol(0)}};
    CHECK(sym::to_string(sym::eval_int(st, *parse_iexpr("x - 1"))) == "(s0 - 1)");
    CHECK(sym::to_string(sym::eval_int({}, *parse_iexpr("32767"))) == "32767");

    std::int64_t x = 3;
    std::int64_t folded = x * x + 1;
    sym::Store three{{"x", sym::lit(BigInt(x))}};
    sym::Term t = sym::eval_int(three, *parse_iexpr("x * x + 1"));
    REQUIRE(std::holds_alternative<sym::Lit>(t->node));
    CHECK(std::get<sym::Lit>(t->node).value == folded);
  }

  TEST_CASE("boolean evaluation into propositions") {
    sym::Store st{{"x", sym::symbol(0)}};
    CHECK(sym::to_string(sym::eval_bool(st, *parse_bexpr("0 < x"))) == "(0 < s0)");
    CHECK(sym::to_string(sym::eval_bool({}, *parse_bexpr("true"))) == "true");
    CHECK(sym::to_string(sym::eval_bool(st, *parse_bexpr("!(0 < x)"))) == "!(0 < s0)");
  }

  TEST_CASE("division by a literal zero is not folded") {
    sym::Term t = sym::arith(ArithOp::Div, sym::lit(5), sym::lit(0));
    CHECK_FALSE(std::holds_alternative<sym::Lit>(t->node));
    t = sym::arith(ArithOp::Mod, sym::lit(5), sym::lit(0));
    CHECK_FALSE(std::holds_alternative<sym::Lit>(t->node));
    CHECK(std::holds_alternative<sym::Lit>(sym::arith(ArithOp::Div, sym::lit(-7), sym::lit(2))->node));
  }

  TEST_CASE("unbound variables are reported") {
    CHECK_THROWS_AS(sym::eval_int({}, *parse_iexpr("y + 1")), sym::UnboundVariable);
  }

  TEST_CASE("canonical text and structural equality") {
    sym::Prop p = sym::conj(sym::compare(CmpOp::Le, sym::lit(0), sym::symbol(2)), sym::truth(false));
    CHECK(sym::to_string(p) == "((0 <= s2) && false)");
    CHECK(sym::equal(p, sym::conj(sym::compare(CmpOp::Le, sym::lit(0), sym::symbol(2)), sym::truth(false))));
    CHECK_FALSE(sym::equal(p, sym::truth(false)));
    std::set<sym::SymbolId> ids;
    sym::collect_symbols(p, ids);
    CHECK(ids == std::set<sym::SymbolId>{2});
  }

  TEST_CASE("symbolic evaluation commutes with concrete evaluation") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> val(-20, 20);
    sym::Store lifted{{"a", sym::symbol(0)}, {"b", sym::symbol(1)}};
    int compared = 0;
    for (int i = 0; i < 3000; ++i) {
      IExprPtr e = random_iexpr(rng, 4);
      CStore cs{{"a", val(rng)}, {"b", val(rng)}};
      auto concrete = vf::eval_int(cs, *e);
      if (!std::holds_alternative<std::int64_t>(concrete)) continue;
      sym::Valuation nu{{0, cs["a"]}, {1, cs["b"]}};
      CHECK(sym::evaluate(sym::eval_int(lifted, *e), nu) == std::get<std::int64_t>(concrete));
      ++compared;
    }
    CHECK(compared > 1000);
  }

  TEST_CASE("fresh counter") {
    sym::FreshCounter c;
    CHECK(c.peek() == 0);
    CHECK(c.pick() == 0);
    CHECK(c.pick() == 1);
    CHECK(c.peek() == 2);
  }
}
