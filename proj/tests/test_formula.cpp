// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "adaptctl/errors.hpp"
#include "adaptctl/formula.hpp"
#include "adaptctl/rng.hpp"
#include "support/oracles.hpp"

using namespace adaptctl;

TEST_CASE("weighted mean of two reliabilities") {
  auto f = ParametricFormula::parse("0.5*(p1+p2)");
  CHECK(f.evaluate({{"p1", 0.8}, {"p2", 1.0}}) == doctest::Approx(0.9).epsilon(1e-12));
  REQUIRE(f.variables().size() == 2);
  CHECK(f.variables()[0] == "p1");
  CHECK(f.variables()[1] == "p2");
}

TEST_CASE("variables come back in first-occurrence order") {
  auto f = ParametricFormula::parse("p2*p1 + p2");
  REQUIRE(f.variables().size() == 2);
  CHECK(f.variables()[0] == "p2");
  CHECK(f.variables()[1] == "p1");

  CHECK(ParametricFormula::parse("3.0").variables().empty());
}

TEST_CASE("precedence and associativity") {
  CHECK(ParametricFormula::parse("2+3*4").evaluate({}) == 14.0);
  CHECK(ParametricFormula::parse("(2+3)*4").evaluate({}) == 20.0);
  CHECK(ParametricFormula::parse("8-3-2").evaluate({}) == 3.0);   // left associative
  CHECK(ParametricFormula::parse("8/4/2").evaluate({}) == 1.0);
  CHECK(ParametricFormula::parse("1 - 2 + 3").evaluate({}) == 2.0);
  CHECK(ParametricFormula::parse("2*3/6*4").evaluate({}) == 4.0);
}

TEST_CASE("comments and whitespace are ignored") {
  auto f = ParametricFormula::parse("# weights\n0.5 * (p1 # inline\n + p2)\n# done\n");
  CHECK(f.evaluate({{"p1", 0.8}, {"p2", 1.0}}) == doctest::Approx(0.9));
}

TEST_CASE("parse errors carry line and column") {
  try {
    ParametricFormula::parse("p1 +\n* p2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
  }

  try {
    ParametricFormula::parse("p1 + $");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
    CHECK(std::string(e.what()).find("'$'") != std::string::npos);
  }

  CHECK_THROWS_AS(ParametricFormula::parse(""), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse("   # just a comment"), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse("(p1 + p2"), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse("p1 p2"), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse("1."), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse("1e"), ParseError);
  CHECK_THROWS_AS(ParametricFormula::parse(")"), ParseError);
}

TEST_CASE("evaluation errors name the problem") {
  auto f = ParametricFormula::parse("a / b");
  try {
    f.evaluate({{"b", 2.0}});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
  CHECK_THROWS_AS(f.evaluate({{"a", 1.0}, {"b", 0.0}}), EvalError);
  try {
    f.evaluate({{"a", 1.0}, {"b", 0.0}});
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }
}

TEST_CASE("serialize parses back to an identical tree") {
  const char* sources[] = {
      "0.5*(p1+p2)", "p2*p1 + p2",       "3.0",          "a-b-c",
      "a-(b-c)",     "a/(b*c) + d*e-f",  "(a+b)*(c-d)",  "1.25e-3 * x + 2",
      "x/(y/z)",     "((a))",            "a*b*c/d/e",
  };
  for (const char* src : sources) {
    CAPTURE(src);
    auto f = ParametricFormula::parse(src);
    auto g = ParametricFormula::parse(f.serialize());
    CHECK(f.identical_to(g));
    CHECK(g.serialize() == f.serialize());
  }
}

TEST_CASE("copying preserves the tree") {
  auto f = ParametricFormula::parse("0.5*(p1+p2)");
  ParametricFormula g = f;
  CHECK(g.identical_to(f));
  CHECK(g.evaluate({{"p1", 0.8}, {"p2", 1.0}}) == doctest::Approx(0.9));
  ParametricFormula h;
  h = f;
  CHECK(h.identical_to(f));
}

TEST_CASE("random formulas agree with a direct tree evaluator") {
  Rng rng(2024);
  std::vector<std::string> names{"p1", "p2", "p3"};
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    auto expr = oracles::random_expr(rng, names, 4, /*monotone=*/false);
    auto text = oracles::expr_text(*expr);
    auto f = ParametricFormula::parse(text);
    std::map<std::string, double> binding;
    for (const auto& n : names) binding[n] = rng.uniform(0.1, 1.0);
    double expected;
    try {
      expected = oracles::eval_expr(*expr, binding);
    } catch (...) {
      continue;
    }
    if (!std::isfinite(expected)) continue;  // oracle divides by ~0
    Binding b(binding.begin(), binding.end());
    CHECK(f.evaluate(b) == doctest::Approx(expected).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("plus-times formulas never decrease when a variable grows") {
  Rng rng(7);
  std::vector<std::string> names{"x", "y"};
  for (int i = 0; i < 200; ++i) {
    auto expr = oracles::random_expr(rng, names, 3, /*monotone=*/true);
    auto vars = [&] {
      std::vector<std::string> v;
      oracles::collect_vars(*expr, v);
      return v;
    }();
    if (vars.empty()) continue;
    auto f = ParametricFormula::parse(oracles::expr_text(*expr));
    Binding lo{{"x", rng.uniform(0.0, 0.5)}, {"y", rng.uniform(0.0, 0.5)}};
    Binding hi = lo;
    const std::string& bumped = vars[rng.index(vars.size())];
    hi[bumped] = lo.at(bumped) + rng.uniform(0.0, 0.5);
    CHECK(f.evaluate(hi) >= f.evaluate(lo) - 1e-12);
  }
}

TEST_CASE("global reliability clamps into the unit interval") {
  auto f = ParametricFormula::parse("a - b");
  CHECK(global_reliability(f, {{"a", 0.2}, {"b", 0.5}}) == 0.0);
  CHECK(global_reliability(f, {{"a", 3.0}, {"b", 0.5}}) == 1.0);
  CHECK(global_reliability(f, {{"a", 0.9}, {"b", 0.2}}) == doctest::Approx(0.7));
}
