#include <array>
#include <cmath>
#include <string>

#include "doctest.h"
#include "twistorlab/expression.hpp"

using namespace twistorlab;

TEST_SUITE("expression") {
  const std::array<std::string, 4> coords{"x1", "x2", "x3", "x4"};

  TEST_CASE("evaluates with precedence") {
    const auto e = Expression::parse("1 + 2*x1^2 - x2/4", coords);
    const double x[4] = {3.0, 2.0, 0.0, 0.0};
    CHECK(e.evaluate(x) == doctest::Approx(1 + 18 - 0.5));
    const auto f = Expression::parse("-sqrt(x1) * exp(0) + cos(x2 - x2)", coords);
    CHECK(f.evaluate(x) == doctest::Approx(1.0 - std::sqrt(3.0)));
  }

  TEST_CASE("round trip through to_string") {
    const auto e = Expression::parse("tanh(x3) / (1 + x1^2) - log(2 + x4)", coords);
    const auto g = Expression::parse(e.to_string(coords), coords);
    const double x[4] = {0.3, -0.2, 0.7, 0.1};
    CHECK(g.evaluate(x) == doctest::Approx(e.evaluate(x)).epsilon(1e-15));
  }

  TEST_CASE("syntax errors carry positions") {
    try {
      Expression::parse("1 + * x1", coords, 3, 10);
      FAIL("expected a parse error");
    } catch (const ParseError& err) {
      CHECK(err.line() == 3);
      CHECK(err.column() > 10);
    }
    CHECK_THROWS_AS(Expression::parse("y1 + 1", coords), ParseError);
    CHECK_THROWS_AS(Expression::parse("sin(x1", coords), ParseError);
  }
}
