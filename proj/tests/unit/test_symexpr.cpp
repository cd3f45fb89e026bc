#include "doctest.h"
#include "random_expr.hpp"

#include "sublab/error.hpp"
#include "sublab/symexpr.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace sublab::symexpr;
using testsupport::random_expr;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, int dim, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  const Expr s = parse("sin(x1)", 2);
  CHECK(s.kind() == NodeKind::sin);
  CHECK(s.children()[0].kind() == NodeKind::coordinate);
  CHECK(s.children()[0].coordinate_index() == 1);

  const Expr e = parse("x1*x2 + 3", 2);
  REQUIRE(e.kind() == NodeKind::sum);
  REQUIRE(e.children().size() == 2);
  CHECK(e.children()[0].kind() == NodeKind::product);
  CHECK(e.children()[1].is_constant());
  CHECK(e.children()[1].value() == 3);
}

TEST_CASE("parse reports errors") {
  CHECK_THROWS_AS((void)parse("x3", 2), sublab::RangeError);
  CHECK_THROWS_AS((void)parse("x0", 2), sublab::RangeError);
  try {
    (void)parse("x1 + * 2", 2);
    FAIL("expected a parse error");
  } catch (const sublab::ParseError& err) {
    CHECK(err.position() == 5);
  }
  CHECK_THROWS_AS((void)parse("sin(x1", 2), sublab::ParseError);
  CHECK_THROWS_AS((void)parse("1/0", 1), sublab::ParseError);
  CHECK_THROWS_AS((void)parse("", 1), sublab::ParseError);
  CHECK_THROWS_AS((void)parse("exp(x1)", 1), sublab::ParseError);
}

TEST_CASE("rational literals are exact") {
  CHECK(parse("0.25", 1).value() == Rational(1, 4));
  CHECK(parse("3/6", 1).value() == Rational(1, 2));
}

TEST_CASE("evaluation examples") {
  const double x[] = {std::numbers::pi / 2, 0.0};
  CHECK(parse("sin(x1)", 2).eval(x) == doctest::Approx(1.0).epsilon(1e-15));
  const double y[] = {2.0, 5.0};
  CHECK(parse("x1*x2+3", 2).eval(y) == 13.0);
}

TEST_CASE("print/parse round trip on random expressions") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_expr(rng, 3, 4);
    const Expr back = parse(e.to_string(), 3);
    INFO(e.to_string());
    CHECK(back.structurally_equal(e));
  }
}

TEST_CASE("differentiate examples") {
  CHECK(differentiate(parse("sin(x1)", 2), 1).structurally_equal(parse("cos(x1)", 2)));
  CHECK(differentiate(parse("sin(x1)", 2), 2).is_zero());
  const Expr d = differentiate(parse("x1*x1", 1), 1);
  const double x[] = {1.7};
  CHECK(d.eval(x) == doctest::Approx(3.4));
  CHECK(d.structurally_equal(parse("2*x1", 1)));
}

TEST_CASE("differentiate matches central finite differences") {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_expr(rng, 2, 3);
    for (int k = 1; k <= 2; ++k) {
      const Expr de = differentiate(e, k);
      auto x = random_point(rng, 2, 1.0);
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(k - 1)] += h;
      xm[static_cast<std::size_t>(k - 1)] -= h;
      const double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
      const double exact = de.eval(x);
      INFO(e.to_string());
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("simplify preserves values") {
  CHECK(simplify(parse("0*sin(x1)", 1)).is_zero());
  const Expr e = parse("sin(x1)*x2", 2);
  CHECK(simplify(Expr::sum({e, Expr::constant(0)})).structurally_equal(simplify(e)));
  CHECK(simplify(parse("x1 - x1", 1)).is_zero());

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Expr r = random_expr(rng, 3, 4);
    const Expr s = simplify(r);
    for (int j = 0; j < 100; ++j) {
      const auto x = random_point(rng, 3);
      const double a = r.eval(x);
      const double b = s.eval(x);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("differentiation is linear and mixed partials commute") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const Expr a = random_expr(rng, 2, 3);
    const Expr b = random_expr(rng, 2, 3);
    const Expr lhs = differentiate(a + b, 1);
    const Expr rhs = differentiate(a, 1) + differentiate(b, 1);
    const Expr d12 = differentiate(differentiate(a, 1), 2);
    const Expr d21 = differentiate(differentiate(a, 2), 1);
    for (int j = 0; j < 10; ++j) {
      const auto x = random_point(rng, 2);
      CHECK(std::abs(lhs.eval(x) - rhs.eval(x)) <= 1e-12 * std::max(1.0, std::abs(lhs.eval(x))));
      CHECK(std::abs(d12.eval(x) - d21.eval(x)) <= 1e-12 * std::max(1.0, std::abs(d12.eval(x))));
    }
  }
}

TEST_CASE("boundedness flag") {
  CHECK(parse("sin(x1)*cos(x2) + 3", 2).bounded());
  CHECK_FALSE(parse("x1*sin(x2)", 2).bounded());
  CHECK(parse("sin(x1*x1)", 1).bounded());
  CHECK(parse("7/2", 1).bounded());

  // Flagged trig polynomials: the maximum over the doubled box equals the
  // maximum over one period on a lattice with the same spacing.
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const Expr e = parse(testsupport::random_trig_text(rng, 2), 2);
    REQUIRE(e.bounded());
    const Program p(e);
    const int m = 500;
    const double h = 2 * std::numbers::pi / m;
    double m1 = 0.0, m2 = 0.0;
    for (int a = 0; a < 2 * m; ++a) {
      for (int b = 0; b < 2 * m; ++b) {
        const double x[] = {(a + 0.37) * h, (b + 0.61) * h};
        const double v = std::abs(p(x));
        m2 = std::max(m2, v);
        if (a < m && b < m) m1 = std::max(m1, v);
      }
    }
    CHECK(std::isfinite(m2));
    CHECK(m2 / m1 <= 1.0 + 1e-9);
  }
}

TEST_CASE("compiled program agrees with tree evaluation") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_expr(rng, 3, 5);
    const Program p(e);
    const auto x = random_point(rng, 3);
    CHECK(p(x) == doctest::Approx(e.eval(x)).epsilon(1e-13));
  }
}
