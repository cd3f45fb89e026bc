#include "doctest.h"
#include "random_expr.hpp"

#include "sublab/error.hpp"
#include "sublab/vecfield.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace sublab::vecfield;
using sublab::symexpr::parse;

namespace {

VectorField field(std::vector<std::string> coeffs) {
  return VectorField::parse(coeffs, static_cast<int>(coeffs.size()));
}

FieldSystem grushin() { return FieldSystem(2, {field({"1", "0"}), field({"0", "sin(x1)"})}); }

VectorField random_trig_field(std::mt19937_64& rng, int dim) {
  std::vector<std::string> c;
  for (int k = 0; k < dim; ++k) c.push_back(testsupport::random_trig_text(rng, dim));
  return VectorField::parse(c, dim);
}

double max_abs_diff(const VectorField& a, const VectorField& b, std::mt19937_64& rng, int samples = 20) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(static_cast<std::size_t>(a.dimension()));
    for (auto& v : x) v = u(rng);
    const auto va = a.eval(x);
    const auto vb = b.eval(x);
    for (std::size_t k = 0; k < va.size(); ++k) worst = std::max(worst, std::abs(va[k] - vb[k]));
  }
  return worst;
}

}  // namespace

TEST_CASE("lie bracket examples") {
  CHECK(lie_bracket(VectorField::coordinate(1, 2), VectorField::coordinate(2, 2)).is_zero());

  const auto sys = grushin();
  const VectorField b = lie_bracket(sys.field(1), sys.field(2));
  CHECK(b.coefficient(1).is_zero());
  CHECK(b.coefficient(2).structurally_equal(parse("cos(x1)", 2)));

  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_trig_field(rng, 3);
    CHECK(lie_bracket(x, x).is_zero());
  }
  CHECK_THROWS_AS((void)lie_bracket(VectorField::coordinate(1, 2), VectorField::coordinate(1, 3)),
                  sublab::DimensionError);
}

TEST_CASE("multi-commutators on the Grushin pair") {
  const auto sys = grushin();
  CHECK(sys.multi_commutator(MultiIndex({2})).coefficient(2).structurally_equal(parse("sin(x1)", 2)));
  const auto c12 = sys.multi_commutator(MultiIndex({1, 2}));
  CHECK(c12.coefficient(2).structurally_equal(parse("cos(x1)", 2)));
  const auto c112 = sys.multi_commutator(MultiIndex({1, 1, 2}));
  CHECK(c112.coefficient(1).is_zero());
  const double x[] = {0.3, 1.1};
  CHECK(c112.coefficient(2).eval(x) == doctest::Approx(-std::sin(0.3)));
  CHECK_THROWS_AS((void)sys.multi_commutator(MultiIndex({1, 3})), sublab::RangeError);

  // |alpha| = 1 returns the field unchanged.
  for (int i = 1; i <= 2; ++i) {
    const auto f = sys.multi_commutator(MultiIndex({i}));
    for (int k = 1; k <= 2; ++k) CHECK(f.coefficient(k).structurally_equal(sys.field(i).coefficient(k)));
  }
}

TEST_CASE("enumerate multi-indices") {
  const auto a = enumerate_multiindices(2, 2);
  REQUIRE(a.size() == 6);
  const std::vector<std::vector<int>> expected = {{1}, {2}, {1, 1}, {1, 2}, {2, 1}, {2, 2}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::vector<int>(a[i].entries().begin(), a[i].entries().end()) == expected[i]);
  }
  CHECK(enumerate_multiindices(3, 1).size() == 3);
  CHECK(enumerate_multiindices(2, 3).size() == 14);
  CHECK(multiindex_count(2, 3) == 14);
}

TEST_CASE("apply_field") {
  const double x[] = {0.4, -0.2};
  CHECK(apply_field(VectorField::coordinate(1, 2), parse("sin(x1)", 2)).structurally_equal(parse("cos(x1)", 2)));
  CHECK(apply_field(VectorField(2), parse("sin(x1)*x2", 2)).is_zero());

  // X^2 phi against a finite-difference second directional derivative along the flow of
  // a constant-coefficient field.
  const auto x1 = field({"1", "1/2"});
  const auto phi = parse("cos(x1) + sin(2*x2)", 2);
  const auto x2phi = apply_field(x1, apply_field(x1, phi));
  const double h = 1e-3;
  auto at = [&](double s) {
    const double p[] = {x[0] + s, x[1] + 0.5 * s};
    return phi.eval(p);
  };
  const double fd = (at(h) - 2 * at(0) + at(-h)) / (h * h);
  CHECK(std::abs(fd - x2phi.eval(x)) < 1e-5);
}

TEST_CASE("Jacobi identity and bilinearity") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_trig_field(rng, 2);
    const auto y = random_trig_field(rng, 2);
    const auto z = random_trig_field(rng, 2);
    const auto jac = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) +
                     lie_bracket(z, lie_bracket(x, y));
    CHECK(max_abs_diff(jac, VectorField(2), rng) < 1e-10);

    const auto lhs = lie_bracket(x + y.scaled(3), z);
    const auto rhs = lie_bracket(x, z) + lie_bracket(y, z).scaled(3);
    CHECK(max_abs_diff(lhs, rhs, rng) < 1e-12 * 100);
    const auto lhs2 = lie_bracket(z, x + y);
    const auto rhs2 = lie_bracket(z, x) + lie_bracket(z, y);
    CHECK(max_abs_diff(lhs2, rhs2, rng) < 1e-12 * 100);
  }
}

TEST_CASE("field system validation") {
  CHECK_THROWS_AS(FieldSystem(2, {}), sublab::DimensionError);
  CHECK_THROWS_AS(FieldSystem(2, {VectorField::coordinate(1, 3)}), sublab::DimensionError);
  std::vector<std::string> bad = {"x3", "0"};
  CHECK_THROWS_AS((void)VectorField::parse(bad, 2), sublab::RangeError);
}
