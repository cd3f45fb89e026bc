#include "doctest.h"

#include "sublab/bch.hpp"
#include "sublab/error.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace sublab::bch;
using sublab::vecfield::FieldSystem;
using sublab::vecfield::MultiIndex;
using sublab::vecfield::VectorField;

namespace {

VectorField field(std::vector<std::string> coeffs) {
  return VectorField::parse(coeffs, static_cast<int>(coeffs.size()));
}

}  // namespace

TEST_CASE("degree-2 component matches a direct hand expansion") {
  // (1 + (a+b) + (a+b)^2/2)(1 - a + a^2/2)(1 - b + b^2/2), degree-2 part, computed
  // term by term without the library's product.
  std::map<Word, Rational> direct;
  auto add = [&](Word w, Rational c) { direct[w] += c; };
  // (a+b)^2 / 2
  add({1, 1}, Rational(1, 2));
  add({1, 2}, Rational(1, 2));
  add({2, 1}, Rational(1, 2));
  add({2, 2}, Rational(1, 2));
  add({1, 1}, Rational(1, 2));  // a^2/2
  add({2, 2}, Rational(1, 2));  // b^2/2
  add({1, 1}, Rational(-1));    // (a+b)(-a)
  add({2, 1}, Rational(-1));
  add({1, 2}, Rational(-1));  // (a+b)(-b)
  add({2, 2}, Rational(-1));
  add({1, 2}, Rational(1));  // (-a)(-b)
  std::erase_if(direct, [](const auto& kv) { return kv.second == 0; });
  REQUIRE(direct.size() == 2);
  CHECK(direct[{1, 2}] == Rational(1, 2));
  CHECK(direct[{2, 1}] == Rational(-1, 2));

  const auto series = correction_series(2);
  REQUIRE(series.brackets.size() == 1);
  const auto& z2 = series.brackets[0];
  REQUIRE(z2.size() == 1);
  CHECK(z2.begin()->first == Word{1, 2});
  CHECK(z2.begin()->second == Rational(1, 2));
}

TEST_CASE("corrected log vanishes exactly through the truncation order") {
  for (int n = 2; n <= kMaxOrder; ++n) {
    const auto series = correction_series(n);
    CHECK(series.brackets.size() == static_cast<std::size_t>(n - 1));
    CHECK(series.corrected_log.is_zero());
    for (int j = 2; j <= n; ++j) {
      for (const auto& kv : series.brackets[static_cast<std::size_t>(j - 2)]) {
        CHECK(static_cast<int>(kv.first.size()) == j);
      }
    }
  }
  CHECK_THROWS_AS((void)correction_series(7), sublab::CapError);
}

TEST_CASE("Dynkin projection is idempotent on Lie elements") {
  const auto series = correction_series(5);
  for (std::size_t i = 0; i < series.brackets.size(); ++i) {
    const int j = static_cast<int>(i) + 2;
    const FreePolynomial z = expand_brackets(series.brackets[i], 5);
    const FreePolynomial again = expand_brackets(dynkin_projection(z, j), 5);
    CHECK(again == z);
  }
}

TEST_CASE("exp and log are inverse on truncated series") {
  const auto a = FreePolynomial::letter(1, 4);
  const auto b = FreePolynomial::letter(2, 4);
  const auto x = a * Rational(2) + a * b - b * a * Rational(1, 3);
  CHECK(log_series(exp_series(x)) == x);
}

TEST_CASE("correction fields") {
  const auto z = bch_correction_fields(VectorField::coordinate(1, 2), VectorField::coordinate(2, 2), 5);
  REQUIRE(z.size() == 4);
  for (const auto& f : z) CHECK(f.is_zero());

  const auto y1 = field({"1", "0"});
  const auto y2 = field({"0", "sin(x1)"});
  const auto zg = bch_correction_fields(y1, y2, 3);
  REQUIRE(zg.size() == 2);
  const double x[] = {0.7, 0.2};
  // Z_2 = (1/2)[Y1, Y2] = (1/2) cos(x1) d2
  CHECK(zg[0].coefficient(1).is_zero());
  CHECK(zg[0].coefficient(2).eval(x) == doctest::Approx(0.5 * std::cos(0.7)));

  // Z_3 uses only [Y1,[Y1,Y2]] and [Y2,[Y1,Y2]].
  const auto series = correction_series(3);
  for (const auto& kv : series.brackets[1]) {
    const bool allowed = kv.first == Word{1, 1, 2} || kv.first == Word{2, 1, 2};
    CHECK(allowed);
  }
  const FieldSystem pair(2, {y1, y2});
  VectorField expect(2);
  for (const auto& [w, c] : series.brackets[1]) expect = expect + pair.multi_commutator(MultiIndex(w)).scaled(c);
  CHECK(zg[1].coefficient(2).eval(x) == doctest::Approx(expect.coefficient(2).eval(x)));
  CHECK_THROWS_AS((void)bch_correction_fields(y1, y2, 7), sublab::CapError);
}
