#include "doctest.h"

#include "sublab/error.hpp"
#include "sublab/hormander.hpp"
#include "sublab/linprog.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sublab::hormander;
using sublab::vecfield::FieldSystem;
using sublab::vecfield::VectorField;

namespace {

VectorField field(std::vector<std::string> coeffs) {
  return VectorField::parse(coeffs, static_cast<int>(coeffs.size()));
}

FieldSystem grushin() { return FieldSystem(2, {field({"1", "0"}), field({"0", "sin(x1)"})}); }
FieldSystem euclidean2() { return FieldSystem(2, {VectorField::coordinate(1, 2), VectorField::coordinate(2, 2)}); }
FieldSystem single() { return FieldSystem(2, {VectorField::coordinate(1, 2)}); }

}  // namespace

TEST_CASE("C^(r) matrix at the origin") {
  const double origin[] = {0.0, 0.0};
  const auto c2 = assemble_cr_matrix(grushin(), 2, origin);
  CHECK(c2(0, 0) == doctest::Approx(1.0));
  CHECK(c2(1, 1) == doctest::Approx(2.0));
  CHECK(std::abs(c2(0, 1)) < 1e-15);
  const auto c1 = assemble_cr_matrix(grushin(), 1, origin);
  CHECK(c1(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(c1(1, 1)) < 1e-15);
  const double x[] = {0.3, -2.0};
  CHECK(assemble_cr_matrix(euclidean2(), 1, x).isApprox(Eigen::Matrix2d::Identity()));
}

TEST_CASE("C^(r) is symmetric PSD and monotone in r") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  const FieldSystem sys(2, {field({"cos(x2)", "1/2"}), field({"sin(x1)*sin(x2)", "cos(x1)"})});
  for (int i = 0; i < 20; ++i) {
    const double x[] = {u(rng), u(rng)};
    for (int r = 1; r <= 3; ++r) {
      const auto c = assemble_cr_matrix(sys, r, x);
      CHECK((c - c.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
      CHECK(es.eigenvalues()(0) >= -1e-10);
      const auto next = assemble_cr_matrix(sys, r + 1, x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diff(next - c);
      CHECK(diff.eigenvalues()(0) >= -1e-10);
    }
  }
}

TEST_CASE("sigma condition closed forms") {
  const auto grid = torus_grid_samples(2, 64);
  CHECK(grid.size() == 4096);
  const auto s2 = check_sigma_condition(grushin(), 2, grid);
  CHECK(s2.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s2.pass);
  const auto s1 = check_sigma_condition(grushin(), 1, grid);
  CHECK(std::abs(s1.value) < 1e-12);
  CHECK_FALSE(s1.pass);
  for (int r = 1; r <= 4; ++r) CHECK(std::abs(check_sigma_condition(single(), r, grid).value) < 1e-15);
}

TEST_CASE("linear program solver") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6  -> (8/5, 6/5), value 14/5
  Eigen::MatrixXd a(2, 4);
  a << 1, 2, 1, 0, 3, 1, 0, 1;
  Eigen::VectorXd b(2);
  b << 4, 6;
  Eigen::VectorXd c(4);
  c << -1, -1, 0, 0;
  const auto res = sublab::linprog::solve_standard_form(a, b, c);
  REQUIRE(res.status == sublab::linprog::LpStatus::optimal);
  CHECK(res.objective == doctest::Approx(-14.0 / 5.0));

  Eigen::MatrixXd inf(1, 1);
  inf << 1;
  Eigen::VectorXd bi(1);
  bi << -1;
  Eigen::VectorXd ci(1);
  ci << 1;
  CHECK(sublab::linprog::solve_standard_form(inf, bi, ci).status == sublab::linprog::LpStatus::infeasible);
}

TEST_CASE("min infinity-norm combination against the dual oracle") {
  // Dual: min ||lambda||_inf = max_y (y . e) / ||G^T y||_1, sampled over directions.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd g(2, 5);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n01(rng);
    for (int axis = 0; axis < 2; ++axis) {
      const auto res = sublab::linprog::min_inf_norm_solution(g, Eigen::Vector2d::Unit(axis));
      REQUIRE(res.feasible);
      CHECK((g * res.lambda - Eigen::Vector2d::Unit(axis)).norm() < 1e-10);
      // The dual polygon {||G^T y||_1 <= 1} has its vertices on directions orthogonal to
      // some generator, so the dual maximum is attained on one of them.
      double dual = 0.0;
      for (Eigen::Index k = 0; k < g.cols(); ++k) {
        for (double sign : {1.0, -1.0}) {
          const Eigen::Vector2d y = sign * Eigen::Vector2d(-g(1, k), g(0, k));
          dual = std::max(dual, y(axis) / (g.transpose() * y).cwiseAbs().sum());
        }
      }
      CHECK(res.norm >= dual - 1e-10);
      CHECK(res.norm == doctest::Approx(dual).epsilon(1e-9));
    }
  }
}

TEST_CASE("bounded combination examples") {
  const auto grid = torus_grid_samples(2, 16);
  const auto e = check_bounded_combination(euclidean2(), 1, grid);
  CHECK(e.feasible);
  CHECK(e.value == doctest::Approx(1.0));

  const GeneratorTable table(grushin(), 2);
  const double origin[] = {0.0, 0.0};
  const auto g = table.at(origin);
  const auto res = sublab::linprog::min_inf_norm_solution(g, Eigen::Vector2d::Unit(1));
  REQUIRE(res.feasible);
  CHECK(res.norm == doctest::Approx(0.5).epsilon(1e-10));

  const auto s = check_bounded_combination(single(), 2, grid);
  CHECK_FALSE(s.feasible);
  CHECK_FALSE(s.pass);
  CHECK(s.witness_axis == 2);
}

TEST_CASE("zonotope volume") {
  const auto grid = torus_grid_samples(2, 8);
  CHECK(check_volume_condition(euclidean2(), 1, grid).value == doctest::Approx(4.0));
  const GeneratorTable table(grushin(), 2);
  const double origin[] = {0.0, 0.0};
  CHECK(analyze_point(table.at(origin), kVol).volume == doctest::Approx(8.0));

  // homogeneity: scaling the generators by s scales the volume by s^2.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 10; ++i) {
    const double x[] = {u(rng), u(rng)};
    const auto gx = table.at(x);
    const double v = analyze_point(gx, kVol).volume;
    CHECK(analyze_point(2.5 * gx, kVol).volume == doctest::Approx(6.25 * v).epsilon(1e-12));
  }
}

TEST_CASE("determinant condition") {
  const auto grid = torus_grid_samples(2, 64);
  const auto det = check_determinant_condition(grushin(), 2, grid);
  CHECK(det.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(det.witness.size() == 2);
  CHECK(std::abs(std::sin(det.witness[0])) == doctest::Approx(std::abs(std::cos(det.witness[0]))));
  CHECK(det.tuple.size() == 2);
  const FieldSystem e3(3, {VectorField::coordinate(1, 3), VectorField::coordinate(2, 3), VectorField::coordinate(3, 3)});
  CHECK(check_determinant_condition(e3, 1, torus_grid_samples(3, 4)).value == doctest::Approx(1.0));
  CHECK(check_determinant_condition(single(), 3, grid).value == 0.0);
}

TEST_CASE("rank search") {
  const auto grid = torus_grid_samples(2, 64);
  CHECK(find_hormander_rank(grushin(), 3, grid, 0.5) == 2);
  CHECK(find_hormander_rank(euclidean2(), 3, grid) == 1);
  CHECK_FALSE(find_hormander_rank(single(), 4, grid).has_value());
}

TEST_CASE("subset cap") {
  // N = 3, r = 6: L = 1092, d = 3 -> binomial far above 10^6.
  const FieldSystem sys(3, {VectorField::coordinate(1, 3), VectorField::coordinate(2, 3), VectorField::coordinate(3, 3)});
  CHECK_THROWS_AS((void)check_volume_condition(sys, 6, torus_grid_samples(3, 2)), sublab::CapError);
}

TEST_CASE("full report: agreement and proof chain") {
  const auto grid = torus_grid_samples(2, 32);
  struct Case {
    FieldSystem sys;
    int r;
    bool expect;
  };
  std::vector<Case> cases = {{grushin(), 2, true}, {grushin(), 1, false}, {euclidean2(), 1, true},
                             {single(), 3, false},
                             {FieldSystem(2, {field({"cos(x2)", "1/2"}), field({"sin(x1)*sin(x2)", "cos(x1)"})}), 2, true}};
  for (const auto& c : cases) {
    const auto rep = check_hormander(c.sys, c.r, grid);
    CHECK(rep.criteria_agree());
    CHECK(rep.all_pass() == c.expect);
    CHECK(rep.proof_chain.holds);
  }
  // Random trig systems in d = 2 and d = 3.
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> f(0, 2);
  const char* atoms[] = {"sin(x1)", "cos(x2)", "1"};
  for (int i = 0; i < 5; ++i) {
    const FieldSystem sys(2, {field({atoms[f(rng)], atoms[f(rng)]}), field({atoms[f(rng)], atoms[f(rng)]})});
    const auto rep = check_hormander(sys, 2, torus_grid_samples(2, 16));
    CHECK(rep.proof_chain.holds);
  }
}

TEST_CASE("parallel evaluation gives identical reports") {
  const auto grid = torus_grid_samples(2, 32);
  const auto a = to_json(check_hormander(grushin(), 2, grid, 1e-6, 1));
  const auto b = to_json(check_hormander(grushin(), 2, grid, 1e-6, 4));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("box samples are deterministic and in range") {
  const auto s = box_samples(3, 2.0, 100);
  CHECK(s.size() == 100);
  for (double v : s.coords) CHECK(std::abs(v) <= 2.0);
  CHECK(box_samples(3, 2.0, 100).coords == s.coords);
}
