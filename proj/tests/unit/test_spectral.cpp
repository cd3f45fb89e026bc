#include "doctest.h"

#include "sublab/error.hpp"
#include "sublab/krylov.hpp"
#include "sublab/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace sublab::spectral;
using sublab::symexpr::Expr;
using sublab::vecfield::FieldSystem;
using sublab::vecfield::VectorField;

namespace {

VectorField field(std::vector<std::string> coeffs) {
  return VectorField::parse(coeffs, static_cast<int>(coeffs.size()));
}

FieldSystem grushin() { return FieldSystem(2, {field({"1", "0"}), field({"0", "sin(x1)"})}); }
FieldSystem euclidean2() { return FieldSystem(2, {field({"1", "0"}), field({"0", "1"})}); }
FieldSystem single() { return FieldSystem(2, {field({"1", "0"})}); }

Expr ex(const std::string& s, int d = 2) { return sublab::symexpr::parse(s, d); }

Eigen::VectorXcd coeffs_of(const TorusGrid& g, const std::string& s) {
  return g.to_fourier(g.sample(ex(s, g.dimension())).cast<cplx>());
}

double rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace

TEST_CASE("Fourier multipliers on a single mode") {
  const TorusGrid g(2, 16);
  const Eigen::VectorXcd u = coeffs_of(g, "cos(x1+2*x2)");
  CHECK(rel(laplacian(g).apply(u), 5.0 * u) < 1e-12);
  CHECK(rel(laplacian_power(g, 0.5).apply(u), std::sqrt(5.0) * u) < 1e-12);
  CHECK(rel(shifted_power(g, -1.0).apply(u), u / 6.0) < 1e-12);
  CHECK(rel(semigroup(g, 0.3).apply(u), std::exp(-0.3 * 6.0) * u) < 1e-12);
  const Eigen::VectorXcd one = coeffs_of(g, "1");
  CHECK(laplacian_power(g, 0.5).apply(one).norm() < 1e-12);
  CHECK(rel(laplacian_power(g, 0.0).apply(one), one) < 1e-12);
}

TEST_CASE("semigroup law and translation") {
  const TorusGrid g(2, 8);
  const Eigen::VectorXcd a = semigroup(g, 0.2).diagonal().cwiseProduct(semigroup(g, 0.5).diagonal());
  CHECK(rel(a, semigroup(g, 0.7).diagonal()) < 1e-14);
  const double shift[] = {0.4, -1.1};
  const Eigen::VectorXcd u = coeffs_of(g, "sin(x1)*cos(x2)");
  const Eigen::VectorXcd shifted = g.to_grid(translation(g, shift).apply(u));
  const Eigen::VectorXd expect = g.sample(ex("sin(x1+0.4)*cos(x2-1.1)")).eval();
  CHECK((shifted.real() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("derivatives") {
  const TorusGrid g(2, 16);
  const Eigen::VectorXcd u = g.to_grid(derivative(g, 1).apply(coeffs_of(g, "sin(x1)")));
  CHECK((u.real() - g.sample(ex("cos(x1)"))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(u.imag().cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXcd v = coeffs_of(g, "cos(x2)");
  CHECK(rel(derivative(g, 0).apply(v), cplx(0, 1) * v) < 1e-14);
  CHECK_THROWS_AS((void)derivative(g, 3), sublab::RangeError);
  // sum of D_k^* D_k is the Laplacian exactly, Nyquist included
  const Eigen::VectorXcd r = sublab::krylov::random_unit_vector(g.size(), 3);
  const GridOperator dd = derivative(g, 1).adjoint() * derivative(g, 1) + derivative(g, 2).adjoint() * derivative(g, 2);
  CHECK(rel(dd.apply(r), laplacian(g).apply(r)) < 1e-14);
}

TEST_CASE("field matrices agree with symbolic application on band-limited input") {
  const TorusGrid g(2, 16);
  const FieldSystem sys = grushin();
  const std::string phi = "cos(x1)*sin(2*x2) + sin(x2)";
  for (int i = 1; i <= 2; ++i) {
    const Eigen::VectorXcd got = g.to_grid(assemble_field_matrix(g, sys.field(i)).apply(coeffs_of(g, phi)));
    const Eigen::VectorXd want = g.sample(sublab::vecfield::apply_field(sys.field(i), ex(phi)));
    CHECK((got.real() - want).cwiseAbs().maxCoeff() < 1e-11);
  }
  // [M(X1), M(X2)] = M([X1, X2])
  const GridOperator m1 = assemble_field_matrix(g, sys.field(1));
  const GridOperator m2 = assemble_field_matrix(g, sys.field(2));
  const GridOperator m12 = assemble_field_matrix(g, sys.multi_commutator(sublab::vecfield::MultiIndex({1, 2})));
  const Eigen::VectorXcd u = coeffs_of(g, phi);
  CHECK(rel(m1.apply(m2.apply(u)) - m2.apply(m1.apply(u)), m12.apply(u)) < 1e-12);
}

TEST_CASE("Hormander operator") {
  const TorusGrid g(2, 8);
  const Eigen::VectorXcd r = sublab::krylov::random_unit_vector(g.size(), 11);
  CHECK(rel(assemble_hormander_operator(g, euclidean2()).apply(r), laplacian(g).apply(r)) < 1e-13);

  const GridOperator h = assemble_hormander_operator(g, grushin());
  CHECK(h.self_adjoint());
  CHECK(h.positive_semidefinite());
  CHECK_NOTHROW(h.verify_flags());
  CHECK(h.apply(coeffs_of(g, "1")).norm() < 1e-13);
  // (u, H u) = sum ||X_i u||^2
  const Eigen::VectorXcd u = coeffs_of(g, "cos(x1)*sin(x2)");
  const double form = u.dot(h.apply(u)).real();
  const double sq = assemble_field_matrix(g, grushin().field(1)).apply(u).squaredNorm() +
                    assemble_field_matrix(g, grushin().field(2)).apply(u).squaredNorm();
  CHECK(form == doctest::Approx(sq).epsilon(1e-12));
  CHECK_THROWS_AS((void)assemble_hormander_operator(TorusGrid(1, 8), grushin()), sublab::DimensionError);
  CHECK_THROWS((void)assemble_field_matrix(g, field({"x1", "0"})));
}

TEST_CASE("divergence form") {
  const TorusGrid g(2, 8);
  const Expr z = Expr::constant(0);
  const Expr o = Expr::constant(1);
  const Eigen::VectorXcd r = sublab::krylov::random_unit_vector(g.size(), 5);
  CHECK(rel(assemble_divergence_form(g, {{z, z, z}, {z, o, z}, {z, z, o}}).apply(r), laplacian(g).apply(r)) < 1e-13);
  CHECK(rel(assemble_divergence_form(g, {{o, z, z}, {z, z, z}, {z, z, z}}).apply(r), r) < 1e-14);
  // Grushin as divergence form: c = diag(0, 1, sin^2 x1)
  const TorusGrid g16(2, 16);
  const GridOperator div = assemble_divergence_form(g16, {{z, z, z}, {z, o, z}, {z, z, ex("sin(x1)*sin(x1)")}});
  const GridOperator sos = assemble_hormander_operator(g16, grushin());
  const Eigen::VectorXcd u = coeffs_of(g16, "cos(2*x1)*sin(x2) + sin(3*x2)");
  CHECK(rel(div.apply(u), sos.apply(u)) < 1e-12);
  CHECK_THROWS((void)assemble_divergence_form(g, {{z, o, z}, {z, o, z}, {z, z, o}}));
  CHECK_THROWS_AS((void)assemble_divergence_form(g, {{z, z}, {z, o}}), sublab::DimensionError);
}

TEST_CASE("double commutator identities on random Hermitian matrices") {
  const auto a = random_hermitian(64, 1);
  const auto b1 = random_hermitian(64, 2);
  const auto b2 = random_hermitian(64, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Eigen::VectorXcd psi = sublab::krylov::random_unit_vector(64, 100 + s);
    const Eigen::VectorXcd phi = sublab::krylov::random_unit_vector(64, 200 + s);
    const cplx f = double_commutator_form(a, b1, b2, psi, phi);
    const cplx d = double_commutator_direct(a, b1, b2, psi, phi);
    CHECK(std::abs(f - d) <= 1e-10 * std::max(1.0, std::abs(d)));
    CHECK(identity_single_error(a, b1, b2, phi) < 1e-10);
    CHECK(identity_square_error(a, b1, phi) < 1e-10);
  }
}

TEST_CASE("grid operator form matches dense matrices") {
  const TorusGrid g(2, 8);
  const GridOperator h = assemble_hormander_operator(g, grushin());
  const GridOperator s = semigroup(g, 0.1);
  const GridOperator d1 = GridOperator::coefficient(g, ex("cos(x1) + sin(x2)"));
  const Eigen::VectorXcd psi = sublab::krylov::random_unit_vector(g.size(), 1);
  const Eigen::VectorXcd phi = sublab::krylov::random_unit_vector(g.size(), 2);
  const cplx a = double_commutator_form(h, s, d1, psi, phi);
  const cplx b = double_commutator_direct(h.densify(), s.densify(), d1.densify(), psi, phi);
  CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
}

TEST_CASE("commutator norms") {
  const TorusGrid g(2, 8);
  // everything diagonal commutes with the Laplacian
  const GridOperator lap = laplacian(g).with_flags(true, true);
  CHECK(lemma_commutator_norm(lap, 1) < 1e-12);
  CHECK(semigroup_commutator_norm(lap, 0.2) < 1e-12);
  CHECK(fractional_commutator_norm(lap, 0.5, 0.25) < 1e-12);

  const GridOperator h = assemble_hormander_operator(g, grushin());
  const auto dense = h.densify();
  // [D1,[D1,H]] against the dense reference
  const auto d1 = derivative(g, 1).densify();
  const auto l = shifted_power(g, -0.5).densify();
  const Eigen::MatrixXcd c1 = l * (d1 * d1 * dense - 2.0 * d1 * dense * d1 + dense * d1 * d1) * l;
  const auto d2 = derivative(g, 2).densify();
  const Eigen::MatrixXcd c2 = l * (d2 * d2 * dense - 2.0 * d2 * dense * d2 + dense * d2 * d2) * l;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(c1), e2(c2);
  const double ref = e1.eigenvalues().cwiseAbs().maxCoeff() + e2.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(lemma_commutator_norm(h, 1) == doctest::Approx(ref).epsilon(1e-6));
  CHECK_THROWS_AS((void)lemma_commutator_norm(h, 4), sublab::RangeError);

  const auto sd = semigroup(g, 0.3).densify();
  const Eigen::MatrixXcd cs = sd * sd * dense - 2.0 * sd * dense * sd + dense * sd * sd;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cs);
  CHECK(semigroup_commutator_norm(h, 0.3) == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-6));
}

TEST_CASE("commutator series settle for Grushin") {
  // the coarsest grids are pre-asymptotic; ratios must shrink toward 1
  const auto f = hormander_factory(grushin());
  const auto s1 = commutator_bound_estimate(f, 2, {8, 16, 32}, 1);
  CHECK(s1.ratios[1] < s1.ratios[0]);
  CHECK(s1.ratios[1] < 1.2);
  const auto s2 = semigroup_commutator_bound(f, 2, {0.01, 0.1, 1.0}, {8, 16, 32}, true);
  CHECK(s2.ratios[1] < s2.ratios[0]);
  CHECK(s2.ratios[1] < 1.2);
  CHECK_THROWS_AS((void)semigroup_commutator_bound(f, 2, {0.0}, {8}, false), sublab::RangeError);
}

TEST_CASE("series and verdicts") {
  const auto s = make_series({8, 16, 32}, {1.0, 1.1, 1.3});
  REQUIRE(s.ratios.size() == 2);
  CHECK(s.ratios[1] == doctest::Approx(1.3 / 1.1));
  CHECK(s.max_value() == doctest::Approx(1.3));
  CHECK(classify(s, {}) == Verdict::bounded);
  CHECK(classify(make_series({8, 16}, {1.0, 1.3}), {}) == Verdict::inconclusive);
  CHECK(classify(make_series({8, 16, 32}, {1.0, 1.0, 1.5}), {}) == Verdict::growing);
  CHECK(classify(make_series({8}, {1.0}), {}) == Verdict::inconclusive);
  CHECK(std::string(to_string(Verdict::growing)) == "growing");
}

TEST_CASE("best subelliptic constant closed forms") {
  const TorusGrid g(1, 8);
  // H = Delta: sup_k |k|^2 / (1 + |k|^2) over |k| <= 4
  CHECK(best_subelliptic_constant(laplacian(g).with_flags(true, true), 1.0) == doctest::Approx(16.0 / 17.0).epsilon(1e-10));
  CHECK(best_subelliptic_constant(GridOperator::zero(g).with_flags(true, true), 1.0) == doctest::Approx(16.0).epsilon(1e-10));

  const auto dec = decompose(laplacian(TorusGrid(2, 8)));
  CHECK(power_constant(*dec, 0.7, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double gamma : {0.3, 0.8}) {
    for (double alpha : {0.5, 1.0}) {
      double want = 0.0;
      for (int k1 = -4; k1 < 4; ++k1) {
        for (int k2 = -4; k2 < 4; ++k2) {
          const double k = k1 * k1 + k2 * k2;
          if (k > 0) want = std::max(want, std::pow(k, alpha * gamma) / std::pow(1.0 + k, alpha));
        }
      }
      CHECK(power_constant(*dec, gamma, alpha) == doctest::Approx(want).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS((void)best_subelliptic_constant(laplacian(g), 0.0), sublab::RangeError);
}

TEST_CASE("best constant is monotone in gamma") {
  const auto dec = decompose(assemble_hormander_operator(TorusGrid(2, 8), grushin()));
  double prev = 0.0;
  for (double gamma = 0.1; gamma <= 1.0 + 1e-12; gamma += 0.1) {
    const double c = best_subelliptic_constant(*dec, gamma);
    CHECK(c >= prev * (1 - 1e-10));
    prev = c;
  }
}

TEST_CASE("Lanczos path agrees with the dense path") {
  const GridOperator h = assemble_hormander_operator(TorusGrid(2, 16), grushin());
  SubellipticOptions lan;
  lan.force_lanczos = true;
  for (double gamma : {0.5, 1.0}) {
    const double dense = best_subelliptic_constant(h, gamma);
    CHECK(best_subelliptic_constant(h, gamma, lan) == doctest::Approx(dense).epsilon(1e-6));
  }
}

TEST_CASE("order relation with the power constant") {
  const auto dec = decompose(assemble_hormander_operator(TorusGrid(2, 8), grushin()));
  for (double gamma : {0.25, 0.5}) {
    const double c = power_constant(*dec, gamma, 1.0, Base::shifted);
    CHECK(order_relation_margin(*dec, gamma, c) >= -1e-9);
    CHECK(order_relation_margin(*dec, gamma, 0.9 * c) < 0.0);
    // operator-monotone consequence for fractional powers
    for (double alpha : {0.25, 0.5, 0.75}) {
      CHECK(power_constant(*dec, gamma, alpha, Base::shifted) <= std::pow(c, alpha) * (1 + 1e-9));
    }
  }
}

TEST_CASE("refinement sweeps") {
  SpectralModel euc(hormander_factory(euclidean2()), 2);
  CHECK(refinement_sweep(euc, "euclidean", 1.0, 1.0, {8, 16}).verdict == Verdict::bounded);
  SpectralModel gru(hormander_factory(grushin()), 2);
  CHECK(refinement_sweep(gru, "grushin", 0.5, 1.0, {8, 16}).verdict == Verdict::bounded);
  CHECK(refinement_sweep(gru, "grushin", 0.9, 1.0, {8, 16}).verdict == Verdict::growing);
  CHECK_THROWS_AS((void)refinement_sweep(gru, "grushin", 0.5, 1.0, {16, 8}), sublab::RangeError);

  // a single field is not subelliptic: ratios are exactly 2^(2 gamma)
  SpectralModel one(hormander_factory(single()), 2);
  const auto r = refinement_sweep(one, "single", 0.5, 1.0, {8, 16});
  CHECK(r.verdict == Verdict::growing);
  CHECK(r.series.ratios[0] == doctest::Approx(2.0).epsilon(1e-9));
  const auto small = refinement_sweep(one, "single", 0.1, 1.0, {8, 16});
  CHECK(small.series.ratios[0] == doctest::Approx(std::pow(2.0, 0.2)).epsilon(1e-9));
  CHECK(small.verdict == Verdict::bounded);  // 1.149 sits under the bounded threshold

  const auto j = to_json(r);
  CHECK(j["verdict"] == "growing");
  CHECK(j["grids"].size() == 2);
  CHECK(j["grids"][1]["n"] == 16);
}

TEST_CASE("order scan finds the largest bounded order") {
  SpectralModel gru(hormander_factory(grushin()), 2);
  const auto scan = order_scan(gru, "grushin", {8, 16}, {0.2, 0.4, 0.6, 0.8, 1.0}, 1.0, {}, 2);
  REQUIRE(scan.gamma_star.has_value());
  CHECK(*scan.gamma_star == doctest::Approx(0.6));
  CHECK(scan.rows.back().verdict == Verdict::growing);
  const auto again = order_scan(gru, "grushin", {8, 16}, {0.2, 0.4, 0.6, 0.8, 1.0}, 1.0, {}, 1);
  for (std::size_t i = 0; i < scan.rows.size(); ++i) CHECK(scan.rows[i].series.values == again.rows[i].series.values);
}

TEST_CASE("improvement lemma instances") {
  const auto h = random_hermitian(24, 9);
  const Eigen::MatrixXcd b = h / h.norm() * 3.0;
  const Eigen::MatrixXcd b2 = b * b;
  {
    const auto r = improvement_lemma_check(b2, b, 0.0, 0.0, 50, 1);
    CHECK(r.hypotheses_hold);
    CHECK(r.conclusion_holds);
    CHECK(minimal_commutator_constant(b2, b, 0.0) < 1e-9);
  }
  {
    const auto p = random_hermitian(24, 10);
    const Eigen::MatrixXcd a = b2 + 0.1 * p;
    const Eigen::MatrixXcd g = b2 * p - 2.0 * b * p * b + p * b2;
    const double c = 0.1 * g.operatorNorm();
    // A >= B^2 need not hold here; the commutator bound must
    const auto r = improvement_lemma_check(a, b, 0.0, c, 50, 2);
    CHECK(r.commutator_margin >= -1e-9);
    CHECK(minimal_commutator_constant(a, b, 0.0) <= c * (1 + 1e-9));
  }
  {
    const TorusGrid g(2, 8);
    const double t = 0.1;
    const Eigen::MatrixXcd hm = assemble_hormander_operator(g, grushin()).densify();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(g.size(), g.size());
    const Eigen::MatrixXcd bb = std::pow(t, -0.25) * (id - semigroup(g, t).densify());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(id + hm);
    const Eigen::MatrixXcd inv_sqrt = es.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> top(inv_sqrt * bb * bb * inv_sqrt);
    const double c1 = top.eigenvalues().maxCoeff();
    const Eigen::MatrixXcd a = c1 * (id + hm);
    const double c = minimal_commutator_constant(a, bb, 0.5);
    const auto r = improvement_lemma_check(a, bb, 0.5, c, 100, 3);
    CHECK(r.hypotheses_hold);
    CHECK(r.conclusion_holds);
    CHECK(!improvement_lemma_check(a, bb, 0.5, 0.5 * c - 1e-6, 10, 3).hypotheses_hold);
  }
}
