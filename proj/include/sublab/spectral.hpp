#pragma once

// Sum-of-squares and divergence-form operators on the torus, fractional
// multipliers, double-commutator checks and subelliptic constant estimation.
//
// Conventions: Delta = -sum d_k^2 >= 0 with symbol |k|^2, L = I + Delta,
// S_t = exp(-tL). Derivatives D_k = d/dx_k have symbol i k_k (Nyquist mode
// included, so sum_k D_k^* D_k = Delta exactly) and D_0 = i I.

#include "sublab/gridop.hpp"
#include "sublab/vecfield.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sublab::spectral {

using Symbol = std::function<cplx(std::span<const int>)>;

[[nodiscard]] GridOperator fourier_multiplier_op(const TorusGrid& grid, const Symbol& symbol);

[[nodiscard]] GridOperator laplacian(const TorusGrid& grid);
/// Delta^gamma; the zero mode maps to 0.
[[nodiscard]] GridOperator laplacian_power(const TorusGrid& grid, double gamma);
/// L^s = (I + Delta)^s.
[[nodiscard]] GridOperator shifted_power(const TorusGrid& grid, double s);
/// S_t = exp(-t(1 + |k|^2)).
[[nodiscard]] GridOperator semigroup(const TorusGrid& grid, double t);
/// Translation symbol exp(i k.a).
[[nodiscard]] GridOperator translation(const TorusGrid& grid, std::span<const double> a);
/// D_axis for axis >= 1; axis 0 gives i I.
[[nodiscard]] GridOperator derivative(const TorusGrid& grid, int axis);

/// X = sum_k a_k D_k with Galerkin coefficient multiplication.
[[nodiscard]] GridOperator assemble_field_matrix(const TorusGrid& grid, const vecfield::VectorField& x);
/// H = sum_i M_i^* M_i; flags self-adjoint and PSD.
[[nodiscard]] GridOperator assemble_hormander_operator(const TorusGrid& grid, const vecfield::FieldSystem& sys);
/// H = sum_{i,j=0}^d D_i^* c_ij D_j for a symmetric (d+1)x(d+1) coefficient matrix.
[[nodiscard]] GridOperator assemble_divergence_form(const TorusGrid& grid,
                                                    const std::vector<std::vector<symexpr::Expr>>& c);

// ---- double commutators ---------------------------------------------------

/// (psi, [B1,[B2,A]] phi) through the four-term form
/// (B2 B1 psi, A phi) - (A B1 psi, B2 phi) + (A psi, B2 B1 phi) - (A B2 psi, B1 phi).
[[nodiscard]] cplx double_commutator_form(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1,
                                          const Eigen::MatrixXcd& b2, const Eigen::VectorXcd& psi,
                                          const Eigen::VectorXcd& phi);
[[nodiscard]] cplx double_commutator_form(const GridOperator& a, const GridOperator& b1, const GridOperator& b2,
                                          const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi);
/// (psi, [B1,[B2,A]] phi) from explicit matrix commutators.
[[nodiscard]] cplx double_commutator_direct(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1,
                                            const Eigen::MatrixXcd& b2, const Eigen::VectorXcd& psi,
                                            const Eigen::VectorXcd& phi);

/// Relative error of Re(B2 phi, [B1,A] phi) = 1/2 (phi, [B2,[B1,A]] phi).
[[nodiscard]] double identity_single_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1,
                                           const Eigen::MatrixXcd& b2, const Eigen::VectorXcd& phi);
/// Relative error of Re(A phi, B^2 phi) = (B phi, A B phi) + 1/2 (phi, [B,[B,A]] phi).
[[nodiscard]] double identity_square_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                           const Eigen::VectorXcd& phi);

[[nodiscard]] Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::uint64_t seed);

// ---- operator families over grids ------------------------------------------

using OperatorFactory = std::function<GridOperator(const TorusGrid&)>;

[[nodiscard]] OperatorFactory hormander_factory(const vecfield::FieldSystem& sys);
[[nodiscard]] OperatorFactory laplacian_factory();

struct GridSeries {
  std::vector<int> grids;
  std::vector<double> values;
  std::vector<double> ratios;  // values[i+1] / values[i]
  [[nodiscard]] double max_ratio() const;
  [[nodiscard]] double max_value() const;
};

[[nodiscard]] GridSeries make_series(std::vector<int> grids, std::vector<double> values);

/// sum_k ||L^{-m/2} [D_k^m, [D_k^m, H]] L^{-m/2}||.
[[nodiscard]] double lemma_commutator_norm(const GridOperator& h, int m, std::uint64_t seed = 0);
/// ||L^{-(rho+delta)} [L^rho, [L^rho, H]] L^{-(rho+delta)}||.
[[nodiscard]] double fractional_commutator_norm(const GridOperator& h, double rho, double delta,
                                                std::uint64_t seed = 0);
/// ||[S_t, [S_t, H]]||.
[[nodiscard]] double semigroup_commutator_norm(const GridOperator& h, double t, std::uint64_t seed = 0);
/// ||P (I - S_t)^{-1} [S_t, [S_t, H]] (I - S_t)^{-1} P||, P the projection off constants.
[[nodiscard]] double semigroup_commutator_norm_refined(const GridOperator& h, double t, std::uint64_t seed = 0);

[[nodiscard]] GridSeries commutator_bound_estimate(const OperatorFactory& h, int dimension,
                                                   const std::vector<int>& grids, int m, std::uint64_t seed = 0,
                                                   int jobs = 1);
[[nodiscard]] GridSeries fractional_commutator_bound(const OperatorFactory& h, int dimension,
                                                     const std::vector<int>& grids, double rho, double delta,
                                                     std::uint64_t seed = 0, int jobs = 1);
/// Sup over t of the (refined) semigroup double commutator norm, per grid.
[[nodiscard]] GridSeries semigroup_commutator_bound(const OperatorFactory& h, int dimension,
                                                    const std::vector<double>& t_list,
                                                    const std::vector<int>& grids, bool refined = false,
                                                    std::uint64_t seed = 0, int jobs = 1);

// ---- improvement lemma -----------------------------------------------------

struct ImprovementResult {
  double form_margin = 0.0;        // lambda_min(A_sym - B^2)
  double commutator_margin = 0.0;  // -lambda_max(|G| bound violation), G = [B,[B,A]]
  bool hypotheses_hold = false;
  double worst_margin = 0.0;  // min over probes of ||A phi|| - (1-eps)||B^2 phi|| + sqrt(c)||phi||
  bool conclusion_holds = false;
};

/// Smallest c >= 0 with +-(phi,[B,[B,A]]phi) <= eps ||B^2 phi||^2 + c ||phi||^2.
[[nodiscard]] double minimal_commutator_constant(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double eps);

[[nodiscard]] ImprovementResult improvement_lemma_check(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                        double eps, double c, int probes, std::uint64_t seed);

// ---- subelliptic constants -------------------------------------------------

/// Eigendecomposition H = V diag(mu) V^*.
struct Decomposition {
  TorusGrid grid;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd values;
};

inline constexpr std::size_t kEigenCap = 4096;

[[nodiscard]] std::shared_ptr<const Decomposition> decompose(const GridOperator& h, int jobs = 1);

enum class Base { laplacian, shifted };

/// ||B^{alpha gamma} (I+H)^{-alpha}|| with B = Delta or L.
[[nodiscard]] double power_constant(const Decomposition& dec, double gamma, double alpha, Base base = Base::laplacian);

struct SubellipticOptions {
  std::size_t dense_cap = 1024;
  bool force_lanczos = false;
  double lanczos_tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Least c with c (phi, (I+H) phi) >= ||B^{gamma/2} phi||^2.
[[nodiscard]] double best_subelliptic_constant(const GridOperator& h, double gamma, const SubellipticOptions& opt = {},
                                               Base base = Base::laplacian);
[[nodiscard]] double best_subelliptic_constant(const Decomposition& dec, double gamma, Base base = Base::laplacian);

/// lambda_min(c^2 (I+H)^2 - L^{2 gamma}) / ||L^{2 gamma}||.
[[nodiscard]] double order_relation_margin(const Decomposition& dec, double gamma, double c);

/// Eigendecompositions of one operator family, cached per grid size.
class SpectralModel {
 public:
  SpectralModel(OperatorFactory factory, int dimension, int jobs = 1);
  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] std::shared_ptr<const Decomposition> decomposition(int n) const;
  [[nodiscard]] GridOperator op(int n) const { return factory_(TorusGrid(dim_, n)); }

 private:
  OperatorFactory factory_;
  int dim_;
  int jobs_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const Decomposition>> cache_;
};

struct Thresholds {
  double bounded = 1.2;
  double growing = 1.5;
};

enum class Verdict { bounded, inconclusive, growing };
[[nodiscard]] const char* to_string(Verdict v) noexcept;
[[nodiscard]] Verdict classify(const GridSeries& s, const Thresholds& th);

struct SubellipticityReport {
  std::string system;
  double gamma = 0.0;
  double alpha = 0.0;
  GridSeries series;
  Verdict verdict = Verdict::inconclusive;
};

[[nodiscard]] SubellipticityReport refinement_sweep(const SpectralModel& model, const std::string& system_id,
                                                    double gamma, double alpha, const std::vector<int>& grids,
                                                    const Thresholds& th = {});

struct OrderScan {
  std::optional<double> gamma_star;
  std::vector<SubellipticityReport> rows;
};

[[nodiscard]] OrderScan order_scan(const SpectralModel& model, const std::string& system_id,
                                   const std::vector<int>& grids, const std::vector<double>& gammas,
                                   double alpha = 1.0, const Thresholds& th = {}, int jobs = 1);

[[nodiscard]] nlohmann::json to_json(const SubellipticityReport& r);
[[nodiscard]] nlohmann::json to_json(const GridSeries& s);

}  // namespace sublab::spectral
