#pragma once

// Dense two-phase simplex with Bland's rule. Sized for the small programs that
// appear in the Hormander checks (tens of rows, about a hundred columns).

#include <Eigen/Dense>

namespace sublab::linprog {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// minimize c^T x subject to A x = b, x >= 0.
[[nodiscard]] LpResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& c, double tol = 1e-11);

struct MinNormResult {
  bool feasible = false;
  double norm = 0.0;  // min ||lambda||_inf when feasible
  Eigen::VectorXd lambda;
};

/// min ||lambda||_inf subject to G lambda = target.
///
/// Rewritten as: minimize s over (l+, l-, s, w) >= 0 with G (l+ - l-) = target and
/// l+_k + l-_k + w_k = s.
[[nodiscard]] MinNormResult min_inf_norm_solution(const Eigen::MatrixXd& g, const Eigen::VectorXd& target);

}  // namespace sublab::linprog
