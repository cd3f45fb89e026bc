#include "sublab/linprog.hpp"

#include "sublab/error.hpp"

#include <cmath>
#include <vector>

namespace sublab::linprog {

namespace {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows) {}

  Eigen::MatrixXd& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  [[nodiscard]] Eigen::Index rows() const { return t_.rows() - 1; }
  [[nodiscard]] Eigen::Index rhs_col() const { return t_.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Minimises the objective row (last row) over columns [0, allowed).
  LpStatus run(Eigen::Index allowed, double tol, long max_iter) {
    const Eigen::Index obj = rows();
    for (long it = 0; it < max_iter; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(obj, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < obj; ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double ratio = t_(i, rhs_col()) / a;
        if (leave < 0 || ratio < best - tol ||
            (std::abs(ratio - best) <= tol && basis_[static_cast<std::size_t>(i)] <
                                                   basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    return LpStatus::iteration_limit;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             double tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw DimensionError("linear program dimensions do not match");

  Tableau tab(m, n + m);
  auto& t = tab.data();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, tab.rhs_col()) = sign * b(i);
    tab.basis()[static_cast<std::size_t>(i)] = n + i;
  }
  // Phase 1: minimise the sum of artificials; reduced costs are minus the column sums.
  for (Eigen::Index i = 0; i < m; ++i) {
    t.row(m).head(n) -= t.row(i).head(n);
    t(m, tab.rhs_col()) -= t(i, tab.rhs_col());
  }
  const long max_iter = 50 * static_cast<long>(m + n + 10);
  LpResult result;
  LpStatus st = tab.run(n + m, tol, max_iter);
  if (st == LpStatus::iteration_limit) {
    result.status = st;
    return result;
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (-t(m, tab.rhs_col()) > 1e-9 * scale) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] < n) continue;
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }
  // Phase 2 objective row.
  t.row(m).setZero();
  t.row(m).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < n && c(bj) != 0.0) t.row(m) -= c(bj) * t.row(i);
  }
  st = tab.run(n, tol, max_iter);
  result.status = st;
  if (st != LpStatus::optimal) return result;
  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < n) result.x(bj) = t(i, tab.rhs_col());
  }
  result.objective = c.dot(result.x);
  return result;
}

MinNormResult min_inf_norm_solution(const Eigen::MatrixXd& g, const Eigen::VectorXd& target) {
  const Eigen::Index d = g.rows();
  const Eigen::Index l = g.cols();
  if (target.size() != d) throw DimensionError("target dimension does not match generator rows");
  const Eigen::Index n = 3 * l + 1;  // l+, l-, s, w
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + l, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d + l);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  a.block(0, 0, d, l) = g;
  a.block(0, l, d, l) = -g;
  b.head(d) = target;
  for (Eigen::Index k = 0; k < l; ++k) {
    a(d + k, k) = 1.0;
    a(d + k, l + k) = 1.0;
    a(d + k, 2 * l) = -1.0;
    a(d + k, 2 * l + 1 + k) = 1.0;
  }
  c(2 * l) = 1.0;
  const LpResult lp = solve_standard_form(a, b, c);
  MinNormResult out;
  if (lp.status == LpStatus::infeasible) return out;
  if (lp.status != LpStatus::optimal) throw NumericalError("linear program did not converge");
  out.feasible = true;
  out.lambda = lp.x.head(l) - lp.x.segment(l, l);
  out.norm = out.lambda.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace sublab::linprog
