#pragma once

// Integral curves exp(tX)(x), the flow group law, Taylor remainders, the
// corrected product of flows from the BCH construction, and semi-Lagrangian
// pullback (e^{tX} phi)(x) = phi(exp(tX)(x)) on torus grids.

#include "sublab/grid.hpp"
#include "sublab/vecfield.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace sublab::flows {

using Point = std::vector<double>;
using spectral::TorusGrid;
using vecfield::CompiledField;
using vecfield::VectorField;

inline constexpr double kDefaultTol = 1e-10;

struct FlowResult {
  Point endpoint;
  double error_estimate = 0.0;  // largest accepted local error estimate
  int steps = 0;
};

/// Dormand-Prince 5(4) with PI step control; absolute local error <= tol.
/// Throws NumericalError when the step size underflows.
[[nodiscard]] FlowResult integrate_flow(const CompiledField& x, std::span<const double> start, double t,
                                        double tol = kDefaultTol);
[[nodiscard]] FlowResult integrate_flow(const VectorField& x, std::span<const double> start, double t,
                                        double tol = kDefaultTol);

/// |exp(tX)(exp(sX)(x)) - exp((t+s)X)(x)|.
[[nodiscard]] double check_group_law(const VectorField& x, std::span<const double> start, double s, double t,
                                     double tol = kDefaultTol);

/// |phi(exp(tX)(x)) - sum_{j<=n} t^j/j! (X^j phi)(x)|, n <= 8.
[[nodiscard]] double taylor_remainder(const VectorField& x, const symexpr::Expr& phi, std::span<const double> start,
                                      int n, double t);

/// Corrected product exp(t(Y1+Y2)) exp(-tY1) exp(-tY2) exp(-t^2 Z_2) ... exp(-t^N Z_N),
/// factors applied to the starting point from left to right.
class CbhProduct {
 public:
  CbhProduct(const VectorField& y1, const VectorField& y2, int order);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] const std::vector<VectorField>& corrections() const noexcept { return z_; }
  [[nodiscard]] Point apply(std::span<const double> x, double t, double tol = kDefaultTol) const;
  /// |Phi(x, t) - x|.
  [[nodiscard]] double defect(std::span<const double> x, double t, double tol = kDefaultTol) const;

 private:
  int order_;
  std::vector<VectorField> z_;
  CompiledField sum_, y1_, y2_;
  std::vector<CompiledField> zc_;
};

[[nodiscard]] double cbh_product_defect(const VectorField& y1, const VectorField& y2, int order,
                                        std::span<const double> x, double t, double tol = kDefaultTol);

struct OrderFit {
  std::vector<double> t;
  std::vector<double> defect;
  double slope = 0.0;     // +inf when every defect sits at the noise floor
  double residual = 0.0;  // rms of the log-log fit
  int used = 0;
  bool exact = false;
};

inline constexpr double kNoiseFloor = 1e-14;

/// Least squares on (log t, log defect) over defects above `floor`.
[[nodiscard]] OrderFit fit_order(std::vector<double> t, std::vector<double> defect, double floor = kNoiseFloor);
[[nodiscard]] std::vector<double> log_spaced(double lo, double hi, int count);

/// Defects at or below the integrator tolerance count as noise.
[[nodiscard]] OrderFit cbh_order_fit(const CbhProduct& product, std::span<const double> x,
                                     const std::vector<double>& t_samples, double tol = kDefaultTol, int jobs = 1);
[[nodiscard]] OrderFit taylor_order_fit(const VectorField& x, const symexpr::Expr& phi, std::span<const double> start,
                                        int n, const std::vector<double>& t_samples);

// ---- semi-Lagrangian transport ---------------------------------------------

enum class Interpolation { trigonometric, cubic };
[[nodiscard]] const char* to_string(Interpolation i) noexcept;

/// Flow endpoints exp(tX)(x_j) for every node x_j of a torus grid.
class TransportPlan {
 public:
  /// Requires X to be 2pi-periodic.
  TransportPlan(const TorusGrid& grid, const VectorField& x, double t, double tol = kDefaultTol, int jobs = 1);

  [[nodiscard]] const TorusGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double time() const noexcept { return t_; }
  /// Row j holds the endpoint of node j.
  [[nodiscard]] const Eigen::MatrixXd& endpoints() const noexcept { return ends_; }
  /// phi(exp(tX)(x_j)) from grid values of phi.
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& phi, Interpolation how = Interpolation::trigonometric,
                                      int jobs = 1) const;

 private:
  TorusGrid grid_;
  double t_;
  Eigen::MatrixXd ends_;
};

[[nodiscard]] Eigen::VectorXd pullback_transport(const VectorField& x, const Eigen::VectorXd& phi, double t,
                                                 const TorusGrid& grid,
                                                 Interpolation how = Interpolation::trigonometric,
                                                 double tol = kDefaultTol, int jobs = 1);

/// Trigonometric interpolant of grid values evaluated at arbitrary points (rows).
[[nodiscard]] Eigen::VectorXd trig_interpolate(const TorusGrid& grid, const Eigen::VectorXd& phi,
                                               const Eigen::MatrixXd& points, int jobs = 1);
/// Tensor-product periodic cubic Lagrange interpolation.
[[nodiscard]] Eigen::VectorXd cubic_interpolate(const TorusGrid& grid, const Eigen::VectorXd& phi,
                                                const Eigen::MatrixXd& points, int jobs = 1);

}  // namespace sublab::flows
