#pragma once

// Sampled Hoelder norms on torus grids:
//   ||phi||_{2;X,g} = ||phi||_2 + sup_{0<|t|<=1} |t|^-g ||e^{tX}phi - phi||_2
//   ||phi||_{2;g}   = ||phi||_2 + sup_{0<|x|<=1} |x|^-g ||L(x)phi - phi||_2
// Suprema are maxima over finite samples, hence lower bounds of the true values.

#include "sublab/flows.hpp"
#include "sublab/hormander.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace sublab::flows {

struct HolderOptions {
  int t_per_sign = 24;
  double t_min = 1e-3;
  Interpolation interpolation = Interpolation::trigonometric;
  double tol = kDefaultTol;
  int jobs = 1;
};

/// Transport plans for exp(+-tX) at every sampled t, shared by many grid functions.
class FieldTransport {
 public:
  FieldTransport(const TorusGrid& grid, const VectorField& x, std::vector<double> t_samples,
                 const HolderOptions& opt = {});

  [[nodiscard]] const std::vector<double>& t_samples() const noexcept { return t_; }
  [[nodiscard]] double seminorm(const Eigen::VectorXd& phi, double gamma) const;

 private:
  TorusGrid grid_;
  std::vector<double> t_;
  std::vector<std::unique_ptr<TransportPlan>> plans_;  // 2i: +t_i, 2i+1: -t_i; null for the zero field
  Interpolation how_;
  int jobs_;
};

[[nodiscard]] std::vector<double> default_t_samples(const HolderOptions& opt = {});

/// t_samples are positive; both signs are used.
[[nodiscard]] double holder_norm_field(const TorusGrid& grid, const Eigen::VectorXd& phi, const VectorField& x,
                                       double gamma, const std::vector<double>& t_samples,
                                       const HolderOptions& opt = {});
[[nodiscard]] double holder_norm_field(const TorusGrid& grid, const Eigen::VectorXd& phi,
                                       const FieldTransport& transport, double gamma);

/// Shifts on spheres of the given radii: 2 directions in d=1, 16 in d=2, 32 in d=3.
[[nodiscard]] std::vector<std::vector<double>> sphere_shifts(int dimension, const std::vector<double>& radii);

/// Translation differences via exact Fourier phase shifts.
[[nodiscard]] double holder_norm_universal(const TorusGrid& grid, const Eigen::VectorXd& phi, double gamma,
                                           const std::vector<std::vector<double>>& shifts);

/// Random real trigonometric polynomials with frequencies |k|_inf <= max_freq,
/// coefficients ~ N(0,1)/(1+|k|^2).
[[nodiscard]] std::vector<Eigen::VectorXd> band_limited_functions(const TorusGrid& grid, int count, int max_freq,
                                                                  std::uint64_t seed);

struct ComparisonResult {
  double c_emp = 0.0;
  std::vector<double> ratios;  // one per test function
};

/// Comparison ratios from prebuilt transports (one per field of the system).
[[nodiscard]] ComparisonResult comparison_from_transports(const TorusGrid& grid,
                                                          const std::vector<FieldTransport>& transports, int r,
                                                          double gamma,
                                                          const std::vector<Eigen::VectorXd>& test_functions,
                                                          const std::vector<double>& radii, int jobs = 1);

/// max over phi of ||phi||_{2;g/r} / (sum_j ||phi||_{2;X_j,g} + ||phi||_2).
/// Requires the system to pass the Hoermander check at order r on a torus sample grid.
[[nodiscard]] ComparisonResult holder_comparison_ratio(const vecfield::FieldSystem& sys, int r, double gamma,
                                                       const TorusGrid& grid,
                                                       const std::vector<Eigen::VectorXd>& test_functions,
                                                       const HolderOptions& opt = {});

}  // namespace sublab::flows
