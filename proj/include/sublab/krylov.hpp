#pragma once

// Krylov tools for Hermitian operators given as matrix-free maps.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace sublab::krylov {

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct LanczosOptions {
  double tol = 1e-8;      // relative change and residual bound on the extreme Ritz values
  int max_iter = 400;
  std::uint64_t seed = 0;
  bool largest_only = false;  // stop once the top Ritz value has converged
};

struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lanczos with full reorthogonalisation and a seeded complex Gaussian start vector.
[[nodiscard]] ExtremeEigenvalues lanczos_extremes(const LinearMap& op, Eigen::Index size,
                                                  const LanczosOptions& opt = {});

/// max |lambda| of a Hermitian map; throws NumericalError when not converged.
[[nodiscard]] double hermitian_norm(const LinearMap& op, Eigen::Index size, const LanczosOptions& opt = {});

struct CgResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients for a Hermitian positive definite map.
[[nodiscard]] CgResult conjugate_gradient(const LinearMap& op, const Eigen::VectorXcd& b, double tol = 1e-12,
                                          int max_iter = 5000);

/// Seeded complex Gaussian vector (unit norm).
[[nodiscard]] Eigen::VectorXcd random_unit_vector(Eigen::Index size, std::uint64_t seed);

}  // namespace sublab::krylov
