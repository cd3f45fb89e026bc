#pragma once

// Finite-dimensional operators on Fourier coefficient vectors of a torus grid.
//
// Representations:
//   multiplier   diagonal in the Fourier basis
//   coefficient  Galerkin multiplication by a periodic function a:
//                (A u)^(p) = sum_q a^(p - q) u^(q), p, q in the frequency box,
//                with a^ the DFT of a on the doubled grid (no wrap-around)
//   dense        explicit matrix
//   sum/product  composites of the above
//
// Products are applied right to left. All representations agree with their
// densified matrices.

#include "sublab/grid.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace sublab::spectral {

class GridOperator {
 public:
  enum class Kind { multiplier, coefficient, dense, sum, product };

  static GridOperator identity(const TorusGrid& grid);
  static GridOperator zero(const TorusGrid& grid);
  static GridOperator multiplier(const TorusGrid& grid, Eigen::VectorXcd diagonal);
  /// Galerkin multiplication by a periodic coefficient; constants become multipliers.
  static GridOperator coefficient(const TorusGrid& grid, const symexpr::Expr& a);
  /// Galerkin multiplication by a function given by its values on the doubled grid.
  static GridOperator coefficient_values(const TorusGrid& grid, const Eigen::VectorXcd& doubled_values);
  static GridOperator dense(const TorusGrid& grid, Eigen::MatrixXcd matrix);

  [[nodiscard]] Kind kind() const noexcept;
  [[nodiscard]] const TorusGrid& grid() const noexcept;
  [[nodiscard]] Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(grid().size()); }
  /// Diagonal of a multiplier; empty otherwise.
  [[nodiscard]] const Eigen::VectorXcd& diagonal() const;

  [[nodiscard]] bool self_adjoint() const noexcept;
  [[nodiscard]] bool positive_semidefinite() const noexcept;
  /// Copy carrying the given structural flags (verify with verify_flags()).
  [[nodiscard]] GridOperator with_flags(bool self_adjoint, bool psd) const;

  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& coeffs) const;
  [[nodiscard]] Eigen::MatrixXcd apply(const Eigen::MatrixXcd& block, int jobs = 1) const;
  /// Applies to grid values: transform, apply, transform back.
  [[nodiscard]] Eigen::VectorXcd apply_grid(const Eigen::VectorXcd& values) const;

  [[nodiscard]] GridOperator adjoint() const;
  [[nodiscard]] GridOperator scaled(cplx w) const;
  [[nodiscard]] GridOperator operator+(const GridOperator& o) const;
  [[nodiscard]] GridOperator operator-(const GridOperator& o) const;
  /// Composition: (*this) after o.
  [[nodiscard]] GridOperator operator*(const GridOperator& o) const;

  /// Explicit matrix; throws CapError above `cap` unknowns.
  [[nodiscard]] Eigen::MatrixXcd densify(int jobs = 1, std::size_t cap = 4096) const;

  /// Checks the flags on the densified matrix:
  /// ||A - A*|| <= 1e-10 ||A|| and lambda_min >= -1e-8 lambda_max. Throws NumericalError.
  void verify_flags(int jobs = 1) const;

  struct Node;

 private:
  explicit GridOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Galerkin matrix A[p,q] = a^(p - q) of a coefficient operator (dense reference path).
[[nodiscard]] Eigen::MatrixXcd galerkin_matrix(const TorusGrid& grid, const symexpr::Expr& a);

}  // namespace sublab::spectral
