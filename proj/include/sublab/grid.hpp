#pragma once

// Periodic grid on the torus [0, 2pi)^d with n points per side and its unitary
// discrete Fourier transform. Flat index i = sum_k j_k n^(d-1-k): the first
// coordinate varies slowest. Fourier coefficients use the same layout with
// frequency k = j for j < n/2 and j - n otherwise, i.e. {-n/2, ..., n/2-1}.

#include "sublab/symexpr.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sublab::spectral {

using cplx = std::complex<double>;

class TorusGrid {
 public:
  /// n >= 4 and a power of two; total size capped at 2^22.
  TorusGrid(int dimension, int n);

  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double spacing() const noexcept;
  /// Quadrature weight (2pi/n)^d.
  [[nodiscard]] double weight() const noexcept;

  /// Per-axis index of flat index i.
  [[nodiscard]] int axis_index(std::size_t i, int axis) const noexcept;
  [[nodiscard]] std::vector<double> point(std::size_t i) const;
  void point_into(std::size_t i, std::span<double> out) const;
  /// Frequency along `axis` of the flat coefficient index i.
  [[nodiscard]] int frequency(std::size_t i, int axis) const noexcept;
  [[nodiscard]] double frequency_norm2(std::size_t i) const noexcept;
  /// Flat coefficient index for a frequency vector inside the box.
  [[nodiscard]] std::size_t index_of(std::span<const int> k) const;

  /// Unitary forward transform of grid values.
  [[nodiscard]] Eigen::VectorXcd to_fourier(const Eigen::VectorXcd& values) const;
  /// Inverse of to_fourier.
  [[nodiscard]] Eigen::VectorXcd to_grid(const Eigen::VectorXcd& coeffs) const;

  /// Grid L2 norm sqrt(weight * sum |v|^2).
  [[nodiscard]] double l2_norm(const Eigen::VectorXcd& values) const;
  [[nodiscard]] double l2_norm(const Eigen::VectorXd& values) const;

  [[nodiscard]] Eigen::VectorXd sample(const symexpr::Expr& e) const;
  [[nodiscard]] Eigen::VectorXd sample(const std::function<double(std::span<const double>)>& f) const;

  /// Grid with twice the points per side (used for coefficient transforms).
  [[nodiscard]] TorusGrid doubled() const { return TorusGrid(dim_, 2 * n_); }

  bool operator==(const TorusGrid& o) const noexcept { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// In-place d-dimensional FFT (unnormalised); `inverse` uses exp(+ikx).
void fft_nd(std::vector<cplx>& data, int dimension, int n, bool inverse);

/// Flat index on grid 2n of each coefficient index of grid n.
[[nodiscard]] std::vector<std::size_t> padding_map(const TorusGrid& grid);
/// Zero-pads coefficients on grid n into grid 2n (same frequencies).
[[nodiscard]] Eigen::VectorXcd pad_coefficients(const TorusGrid& grid, const Eigen::VectorXcd& coeffs);
/// Keeps the frequencies of grid n from coefficients on grid 2n.
[[nodiscard]] Eigen::VectorXcd truncate_coefficients(const TorusGrid& grid, const Eigen::VectorXcd& padded);

/// Throws if the expression is not 2pi-periodic in each coordinate (sampled check).
void require_periodic(const symexpr::Expr& e, int dimension, const char* what);

}  // namespace sublab::spectral
