#include "sublab/grid.hpp"

#include "sublab/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <random>

namespace sublab::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

TorusGrid::TorusGrid(int dimension, int n) : dim_(dimension), n_(n), size_(0) {
  if (dimension < 1 || dimension > 3) throw RangeError("torus grids support 1 <= d <= 3");
  if (n < 4 || (n & (n - 1)) != 0) throw RangeError("grid size n must be a power of two >= 4");
  if (std::pow(static_cast<double>(n), dimension) > static_cast<double>(1u << 22)) {
    throw CapError("torus grid exceeds 2^22 points");
  }
  size_ = ipow(static_cast<std::size_t>(n), dimension);
}

double TorusGrid::spacing() const noexcept { return kTwoPi / n_; }

double TorusGrid::weight() const noexcept { return std::pow(spacing(), dim_); }

int TorusGrid::axis_index(std::size_t i, int axis) const noexcept {
  const std::size_t stride = ipow(static_cast<std::size_t>(n_), dim_ - 1 - axis);
  return static_cast<int>((i / stride) % static_cast<std::size_t>(n_));
}

std::vector<double> TorusGrid::point(std::size_t i) const {
  std::vector<double> x(static_cast<std::size_t>(dim_));
  point_into(i, x);
  return x;
}

void TorusGrid::point_into(std::size_t i, std::span<double> out) const {
  for (int k = 0; k < dim_; ++k) out[static_cast<std::size_t>(k)] = spacing() * axis_index(i, k);
}

int TorusGrid::frequency(std::size_t i, int axis) const noexcept {
  const int j = axis_index(i, axis);
  return j < n_ / 2 ? j : j - n_;
}

double TorusGrid::frequency_norm2(std::size_t i) const noexcept {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    const double f = frequency(i, k);
    s += f * f;
  }
  return s;
}

std::size_t TorusGrid::index_of(std::span<const int> k) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    const int f = k[static_cast<std::size_t>(a)];
    if (f < -n_ / 2 || f >= n_ / 2) throw RangeError("frequency outside the grid box");
    idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(f < 0 ? f + n_ : f);
  }
  return idx;
}

void fft_nd(std::vector<cplx>& data, int dimension, int n, bool inverse) {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t total = data.size();
  std::vector<cplx> line(nn), out(nn);
  for (int axis = 0; axis < dimension; ++axis) {
    const std::size_t stride = ipow(nn, dimension - 1 - axis);
    const std::size_t block = stride * nn;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < nn; ++j) line[j] = data[base + off + j * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (std::size_t j = 0; j < nn; ++j) data[base + off + j * stride] = out[j];
      }
    }
  }
}

Eigen::VectorXcd TorusGrid::to_fourier(const Eigen::VectorXcd& values) const {
  if (static_cast<std::size_t>(values.size()) != size_) throw DimensionError("grid vector size mismatch");
  std::vector<cplx> buf(values.data(), values.data() + values.size());
  fft_nd(buf, dim_, n_, false);
  const double s = 1.0 / std::sqrt(static_cast<double>(size_));
  Eigen::VectorXcd out(values.size());
  for (std::size_t i = 0; i < size_; ++i) out(static_cast<Eigen::Index>(i)) = buf[i] * s;
  return out;
}

Eigen::VectorXcd TorusGrid::to_grid(const Eigen::VectorXcd& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != size_) throw DimensionError("coefficient vector size mismatch");
  std::vector<cplx> buf(coeffs.data(), coeffs.data() + coeffs.size());
  fft_nd(buf, dim_, n_, true);
  const double s = 1.0 / std::sqrt(static_cast<double>(size_));
  Eigen::VectorXcd out(coeffs.size());
  for (std::size_t i = 0; i < size_; ++i) out(static_cast<Eigen::Index>(i)) = buf[i] * s;
  return out;
}

double TorusGrid::l2_norm(const Eigen::VectorXcd& values) const { return std::sqrt(weight()) * values.norm(); }

double TorusGrid::l2_norm(const Eigen::VectorXd& values) const { return std::sqrt(weight()) * values.norm(); }

Eigen::VectorXd TorusGrid::sample(const symexpr::Expr& e) const {
  const symexpr::Program p(e);
  return sample([&](std::span<const double> x) { return p(x); });
}

Eigen::VectorXd TorusGrid::sample(const std::function<double(std::span<const double>)>& f) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size_));
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < size_; ++i) {
    point_into(i, x);
    out(static_cast<Eigen::Index>(i)) = f(x);
  }
  return out;
}

std::vector<std::size_t> padding_map(const TorusGrid& grid) {
  const TorusGrid big = grid.doubled();
  std::vector<std::size_t> map(grid.size());
  std::vector<int> k(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dimension(); ++a) k[static_cast<std::size_t>(a)] = grid.frequency(i, a);
    map[i] = big.index_of(k);
  }
  return map;
}

Eigen::VectorXcd pad_coefficients(const TorusGrid& grid, const Eigen::VectorXcd& coeffs) {
  const auto map = padding_map(grid);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.doubled().size()));
  for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(map[i])) = coeffs(static_cast<Eigen::Index>(i));
  return out;
}

Eigen::VectorXcd truncate_coefficients(const TorusGrid& grid, const Eigen::VectorXcd& padded) {
  const auto map = padding_map(grid);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(i)) = padded(static_cast<Eigen::Index>(map[i]));
  return out;
}

void require_periodic(const symexpr::Expr& e, int dimension, const char* what) {
  const symexpr::Program p(e);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::vector<double> x(static_cast<std::size_t>(dimension)), y;
  for (int s = 0; s < 16; ++s) {
    for (auto& v : x) v = u(rng);
    const double base = p(x);
    for (int k = 0; k < dimension; ++k) {
      y = x;
      y[static_cast<std::size_t>(k)] += kTwoPi;
      const double shifted = p(y);
      if (std::abs(shifted - base) > 1e-9 * std::max(1.0, std::abs(base))) {
        throw Error(ErrorKind::invalid_argument,
                    std::string(what) + " is not 2pi-periodic: " + e.to_string());
      }
    }
  }
}

}  // namespace sublab::spectral
