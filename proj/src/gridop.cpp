#include "sublab/gridop.hpp"

#include "sublab/error.hpp"
#include "sublab/parallel.hpp"

#include <cmath>

namespace sublab::spectral {

struct GridOperator::Node {
  Kind kind;
  TorusGrid grid;
  bool self_adjoint = false;
  bool psd = false;
  Eigen::VectorXcd diag;             // multiplier
  Eigen::VectorXcd doubled_values;   // coefficient on grid 2n
  std::vector<std::size_t> pad_map;  // coefficient
  Eigen::MatrixXcd matrix;           // dense
  std::vector<GridOperator> children;
  std::vector<cplx> weights;  // sum

  Node(Kind k, const TorusGrid& g) : kind(k), grid(g) {}
};

namespace {

constexpr double kSnap = 1e-14;

using Node = GridOperator::Node;

// DFT of doubled-grid values normalised as a^(m) = N2^-1 sum_x a(x) e^{-imx}, snapped.
Eigen::VectorXcd coefficient_spectrum(const TorusGrid& big, const Eigen::VectorXcd& values) {
  std::vector<cplx> buf(values.data(), values.data() + values.size());
  fft_nd(buf, big.dimension(), big.n(), false);
  const double inv = 1.0 / static_cast<double>(big.size());
  double mx = 0.0;
  for (auto& v : buf) {
    v *= inv;
    mx = std::max(mx, std::abs(v));
  }
  Eigen::VectorXcd out(values.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = std::abs(buf[i]) < kSnap * mx ? cplx(0.0) : buf[i];
  }
  return out;
}

}  // namespace

GridOperator GridOperator::identity(const TorusGrid& grid) {
  return multiplier(grid, Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(grid.size()))).with_flags(true, true);
}

GridOperator GridOperator::zero(const TorusGrid& grid) {
  return multiplier(grid, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))).with_flags(true, true);
}

GridOperator GridOperator::multiplier(const TorusGrid& grid, Eigen::VectorXcd diagonal) {
  if (static_cast<std::size_t>(diagonal.size()) != grid.size()) throw DimensionError("multiplier size mismatch");
  for (Eigen::Index i = 0; i < diagonal.size(); ++i) {
    if (!std::isfinite(diagonal(i).real()) || !std::isfinite(diagonal(i).imag())) {
      throw NumericalError("multiplier symbol is not finite");
    }
  }
  auto node = std::make_shared<Node>(Kind::multiplier, grid);
  node->self_adjoint = diagonal.imag().cwiseAbs().maxCoeff() == 0.0;
  node->psd = node->self_adjoint && diagonal.real().minCoeff() >= 0.0;
  node->diag = std::move(diagonal);
  return GridOperator(node);
}

GridOperator GridOperator::coefficient(const TorusGrid& grid, const symexpr::Expr& a) {
  const symexpr::Expr s = symexpr::simplify(a);
  if (s.max_coordinate() > grid.dimension()) throw DimensionError("coefficient references a coordinate beyond d");
  if (s.is_constant()) {
    const double c = static_cast<double>(s.value());
    return multiplier(grid, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(grid.size()), c));
  }
  require_periodic(s, grid.dimension(), "coefficient");
  const TorusGrid big = grid.doubled();
  const Eigen::VectorXd values = big.sample(s);
  return coefficient_values(grid, values.cast<cplx>()).with_flags(true, false);
}

GridOperator GridOperator::coefficient_values(const TorusGrid& grid, const Eigen::VectorXcd& doubled_values) {
  const TorusGrid big = grid.doubled();
  if (static_cast<std::size_t>(doubled_values.size()) != big.size()) {
    throw DimensionError("coefficient values must live on the doubled grid");
  }
  const Eigen::VectorXcd spec = coefficient_spectrum(big, doubled_values);
  // cleaned values with the snapped spectrum, used by the matrix-free path
  std::vector<cplx> buf(spec.data(), spec.data() + spec.size());
  fft_nd(buf, big.dimension(), big.n(), true);
  auto node = std::make_shared<Node>(Kind::coefficient, grid);
  node->doubled_values = Eigen::Map<Eigen::VectorXcd>(buf.data(), static_cast<Eigen::Index>(buf.size()));
  node->pad_map = padding_map(grid);
  node->self_adjoint = node->doubled_values.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, node->doubled_values.cwiseAbs().maxCoeff());
  return GridOperator(node);
}

GridOperator GridOperator::dense(const TorusGrid& grid, Eigen::MatrixXcd matrix) {
  if (static_cast<std::size_t>(matrix.rows()) != grid.size() || matrix.rows() != matrix.cols()) {
    throw DimensionError("dense operator size mismatch");
  }
  auto node = std::make_shared<Node>(Kind::dense, grid);
  node->matrix = std::move(matrix);
  return GridOperator(node);
}

GridOperator::Kind GridOperator::kind() const noexcept { return node_->kind; }
const TorusGrid& GridOperator::grid() const noexcept { return node_->grid; }
const Eigen::VectorXcd& GridOperator::diagonal() const { return node_->diag; }
bool GridOperator::self_adjoint() const noexcept { return node_->self_adjoint; }
bool GridOperator::positive_semidefinite() const noexcept { return node_->psd; }

GridOperator GridOperator::with_flags(bool sa, bool psd) const {
  auto node = std::make_shared<Node>(*node_);
  node->self_adjoint = sa;
  node->psd = psd;
  return GridOperator(node);
}

Eigen::VectorXcd GridOperator::apply(const Eigen::VectorXcd& u) const {
  const Node& nd = *node_;
  if (u.size() != size()) throw DimensionError("operator applied to a vector of the wrong size");
  switch (nd.kind) {
    case Kind::multiplier:
      return nd.diag.cwiseProduct(u);
    case Kind::dense:
      return nd.matrix * u;
    case Kind::coefficient: {
      const TorusGrid big = nd.grid.doubled();
      std::vector<cplx> buf(big.size(), cplx(0.0));
      for (std::size_t i = 0; i < nd.pad_map.size(); ++i) buf[nd.pad_map[i]] = u(static_cast<Eigen::Index>(i));
      fft_nd(buf, big.dimension(), big.n(), true);
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= nd.doubled_values(static_cast<Eigen::Index>(i));
      fft_nd(buf, big.dimension(), big.n(), false);
      const double inv = 1.0 / static_cast<double>(big.size());
      Eigen::VectorXcd out(u.size());
      for (std::size_t i = 0; i < nd.pad_map.size(); ++i) out(static_cast<Eigen::Index>(i)) = buf[nd.pad_map[i]] * inv;
      return out;
    }
    case Kind::sum: {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(u.size());
      for (std::size_t i = 0; i < nd.children.size(); ++i) out += nd.weights[i] * nd.children[i].apply(u);
      return out;
    }
    case Kind::product: {
      Eigen::VectorXcd v = u;
      for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) v = it->apply(v);
      return v;
    }
  }
  return u;
}

Eigen::MatrixXcd GridOperator::apply(const Eigen::MatrixXcd& block, int jobs) const {
  Eigen::MatrixXcd out(block.rows(), block.cols());
  parallel_for(static_cast<std::size_t>(block.cols()), jobs, [&](std::size_t j) {
    out.col(static_cast<Eigen::Index>(j)) = apply(Eigen::VectorXcd(block.col(static_cast<Eigen::Index>(j))));
  });
  return out;
}

Eigen::VectorXcd GridOperator::apply_grid(const Eigen::VectorXcd& values) const {
  return grid().to_grid(apply(grid().to_fourier(values)));
}

GridOperator GridOperator::adjoint() const {
  const Node& nd = *node_;
  auto node = std::make_shared<Node>(nd);
  switch (nd.kind) {
    case Kind::multiplier:
      node->diag = nd.diag.conjugate();
      break;
    case Kind::dense:
      node->matrix = nd.matrix.adjoint();
      break;
    case Kind::coefficient:
      node->doubled_values = nd.doubled_values.conjugate();
      break;
    case Kind::sum:
      for (std::size_t i = 0; i < nd.children.size(); ++i) {
        node->children[i] = nd.children[i].adjoint();
        node->weights[i] = std::conj(nd.weights[i]);
      }
      break;
    case Kind::product:
      node->children.clear();
      for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) node->children.push_back(it->adjoint());
      break;
  }
  return GridOperator(node);
}

GridOperator GridOperator::scaled(cplx w) const {
  if (kind() == Kind::multiplier) {
    GridOperator m = multiplier(grid(), w * diagonal());
    return w.imag() == 0.0 ? m.with_flags(self_adjoint(), positive_semidefinite() && w.real() >= 0.0) : m;
  }
  auto node = std::make_shared<Node>(Kind::sum, grid());
  node->children = {*this};
  node->weights = {w};
  node->self_adjoint = self_adjoint() && w.imag() == 0.0;
  node->psd = node->self_adjoint && positive_semidefinite() && w.real() >= 0.0;
  return GridOperator(node);
}

GridOperator GridOperator::operator+(const GridOperator& o) const {
  if (!(grid() == o.grid())) throw DimensionError("operators live on different grids");
  if (kind() == Kind::multiplier && o.kind() == Kind::multiplier) {
    return multiplier(grid(), diagonal() + o.diagonal())
        .with_flags(self_adjoint() && o.self_adjoint(), positive_semidefinite() && o.positive_semidefinite());
  }
  auto node = std::make_shared<Node>(Kind::sum, grid());
  auto append = [&](const GridOperator& op, cplx w) {
    if (op.kind() == Kind::sum) {
      for (std::size_t i = 0; i < op.node_->children.size(); ++i) {
        node->children.push_back(op.node_->children[i]);
        node->weights.push_back(w * op.node_->weights[i]);
      }
    } else {
      node->children.push_back(op);
      node->weights.push_back(w);
    }
  };
  append(*this, 1.0);
  append(o, 1.0);
  node->self_adjoint = self_adjoint() && o.self_adjoint();
  node->psd = positive_semidefinite() && o.positive_semidefinite();
  return GridOperator(node);
}

GridOperator GridOperator::operator-(const GridOperator& o) const {
  GridOperator r = *this + o.scaled(-1.0);
  return r.with_flags(self_adjoint() && o.self_adjoint(), false);
}

GridOperator GridOperator::operator*(const GridOperator& o) const {
  if (!(grid() == o.grid())) throw DimensionError("operators live on different grids");
  if (kind() == Kind::multiplier && o.kind() == Kind::multiplier) {
    return multiplier(grid(), diagonal().cwiseProduct(o.diagonal()));
  }
  auto node = std::make_shared<Node>(Kind::product, grid());
  for (const GridOperator* op : {this, &o}) {
    if (op->kind() == Kind::product) {
      for (const auto& c : op->node_->children) node->children.push_back(c);
    } else {
      node->children.push_back(*op);
    }
  }
  return GridOperator(node);
}

Eigen::MatrixXcd GridOperator::densify(int jobs, std::size_t cap) const {
  if (grid().size() > cap) {
    throw CapError("densify: " + std::to_string(grid().size()) + " unknowns exceed cap " + std::to_string(cap));
  }
  if (kind() == Kind::dense) return node_->matrix;
  if (kind() == Kind::multiplier) return diagonal().asDiagonal();
  return apply(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(size(), size())), jobs);
}

void GridOperator::verify_flags(int jobs) const {
  if (!self_adjoint() && !positive_semidefinite()) return;
  const Eigen::MatrixXcd a = densify(jobs);
  const double norm = a.cwiseAbs().maxCoeff() * static_cast<double>(a.rows());
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff() * static_cast<double>(a.rows());
  if (asym > 1e-10 * std::max(norm, 1e-300)) throw NumericalError("operator flagged self-adjoint is not");
  if (positive_semidefinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(a.rows() - 1);
    if (lo < -1e-8 * std::max(hi, 0.0) - 1e-14) throw NumericalError("operator flagged PSD has a negative eigenvalue");
  }
}

Eigen::MatrixXcd galerkin_matrix(const TorusGrid& grid, const symexpr::Expr& a) {
  const TorusGrid big = grid.doubled();
  const Eigen::VectorXcd spec = coefficient_spectrum(big, big.sample(symexpr::simplify(a)).cast<cplx>());
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd m(n, n);
  const int d = grid.dimension();
  std::vector<int> diff(static_cast<std::size_t>(d));
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      for (int k = 0; k < d; ++k) {
        diff[static_cast<std::size_t>(k)] = grid.frequency(static_cast<std::size_t>(p), k) - grid.frequency(static_cast<std::size_t>(q), k);
      }
      m(p, q) = spec(static_cast<Eigen::Index>(big.index_of(diff)));
    }
  }
  return m;
}

}  // namespace sublab::spectral
