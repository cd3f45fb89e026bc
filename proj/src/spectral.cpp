#include "sublab/spectral.hpp"

#include "sublab/error.hpp"
#include "sublab/krylov.hpp"
#include "sublab/parallel.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace sublab::spectral {

namespace {

Eigen::VectorXcd symbol_table(const TorusGrid& grid, const Symbol& symbol) {
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(grid.size()));
  std::vector<int> k(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dimension(); ++a) k[static_cast<std::size_t>(a)] = grid.frequency(i, a);
    diag(static_cast<Eigen::Index>(i)) = symbol(k);
  }
  return diag;
}

double norm2(std::span<const int> k) {
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  return s;
}

// B^{e} as a real diagonal, with 0^0 = 1.
Eigen::VectorXd base_power(const TorusGrid& grid, Base base, double e) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k2 = grid.frequency_norm2(i);
    const double b = base == Base::laplacian ? k2 : 1.0 + k2;
    out(static_cast<Eigen::Index>(i)) = e == 0.0 ? 1.0 : (b == 0.0 ? 0.0 : std::pow(b, e));
  }
  return out;
}

// max singular value of a dense matrix via Lanczos on W^* W.
double dense_norm(const Eigen::MatrixXcd& w, std::uint64_t seed) {
  krylov::LanczosOptions opt;
  opt.tol = 1e-12;
  opt.seed = seed;
  opt.max_iter = 600;
  opt.largest_only = true;
  const auto ev = krylov::lanczos_extremes([&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return w.adjoint() * (w * x); },
                                           w.cols(), opt);
  if (!ev.converged) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(w);
    return svd.singularValues()(0);
  }
  return std::sqrt(std::max(ev.max, 0.0));
}

Eigen::VectorXcd diag_double_commutator(const GridOperator& h, const Eigen::VectorXcd& delta,
                                        const Eigen::VectorXcd& u) {
  const Eigen::VectorXcd d2 = delta.cwiseProduct(delta);
  const Eigen::VectorXcd du = delta.cwiseProduct(u);
  const Eigen::VectorXcd d2u = d2.cwiseProduct(u);
  return d2.cwiseProduct(h.apply(u)) - 2.0 * delta.cwiseProduct(h.apply(du)) + h.apply(d2u);
}

double sandwich_norm(const GridOperator& h, const Eigen::VectorXcd& delta, const Eigen::VectorXcd& outer,
                     std::uint64_t seed) {
  krylov::LanczosOptions opt;
  opt.seed = seed;
  opt.tol = 1e-8;
  return krylov::hermitian_norm(
      [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
        const Eigen::VectorXcd v = outer.cwiseProduct(u);
        return outer.cwiseProduct(diag_double_commutator(h, delta, v));
      },
      h.size(), opt);
}

template <class F>
GridSeries per_grid(int dimension, const std::vector<int>& grids, int jobs, F&& f) {
  std::vector<double> values(grids.size());
  parallel_for(grids.size(), jobs, [&](std::size_t i) { values[i] = f(TorusGrid(dimension, grids[i])); });
  return make_series(grids, std::move(values));
}

}  // namespace

GridOperator fourier_multiplier_op(const TorusGrid& grid, const Symbol& symbol) {
  return GridOperator::multiplier(grid, symbol_table(grid, symbol));
}

GridOperator laplacian(const TorusGrid& grid) {
  return fourier_multiplier_op(grid, [](std::span<const int> k) { return cplx(norm2(k)); });
}

GridOperator laplacian_power(const TorusGrid& grid, double gamma) {
  return GridOperator::multiplier(grid, base_power(grid, Base::laplacian, gamma).cast<cplx>());
}

GridOperator shifted_power(const TorusGrid& grid, double s) {
  return GridOperator::multiplier(grid, base_power(grid, Base::shifted, s).cast<cplx>());
}

GridOperator semigroup(const TorusGrid& grid, double t) {
  return fourier_multiplier_op(grid, [t](std::span<const int> k) { return cplx(std::exp(-t * (1.0 + norm2(k)))); });
}

GridOperator translation(const TorusGrid& grid, std::span<const double> a) {
  if (static_cast<int>(a.size()) != grid.dimension()) throw DimensionError("shift dimension mismatch");
  return fourier_multiplier_op(grid, [&](std::span<const int> k) {
    double phase = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) phase += k[j] * a[j];
    return std::polar(1.0, phase);
  });
}

GridOperator derivative(const TorusGrid& grid, int axis) {
  if (axis < 0 || axis > grid.dimension()) throw RangeError("derivative axis out of range");
  if (axis == 0) {
    return GridOperator::multiplier(grid, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(grid.size()), cplx(0, 1)));
  }
  return fourier_multiplier_op(grid, [axis](std::span<const int> k) {
    return cplx(0.0, static_cast<double>(k[static_cast<std::size_t>(axis - 1)]));
  });
}

GridOperator assemble_field_matrix(const TorusGrid& grid, const vecfield::VectorField& x) {
  if (x.dimension() != grid.dimension()) throw DimensionError("field and grid dimensions differ");
  GridOperator out = GridOperator::zero(grid);
  bool first = true;
  for (int k = 1; k <= x.dimension(); ++k) {
    const auto& a = x.coefficient(k);
    if (a.is_zero()) continue;
    GridOperator term = GridOperator::coefficient(grid, a) * derivative(grid, k);
    out = first ? term : out + term;
    first = false;
  }
  return out.with_flags(false, false);
}

GridOperator assemble_hormander_operator(const TorusGrid& grid, const vecfield::FieldSystem& sys) {
  if (sys.dimension() != grid.dimension()) throw DimensionError("system and grid dimensions differ");
  GridOperator h = GridOperator::zero(grid);
  bool first = true;
  for (const auto& f : sys.fields()) {
    const GridOperator m = assemble_field_matrix(grid, f);
    const GridOperator term = m.adjoint() * m;
    h = first ? term : h + term;
    first = false;
  }
  return h.with_flags(true, true);
}

GridOperator assemble_divergence_form(const TorusGrid& grid, const std::vector<std::vector<symexpr::Expr>>& c) {
  const int d = grid.dimension();
  if (static_cast<int>(c.size()) != d + 1) throw DimensionError("divergence form needs a (d+1)x(d+1) matrix");
  for (const auto& row : c) {
    if (static_cast<int>(row.size()) != d + 1) throw DimensionError("divergence form needs a (d+1)x(d+1) matrix");
  }
  // symmetry checked on samples
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  for (int s = 0; s < 16; ++s) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (auto& v : x) v = u(rng);
    for (int i = 0; i <= d; ++i) {
      for (int j = i + 1; j <= d; ++j) {
        const double a = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x);
        const double b = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].eval(x);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
          throw Error(ErrorKind::invalid_argument, "divergence-form coefficient matrix is not symmetric");
        }
      }
    }
  }
  GridOperator h = GridOperator::zero(grid);
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d; ++j) {
      const auto& cij = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (symexpr::simplify(cij).is_zero()) continue;
      const GridOperator term = derivative(grid, i).adjoint() * GridOperator::coefficient(grid, cij) * derivative(grid, j);
      h = h + term;
    }
  }
  return h.with_flags(true, false);
}

cplx double_commutator_form(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2,
                            const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd b1psi = b1 * psi;
  const Eigen::VectorXcd b2psi = b2 * psi;
  return (b2 * b1psi).dot(a * phi) - (a * b1psi).dot(b2 * phi) + (a * psi).dot(b2 * (b1 * phi)) -
         (a * b2psi).dot(b1 * phi);
}

cplx double_commutator_form(const GridOperator& a, const GridOperator& b1, const GridOperator& b2,
                            const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd b1psi = b1.apply(psi);
  const Eigen::VectorXcd b2psi = b2.apply(psi);
  return b2.apply(b1psi).dot(a.apply(phi)) - a.apply(b1psi).dot(b2.apply(phi)) +
         a.apply(psi).dot(b2.apply(b1.apply(phi))) - a.apply(b2psi).dot(b1.apply(phi));
}

cplx double_commutator_direct(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2,
                              const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  const Eigen::MatrixXcd inner = b2 * a - a * b2;
  const Eigen::MatrixXcd outer = b1 * inner - inner * b1;
  return psi.dot(outer * phi);
}

double identity_single_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2,
                             const Eigen::VectorXcd& phi) {
  // (psi, [B1,A] phi) = (B1 psi, A phi) - (A psi, B1 phi) with psi = B2 phi
  const Eigen::VectorXcd psi = b2 * phi;
  const double lhs = ((b1 * psi).dot(a * phi) - (a * psi).dot(b1 * phi)).real();
  const cplx rhs = 0.5 * double_commutator_form(a, b2, b1, phi, phi);
  const double scale = std::max({std::abs(lhs), std::abs(rhs), a.norm() * b1.norm() * b2.norm() * phi.squaredNorm() * 1e-3});
  return std::abs(lhs - rhs) / scale;
}

double identity_square_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd bphi = b * phi;
  const double lhs = (a * phi).dot(b * bphi).real();
  const cplx rhs = bphi.dot(a * bphi) + 0.5 * double_commutator_form(a, b, b, phi, phi);
  const double scale = std::max({std::abs(lhs), std::abs(rhs), a.norm() * b.squaredNorm() * phi.squaredNorm() * 1e-3});
  return std::abs(lhs - rhs) / scale;
}

Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = n01(rng);
      const double im = n01(rng);
      m(i, j) = {re, im};
    }
  }
  return 0.5 * (m + m.adjoint());
}

OperatorFactory hormander_factory(const vecfield::FieldSystem& sys) {
  return [sys](const TorusGrid& g) { return assemble_hormander_operator(g, sys); };
}

OperatorFactory laplacian_factory() {
  return [](const TorusGrid& g) { return laplacian(g).with_flags(true, true); };
}

double GridSeries::max_ratio() const {
  double m = 0.0;
  for (double r : ratios) m = std::max(m, r);
  return m;
}

double GridSeries::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

GridSeries make_series(std::vector<int> grids, std::vector<double> values) {
  GridSeries s;
  s.grids = std::move(grids);
  s.values = std::move(values);
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    const double prev = s.values[i - 1];
    s.ratios.push_back(prev == 0.0 ? (s.values[i] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                   : s.values[i] / prev);
  }
  return s;
}

double lemma_commutator_norm(const GridOperator& h, int m, std::uint64_t seed) {
  if (m < 1 || m > 3) throw RangeError("commutator order m must be in [1,3]");
  const TorusGrid& grid = h.grid();
  const Eigen::VectorXcd outer = base_power(grid, Base::shifted, -0.5 * m).cast<cplx>();
  double total = 0.0;
  for (int k = 1; k <= grid.dimension(); ++k) {
    const Eigen::VectorXcd dk = derivative(grid, k).diagonal();
    Eigen::VectorXcd delta(dk.size());
    for (Eigen::Index i = 0; i < dk.size(); ++i) delta(i) = std::pow(dk(i), m);
    total += sandwich_norm(h, delta, outer, seed + static_cast<std::uint64_t>(k));
  }
  return total;
}

double fractional_commutator_norm(const GridOperator& h, double rho, double delta, std::uint64_t seed) {
  const TorusGrid& grid = h.grid();
  const Eigen::VectorXcd lr = base_power(grid, Base::shifted, rho).cast<cplx>();
  const Eigen::VectorXcd outer = base_power(grid, Base::shifted, -(rho + delta)).cast<cplx>();
  return sandwich_norm(h, lr, outer, seed);
}

double semigroup_commutator_norm(const GridOperator& h, double t, std::uint64_t seed) {
  const Eigen::VectorXcd s = semigroup(h.grid(), t).diagonal();
  return sandwich_norm(h, s, Eigen::VectorXcd::Ones(s.size()), seed);
}

double semigroup_commutator_norm_refined(const GridOperator& h, double t, std::uint64_t seed) {
  const TorusGrid& grid = h.grid();
  const Eigen::VectorXcd s = semigroup(grid, t).diagonal();
  Eigen::VectorXcd outer(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    outer(i) = grid.frequency_norm2(static_cast<std::size_t>(i)) == 0.0 ? cplx(0.0) : 1.0 / (1.0 - s(i));
  }
  return sandwich_norm(h, s, outer, seed);
}

GridSeries commutator_bound_estimate(const OperatorFactory& h, int dimension, const std::vector<int>& grids, int m,
                                     std::uint64_t seed, int jobs) {
  return per_grid(dimension, grids, jobs, [&](const TorusGrid& g) { return lemma_commutator_norm(h(g), m, seed); });
}

GridSeries fractional_commutator_bound(const OperatorFactory& h, int dimension, const std::vector<int>& grids,
                                       double rho, double delta, std::uint64_t seed, int jobs) {
  return per_grid(dimension, grids, jobs,
                  [&](const TorusGrid& g) { return fractional_commutator_norm(h(g), rho, delta, seed); });
}

GridSeries semigroup_commutator_bound(const OperatorFactory& h, int dimension, const std::vector<double>& t_list,
                                      const std::vector<int>& grids, bool refined, std::uint64_t seed, int jobs) {
  for (double t : t_list) {
    if (!(t > 0.0)) throw RangeError("semigroup times must be positive");
  }
  return per_grid(dimension, grids, jobs, [&](const TorusGrid& g) {
    const GridOperator op = h(g);
    double sup = 0.0;
    for (double t : t_list) {
      sup = std::max(sup, refined ? semigroup_commutator_norm_refined(op, t, seed) : semigroup_commutator_norm(op, t, seed));
    }
    return sup;
  });
}

namespace {

Eigen::MatrixXcd double_commutator_matrix(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd b2 = b * b;
  return b2 * a - 2.0 * b * a * b + a * b2;
}

double lambda_max_herm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

}  // namespace

double minimal_commutator_constant(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double eps) {
  const Eigen::MatrixXcd g = double_commutator_matrix(a, b);
  const Eigen::MatrixXcd b2 = b * b;
  const Eigen::MatrixXcd b4 = b2.adjoint() * b2;
  return std::max({0.0, lambda_max_herm(g - eps * b4), lambda_max_herm(-g - eps * b4)});
}

ImprovementResult improvement_lemma_check(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double eps,
                                          double c, int probes, std::uint64_t seed) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("improvement lemma matrices must be square and of equal size");
  }
  ImprovementResult res;
  const Eigen::MatrixXcd b2 = b * b;
  const Eigen::MatrixXcd b4 = b2.adjoint() * b2;
  const Eigen::MatrixXcd g = double_commutator_matrix(a, b);
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b2.cwiseAbs().maxCoeff()}) * static_cast<double>(a.rows());
  res.form_margin = -lambda_max_herm(b.adjoint() * b - 0.5 * (a + a.adjoint()));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  res.commutator_margin = -std::max(lambda_max_herm(g - eps * b4 - c * id), lambda_max_herm(-g - eps * b4 - c * id));
  res.hypotheses_hold = res.form_margin >= -1e-9 * scale && res.commutator_margin >= -1e-9 * scale;

  res.worst_margin = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    const Eigen::VectorXcd phi = krylov::random_unit_vector(a.rows(), seed + static_cast<std::uint64_t>(p));
    const double margin = (a * phi).norm() - (1.0 - eps) * (b2 * phi).norm() + std::sqrt(c) * phi.norm();
    res.worst_margin = std::min(res.worst_margin, margin);
  }
  res.conclusion_holds = res.worst_margin >= -1e-9;
  return res;
}

std::shared_ptr<const Decomposition> decompose(const GridOperator& h, int jobs) {
  const Eigen::MatrixXcd m = h.densify(jobs, kEigenCap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  auto dec = std::make_shared<Decomposition>(Decomposition{h.grid(), es.eigenvectors(), es.eigenvalues()});
  return dec;
}

double power_constant(const Decomposition& dec, double gamma, double alpha, Base base) {
  if (alpha < 0.0) throw RangeError("alpha must be >= 0");
  const Eigen::VectorXd left = base_power(dec.grid, base, alpha * gamma);
  Eigen::VectorXd right(dec.values.size());
  for (Eigen::Index i = 0; i < right.size(); ++i) right(i) = std::pow(1.0 + std::max(dec.values(i), 0.0), -alpha);
  const Eigen::MatrixXcd w = left.asDiagonal() * dec.vectors * right.asDiagonal();
  return dense_norm(w, 0);
}

double best_subelliptic_constant(const Decomposition& dec, double gamma, Base base) {
  const double p = power_constant(dec, gamma, 0.5, base);
  return p * p;
}

double best_subelliptic_constant(const GridOperator& h, double gamma, const SubellipticOptions& opt, Base base) {
  if (!(gamma > 0.0) || gamma > 1.0) throw RangeError("gamma must lie in (0,1]");
  if (!opt.force_lanczos && h.grid().size() <= opt.dense_cap) {
    return best_subelliptic_constant(*decompose(h), gamma, base);
  }
  const Eigen::VectorXcd half = base_power(h.grid(), base, 0.5 * gamma).cast<cplx>();
  const GridOperator shifted = GridOperator::identity(h.grid()) + h;
  krylov::LanczosOptions lo;
  lo.tol = opt.lanczos_tol;
  lo.seed = opt.seed;
  lo.largest_only = true;
  const auto ev = krylov::lanczos_extremes(
      [&](const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
        const auto cg = krylov::conjugate_gradient([&](const Eigen::VectorXcd& v) { return shifted.apply(v); },
                                                   half.cwiseProduct(u), 1e-12);
        return half.cwiseProduct(cg.x);
      },
      h.size(), lo);
  if (!ev.converged) throw NumericalError("Lanczos iteration for the subelliptic constant did not converge");
  return ev.max;
}

double order_relation_margin(const Decomposition& dec, double gamma, double c) {
  const Eigen::VectorXd l2g = base_power(dec.grid, Base::shifted, 2.0 * gamma);
  Eigen::VectorXd sq(dec.values.size());
  for (Eigen::Index i = 0; i < sq.size(); ++i) sq(i) = c * c * std::pow(1.0 + std::max(dec.values(i), 0.0), 2.0);
  Eigen::MatrixXcd m = dec.vectors * sq.asDiagonal() * dec.vectors.adjoint();
  m.diagonal() -= l2g.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) / l2g.maxCoeff();
}

SpectralModel::SpectralModel(OperatorFactory factory, int dimension, int jobs)
    : factory_(std::move(factory)), dim_(dimension), jobs_(jobs) {}

std::shared_ptr<const Decomposition> SpectralModel::decomposition(int n) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  const TorusGrid grid(dim_, n);
  if (grid.size() > kEigenCap) {
    throw CapError("grid " + std::to_string(n) + "^" + std::to_string(dim_) + " exceeds the eigendecomposition cap");
  }
  auto dec = decompose(factory_(grid), jobs_);
  std::lock_guard lock(mutex_);
  return cache_.emplace(n, std::move(dec)).first->second;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::bounded:
      return "bounded";
    case Verdict::growing:
      return "growing";
    default:
      return "inconclusive";
  }
}

Verdict classify(const GridSeries& s, const Thresholds& th) {
  if (s.ratios.empty()) return Verdict::inconclusive;
  bool all_bounded = true;
  for (double r : s.ratios) {
    if (r >= th.growing) return Verdict::growing;
    if (r > th.bounded) all_bounded = false;
  }
  return all_bounded ? Verdict::bounded : Verdict::inconclusive;
}

SubellipticityReport refinement_sweep(const SpectralModel& model, const std::string& system_id, double gamma,
                                      double alpha, const std::vector<int>& grids, const Thresholds& th) {
  for (std::size_t i = 1; i < grids.size(); ++i) {
    if (grids[i] <= grids[i - 1]) throw RangeError("grids must be ascending");
  }
  std::vector<double> values;
  for (int n : grids) values.push_back(power_constant(*model.decomposition(n), gamma, alpha));
  SubellipticityReport r;
  r.system = system_id;
  r.gamma = gamma;
  r.alpha = alpha;
  r.series = make_series(grids, std::move(values));
  r.verdict = classify(r.series, th);
  return r;
}

OrderScan order_scan(const SpectralModel& model, const std::string& system_id, const std::vector<int>& grids,
                     const std::vector<double>& gammas, double alpha, const Thresholds& th, int jobs) {
  for (int n : grids) (void)model.decomposition(n);  // sequential warm-up keeps the cache deterministic
  OrderScan scan;
  scan.rows.resize(gammas.size());
  parallel_for(gammas.size(), jobs,
               [&](std::size_t i) { scan.rows[i] = refinement_sweep(model, system_id, gammas[i], alpha, grids, th); });
  for (const auto& row : scan.rows) {
    if (row.verdict == Verdict::bounded && (!scan.gamma_star || row.gamma > *scan.gamma_star)) {
      scan.gamma_star = row.gamma;
    }
  }
  return scan;
}

nlohmann::json to_json(const GridSeries& s) {
  nlohmann::json j;
  nlohmann::json grids = nlohmann::json::array();
  for (std::size_t i = 0; i < s.grids.size(); ++i) grids.push_back({{"n", s.grids[i]}, {"value", s.values[i]}});
  j["grids"] = grids;
  j["ratios"] = s.ratios;
  return j;
}

nlohmann::json to_json(const SubellipticityReport& r) {
  nlohmann::json j;
  j["system"] = r.system;
  j["gamma"] = r.gamma;
  j["alpha"] = r.alpha;
  nlohmann::json grids = nlohmann::json::array();
  for (std::size_t i = 0; i < r.series.grids.size(); ++i) {
    grids.push_back({{"n", r.series.grids[i]}, {"constant", r.series.values[i]}});
  }
  j["grids"] = grids;
  j["ratios"] = r.series.ratios;
  j["verdict"] = to_string(r.verdict);
  return j;
}

}  // namespace sublab::spectral
