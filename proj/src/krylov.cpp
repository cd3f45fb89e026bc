#include "sublab/krylov.hpp"

#include "sublab/error.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace sublab::krylov {

Eigen::VectorXcd random_unit_vector(Eigen::Index size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::VectorXcd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = n01(rng);
    const double im = n01(rng);
    v(i) = {re, im};
  }
  return v / v.norm();
}

ExtremeEigenvalues lanczos_extremes(const LinearMap& op, Eigen::Index size, const LanczosOptions& opt) {
  ExtremeEigenvalues out;
  if (size == 0) return out;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.max_iter, size));
  std::vector<Eigen::VectorXcd> q;
  q.reserve(static_cast<std::size_t>(m_max) + 1);
  q.push_back(random_unit_vector(size, opt.seed));
  std::vector<double> alpha, beta;
  double prev_min = 0.0, prev_max = 0.0;
  for (int j = 0; j < m_max; ++j) {
    Eigen::VectorXcd w = op(q.back());
    const double a = q.back().dot(w).real();
    alpha.push_back(a);
    w -= a * q.back();
    if (j > 0) w -= beta.back() * q[static_cast<std::size_t>(j - 1)];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : q) w -= v.dot(w) * v;
    }
    const double b = w.norm();
    const int m = j + 1;
    const bool exhausted = b <= 1e-14 * std::max(1.0, std::abs(a)) || m == size;
    if (m % 4 == 0 || exhausted || m == m_max) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      const double lo = es.eigenvalues()(0);
      const double hi = es.eigenvalues()(m - 1);
      const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
      const double res_lo = b * std::abs(es.eigenvectors()(m - 1, 0));
      const double res_hi = b * std::abs(es.eigenvectors()(m - 1, m - 1));
      out.min = lo;
      out.max = hi;
      out.iterations = m;
      const bool hi_done = std::abs(hi - prev_max) <= opt.tol * scale && res_hi <= opt.tol * scale * 10;
      const bool lo_done = std::abs(lo - prev_min) <= opt.tol * scale && res_lo <= opt.tol * scale * 10;
      if (exhausted || (m > 4 && hi_done && (lo_done || opt.largest_only))) {
        out.converged = true;
        return out;
      }
      prev_min = lo;
      prev_max = hi;
    }
    beta.push_back(b);
    q.push_back(w / b);
  }
  return out;
}

double hermitian_norm(const LinearMap& op, Eigen::Index size, const LanczosOptions& opt) {
  const auto ev = lanczos_extremes(op, size, opt);
  if (!ev.converged) throw NumericalError("Lanczos iteration did not converge");
  return std::max(std::abs(ev.min), std::abs(ev.max));
}

CgResult conjugate_gradient(const LinearMap& op, const Eigen::VectorXcd& b, double tol, int max_iter) {
  CgResult res;
  res.x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return res;
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXcd ap = op(p);
    const double pap = p.dot(ap).real();
    if (!(pap > 0.0)) throw NumericalError("conjugate gradient: operator is not positive definite");
    const double a = rr / pap;
    res.x += a * p;
    r -= a * ap;
    const double rr_new = r.squaredNorm();
    res.iterations = it + 1;
    res.relative_residual = std::sqrt(rr_new) / bnorm;
    if (res.relative_residual <= tol) return res;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  throw NumericalError("conjugate gradient did not converge");
}

}  // namespace sublab::krylov
