#include "sublab/flows.hpp"

#include "sublab/bch.hpp"
#include "sublab/error.hpp"
#include "sublab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sublab::flows {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

constexpr int kMaxSteps = 1000000;

}  // namespace

FlowResult integrate_flow(const CompiledField& x, std::span<const double> start, double t, double tol) {
  if (!(tol > 0.0)) throw RangeError("flow tolerance must be positive");
  const int d = x.dimension();
  if (static_cast<int>(start.size()) != d) throw DimensionError("start point dimension mismatch");
  FlowResult res;
  res.endpoint.assign(start.begin(), start.end());
  if (t == 0.0) return res;

  const auto n = static_cast<std::size_t>(d);
  std::vector<double> y = res.endpoint, tmp(n), ynew(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  x(y, k1);

  const double dir = t > 0 ? 1.0 : -1.0;
  double done = 0.0;
  double h = std::min(std::abs(t), 0.1);
  double err_prev = 1e-4;
  bool last_rejected = false;

  for (int iter = 0; iter < kMaxSteps; ++iter) {
    const double remaining = std::abs(t) - done;
    if (remaining <= 0.0) return res;
    const bool final_step = h >= remaining;
    if (final_step) h = remaining;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw NumericalError("flow step size underflow at time " + std::to_string(dir * done));
    }
    const double s = dir * h;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * a21 * k1[i];
    x(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * (a31 * k1[i] + a32 * k2[i]);
    x(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    x(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    x(tmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + s * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    x(tmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + s * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    x(ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e));
    }
    const double ratio = err / tol;
    if (ratio <= 1.0) {
      y.swap(ynew);
      k1.swap(k7);
      done = final_step ? std::abs(t) : done + h;
      ++res.steps;
      res.error_estimate = std::max(res.error_estimate, err);
      double fac = ratio == 0.0 ? 5.0 : 0.9 * std::pow(ratio, -0.14) * std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      err_prev = std::max(ratio, 1e-4);
      last_rejected = false;
      if (final_step) {
        res.endpoint = y;
        return res;
      }
      h *= fac;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
      last_rejected = true;
    }
  }
  throw NumericalError("flow integration exceeded the step limit");
}

FlowResult integrate_flow(const VectorField& x, std::span<const double> start, double t, double tol) {
  return integrate_flow(CompiledField(x), start, t, tol);
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

double check_group_law(const VectorField& x, std::span<const double> start, double s, double t, double tol) {
  const CompiledField f(x);
  const Point mid = integrate_flow(f, start, s, tol).endpoint;
  const Point a = integrate_flow(f, mid, t, tol).endpoint;
  const Point b = integrate_flow(f, start, s + t, tol).endpoint;
  return distance(a, b);
}

double taylor_remainder(const VectorField& x, const symexpr::Expr& phi, std::span<const double> start, int n,
                        double t) {
  if (n < 0 || n > 8) throw RangeError("Taylor order must lie in [0,8]");
  const Point end = integrate_flow(x, start, t, 1e-14).endpoint;
  double sum = 0.0;
  double coef = 1.0;
  symexpr::Expr term = phi;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      coef *= t / j;
      term = vecfield::apply_field(x, term);
    }
    sum += coef * term.eval(start);
  }
  return std::abs(phi.eval(end) - sum);
}

CbhProduct::CbhProduct(const VectorField& y1, const VectorField& y2, int order)
    : order_(order), z_(bch::bch_correction_fields(y1, y2, order)), sum_(y1 + y2), y1_(y1), y2_(y2) {
  for (const auto& z : z_) zc_.emplace_back(z);
}

Point CbhProduct::apply(std::span<const double> x, double t, double tol) const {
  Point p = integrate_flow(sum_, x, t, tol).endpoint;
  p = integrate_flow(y1_, p, -t, tol).endpoint;
  p = integrate_flow(y2_, p, -t, tol).endpoint;
  double tj = t;
  for (std::size_t j = 0; j < zc_.size(); ++j) {
    tj *= t;
    if (z_[j].is_zero()) continue;
    p = integrate_flow(zc_[j], p, -tj, tol).endpoint;
  }
  return p;
}

double CbhProduct::defect(std::span<const double> x, double t, double tol) const {
  return distance(apply(x, t, tol), x);
}

double cbh_product_defect(const VectorField& y1, const VectorField& y2, int order, std::span<const double> x, double t,
                          double tol) {
  return CbhProduct(y1, y2, order).defect(x, t, tol);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw RangeError("log_spaced needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.back() = hi;
  return out;
}

OrderFit fit_order(std::vector<double> t, std::vector<double> defect, double floor) {
  if (t.size() != defect.size()) throw DimensionError("fit_order: sample counts differ");
  OrderFit fit;
  fit.t = std::move(t);
  fit.defect = std::move(defect);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.t.size(); ++i) {
    if (fit.defect[i] > floor && fit.t[i] > 0.0) {
      lx.push_back(std::log(fit.t[i]));
      ly.push_back(std::log(fit.defect[i]));
    }
  }
  fit.used = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    fit.exact = true;
    fit.slope = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + fit.slope * (lx[i] - mx));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

OrderFit cbh_order_fit(const CbhProduct& product, std::span<const double> x, const std::vector<double>& t_samples,
                       double tol, int jobs) {
  std::vector<double> defects(t_samples.size());
  parallel_for(t_samples.size(), jobs, [&](std::size_t i) { defects[i] = product.defect(x, t_samples[i], tol); });
  // integration error stays well below tol; anything under it is noise
  return fit_order(t_samples, std::move(defects), std::max(kNoiseFloor, tol));
}

OrderFit taylor_order_fit(const VectorField& x, const symexpr::Expr& phi, std::span<const double> start, int n,
                          const std::vector<double>& t_samples) {
  std::vector<double> rem;
  for (double t : t_samples) rem.push_back(taylor_remainder(x, phi, start, n, t));
  return fit_order(t_samples, std::move(rem));
}

const char* to_string(Interpolation i) noexcept {
  return i == Interpolation::cubic ? "cubic" : "trigonometric";
}

TransportPlan::TransportPlan(const TorusGrid& grid, const VectorField& x, double t, double tol, int jobs)
    : grid_(grid), t_(t) {
  if (x.dimension() != grid.dimension()) throw DimensionError("field and grid dimensions differ");
  for (const auto& c : x.coefficients()) spectral::require_periodic(c, grid.dimension(), "field coefficient");
  const CompiledField f(x);
  const int d = grid.dimension();
  ends_.resize(static_cast<Eigen::Index>(grid.size()), d);
  parallel_for(grid.size(), jobs, [&](std::size_t j) {
    const auto p = grid.point(j);
    const auto r = integrate_flow(f, p, t, tol);
    for (int a = 0; a < d; ++a) ends_(static_cast<Eigen::Index>(j), a) = r.endpoint[static_cast<std::size_t>(a)];
  });
}

Eigen::VectorXd TransportPlan::apply(const Eigen::VectorXd& phi, Interpolation how, int jobs) const {
  if (t_ == 0.0) return phi;
  return how == Interpolation::cubic ? cubic_interpolate(grid_, phi, ends_, jobs)
                                     : trig_interpolate(grid_, phi, ends_, jobs);
}

Eigen::VectorXd pullback_transport(const VectorField& x, const Eigen::VectorXd& phi, double t, const TorusGrid& grid,
                                   Interpolation how, double tol, int jobs) {
  return TransportPlan(grid, x, t, tol, jobs).apply(phi, how, jobs);
}

Eigen::VectorXd trig_interpolate(const TorusGrid& grid, const Eigen::VectorXd& phi, const Eigen::MatrixXd& points,
                                 int jobs) {
  if (static_cast<std::size_t>(phi.size()) != grid.size()) throw DimensionError("grid function size mismatch");
  const int d = grid.dimension();
  const Eigen::VectorXcd c = grid.to_fourier(phi.cast<spectral::cplx>());
  const double cmax = c.cwiseAbs().maxCoeff();
  // only modes above the snapping threshold contribute
  std::vector<spectral::cplx> coef;
  std::vector<int> freq;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ci = c(static_cast<Eigen::Index>(i));
    if (std::abs(ci) <= 1e-14 * cmax) continue;
    coef.push_back(ci / std::sqrt(static_cast<double>(grid.size())));
    for (int a = 0; a < d; ++a) freq.push_back(grid.frequency(i, a));
  }
  const int half = grid.n() / 2;
  Eigen::VectorXd out(points.rows());
  parallel_for(static_cast<std::size_t>(points.rows()), jobs, [&](std::size_t j) {
    // per-axis tables e^{i k y_a}, k in [-n/2, n/2)
    std::vector<spectral::cplx> table(static_cast<std::size_t>(d * grid.n()));
    for (int a = 0; a < d; ++a) {
      const double y = points(static_cast<Eigen::Index>(j), a);
      for (int k = -half; k < half; ++k) table[static_cast<std::size_t>(a * grid.n() + k + half)] = std::polar(1.0, k * y);
    }
    spectral::cplx s = 0.0;
    for (std::size_t m = 0; m < coef.size(); ++m) {
      spectral::cplx e = coef[m];
      for (int a = 0; a < d; ++a) e *= table[static_cast<std::size_t>(a * grid.n() + freq[m * d + a] + half)];
      s += e;
    }
    out(static_cast<Eigen::Index>(j)) = s.real();
  });
  return out;
}

Eigen::VectorXd cubic_interpolate(const TorusGrid& grid, const Eigen::VectorXd& phi, const Eigen::MatrixXd& points,
                                  int jobs) {
  if (static_cast<std::size_t>(phi.size()) != grid.size()) throw DimensionError("grid function size mismatch");
  const int d = grid.dimension();
  const int n = grid.n();
  const double hs = grid.spacing();
  Eigen::VectorXd out(points.rows());
  parallel_for(static_cast<std::size_t>(points.rows()), jobs, [&](std::size_t j) {
    int base[3] = {0, 0, 0};
    double w[3][4];
    for (int a = 0; a < d; ++a) {
      const double u = points(static_cast<Eigen::Index>(j), a) / hs;
      const double fl = std::floor(u);
      const double f = u - fl;
      base[a] = static_cast<int>(fl) - 1;
      // Lagrange weights on nodes -1, 0, 1, 2
      w[a][0] = -f * (f - 1) * (f - 2) / 6;
      w[a][1] = (f + 1) * (f - 1) * (f - 2) / 2;
      w[a][2] = -(f + 1) * f * (f - 2) / 2;
      w[a][3] = (f + 1) * f * (f - 1) / 6;
    }
    double s = 0.0;
    const int total = 1 << (2 * d);
    for (int combo = 0; combo < total; ++combo) {
      std::size_t flat = 0;
      double weight = 1.0;
      for (int a = 0; a < d; ++a) {
        const int off = (combo >> (2 * a)) & 3;
        int idx = (base[a] + off) % n;
        if (idx < 0) idx += n;
        flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx);
        weight *= w[a][off];
      }
      s += weight * phi(static_cast<Eigen::Index>(flat));
    }
    out(static_cast<Eigen::Index>(j)) = s;
  });
  return out;
}

}  // namespace sublab::flows
