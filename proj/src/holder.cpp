#include "sublab/holder.hpp"

#include "sublab/error.hpp"
#include "sublab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sublab::flows {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw RangeError("gamma must lie in (0,1]");
}

double l2(const TorusGrid& grid, const Eigen::VectorXd& v) { return grid.l2_norm(v); }

}  // namespace

std::vector<double> default_t_samples(const HolderOptions& opt) { return log_spaced(opt.t_min, 1.0, opt.t_per_sign); }

FieldTransport::FieldTransport(const TorusGrid& grid, const VectorField& x, std::vector<double> t_samples,
                               const HolderOptions& opt)
    : grid_(grid), t_(std::move(t_samples)), how_(opt.interpolation), jobs_(opt.jobs) {
  for (double t : t_) {
    if (!(t > 0.0) || t > 1.0) throw RangeError("Hoelder t samples must lie in (0,1]");
  }
  plans_.resize(2 * t_.size());
  if (x.is_zero()) return;
  parallel_for(plans_.size(), opt.jobs, [&](std::size_t i) {
    const double t = (i % 2 == 0 ? 1.0 : -1.0) * t_[i / 2];
    plans_[i] = std::make_unique<TransportPlan>(grid, x, t, opt.tol, 1);
  });
}

double FieldTransport::seminorm(const Eigen::VectorXd& phi, double gamma) const {
  check_gamma(gamma);
  double sup = 0.0;
  for (std::size_t i = 0; i < plans_.size(); ++i) {
    if (!plans_[i]) continue;
    const double t = t_[i / 2];
    sup = std::max(sup, std::pow(t, -gamma) * l2(grid_, plans_[i]->apply(phi, how_, jobs_) - phi));
  }
  return sup;
}

double holder_norm_field(const TorusGrid& grid, const Eigen::VectorXd& phi, const VectorField& x, double gamma,
                         const std::vector<double>& t_samples, const HolderOptions& opt) {
  return holder_norm_field(grid, phi, FieldTransport(grid, x, t_samples, opt), gamma);
}

double holder_norm_field(const TorusGrid& grid, const Eigen::VectorXd& phi, const FieldTransport& transport,
                         double gamma) {
  return l2(grid, phi) + transport.seminorm(phi, gamma);
}

std::vector<std::vector<double>> sphere_shifts(int dimension, const std::vector<double>& radii) {
  std::vector<std::vector<double>> dirs;
  if (dimension == 1) {
    dirs = {{1.0}, {-1.0}};
  } else if (dimension == 2) {
    for (int m = 0; m < 16; ++m) {
      const double a = 2.0 * std::numbers::pi * m / 16;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  } else if (dimension == 3) {
    // Fibonacci sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int m = 0; m < 32; ++m) {
      const double z = 1.0 - (m + 0.5) * 2.0 / 32;
      const double rho = std::sqrt(1.0 - z * z);
      dirs.push_back({rho * std::cos(golden * m), rho * std::sin(golden * m), z});
    }
  } else {
    throw DimensionError("sphere_shifts supports d in 1..3");
  }
  std::vector<std::vector<double>> out;
  for (double r : radii) {
    if (!(r > 0.0) || r > 1.0) throw RangeError("shift radii must lie in (0,1]");
    for (const auto& u : dirs) {
      std::vector<double> s(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) s[i] = r * u[i];
      out.push_back(std::move(s));
    }
  }
  return out;
}

double holder_norm_universal(const TorusGrid& grid, const Eigen::VectorXd& phi, double gamma,
                             const std::vector<std::vector<double>>& shifts) {
  check_gamma(gamma);
  const Eigen::VectorXcd c = grid.to_fourier(phi.cast<spectral::cplx>());
  const double w = grid.weight();
  double sup = 0.0;
  for (const auto& x : shifts) {
    if (static_cast<int>(x.size()) != grid.dimension()) throw DimensionError("shift dimension mismatch");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    // ||L(x)phi - phi||^2 = w sum |c_k|^2 |e^{-ik.x} - 1|^2 = w sum |c_k|^2 4 sin^2(k.x/2)
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double phase = 0.0;
      for (int a = 0; a < grid.dimension(); ++a) phase += grid.frequency(i, a) * x[static_cast<std::size_t>(a)];
      const double f = 2.0 * std::sin(0.5 * phase);
      s += std::norm(c(static_cast<Eigen::Index>(i))) * f * f;
    }
    sup = std::max(sup, std::pow(r, -gamma) * std::sqrt(w * s));
  }
  return l2(grid, phi) + sup;
}

std::vector<Eigen::VectorXd> band_limited_functions(const TorusGrid& grid, int count, int max_freq,
                                                    std::uint64_t seed) {
  if (max_freq < 0 || max_freq >= grid.n() / 2) throw RangeError("max_freq must be below n/2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const int d = grid.dimension();
  std::vector<std::vector<int>> modes;
  std::vector<int> k(static_cast<std::size_t>(d), -max_freq);
  for (;;) {
    modes.push_back(k);
    int a = d - 1;
    while (a >= 0 && k[static_cast<std::size_t>(a)] == max_freq) k[static_cast<std::size_t>(a--)] = -max_freq;
    if (a < 0) break;
    ++k[static_cast<std::size_t>(a)];
  }
  std::vector<Eigen::VectorXd> out;
  std::vector<double> p(static_cast<std::size_t>(d));
  for (int f = 0; f < count; ++f) {
    std::vector<double> ca, cb;
    for (const auto& m : modes) {
      double k2 = 0.0;
      for (int v : m) k2 += v * v;
      ca.push_back(n01(rng) / (1.0 + k2));
      cb.push_back(n01(rng) / (1.0 + k2));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      grid.point_into(j, p);
      double s = 0.0;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        double ph = 0.0;
        for (int a = 0; a < d; ++a) ph += modes[m][static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a)];
        s += ca[m] * std::cos(ph) + cb[m] * std::sin(ph);
      }
      v(static_cast<Eigen::Index>(j)) = s;
    }
    out.push_back(std::move(v));
  }
  return out;
}

ComparisonResult holder_comparison_ratio(const vecfield::FieldSystem& sys, int r, double gamma, const TorusGrid& grid,
                                         const std::vector<Eigen::VectorXd>& test_functions, const HolderOptions& opt) {
  check_gamma(gamma);
  if (sys.dimension() != grid.dimension()) throw DimensionError("system and grid dimensions differ");
  const auto samples = hormander::torus_grid_samples(sys.dimension(), 8);
  if (!hormander::check_hormander(sys, r, samples).all_pass()) {
    throw Error(ErrorKind::invalid_argument,
                "system does not satisfy the Hoermander condition at order " + std::to_string(r));
  }
  const auto t = default_t_samples(opt);
  std::vector<FieldTransport> transports;
  for (const auto& x : sys.fields()) transports.emplace_back(grid, x, t, opt);
  return comparison_from_transports(grid, transports, r, gamma, test_functions, t, opt.jobs);
}

ComparisonResult comparison_from_transports(const TorusGrid& grid, const std::vector<FieldTransport>& transports, int r,
                                            double gamma, const std::vector<Eigen::VectorXd>& test_functions,
                                            const std::vector<double>& radii, int jobs) {
  check_gamma(gamma);
  if (r < 1) throw RangeError("comparison order r must be >= 1");
  const auto shifts = sphere_shifts(grid.dimension(), radii);
  ComparisonResult res;
  res.ratios.resize(test_functions.size());
  parallel_for(test_functions.size(), jobs, [&](std::size_t i) {
    const auto& phi = test_functions[i];
    double denom = l2(grid, phi);
    for (const auto& tr : transports) denom += holder_norm_field(grid, phi, tr, gamma);
    res.ratios[i] = holder_norm_universal(grid, phi, gamma / r, shifts) / denom;
  });
  for (double v : res.ratios) res.c_emp = std::max(res.c_emp, v);
  return res;
}

}  // namespace sublab::flows
