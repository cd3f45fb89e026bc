#include "sublab/commands.hpp"

#include "sublab/bch.hpp"
#include "sublab/error.hpp"
#include "sublab/flows.hpp"
#include "sublab/holder.hpp"
#include "sublab/hormander.hpp"
#include "sublab/krylov.hpp"
#include "sublab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace sublab::commands {

using json = nlohmann::json;
using config::RunConfig;

namespace {

constexpr int kSchemaVersion = 1;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["schema"] = "sublab." + command + "/" + std::to_string(kSchemaVersion);
  j["seed"] = cfg.run.seed;
  if (!cfg.system.fields.empty()) j["system"] = cfg.system.id;
  return j;
}

std::vector<double> point_or_default(const std::vector<double>& p, int d) {
  if (!p.empty()) return p;
  static const double base[] = {0.7, 0.3, 0.1};
  return {base, base + d};
}

hormander::SampleSet samples_for(const RunConfig& cfg, int grid, std::size_t box_count) {
  const auto& dom = cfg.system.domain;
  if (dom.kind == vecfield::DomainKind::torus) return hormander::torus_grid_samples(cfg.system.dimension, grid);
  return hormander::box_samples(cfg.system.dimension, dom.bound, box_count, cfg.run.seed);
}

void require_torus(const RunConfig& cfg, const char* what) {
  if (cfg.system.domain.kind != vecfield::DomainKind::torus) {
    throw ConfigError(std::string(what) + " needs a torus domain");
  }
}

template <class T>
const T& section(const std::optional<T>& s, const char* name) {
  if (!s) throw ConfigError(std::string("config has no [") + name + "] section");
  return *s;
}

json series_json(const spectral::GridSeries& s) { return spectral::to_json(s); }

// ---- check-hormander ---------------------------------------------------------

CommandResult cmd_check_hormander(const RunConfig& cfg) {
  const auto& h = section(cfg.hormander, "hormander");
  const auto sys = cfg.field_system();
  const auto samples = samples_for(cfg, h.grid, h.box_samples);
  const int jobs = cfg.run.jobs;
  const auto rank = hormander::find_hormander_rank(sys, h.r_max, samples, h.sigma_tol, jobs);
  auto rep = hormander::check_hormander(sys, rank.value_or(h.r_max), samples, h.sigma_tol, jobs);
  rep.rank = rank;
  rep.rank_scan_max = h.r_max;

  CommandResult res;
  res.command = "check-hormander";
  res.report = header("check-hormander", cfg);
  res.report.update(hormander::to_json(rep));
  if (!rep.proof_chain.holds || !rep.criteria_agree()) {
    res.exit_code = kDisagree;
  } else {
    res.exit_code = rep.all_pass() ? kPass : kFail;
  }
  CsvTable t{"criteria", {"criterion", "value", "pass"}, {}};
  auto row = [&](const char* name, const hormander::CriterionResult& c) {
    t.rows.push_back({name, num(c.value), c.pass ? "1" : "0"});
  };
  row("sigma_eig", rep.sigma_eig);
  row("m_comb", rep.m_comb);
  row("volume", rep.volume);
  row("sigma_det", rep.sigma_det);
  res.tables.push_back(std::move(t));
  res.summary = "rank " + (rank ? std::to_string(*rank) : std::string("none")) + ", sigma_eig " +
                brief(rep.sigma_eig.value) + ", criteria " + (rep.criteria_agree() ? "agree" : "DISAGREE");
  return res;
}

// ---- bch ---------------------------------------------------------------------

CommandResult cmd_bch(const RunConfig& cfg) {
  const auto& b = section(cfg.bch, "bch");
  const auto sys = cfg.field_system();
  const flows::CbhProduct product(sys.field(b.y1), sys.field(b.y2), b.order);
  const auto x = point_or_default(b.point, sys.dimension());
  const auto t = flows::log_spaced(b.t_min, b.t_max, b.t_count);
  const auto fit = flows::cbh_order_fit(product, x, t, b.tol, cfg.run.jobs);
  const double threshold = b.order + 1 - 0.2;

  CommandResult res;
  res.command = "bch";
  json& j = res.report = header("bch", cfg);
  j["order"] = b.order;
  j["y1"] = b.y1;
  j["y2"] = b.y2;
  j["point"] = x;
  j["tol"] = b.tol;
  const auto series = bch::correction_series(b.order);
  json z = json::array();
  for (std::size_t i = 0; i < series.brackets.size(); ++i) {
    z.push_back({{"degree", i + 2},
                 {"brackets", bch::to_string(series.brackets[i])},
                 {"field", product.corrections()[i].to_string()}});
  }
  j["corrections"] = z;
  j["t"] = fit.t;
  j["defect"] = fit.defect;
  j["slope"] = finite(fit.slope);
  j["fit_residual"] = fit.residual;
  j["points_used"] = fit.used;
  j["exact"] = fit.exact;
  j["slope_threshold"] = threshold;
  const bool pass = fit.exact || fit.slope >= threshold;
  j["verdict"] = fit.exact ? "exact" : (pass ? "pass" : "fail");
  res.exit_code = pass ? kPass : kFail;
  CsvTable tab{"defects", {"t", "defect"}, {}};
  for (std::size_t i = 0; i < fit.t.size(); ++i) tab.rows.push_back({num(fit.t[i]), num(fit.defect[i])});
  res.tables.push_back(std::move(tab));
  res.summary = fit.exact ? "defects at noise floor (exact)" : "slope " + brief(fit.slope) + " vs " + brief(threshold);
  return res;
}

// ---- flow --------------------------------------------------------------------

CommandResult cmd_flow(const RunConfig& cfg) {
  const auto& f = section(cfg.flow, "flow");
  const auto sys = cfg.field_system();
  const auto& x = sys.field(f.field);
  const auto p = point_or_default(f.point, sys.dimension());
  const auto end = flows::integrate_flow(x, p, f.t, f.tol);
  const double group = flows::check_group_law(x, p, f.s, f.t, f.tol);
  const auto back = flows::integrate_flow(x, end.endpoint, -f.t, f.tol).endpoint;
  double inverse = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) inverse = std::max(inverse, std::abs(back[i] - p[i]));
  const auto phi = symexpr::parse(f.taylor_phi, sys.dimension());
  const auto t = flows::log_spaced(1e-3, 1e-1, 12);
  const auto fit = flows::taylor_order_fit(x, phi, p, f.taylor_order, t);
  const double threshold = f.taylor_order + 1 - 0.2;

  const bool group_ok = group <= f.group_factor * f.tol;
  const bool inverse_ok = inverse <= f.group_factor * f.tol;
  const bool taylor_ok = fit.exact || fit.slope >= threshold;

  CommandResult res;
  res.command = "flow";
  json& j = res.report = header("flow", cfg);
  j["field"] = f.field;
  j["point"] = p;
  j["t"] = f.t;
  j["endpoint"] = end.endpoint;
  j["steps"] = end.steps;
  j["error_estimate"] = end.error_estimate;
  j["group_law"] = {{"s", f.s}, {"t", f.t}, {"defect", group}, {"bound", f.group_factor * f.tol}, {"pass", group_ok}};
  j["inverse"] = {{"defect", inverse}, {"pass", inverse_ok}};
  j["taylor"] = {{"phi", phi.to_string()},     {"order", f.taylor_order}, {"t", fit.t},
                 {"remainder", fit.defect},    {"slope", finite(fit.slope)}, {"exact", fit.exact},
                 {"slope_threshold", threshold}, {"pass", taylor_ok}};
  const bool pass = group_ok && inverse_ok && taylor_ok;
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  CsvTable tab{"taylor", {"t", "remainder"}, {}};
  for (std::size_t i = 0; i < fit.t.size(); ++i) tab.rows.push_back({num(fit.t[i]), num(fit.defect[i])});
  res.tables.push_back(std::move(tab));
  res.summary = "group-law defect " + brief(group) + ", Taylor slope " + brief(fit.slope);
  return res;
}

// ---- holder ------------------------------------------------------------------

CommandResult cmd_holder(const RunConfig& cfg) {
  const auto& h = section(cfg.holder, "holder");
  require_torus(cfg, "holder");
  const auto sys = cfg.field_system();
  const int d = sys.dimension();
  int r = 0;
  if (h.order) {
    r = *h.order;
  } else {
    const auto rank = hormander::find_hormander_rank(sys, 6, hormander::torus_grid_samples(d, 16));
    if (!rank) throw ConfigError("[holder] system has no Hoermander rank up to 6; set order explicitly");
    r = *rank;
  }
  flows::HolderOptions opt;
  opt.t_per_sign = h.t_per_sign;
  opt.interpolation = h.interpolation == "cubic" ? flows::Interpolation::cubic : flows::Interpolation::trigonometric;
  opt.jobs = cfg.run.jobs;
  const auto t = flows::default_t_samples(opt);
  const auto& x = sys.field(h.field);
  const auto psi_x = x.multiplied(symexpr::parse(h.psi, d));

  std::vector<double> c_emp, lemma, corollary, trivial;
  for (int n : h.grids) {
    const spectral::TorusGrid grid(d, n);
    const auto fns = flows::band_limited_functions(grid, h.test_functions, h.max_freq, cfg.run.seed);
    std::vector<flows::FieldTransport> transports;
    for (const auto& f : sys.fields()) transports.emplace_back(grid, f, t, opt);
    c_emp.push_back(flows::comparison_from_transports(grid, transports, r, h.gamma, fns, t, opt.jobs).c_emp);

    const auto& tx = transports[static_cast<std::size_t>(h.field - 1)];
    const flows::FieldTransport tpsi(grid, psi_x, t, opt);
    const auto shifts = flows::sphere_shifts(d, t);
    double l = 0.0, c = 0.0;
    for (const auto& phi : fns) {
      const double nx = flows::holder_norm_field(grid, phi, tx, h.gamma);
      l = std::max(l, flows::holder_norm_field(grid, phi, tpsi, h.gamma) / nx);
      c = std::max(c, nx / flows::holder_norm_universal(grid, phi, h.gamma, shifts));
    }
    lemma.push_back(l);
    corollary.push_back(c);

    // trivial cases: zero field and constant function reduce to the L2 norm
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size()));
    const double base = grid.l2_norm(fns.front());
    double err = std::abs(flows::holder_norm_field(grid, fns.front(), vecfield::VectorField(d), h.gamma, t, opt) - base);
    err = std::max(err, std::abs(flows::holder_norm_field(grid, one, tx, h.gamma) - grid.l2_norm(one)));
    err = std::max(err, std::abs(flows::holder_norm_universal(grid, one, h.gamma, shifts) - grid.l2_norm(one)));
    trivial.push_back(err);
  }
  const auto s_c = spectral::make_series(h.grids, c_emp);
  const auto s_l = spectral::make_series(h.grids, lemma);
  const auto s_k = spectral::make_series(h.grids, corollary);
  const double trivial_err = *std::max_element(trivial.begin(), trivial.end());
  auto ok = [&](const spectral::GridSeries& s) {
    return s.ratios.empty() ? std::isfinite(s.max_value()) : s.max_ratio() <= h.ratio_limit;
  };

  CommandResult res;
  res.command = "holder";
  json& j = res.report = header("holder", cfg);
  j["gamma"] = h.gamma;
  j["order"] = r;
  j["interpolation"] = flows::to_string(opt.interpolation);
  j["t_per_sign"] = h.t_per_sign;
  j["test_functions"] = h.test_functions;
  j["ratio_limit"] = h.ratio_limit;
  j["trivial_max_error"] = trivial_err;
  j["comparison"] = series_json(s_c);
  j["comparison"]["pass"] = ok(s_c);
  j["multiplier"] = series_json(s_l);
  j["multiplier"]["psi"] = h.psi;
  j["multiplier"]["pass"] = ok(s_l);
  j["universal"] = series_json(s_k);
  j["universal"]["pass"] = ok(s_k);
  const bool pass = trivial_err <= 1e-12 && ok(s_c) && ok(s_l) && ok(s_k);
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  CsvTable tab{"holder", {"n", "c_emp", "multiplier_ratio", "universal_ratio"}, {}};
  for (std::size_t i = 0; i < h.grids.size(); ++i) {
    tab.rows.push_back({std::to_string(h.grids[i]), num(c_emp[i]), num(lemma[i]), num(corollary[i])});
  }
  res.tables.push_back(std::move(tab));
  res.summary = "c_emp growth " + brief(s_c.max_ratio()) + ", multiplier growth " + brief(s_l.max_ratio()) +
                ", universal growth " + brief(s_k.max_ratio());
  return res;
}

// ---- subell ------------------------------------------------------------------

CommandResult cmd_subell(const RunConfig& cfg) {
  const auto& s = section(cfg.subell, "subell");
  require_torus(cfg, "subell");
  const auto sys = cfg.field_system();
  const int d = sys.dimension();
  for (int n : s.grids) {
    if (std::pow(static_cast<double>(n), d) > static_cast<double>(spectral::kEigenCap)) {
      throw CapError("[subell] grid " + std::to_string(n) + " exceeds the eigendecomposition cap");
    }
  }
  const spectral::Thresholds th{s.bounded, s.growing};
  const spectral::SpectralModel model(spectral::hormander_factory(sys), d, cfg.run.jobs);
  const auto rank = hormander::find_hormander_rank(sys, s.r_max, hormander::torus_grid_samples(d, 32));

  CommandResult res;
  res.command = "subell";
  json& j = res.report = header("subell", cfg);
  j["grids"] = s.grids;
  j["thresholds"] = {{"bounded", s.bounded}, {"growing", s.growing}};
  j["rank"] = rank ? json(*rank) : json(nullptr);
  json scans = json::array();
  CsvTable tab{"subell", {"alpha", "gamma", "n", "constant", "verdict"}, {}};
  std::optional<double> gamma_star;
  bool first = true;
  for (double alpha : s.alphas) {
    const auto scan = spectral::order_scan(model, cfg.system.id, s.grids, s.gammas, alpha, th, cfg.run.jobs);
    json rows = json::array();
    for (const auto& row : scan.rows) {
      rows.push_back(spectral::to_json(row));
      for (std::size_t i = 0; i < row.series.grids.size(); ++i) {
        tab.rows.push_back({num(alpha), num(row.gamma), std::to_string(row.series.grids[i]),
                            num(row.series.values[i]), spectral::to_string(row.verdict)});
      }
    }
    scans.push_back({{"alpha", alpha},
                     {"gamma_star", scan.gamma_star ? json(*scan.gamma_star) : json(nullptr)},
                     {"rows", rows}});
    if (first || alpha == 1.0) gamma_star = scan.gamma_star;
    first = false;
  }
  j["scans"] = scans;
  j["gamma_star"] = gamma_star ? json(*gamma_star) : json(nullptr);

  // Lanczos cross-check on the largest grid when it exceeds the dense cap
  const int n_max = s.grids.back();
  const spectral::TorusGrid big(d, n_max);
  if (big.size() > s.dense_cap) {
    const double gamma = rank ? 1.0 / *rank : s.gammas.front();
    spectral::SubellipticOptions opt;
    opt.dense_cap = s.dense_cap;
    opt.lanczos_tol = s.lanczos_tol;
    opt.seed = cfg.run.seed;
    const double lan = spectral::best_subelliptic_constant(model.op(n_max), gamma, opt);
    const double dense = spectral::best_subelliptic_constant(*model.decomposition(n_max), gamma);
    const double rel = std::abs(lan - dense) / std::max(dense, 1e-300);
    j["lanczos_check"] = {{"n", n_max}, {"gamma", gamma}, {"lanczos", lan}, {"dense", dense}, {"relative_difference", rel}};
    if (rel > 1e-6) {
      res.exit_code = kNumerical;
      res.summary = "Lanczos and dense constants differ by " + brief(rel);
      return res;
    }
  }

  bool consistent = false;
  if (rank && gamma_star) consistent = std::abs(*gamma_star - 1.0 / *rank) <= s.rank_tolerance + 1e-12;
  j["consistent"] = consistent;
  if (!rank) {
    res.exit_code = kFail;
  } else if (!consistent) {
    res.exit_code = kDisagree;
  }
  j["verdict"] = res.exit_code == kPass ? "pass" : "fail";
  res.tables.push_back(std::move(tab));
  res.summary = "gamma* " + (gamma_star ? brief(*gamma_star) : std::string("none")) + ", rank " +
                (rank ? std::to_string(*rank) : std::string("none")) + (consistent ? ", consistent" : ", inconsistent");
  return res;
}

// ---- identities ----------------------------------------------------------------

CommandResult cmd_identities(const RunConfig& cfg) {
  const auto& s = section(cfg.identities, "identities");
  double e_single = 0.0, e_square = 0.0, e_form = 0.0;
  for (int p = 0; p < s.pairs; ++p) {
    const std::uint64_t base = cfg.run.seed * 1000003u + static_cast<std::uint64_t>(p) * 4;
    const auto a = spectral::random_hermitian(s.size, base);
    const auto b1 = spectral::random_hermitian(s.size, base + 1);
    const auto b2 = spectral::random_hermitian(s.size, base + 2);
    const auto phi = krylov::random_unit_vector(s.size, base + 3);
    const auto psi = krylov::random_unit_vector(s.size, base + 3 + (1ull << 40));
    e_single = std::max(e_single, spectral::identity_single_error(a, b1, b2, phi));
    e_square = std::max(e_square, spectral::identity_square_error(a, b1, phi));
    const auto f = spectral::double_commutator_form(a, b1, b2, psi, phi);
    const auto g = spectral::double_commutator_direct(a, b1, b2, psi, phi);
    e_form = std::max(e_form, std::abs(f - g) / std::max(std::abs(g), a.norm() * b1.norm() * b2.norm() * 1e-3));
  }
  CommandResult res;
  res.command = "identities";
  json& j = res.report = header("identities", cfg);
  j["pairs"] = s.pairs;
  j["size"] = s.size;
  j["tol"] = s.tol;
  j["single_commutator_error"] = e_single;
  j["square_error"] = e_square;
  j["form_vs_direct_error"] = e_form;
  const bool pass = e_single <= s.tol && e_square <= s.tol && e_form <= s.tol;
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  res.summary = "max relative errors " + brief(e_single) + ", " + brief(e_square) + ", " + brief(e_form);
  return res;
}

// ---- jacobi --------------------------------------------------------------------

std::string random_trig_text(std::mt19937_64& rng, int d, int max_freq) {
  std::uniform_int_distribution<int> freq(-max_freq, max_freq);
  std::uniform_int_distribution<int> numer(-4, 4);
  std::uniform_int_distribution<int> terms(1, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::string s;
  const int count = terms(rng);
  for (int t = 0; t < count; ++t) {
    int c = numer(rng);
    if (c == 0) c = 1;
    std::string arg;
    for (int k = 1; k <= d; ++k) {
      const int f = freq(rng);
      if (f == 0) continue;
      if (!arg.empty()) arg += "+";
      arg += "(" + std::to_string(f) + ")*x" + std::to_string(k);
    }
    if (arg.empty()) arg = "0";
    if (!s.empty() && c > 0) s += "+";
    s += std::to_string(c) + "/3*" + (coin(rng) ? "sin(" : "cos(") + arg + ")";
  }
  return s;
}

CommandResult cmd_jacobi(const RunConfig& cfg) {
  const auto& s = section(cfg.jacobi, "jacobi");
  constexpr int d = 2;
  std::mt19937_64 rng(cfg.run.seed + 0x7a3b);
  std::vector<vecfield::VectorField> fields;
  for (int i = 0; i < s.fields; ++i) {
    std::vector<std::string> coeffs;
    for (int k = 0; k < d; ++k) coeffs.push_back(random_trig_text(rng, d, s.max_freq));
    fields.push_back(vecfield::VectorField::parse(coeffs, d));
  }
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(s.points));
  for (auto& p : pts) p = {u(rng), u(rng)};

  double jac = 0.0, anti = 0.0;
  for (int i = 0; i < s.fields; ++i) {
    const auto& x = fields[static_cast<std::size_t>(i)];
    const auto& y = fields[static_cast<std::size_t>((i + 1) % s.fields)];
    const auto& z = fields[static_cast<std::size_t>((i + 2) % s.fields)];
    const vecfield::CompiledField a(vecfield::lie_bracket(x, vecfield::lie_bracket(y, z)));
    const vecfield::CompiledField b(vecfield::lie_bracket(y, vecfield::lie_bracket(z, x)));
    const vecfield::CompiledField c(vecfield::lie_bracket(z, vecfield::lie_bracket(x, y)));
    const vecfield::CompiledField xy(vecfield::lie_bracket(x, y));
    const vecfield::CompiledField yx(vecfield::lie_bracket(y, x));
    std::vector<double> va(d), vb(d), vc(d), v1(d), v2(d);
    for (const auto& p : pts) {
      a(p, va);
      b(p, vb);
      c(p, vc);
      xy(p, v1);
      yx(p, v2);
      for (int k = 0; k < d; ++k) {
        jac = std::max(jac, std::abs(va[k] + vb[k] + vc[k]));
        anti = std::max(anti, std::abs(v1[k] + v2[k]));
      }
    }
  }
  CommandResult res;
  res.command = "jacobi";
  json& j = res.report = header("jacobi", cfg);
  j["fields"] = s.fields;
  j["points"] = s.points;
  j["tol"] = s.tol;
  j["jacobi_max_error"] = jac;
  j["antisymmetry_max_error"] = anti;
  const bool pass = jac <= s.tol && anti <= s.tol;
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  res.summary = "Jacobi residual " + brief(jac) + ", antisymmetry residual " + brief(anti);
  return res;
}

// ---- improvement ---------------------------------------------------------------

json improvement_json(const spectral::ImprovementResult& r, double eps, double c) {
  return {{"eps", eps},
          {"c", c},
          {"form_margin", r.form_margin},
          {"commutator_margin", r.commutator_margin},
          {"hypotheses_hold", r.hypotheses_hold},
          {"worst_margin", r.worst_margin},
          {"conclusion_holds", r.conclusion_holds}};
}

CommandResult cmd_improvement(const RunConfig& cfg) {
  const auto& s = section(cfg.improvement, "improvement");
  const std::uint64_t seed = cfg.run.seed * 7919u + 11;
  json instances = json::array();
  bool pass = true;
  auto record = [&](const char* name, const spectral::ImprovementResult& r, double eps, double c) {
    json j = improvement_json(r, eps, c);
    j["name"] = name;
    instances.push_back(j);
    pass = pass && r.hypotheses_hold && r.conclusion_holds;
  };

  const Eigen::MatrixXcd h = spectral::random_hermitian(s.size, seed);
  const Eigen::MatrixXcd b = 3.0 * h / h.operatorNorm();
  const Eigen::MatrixXcd b2 = b * b;
  record("square", spectral::improvement_lemma_check(b2, b, 0.0, 0.0, s.probes, seed + 1), 0.0, 0.0);

  const Eigen::MatrixXcd q = spectral::random_hermitian(s.size, seed + 2);
  Eigen::MatrixXcd p = q * q.adjoint();
  p /= p.operatorNorm();
  const Eigen::MatrixXcd a2 = b2 + 0.1 * p;
  const Eigen::MatrixXcd gp = b2 * p - 2.0 * b * p * b + p * b2;
  const double c2 = 0.1 * gp.operatorNorm();
  record("square_plus_psd", spectral::improvement_lemma_check(a2, b, 0.0, c2, s.probes, seed + 3), 0.0, c2);

  if (!cfg.system.fields.empty()) {
    require_torus(cfg, "improvement");
    const auto sys = cfg.field_system();
    const spectral::TorusGrid g(sys.dimension(), s.grid);
    const Eigen::MatrixXcd hm = spectral::assemble_hormander_operator(g, sys).densify(cfg.run.jobs);
    const auto n = static_cast<Eigen::Index>(g.size());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd bb = std::pow(s.t, -1.0 / (2.0 * s.r)) * (id - spectral::semigroup(g, s.t).densify());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(id + hm);
    const Eigen::MatrixXcd inv_sqrt = es.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> top(inv_sqrt * bb * bb * inv_sqrt, Eigen::EigenvaluesOnly);
    const double c1 = top.eigenvalues().maxCoeff();
    const Eigen::MatrixXcd a = c1 * (id + hm);
    const double c = spectral::minimal_commutator_constant(a, bb, s.eps);
    record("semigroup_pencil", spectral::improvement_lemma_check(a, bb, s.eps, c, s.probes, seed + 4), s.eps, c);
    instances.back()["c1"] = c1;
    instances.back()["t"] = s.t;
    instances.back()["r"] = s.r;
  }

  CommandResult res;
  res.command = "improvement";
  json& j = res.report = header("improvement", cfg);
  j["probes"] = s.probes;
  j["instances"] = instances;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& i : instances) worst = std::min(worst, i["worst_margin"].get<double>());
  j["worst_margin"] = worst;
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  res.summary = std::to_string(instances.size()) + " instances, worst conclusion margin " + brief(worst);
  return res;
}

// ---- commutators ---------------------------------------------------------------

CommandResult cmd_commutators(const RunConfig& cfg) {
  const auto& s = section(cfg.commutators, "commutators");
  require_torus(cfg, "commutators");
  const auto sys = cfg.field_system();
  const int d = sys.dimension();
  const auto fh = spectral::hormander_factory(sys);
  const auto fl = spectral::laplacian_factory();
  const int jobs = cfg.run.jobs;
  const std::uint64_t seed = cfg.run.seed;

  struct Entry {
    const char* name;
    spectral::GridSeries series;
    spectral::GridSeries control;
  };
  std::vector<Entry> entries;
  entries.push_back({"lemma", spectral::commutator_bound_estimate(fh, d, s.grids, s.m, seed, jobs),
                     spectral::commutator_bound_estimate(fl, d, s.grids, s.m, seed, jobs)});
  entries.push_back({"semigroup", spectral::semigroup_commutator_bound(fh, d, s.t_list, s.grids, false, seed, jobs),
                     spectral::semigroup_commutator_bound(fl, d, s.t_list, s.grids, false, seed, jobs)});
  entries.push_back({"semigroup_refined",
                     spectral::semigroup_commutator_bound(fh, d, s.t_list, s.grids, true, seed, jobs),
                     spectral::semigroup_commutator_bound(fl, d, s.t_list, s.grids, true, seed, jobs)});
  entries.push_back({"fractional", spectral::fractional_commutator_bound(fh, d, s.grids, s.rho, s.delta, seed, jobs),
                     spectral::fractional_commutator_bound(fl, d, s.grids, s.rho, s.delta, seed, jobs)});

  const spectral::TorusGrid big(d, s.grids.back());
  const double late = spectral::semigroup_commutator_norm(fh(big), 1e3, seed);

  CommandResult res;
  res.command = "commutators";
  json& j = res.report = header("commutators", cfg);
  j["m"] = s.m;
  j["rho"] = s.rho;
  j["delta"] = s.delta;
  j["t_list"] = s.t_list;
  j["ratio_limit"] = s.ratio_limit;
  j["control_tol"] = s.control_tol;
  bool pass = true;
  CsvTable tab{"commutators", {"estimate", "n", "norm", "control"}, {}};
  for (const auto& e : entries) {
    json x = series_json(e.series);
    const bool bounded = e.series.max_ratio() <= s.ratio_limit;
    const bool control = e.control.max_value() <= s.control_tol;
    x["max_ratio"] = e.series.max_ratio();
    x["bounded"] = bounded;
    x["control_max"] = e.control.max_value();
    x["control_pass"] = control;
    j["estimates"][e.name] = x;
    pass = pass && bounded && control;
    for (std::size_t i = 0; i < e.series.grids.size(); ++i) {
      tab.rows.push_back({e.name, std::to_string(e.series.grids[i]), num(e.series.values[i]), num(e.control.values[i])});
    }
  }
  j["large_time"] = {{"t", 1e3}, {"norm", late}, {"pass", late <= s.control_tol}};
  pass = pass && late <= s.control_tol;
  j["verdict"] = pass ? "pass" : "fail";
  res.exit_code = pass ? kPass : kFail;
  res.tables.push_back(std::move(tab));
  std::string sum;
  for (const auto& e : entries) sum += std::string(sum.empty() ? "" : ", ") + e.name + " " + brief(e.series.max_ratio());
  res.summary = "max ratios: " + sum;
  return res;
}

// ---- report --------------------------------------------------------------------

CommandResult cmd_report(const RunConfig& cfg) {
  CommandResult res;
  res.command = "report";
  res.report = header("report", cfg);
  const std::vector<std::pair<std::string, bool>> present = {
      {"identities", cfg.identities.has_value()}, {"jacobi", cfg.jacobi.has_value()},
      {"bch", cfg.bch.has_value()},               {"flow", cfg.flow.has_value()},
      {"check-hormander", cfg.hormander.has_value()}, {"subell", cfg.subell.has_value()},
      {"commutators", cfg.commutators.has_value()}, {"improvement", cfg.improvement.has_value()},
      {"holder", cfg.holder.has_value()}};
  json parts = json::object();
  std::string summary;
  for (const auto& [name, on] : present) {
    if (!on) continue;
    CommandResult sub = run_command(name, cfg);
    parts[name] = {{"exit_code", sub.exit_code}, {"report", sub.report}};
    res.exit_code = std::max(res.exit_code, sub.exit_code);
    for (auto& t : sub.tables) {
      t.name = name + "_" + t.name;
      res.tables.push_back(std::move(t));
    }
    summary += (summary.empty() ? "" : "; ") + name + " " + std::to_string(sub.exit_code);
  }
  if (parts.empty()) throw ConfigError("config enables no command sections");
  res.report["commands"] = parts;
  res.report["exit_code"] = res.exit_code;
  res.summary = summary;
  return res;
}

using Runner = std::function<CommandResult(const RunConfig&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"check-hormander", cmd_check_hormander}, {"bch", cmd_bch},
      {"flow", cmd_flow},                       {"holder", cmd_holder},
      {"subell", cmd_subell},                   {"identities", cmd_identities},
      {"jacobi", cmd_jacobi},                   {"improvement", cmd_improvement},
      {"commutators", cmd_commutators},         {"report", cmd_report}};
  return table;
}

}  // namespace

std::string CsvTable::text() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kv : runners()) v.push_back(kv.first);
    return v;
  }();
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg) {
  const auto& table = runners();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command '" + name + "'");
  return it->second(cfg);
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::numerical:
        return kNumerical;
      default:
        return kConfigError;
    }
  }
  return kNumerical;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace sublab::commands
