// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "sublab/bch.hpp"
#include "sublab/commands.hpp"
#include "sublab/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using sublab::commands::CommandResult;
using sublab::commands::run_command;
using sublab::config::RunConfig;

namespace {

std::string config_path(const std::string& name) { return std::string(SUBLAB_ACCEPTANCE_DIR) + "/" + name; }

RunConfig load(const std::string& name) { return sublab::config::load_config(config_path(name)); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [X]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_list(const json& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + fmt(a[i].get<double>());
  return s + "]";
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

const json* row_for(const json& scan, double gamma) {
  for (const auto& r : scan["rows"]) {
    if (near(r["gamma"].get<double>(), gamma)) return &r;
  }
  return nullptr;
}

Outcome c1_identities() {
  Outcome o;
  const auto r = run_command("identities", load("c01_identities.ini"));
  const auto& j = r.report;
  o.check(r.exit_code == 0, "exit " + std::to_string(r.exit_code));
  o.check(j["single_commutator_error"].get<double>() <= 1e-10,
          "single " + fmt(j["single_commutator_error"].get<double>()));
  o.check(j["square_error"].get<double>() <= 1e-10, "square " + fmt(j["square_error"].get<double>()));
  o.check(j["form_vs_direct_error"].get<double>() <= 1e-10,
          "double-commutator form " + fmt(j["form_vs_direct_error"].get<double>()));
  return o;
}

Outcome c2_jacobi() {
  Outcome o;
  const auto r = run_command("jacobi", load("c02_jacobi.ini"));
  o.check(r.exit_code == 0, "exit " + std::to_string(r.exit_code));
  o.check(r.report["jacobi_max_error"].get<double>() <= 1e-10,
          "Jacobi " + fmt(r.report["jacobi_max_error"].get<double>()));
  o.check(r.report["antisymmetry_max_error"].get<double>() <= 1e-10,
          "antisymmetry " + fmt(r.report["antisymmetry_max_error"].get<double>()));
  return o;
}

Outcome c3_bch_algebra() {
  using sublab::bch::Rational;
  Outcome o;
  const auto s2 = sublab::bch::correction_series(2);
  const sublab::bch::BracketCombination half{{{1, 2}, Rational(1, 2)}};
  o.check(s2.brackets.size() == 1 && s2.brackets[0] == half, "Z2 = " + sublab::bch::to_string(s2.brackets[0]));
  for (int n : {2, 3, 4}) {
    const auto s = sublab::bch::correction_series(n);
    const int low = s.corrected_log.lowest_degree();
    o.check(low == -1 || low > n, "N=" + std::to_string(n) + " lowest surviving degree " + std::to_string(low));
  }
  const auto r = run_command("bch", load("c03_bch_algebra.ini"));
  o.check(r.exit_code == 0, "order-4 fields slope " + fmt(r.report["slope"].is_null() ? INFINITY : r.report["slope"].get<double>()));
  return o;
}

Outcome c4_bch_remainder() {
  Outcome o;
  for (int n : {2, 3}) {
    auto cfg = load("c04_bch_grushin.ini");
    cfg.bch->order = n;
    const auto r = run_command("bch", cfg);
    const bool exact = r.report["exact"].get<bool>();
    const double slope = exact ? INFINITY : r.report["slope"].get<double>();
    o.check(!exact && slope >= n + 1 - 0.2 && r.exit_code == 0, "N=" + std::to_string(n) + " slope " + fmt(slope));
  }
  const auto c = run_command("bch", load("c04_bch_commuting.ini"));
  double worst = 0.0;
  for (const auto& d : c.report["defect"]) worst = std::max(worst, d.get<double>());
  o.check(worst <= 1e-9 && c.exit_code == 0, "commuting max defect " + fmt(worst));
  return o;
}

Outcome c5_hormander() {
  Outcome o;
  const auto g = run_command("check-hormander", load("c05_hormander_grushin.ini"));
  const auto& cr = g.report["criteria"];
  o.check(g.report["rank"] == 2, "rank " + g.report["rank"].dump());
  const double eig = cr["sigma_eig"]["value"].get<double>();
  const double det = cr["sigma_det"]["value"].get<double>();
  o.check(std::abs(eig - 1.0) <= 1e-8, "sigma_eig " + fmt(eig));
  o.check(std::abs(det - 1.0 / std::sqrt(2.0)) <= 1e-8, "sigma_det " + fmt(det));
  o.check(cr["m_comb"]["pass"].get<bool>() && cr["volume"]["pass"].get<bool>(), "combination and volume pass");
  o.check(g.report["proof_chain"]["holds"].get<bool>(), "proof chain holds");
  o.check(g.report["samples"]["count"] == 64 * 64, "64^2 samples");
  o.check(g.exit_code == 0, "exit " + std::to_string(g.exit_code));

  const auto s = run_command("check-hormander", load("c05_hormander_single.ini"));
  const auto& sc = s.report["criteria"];
  const bool all_fail = !sc["sigma_eig"]["pass"].get<bool>() && !sc["m_comb"]["pass"].get<bool>() &&
                        !sc["volume"]["pass"].get<bool>() && !sc["sigma_det"]["pass"].get<bool>();
  o.check(all_fail && s.report["rank"].is_null() && s.exit_code == 1, "single field fails all at r=4");
  return o;
}

Outcome c6_subell() {
  Outcome o;
  const auto g = run_command("subell", load("c06_subell_grushin.ini"));
  const auto& scan = g.report["scans"][0];
  const json* r5 = row_for(scan, 0.5);
  const json* r9 = row_for(scan, 0.9);
  if (!r5 || !r9) {
    o.check(false, "gamma rows missing");
    return o;
  }
  bool bounded = true;
  for (const auto& q : (*r5)["ratios"]) bounded = bounded && q.get<double>() <= 1.2;
  o.check(bounded, "gamma 0.5 ratios " + fmt_list((*r5)["ratios"]));
  o.check((*r9)["ratios"].back().get<double>() >= 1.5, "gamma 0.9 ratios " + fmt_list((*r9)["ratios"]));
  const double gs = g.report["gamma_star"].is_null() ? -1.0 : g.report["gamma_star"].get<double>();
  o.check(gs >= 0.4 - 1e-12 && gs <= 0.6 + 1e-12, "gamma* " + fmt(gs));
  const bool lanczos = g.report.contains("lanczos_check");
  o.check(lanczos, lanczos ? "Lanczos vs dense at 32^2 rel " +
                                 fmt(g.report["lanczos_check"]["relative_difference"].get<double>())
                           : "Lanczos path not exercised");
  o.check(g.exit_code == 0, "exit " + std::to_string(g.exit_code));

  const auto e = run_command("subell", load("c06_subell_euclidean.ini"));
  double worst = 0.0;
  int seen = 0;
  for (const auto& sc : e.report["scans"]) {
    const json* r1 = row_for(sc, 1.0);
    if (!r1) continue;
    ++seen;
    for (const auto& p : (*r1)["grids"]) worst = std::max(worst, p["constant"].get<double>());
  }
  o.check(seen == 3 && worst < 1.0, "Laplacian gamma=1 max constant " + fmt(worst) + " over 3 alphas");
  return o;
}

Outcome c7_commutators() {
  Outcome o;
  const auto r = run_command("commutators", load("c07_commutators.ini"));
  for (const auto& [name, est] : r.report["estimates"].items()) {
    o.check(est["bounded"].get<bool>(), name + " ratios " + fmt_list(est["ratios"]));
    o.check(est["control_pass"].get<bool>(), name + " Laplacian control " + fmt(est["control_max"].get<double>()));
  }
  return o;
}

Outcome c8_improvement() {
  Outcome o;
  const auto r = run_command("improvement", load("c08_improvement.ini"));
  const auto& inst = r.report["instances"];
  o.check(inst.size() == 3, std::to_string(inst.size()) + " instances");
  for (const auto& i : inst) {
    const double m = i["worst_margin"].get<double>();
    o.check(i["hypotheses_hold"].get<bool>() && m >= -1e-9, i["name"].get<std::string>() + " margin " + fmt(m));
  }
  return o;
}

Outcome c9_holder() {
  Outcome o;
  const auto r = run_command("holder", load("c09_holder.ini"));
  const auto& j = r.report;
  o.check(j["trivial_max_error"].get<double>() <= 1e-12, "trivial cases " + fmt(j["trivial_max_error"].get<double>()));
  o.check(j["multiplier"]["pass"].get<bool>(), "multiplier ratios " + fmt_list(j["multiplier"]["ratios"]));
  o.check(j["universal"]["pass"].get<bool>(), "universal ratios " + fmt_list(j["universal"]["ratios"]));
  o.check(j["comparison"]["pass"].get<bool>(), "c_emp growth " + fmt_list(j["comparison"]["ratios"]));
  return o;
}

Outcome c10_determinism() {
  Outcome o;
  const auto cfg = load("c10_determinism.ini");
  const auto a = run_command("report", cfg);
  const auto b = run_command("report", cfg);
  const std::string ja = sublab::commands::dump(a.report), jb = sublab::commands::dump(b.report);
  o.check(ja == jb, "report JSON " + std::to_string(ja.size()) + " bytes identical");
  bool csv = a.tables.size() == b.tables.size();
  for (std::size_t i = 0; csv && i < a.tables.size(); ++i) csv = a.tables[i].text() == b.tables[i].text();
  o.check(csv, std::to_string(a.tables.size()) + " CSV tables identical");
  auto serial = cfg;
  serial.run.jobs = 1;
  o.check(sublab::commands::dump(run_command("report", serial).report) == ja, "jobs=1 matches jobs=2");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "commutator identities", 5, c1_identities},
      {2, "Jacobi identity and antisymmetry", 10, c2_jacobi},
      {3, "BCH correction algebra", 5, c3_bch_algebra},
      {4, "CBH remainder order", 30, c4_bch_remainder},
      {5, "Hoermander checker", 60, c5_hormander},
      {6, "subellipticity trend", 300, c6_subell},
      {7, "commutator-bound trends", 120, c7_commutators},
      {8, "improvement-lemma margins", 30, c8_improvement},
      {9, "Hoelder machinery", 180, c9_holder},
      {10, "determinism", 0, c10_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) {
      o.check(secs < c.budget_s, "runtime " + fmt(secs) + " s < " + fmt(c.budget_s) + " s");
    } else {
      o.check(true, "runtime " + fmt(secs) + " s");
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
