#include "sublab/hormander.hpp"

#include "sublab/error.hpp"
#include "sublab/linprog.hpp"
#include "sublab/parallel.hpp"

#include <cmath>
#include <numbers>

namespace sublab::hormander {

namespace {

constexpr double kChainTol = 1e-9;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

double small_det(const Eigen::MatrixXd& m) {
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

std::vector<double> to_vector(std::span<const double> x) { return {x.begin(), x.end()}; }

void check_order(int r) {
  if (r < 1) throw RangeError("order r must be >= 1");
  if (r > kMaxOrder) throw CapError("order r exceeds cap " + std::to_string(kMaxOrder));
}

void check_samples(const FieldSystem& sys, const SampleSet& samples) {
  if (samples.size() == 0) throw Error(ErrorKind::invalid_argument, "sample set is empty");
  if (samples.dimension != sys.dimension()) throw DimensionError("sample dimension does not match system");
}

void check_subset_cap(const GeneratorTable& table) {
  const double count = binomial(table.indices().size(), static_cast<std::size_t>(table.dimension()));
  if (count > static_cast<double>(kSubsetCap)) {
    throw CapError("binomial(L, d) = " + std::to_string(static_cast<long long>(count)) + " exceeds subset cap");
  }
}

std::vector<PointAnalysis> analyze_all(const GeneratorTable& table, const SampleSet& samples, unsigned mask,
                                       int jobs) {
  std::vector<PointAnalysis> out(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) { out[i] = analyze_point(table.at(samples.point(i)), mask); });
  return out;
}

double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, double base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

}  // namespace

SampleSet torus_grid_samples(int dimension, int n) {
  if (dimension < 1 || n < 1) throw RangeError("grid needs d >= 1 and n >= 1");
  const double total = std::pow(static_cast<double>(n), dimension);
  if (total > 1e8) throw CapError("torus grid too large");
  SampleSet s;
  s.dimension = dimension;
  s.exhaustive = true;
  s.descriptor = "torus grid " + std::to_string(n) + "^" + std::to_string(dimension) + " over [0,2pi)";
  const auto count = static_cast<std::size_t>(total);
  s.coords.resize(count * static_cast<std::size_t>(dimension));
  const double h = 2.0 * std::numbers::pi / n;
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t rem = p;
    // first coordinate varies slowest
    for (int k = dimension - 1; k >= 0; --k) {
      s.coords[p * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(k)] =
          h * static_cast<double>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
    }
  }
  return s;
}

SampleSet box_samples(int dimension, double bound, std::size_t count, std::uint64_t skip) {
  if (dimension < 1 || dimension > 12) throw RangeError("box sampling supports 1 <= d <= 12");
  if (!(bound > 0.0) || count == 0) throw RangeError("box sampling needs bound > 0 and count >= 1");
  SampleSet s;
  s.dimension = dimension;
  s.exhaustive = false;
  s.descriptor = "halton " + std::to_string(count) + " points in [-" + std::to_string(bound) + "," +
                 std::to_string(bound) + "]^" + std::to_string(dimension) + " (sampled, not exhaustive)";
  s.coords.resize(count * static_cast<std::size_t>(dimension));
  for (std::size_t p = 0; p < count; ++p) {
    for (int k = 0; k < dimension; ++k) {
      const double u = radical_inverse(p + 1 + skip, primes[k]);
      s.coords[p * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(k)] = bound * (2.0 * u - 1.0);
    }
  }
  return s;
}

GeneratorTable::GeneratorTable(const FieldSystem& sys, int r)
    : order_(r), dim_(sys.dimension()), indices_(vecfield::enumerate_multiindices(sys.field_count(), r)) {
  check_order(r);
  compiled_.reserve(indices_.size());
  for (const auto& alpha : indices_) compiled_.emplace_back(sys.multi_commutator(alpha));
}

Eigen::MatrixXd GeneratorTable::at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("point dimension does not match system");
  Eigen::MatrixXd g(dim_, static_cast<Eigen::Index>(compiled_.size()));
  for (std::size_t j = 0; j < compiled_.size(); ++j) {
    compiled_[j](x, std::span<double>(g.col(static_cast<Eigen::Index>(j)).data(), static_cast<std::size_t>(dim_)));
  }
  return g;
}

Eigen::MatrixXd assemble_cr_matrix(const FieldSystem& sys, int r, std::span<const double> x) {
  const GeneratorTable table(sys, r);
  const Eigen::MatrixXd g = table.at(x);
  return g * g.transpose();
}

PointAnalysis analyze_point(const Eigen::MatrixXd& g, unsigned mask) {
  PointAnalysis pa;
  const Eigen::Index d = g.rows();
  const Eigen::Index l = g.cols();
  if (mask & kEig) {
    const Eigen::MatrixXd c = g * g.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    pa.lambda_min = es.eigenvalues()(0);
  }
  if (mask & kComb) {
    pa.m_comb = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto res = linprog::min_inf_norm_solution(g, Eigen::VectorXd::Unit(d, i));
      if (!res.feasible) {
        pa.feasible = false;
        pa.m_comb = std::numeric_limits<double>::infinity();
        pa.worst_axis = static_cast<int>(i) + 1;
        pa.lambda.clear();
        break;
      }
      if (res.norm > pa.m_comb || i == 0) {
        pa.m_comb = res.norm;
        pa.worst_axis = static_cast<int>(i) + 1;
        pa.lambda.assign(res.lambda.data(), res.lambda.data() + res.lambda.size());
      }
    }
  }
  if (mask & (kVol | kDet)) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = k;
    Eigen::MatrixXd sub(d, d);
    double sum = 0.0;
    bool any = d <= l;
    while (any) {
      for (Eigen::Index k = 0; k < d; ++k) sub.col(k) = g.col(idx[static_cast<std::size_t>(k)]);
      const double det = std::abs(small_det(sub));
      sum += det;
      if (det > pa.det_max || pa.det_tuple.empty()) {
        pa.det_max = det;
        pa.det_tuple.assign(idx.begin(), idx.end());
      }
      // next combination
      Eigen::Index k = d - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == l - d + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (Eigen::Index j = k + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    pa.volume = std::ldexp(sum, static_cast<int>(d));
    if (!pa.det_tuple.empty()) {
      for (Eigen::Index k = 0; k < d; ++k) sub.col(k) = g.col(static_cast<Eigen::Index>(pa.det_tuple[static_cast<std::size_t>(k)]));
      const Eigen::MatrixXd gram = sub * sub.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
      pa.gram_norm = es.eigenvalues()(d - 1);
    }
  }
  return pa;
}

CriterionResult check_sigma_condition(const FieldSystem& sys, int r, const SampleSet& samples, double sigma_tol,
                                      int jobs) {
  check_samples(sys, samples);
  const GeneratorTable table(sys, r);
  const auto all = analyze_all(table, samples, kEig, jobs);
  CriterionResult res;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].lambda_min < all[worst].lambda_min) worst = i;
  }
  res.value = all[worst].lambda_min;
  res.witness = to_vector(samples.point(worst));
  res.pass = res.value >= sigma_tol;
  return res;
}

namespace {

CombinationResult reduce_combination(const std::vector<PointAnalysis>& all, const SampleSet& samples,
                                     double sigma_tol) {
  CombinationResult res;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[worst].feasible && (!all[i].feasible || all[i].m_comb > all[worst].m_comb)) worst = i;
  }
  const auto& w = all[worst];
  res.feasible = w.feasible;
  res.value = w.m_comb;
  res.witness = to_vector(samples.point(worst));
  res.witness_axis = w.worst_axis;
  res.lambda = w.lambda;
  res.pass = w.feasible && w.m_comb <= 1.0 / sigma_tol;
  return res;
}

CriterionResult reduce_volume(const std::vector<PointAnalysis>& all, const SampleSet& samples, double sigma_tol) {
  CriterionResult res;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].volume < all[worst].volume) worst = i;
  }
  res.value = all[worst].volume;
  res.witness = to_vector(samples.point(worst));
  res.pass = res.value >= sigma_tol;
  return res;
}

DeterminantResult reduce_determinant(const std::vector<PointAnalysis>& all, const SampleSet& samples,
                                     const GeneratorTable& table, double sigma_tol) {
  DeterminantResult res;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].det_max < all[worst].det_max) worst = i;
  }
  res.value = all[worst].det_max;
  res.witness = to_vector(samples.point(worst));
  res.pass = res.value >= sigma_tol;
  for (int j : all[worst].det_tuple) res.tuple.push_back(table.indices()[static_cast<std::size_t>(j)]);
  return res;
}

}  // namespace

CombinationResult check_bounded_combination(const FieldSystem& sys, int r, const SampleSet& samples,
                                            double sigma_tol, int jobs) {
  check_samples(sys, samples);
  const GeneratorTable table(sys, r);
  return reduce_combination(analyze_all(table, samples, kComb, jobs), samples, sigma_tol);
}

CriterionResult check_volume_condition(const FieldSystem& sys, int r, const SampleSet& samples, double sigma_tol,
                                       int jobs) {
  check_samples(sys, samples);
  const GeneratorTable table(sys, r);
  check_subset_cap(table);
  return reduce_volume(analyze_all(table, samples, kVol, jobs), samples, sigma_tol);
}

DeterminantResult check_determinant_condition(const FieldSystem& sys, int r, const SampleSet& samples,
                                              double sigma_tol, int jobs) {
  check_samples(sys, samples);
  const GeneratorTable table(sys, r);
  check_subset_cap(table);
  return reduce_determinant(analyze_all(table, samples, kDet, jobs), samples, table, sigma_tol);
}

std::optional<int> find_hormander_rank(const FieldSystem& sys, int r_max, const SampleSet& samples,
                                       double sigma_tol, int jobs) {
  if (!(sigma_tol > 0.0)) throw RangeError("sigma_tol must be positive");
  check_order(r_max);
  for (int r = 1; r <= r_max; ++r) {
    if (check_sigma_condition(sys, r, samples, sigma_tol, jobs).pass) return r;
  }
  return std::nullopt;
}

HormanderReport check_hormander(const FieldSystem& sys, int r, const SampleSet& samples, double sigma_tol,
                                int jobs) {
  check_samples(sys, samples);
  if (!(sigma_tol > 0.0)) throw RangeError("sigma_tol must be positive");
  const GeneratorTable table(sys, r);
  check_subset_cap(table);
  const auto all = analyze_all(table, samples, kAll, jobs);

  HormanderReport rep;
  rep.order = r;
  rep.sigma_tol = sigma_tol;
  rep.samples = samples.descriptor;
  rep.sample_count = samples.size();
  rep.exhaustive = samples.exhaustive;
  {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (all[i].lambda_min < all[worst].lambda_min) worst = i;
    }
    rep.sigma_eig.value = all[worst].lambda_min;
    rep.sigma_eig.witness = to_vector(samples.point(worst));
    rep.sigma_eig.pass = rep.sigma_eig.value >= sigma_tol;
  }
  rep.m_comb = reduce_combination(all, samples, sigma_tol);
  rep.volume = reduce_volume(all, samples, sigma_tol);
  rep.sigma_det = reduce_determinant(all, samples, table, sigma_tol);

  const int d = sys.dimension();
  const double l = static_cast<double>(table.indices().size());
  for (const auto& pa : all) {
    const double det2 = pa.det_max * pa.det_max;
    const double rhs1 = det2 == 0.0 ? 0.0 : det2 / std::pow(pa.gram_norm, d - 1);
    rep.proof_chain.eig_vs_det = std::min(rep.proof_chain.eig_vs_det, pa.lambda_min - rhs1);
    if (pa.feasible) {
      const double rhs2 = std::pow(d * pa.m_comb, -d);
      rep.proof_chain.vol_vs_comb = std::min(rep.proof_chain.vol_vs_comb, pa.volume - rhs2);
    }
    const double rhs3 = std::ldexp(pa.volume, -static_cast<int>(l)) / l;
    rep.proof_chain.det_vs_vol = std::min(rep.proof_chain.det_vs_vol, pa.det_max - rhs3);
  }
  rep.proof_chain.holds = rep.proof_chain.eig_vs_det >= -kChainTol && rep.proof_chain.vol_vs_comb >= -kChainTol &&
                          rep.proof_chain.det_vs_vol >= -kChainTol;
  return rep;
}

bool HormanderReport::criteria_agree() const noexcept {
  const bool p = sigma_eig.pass;
  return m_comb.pass == p && volume.pass == p && sigma_det.pass == p;
}

bool HormanderReport::all_pass() const noexcept {
  return sigma_eig.pass && m_comb.pass && volume.pass && sigma_det.pass;
}

nlohmann::json to_json(const HormanderReport& rep) {
  using nlohmann::json;
  auto criterion = [](const CriterionResult& c) {
    json j;
    j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
    j["witness_point"] = c.witness;
    j["pass"] = c.pass;
    return j;
  };
  json j;
  j["order"] = rep.order;
  j["sigma_tol"] = rep.sigma_tol;
  j["samples"] = {{"descriptor", rep.samples}, {"count", rep.sample_count}, {"exhaustive", rep.exhaustive}};
  json crit;
  crit["sigma_eig"] = criterion(rep.sigma_eig);
  auto comb = criterion(rep.m_comb);
  comb["feasible"] = rep.m_comb.feasible;
  comb["witness_axis"] = rep.m_comb.witness_axis;
  crit["m_comb"] = comb;
  crit["volume"] = criterion(rep.volume);
  auto det = criterion(rep.sigma_det);
  json tuple = json::array();
  for (const auto& a : rep.sigma_det.tuple) tuple.push_back(std::vector<int>(a.entries().begin(), a.entries().end()));
  det["tuple"] = tuple;
  crit["sigma_det"] = det;
  j["criteria"] = crit;
  auto slack = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["proof_chain"] = {{"eig_vs_det_min_slack", slack(rep.proof_chain.eig_vs_det)},
                      {"vol_vs_comb_min_slack", slack(rep.proof_chain.vol_vs_comb)},
                      {"det_vs_vol_min_slack", slack(rep.proof_chain.det_vs_vol)},
                      {"holds", rep.proof_chain.holds}};
  j["rank"] = rep.rank ? json(*rep.rank) : json(nullptr);
  j["rank_scan_max"] = rep.rank_scan_max;
  j["criteria_agree"] = rep.criteria_agree();
  j["verdict"] = rep.all_pass() ? "pass" : "fail";
  return j;
}

}  // namespace sublab::hormander
