#pragma once

// Sampled decision of the uniform Hormander condition of order r through the
// equivalent criteria:
//   eigenvalue   C^(r)(x) >= sigma I
//   combination  e_i = sum lambda_a a_a(x) with |lambda_a| <= M
//   volume       Vol{sum lambda_a a_a(x) : |lambda_a| <= 1} >= sigma
//   determinant  max over d-tuples |det(a_a1(x), ..., a_ad(x))| >= sigma
// plus the rank statement (some r with the eigenvalue bound).

#include "sublab/vecfield.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sublab::hormander {

using vecfield::FieldSystem;
using vecfield::MultiIndex;

inline constexpr std::size_t kSubsetCap = 1'000'000;
inline constexpr int kMaxOrder = 6;

/// Flattened list of sample points.
struct SampleSet {
  int dimension = 0;
  std::vector<double> coords;  // size() * dimension values
  std::string descriptor;
  bool exhaustive = false;  // periodic grid over one period

  [[nodiscard]] std::size_t size() const noexcept {
    return dimension == 0 ? 0 : coords.size() / static_cast<std::size_t>(dimension);
  }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
};

/// Uniform grid with n points per side over [0, 2pi)^d.
[[nodiscard]] SampleSet torus_grid_samples(int dimension, int n);
/// Halton points in [-bound, bound]^d, starting at sequence index 1 + skip.
[[nodiscard]] SampleSet box_samples(int dimension, double bound, std::size_t count, std::uint64_t skip = 0);

/// Evaluates every a_alpha, alpha in J_r^+(N), at a point.
class GeneratorTable {
 public:
  GeneratorTable(const FieldSystem& sys, int r);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  /// d x L matrix whose columns are a_alpha(x).
  [[nodiscard]] Eigen::MatrixXd at(std::span<const double> x) const;

 private:
  int order_;
  int dim_;
  std::vector<MultiIndex> indices_;
  std::vector<vecfield::CompiledField> compiled_;
};

[[nodiscard]] Eigen::MatrixXd assemble_cr_matrix(const FieldSystem& sys, int r, std::span<const double> x);

struct CriterionResult {
  double value = 0.0;
  std::vector<double> witness;  // worst sample point
  bool pass = false;
};

struct CombinationResult : CriterionResult {
  bool feasible = true;
  int witness_axis = 0;  // 1-based
  std::vector<double> lambda;
};

struct DeterminantResult : CriterionResult {
  std::vector<MultiIndex> tuple;  // maximising tuple at the witness
};

struct ProofChain {
  // Smallest slack lhs - rhs over samples for each inequality; >= -1e-9 means it holds.
  double eig_vs_det = std::numeric_limits<double>::infinity();
  double vol_vs_comb = std::numeric_limits<double>::infinity();
  double det_vs_vol = std::numeric_limits<double>::infinity();
  bool holds = true;
};

struct HormanderReport {
  int order = 0;
  double sigma_tol = 1e-6;
  std::string samples;
  std::size_t sample_count = 0;
  bool exhaustive = false;
  CriterionResult sigma_eig;
  CombinationResult m_comb;
  CriterionResult volume;
  DeterminantResult sigma_det;
  ProofChain proof_chain;
  std::optional<int> rank;
  int rank_scan_max = 0;

  [[nodiscard]] bool criteria_agree() const noexcept;
  [[nodiscard]] bool all_pass() const noexcept;
};

[[nodiscard]] CriterionResult check_sigma_condition(const FieldSystem& sys, int r, const SampleSet& samples,
                                                    double sigma_tol = 1e-6, int jobs = 1);
[[nodiscard]] CombinationResult check_bounded_combination(const FieldSystem& sys, int r, const SampleSet& samples,
                                                          double sigma_tol = 1e-6, int jobs = 1);
/// Throws CapError when binomial(L, d) exceeds kSubsetCap.
[[nodiscard]] CriterionResult check_volume_condition(const FieldSystem& sys, int r, const SampleSet& samples,
                                                     double sigma_tol = 1e-6, int jobs = 1);
[[nodiscard]] DeterminantResult check_determinant_condition(const FieldSystem& sys, int r,
                                                            const SampleSet& samples, double sigma_tol = 1e-6,
                                                            int jobs = 1);
[[nodiscard]] std::optional<int> find_hormander_rank(const FieldSystem& sys, int r_max, const SampleSet& samples,
                                                     double sigma_tol = 1e-6, int jobs = 1);

/// Runs all four criteria and the proof-chain inequalities at order r.
[[nodiscard]] HormanderReport check_hormander(const FieldSystem& sys, int r, const SampleSet& samples,
                                              double sigma_tol = 1e-6, int jobs = 1);

/// Pointwise quantities behind the criteria.
struct PointAnalysis {
  double lambda_min = 0.0;
  bool feasible = true;
  double m_comb = 0.0;  // max over axes; +inf when infeasible
  int worst_axis = 1;
  std::vector<double> lambda;
  double volume = 0.0;
  double det_max = 0.0;
  std::vector<int> det_tuple;  // column indices
  double gram_norm = 0.0;      // ||D|| for the maximising tuple
};

enum AnalysisMask : unsigned { kEig = 1u, kComb = 2u, kVol = 4u, kDet = 8u, kAll = 15u };

[[nodiscard]] PointAnalysis analyze_point(const Eigen::MatrixXd& generators, unsigned mask);

[[nodiscard]] nlohmann::json to_json(const HormanderReport& report);

}  // namespace sublab::hormander
