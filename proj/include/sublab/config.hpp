#pragma once

// Sectioned key-value run configuration. Example:
//
//   [system]
//   id = grushin
//   dimension = 2
//   field1 = 1, 0
//   field2 = 0, sin(x1)
//
//   [subell]
//   grids = 8, 16, 32
//   gammas = 0.1, 0.2, 0.3
//
// Lists are comma separated; field coefficients may be quoted. Every section
// except [system] and [run] is optional and enables the matching command.

#include "sublab/vecfield.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sublab::config {

struct SystemSection {
  std::string id = "system";
  int dimension = 0;
  std::vector<std::vector<std::string>> fields;  // coefficient strings per field
  vecfield::Domain domain;
};

struct HormanderSection {
  int r_max = 3;
  int grid = 64;                  // torus sample points per side
  std::size_t box_samples = 4096;  // Halton samples for box domains
  double sigma_tol = 1e-6;
};

struct BchSection {
  int order = 2;
  int y1 = 1;
  int y2 = 2;
  std::vector<double> point;
  double t_min = 1e-3;
  double t_max = 1e-1;
  int t_count = 12;
  double tol = 1e-10;
};

struct FlowSection {
  int field = 1;
  std::vector<double> point;
  double s = 0.3;
  double t = 0.4;
  double tol = 1e-10;
  double group_factor = 100.0;
  int taylor_order = 2;
  std::string taylor_phi = "cos(x1)*sin(x2)";
};

struct HolderSection {
  std::vector<int> grids{32, 64};
  double gamma = 1.0;
  std::optional<int> order;  // r in the comparison; defaults to the Hoermander rank
  int test_functions = 20;
  int max_freq = 3;
  int t_per_sign = 24;
  std::string interpolation = "trigonometric";
  int field = 1;                 // field for the multiplier and universal comparisons
  std::string psi = "2+cos(x1)";  // bounded multiplier
  double ratio_limit = 1.25;
};

struct SubellSection {
  std::vector<int> grids{8, 16, 32};
  std::vector<double> gammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> alphas{1.0};
  double bounded = 1.2;
  double growing = 1.5;
  std::size_t dense_cap = 1024;
  double lanczos_tol = 1e-8;
  double rank_tolerance = 0.1;  // |gamma* - 1/r| allowed
  int r_max = 4;
};

struct IdentitiesSection {
  int pairs = 100;
  int size = 64;
  double tol = 1e-10;
};

struct JacobiSection {
  int fields = 50;
  int points = 100;
  int max_freq = 2;
  double tol = 1e-10;
};

struct ImprovementSection {
  int probes = 50;
  int size = 24;
  int grid = 8;
  double t = 0.1;
  int r = 2;
  double eps = 0.5;
};

struct CommutatorsSection {
  std::vector<int> grids{8, 16, 32};
  int m = 1;
  double rho = 1.0;
  double delta = 0.6;
  std::vector<double> t_list;  // defaults to 2^-10 .. 1
  double ratio_limit = 1.25;
  double control_tol = 1e-10;
};

struct RunSection {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = "out";
  std::string format = "json";
};

struct RunConfig {
  SystemSection system;
  std::optional<HormanderSection> hormander;
  std::optional<BchSection> bch;
  std::optional<FlowSection> flow;
  std::optional<HolderSection> holder;
  std::optional<SubellSection> subell;
  std::optional<IdentitiesSection> identities;
  std::optional<JacobiSection> jacobi;
  std::optional<ImprovementSection> improvement;
  std::optional<CommutatorsSection> commutators;
  RunSection run;

  /// Builds the field system; coefficients are parsed against the dimension.
  [[nodiscard]] vecfield::FieldSystem field_system() const;
};

/// Throws ConfigError (or ParseError for malformed coefficients).
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::string& path);

}  // namespace sublab::config
