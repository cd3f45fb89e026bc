#pragma once

// Random expressions drawn from the coefficient grammar, for property tests.

#include "sublab/symexpr.hpp"

#include <random>
#include <string>

namespace testsupport {

inline std::string random_expr_text(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_int_distribution<int> coord(1, dim);
  std::uniform_int_distribution<int> small(0, 9);
  switch (pick(rng)) {
    case 0: {
      std::string s = std::to_string(small(rng));
      if (small(rng) < 3) s += "/" + std::to_string(1 + small(rng));
      return s;
    }
    case 1:
      return "x" + std::to_string(coord(rng));
    case 2:
      return random_expr_text(rng, dim, depth - 1) + " + " + random_expr_text(rng, dim, depth - 1);
    case 3:
      return random_expr_text(rng, dim, depth - 1) + " - " + random_expr_text(rng, dim, depth - 1);
    case 4:
      return "(" + random_expr_text(rng, dim, depth - 1) + ")*(" + random_expr_text(rng, dim, depth - 1) + ")";
    case 5:
      return "sin(" + random_expr_text(rng, dim, depth - 1) + ")";
    default:
      return "-cos(" + random_expr_text(rng, dim, depth - 1) + ")";
  }
}

inline sublab::symexpr::Expr random_expr(std::mt19937_64& rng, int dim, int depth) {
  return sublab::symexpr::parse(random_expr_text(rng, dim, depth), dim);
}

/// Trig polynomial: sum of a few c*sin/cos(k.x) terms.
inline std::string random_trig_text(std::mt19937_64& rng, int dim) {
  std::uniform_int_distribution<int> freq(-2, 2);
  std::uniform_int_distribution<int> coef(1, 5);
  std::uniform_int_distribution<int> terms(1, 3);
  std::string s;
  const int n = terms(rng);
  for (int t = 0; t < n; ++t) {
    std::string arg;
    for (int k = 1; k <= dim; ++k) {
      const int f = freq(rng);
      if (f == 0) continue;
      if (!arg.empty()) arg += " + ";
      arg += std::to_string(f < 0 ? -f : f) + "*x" + std::to_string(k);
      if (f < 0) arg = "-(" + arg + ")";
    }
    if (arg.empty()) arg = "0";
    if (!s.empty()) s += " + ";
    s += std::to_string(coef(rng)) + "/3*" + (t % 2 ? "sin(" : "cos(") + arg + ")";
  }
  return s;
}

}  // namespace testsupport
