#pragma once

// Truncated free associative algebra on two letters and the
// Campbell-Baker-Hausdorff correction fields Z_2..Z_N.
//
// The correction fields make the product
//   exp(t(Y1+Y2)) exp(-t Y1) exp(-t Y2) exp(-t^2 Z_2) ... exp(-t^N Z_N)
// agree with the identity to order t^N. Letters a, b stand for Y1, Y2; a word
// w = w_1...w_j is the operator composition Y_w1 ... Y_wj, so the commutator
// ab - ba corresponds to lie_bracket(Y1, Y2).

#include "sublab/symexpr.hpp"
#include "sublab/vecfield.hpp"

#include <map>
#include <vector>

namespace sublab::bch {

using symexpr::Rational;
using Word = std::vector<int>;  // letters 1 or 2

inline constexpr int kMaxOrder = 6;

/// Element of the free algebra truncated above `max_degree`.
class FreePolynomial {
 public:
  explicit FreePolynomial(int max_degree) : max_degree_(max_degree) {}

  static FreePolynomial one(int max_degree);
  static FreePolynomial letter(int which, int max_degree);

  [[nodiscard]] int max_degree() const noexcept { return max_degree_; }
  [[nodiscard]] const std::map<Word, Rational>& terms() const noexcept { return terms_; }
  [[nodiscard]] Rational coefficient(const Word& w) const;
  void add_term(const Word& w, const Rational& c);

  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  /// Component of exactly the given degree.
  [[nodiscard]] FreePolynomial homogeneous(int degree) const;
  /// Lowest degree with a nonzero coefficient, or -1 for the zero polynomial.
  [[nodiscard]] int lowest_degree() const noexcept;

  FreePolynomial operator+(const FreePolynomial& o) const;
  FreePolynomial operator-(const FreePolynomial& o) const;
  FreePolynomial operator*(const FreePolynomial& o) const;
  FreePolynomial operator*(const Rational& c) const;
  bool operator==(const FreePolynomial& o) const { return terms_ == o.terms_; }

 private:
  int max_degree_;
  std::map<Word, Rational> terms_;  // zero coefficients never stored
};

/// exp(x) for x without constant term, truncated.
[[nodiscard]] FreePolynomial exp_series(const FreePolynomial& x);
/// log(p) for p with constant term 1, truncated.
[[nodiscard]] FreePolynomial log_series(const FreePolynomial& p);

/// Rational combination of right-nested brackets [w_1,[w_2,...[w_(j-1),w_j]]].
using BracketCombination = std::map<Word, Rational>;

/// Expands right-nested brackets back into the free algebra.
[[nodiscard]] FreePolynomial expand_brackets(const BracketCombination& combo, int max_degree);

/// Dynkin projection of a homogeneous degree-j component: w -> (1/j)[w].
/// Identity on Lie elements. Brackets are reduced with [p,p] = 0 and
/// [2,1] = -[1,2] on the innermost pair.
[[nodiscard]] BracketCombination dynkin_projection(const FreePolynomial& homogeneous, int degree);

struct CorrectionSeries {
  int order = 0;
  /// brackets[j-2] is Z_j as a bracket combination in Y1, Y2.
  std::vector<BracketCombination> brackets;
  /// log of the fully corrected product; all components of degree <= order vanish.
  FreePolynomial corrected_log{0};
};

/// Free-algebra part of the construction; throws CapError above kMaxOrder.
[[nodiscard]] CorrectionSeries correction_series(int order);

/// Instantiates Z_2..Z_N as vector fields from nested lie_brackets of Y1, Y2.
[[nodiscard]] std::vector<vecfield::VectorField> bch_correction_fields(const vecfield::VectorField& y1,
                                                                      const vecfield::VectorField& y2, int order);

[[nodiscard]] std::string to_string(const BracketCombination& combo);

}  // namespace sublab::bch
