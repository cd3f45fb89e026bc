#pragma once

// Vector fields X = sum_k a_k d_k with symbolic coefficients, Lie brackets and
// multi-commutators.
//
// Nesting convention: multi-commutators are RIGHT-nested,
//   X_[(i1,...,in)] = [X_i1, [X_i2, ... [X_i(n-1), X_in] ... ]].
// The opposite convention flips signs of even-depth brackets.

#include "sublab/symexpr.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sublab::vecfield {

using symexpr::Expr;

class VectorField {
 public:
  VectorField() = default;
  /// Zero field in dimension d.
  explicit VectorField(int dimension);
  explicit VectorField(std::vector<Expr> coefficients);

  /// Builds a field from coefficient strings in the symexpr grammar.
  static VectorField parse(std::span<const std::string> coefficients, int dimension);
  /// Coordinate field d_k (1-based) in dimension d.
  static VectorField coordinate(int k, int dimension);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(coeffs_.size()); }
  [[nodiscard]] const Expr& coefficient(int k) const { return coeffs_.at(static_cast<std::size_t>(k - 1)); }
  [[nodiscard]] std::span<const Expr> coefficients() const noexcept { return coeffs_; }

  [[nodiscard]] bool is_zero() const noexcept;
  /// All coefficients flagged bounded (a C_b^infinity field).
  [[nodiscard]] bool bounded() const noexcept;

  /// Coefficient vector a(x).
  [[nodiscard]] std::vector<double> eval(std::span<const double> x) const;
  void eval_into(std::span<const double> x, std::span<double> out) const;

  [[nodiscard]] VectorField scaled(const symexpr::Rational& c) const;
  /// Pointwise product psi * X.
  [[nodiscard]] VectorField multiplied(const Expr& psi) const;
  [[nodiscard]] VectorField operator+(const VectorField& other) const;
  [[nodiscard]] VectorField operator-() const;

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Expr> coeffs_;
};

/// Compiled coefficient evaluator for hot loops (flow integration, grid sampling).
class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(const VectorField& field);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(programs_.size()); }
  void operator()(std::span<const double> x, std::span<double> out) const;

 private:
  std::vector<symexpr::Program> programs_;
};

/// Sequence (i_1, ..., i_n) of 1-based field indices, n >= 1.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  [[nodiscard]] std::size_t length() const noexcept { return entries_.size(); }
  [[nodiscard]] std::span<const int> entries() const noexcept { return entries_; }
  [[nodiscard]] int operator[](std::size_t i) const { return entries_.at(i); }
  [[nodiscard]] std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

enum class DomainKind { torus, box };

/// Periodic torus of period 2*pi, or the sampling box [-bound, bound]^d.
struct Domain {
  DomainKind kind = DomainKind::torus;
  double bound = 3.141592653589793;
};

class FieldSystem {
 public:
  FieldSystem(int dimension, std::vector<VectorField> fields, Domain domain = {});

  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] int field_count() const noexcept { return static_cast<int>(fields_.size()); }
  /// 1-based field access.
  [[nodiscard]] const VectorField& field(int i) const;
  [[nodiscard]] std::span<const VectorField> fields() const noexcept { return fields_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }

  /// X_[alpha]; memoised on the shared suffix structure of right-nested brackets.
  [[nodiscard]] VectorField multi_commutator(const MultiIndex& alpha) const;

 private:
  int dim_;
  std::vector<VectorField> fields_;
  Domain domain_;
  struct Cache {
    std::mutex mutex;
    std::map<std::vector<int>, VectorField> brackets;
  };
  std::shared_ptr<Cache> cache_;
};

/// [X, Y] = sum_k (X b_k - Y a_k) d_k, simplified.
[[nodiscard]] VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// X applied to a scalar expression: sum_k a_k d_k phi.
[[nodiscard]] Expr apply_field(const VectorField& x, const Expr& phi);

/// J_r^+(N): all sequences of length 1..r over {1..N}, ordered by (length, lexicographic).
[[nodiscard]] std::vector<MultiIndex> enumerate_multiindices(int field_count, int max_length);

/// Sum over k of N^k for k = 1..r.
[[nodiscard]] std::size_t multiindex_count(int field_count, int max_length);

}  // namespace sublab::vecfield
