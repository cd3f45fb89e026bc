#pragma once

// Expression language for vector-field coefficients.
//
// Grammar (1-based coordinates x1..xd):
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := rational | 'x'k | 'sin(' expr ')' | 'cos(' expr ')' | '(' expr ')' | '-' factor
//   rational := digits ['.' digits] ['/' digits]
//
// Every expression is C^infinity on R^d and the set is closed under partial
// differentiation. Constants are exact rationals; evaluation converts once to double.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sublab::symexpr {

using Rational = boost::multiprecision::cpp_rational;

enum class NodeKind { constant, coordinate, negate, sum, product, sin, cos };

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression handle. Copies share the underlying tree.
class Expr {
 public:
  /// The zero constant.
  Expr();

  static Expr constant(const Rational& value);
  static Expr constant(long long value) { return constant(Rational(value)); }
  /// Coordinate x_k, k >= 1.
  static Expr coordinate(int k);
  /// -e; folds constants and double negation.
  static Expr negate(const Expr& e);
  /// n-ary sum; an empty list is 0 and a single element is returned as is.
  static Expr sum(std::vector<Expr> terms);
  /// n-ary product; an empty list is 1 and a single element is returned as is.
  static Expr product(std::vector<Expr> factors);
  static Expr sin(const Expr& e);
  static Expr cos(const Expr& e);

  [[nodiscard]] NodeKind kind() const noexcept;
  /// Constant value; only meaningful when kind() == constant.
  [[nodiscard]] const Rational& value() const noexcept;
  /// 1-based coordinate index; only meaningful when kind() == coordinate.
  [[nodiscard]] int coordinate_index() const noexcept;
  [[nodiscard]] std::span<const Expr> children() const noexcept;

  [[nodiscard]] bool is_constant() const noexcept { return kind() == NodeKind::constant; }
  [[nodiscard]] bool is_zero() const noexcept;
  [[nodiscard]] bool is_one() const noexcept;

  /// True iff every coordinate node has a sin/cos ancestor; such expressions
  /// are bounded together with all their derivatives.
  [[nodiscard]] bool bounded() const noexcept;
  /// Largest coordinate index referenced (0 for constants).
  [[nodiscard]] int max_coordinate() const noexcept;
  /// Number of nodes in the tree.
  [[nodiscard]] std::size_t size() const noexcept;

  [[nodiscard]] double eval(std::span<const double> x) const;
  /// Printable form; parse(to_string()) reproduces a structurally equal tree.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] bool structurally_equal(const Expr& other) const;

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const detail::Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parses `text` against the grammar above. Throws ParseError (with byte
/// position) on malformed input and RangeError for coordinates outside [1, dimension].
[[nodiscard]] Expr parse(std::string_view text, int dimension);

/// Exact partial derivative with respect to x_k (1-based), simplified.
[[nodiscard]] Expr differentiate(const Expr& e, int k);

/// Best-effort simplification: constant folding, zero/one elimination,
/// flattening and like-term collection. Not canonical; the zero expression is
/// recognised exactly when the result is the constant 0.
[[nodiscard]] Expr simplify(const Expr& e);

/// Flat stack-machine form of an expression for repeated evaluation.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e);

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] bool is_constant() const noexcept { return constant_; }

 private:
  enum class Op : unsigned char { push_const, push_coord, neg, add, mul, sin, cos };
  struct Instr {
    Op op;
    int arg;       // coordinate index (0-based) or operand count
    double value;  // constant
  };

  void emit(const Expr& e, int depth);

  std::vector<Instr> code_;
  int max_depth_ = 0;
  bool constant_ = true;
};

}  // namespace sublab::symexpr
