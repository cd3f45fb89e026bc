#include "sublab/vecfield.hpp"

#include "sublab/error.hpp"

#include <utility>

namespace sublab::vecfield {

using symexpr::differentiate;
using symexpr::simplify;

VectorField::VectorField(int dimension) : coeffs_(static_cast<std::size_t>(dimension)) {
  if (dimension < 1) throw DimensionError("vector field dimension must be >= 1");
}

VectorField::VectorField(std::vector<Expr> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw DimensionError("vector field needs at least one coefficient");
  const int d = dimension();
  for (const auto& c : coeffs_) {
    if (c.max_coordinate() > d) {
      throw DimensionError("coefficient " + c.to_string() + " references a coordinate beyond dimension " +
                           std::to_string(d));
    }
  }
}

VectorField VectorField::parse(std::span<const std::string> coefficients, int dimension) {
  if (static_cast<int>(coefficients.size()) != dimension) {
    throw DimensionError("expected " + std::to_string(dimension) + " coefficients, got " +
                         std::to_string(coefficients.size()));
  }
  std::vector<Expr> exprs;
  exprs.reserve(coefficients.size());
  for (const auto& s : coefficients) exprs.push_back(symexpr::parse(s, dimension));
  return VectorField(std::move(exprs));
}

VectorField VectorField::coordinate(int k, int dimension) {
  if (k < 1 || k > dimension) throw RangeError("coordinate field index out of range");
  VectorField f(dimension);
  f.coeffs_[static_cast<std::size_t>(k - 1)] = Expr::constant(1);
  return f;
}

bool VectorField::is_zero() const noexcept {
  for (const auto& c : coeffs_) {
    if (!c.is_zero()) return false;
  }
  return true;
}

bool VectorField::bounded() const noexcept {
  for (const auto& c : coeffs_) {
    if (!c.bounded()) return false;
  }
  return true;
}

std::vector<double> VectorField::eval(std::span<const double> x) const {
  std::vector<double> out(coeffs_.size());
  eval_into(x, out);
  return out;
}

void VectorField::eval_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != coeffs_.size() || out.size() != coeffs_.size()) {
    throw DimensionError("point dimension does not match field dimension");
  }
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] = coeffs_[k].eval(x);
}

VectorField VectorField::scaled(const symexpr::Rational& c) const {
  std::vector<Expr> out;
  out.reserve(coeffs_.size());
  for (const auto& a : coeffs_) out.push_back(simplify(Expr::constant(c) * a));
  return VectorField(std::move(out));
}

VectorField VectorField::multiplied(const Expr& psi) const {
  std::vector<Expr> out;
  out.reserve(coeffs_.size());
  for (const auto& a : coeffs_) out.push_back(simplify(psi * a));
  return VectorField(std::move(out));
}

VectorField VectorField::operator+(const VectorField& other) const {
  if (other.dimension() != dimension()) throw DimensionError("field dimensions differ");
  std::vector<Expr> out;
  out.reserve(coeffs_.size());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out.push_back(simplify(coeffs_[k] + other.coeffs_[k]));
  return VectorField(std::move(out));
}

VectorField VectorField::operator-() const { return scaled(symexpr::Rational(-1)); }

std::string VectorField::to_string() const {
  std::string s;
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].is_zero()) continue;
    if (!first) s += " + ";
    first = false;
    s += "(" + coeffs_[k].to_string() + ")*d" + std::to_string(k + 1);
  }
  return first ? "0" : s;
}

CompiledField::CompiledField(const VectorField& field) {
  for (const auto& c : field.coefficients()) programs_.emplace_back(c);
}

void CompiledField::operator()(std::span<const double> x, std::span<double> out) const {
  for (std::size_t k = 0; k < programs_.size(); ++k) out[k] = programs_[k](x);
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw RangeError("multi-index must have length >= 1");
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(entries_[i]);
  }
  return s + ")";
}

FieldSystem::FieldSystem(int dimension, std::vector<VectorField> fields, Domain domain)
    : dim_(dimension), fields_(std::move(fields)), domain_(domain), cache_(std::make_shared<Cache>()) {
  if (dim_ < 1) throw DimensionError("system dimension must be >= 1");
  if (fields_.empty()) throw DimensionError("a field system needs at least one field");
  for (const auto& f : fields_) {
    if (f.dimension() != dim_) throw DimensionError("all fields must share the system dimension");
  }
}

const VectorField& FieldSystem::field(int i) const {
  if (i < 1 || i > field_count()) {
    throw RangeError("field index " + std::to_string(i) + " out of range [1," +
                     std::to_string(field_count()) + "]");
  }
  return fields_[static_cast<std::size_t>(i - 1)];
}

VectorField FieldSystem::multi_commutator(const MultiIndex& alpha) const {
  for (int i : alpha.entries()) (void)field(i);
  const auto e = alpha.entries();
  if (e.size() == 1) return field(e[0]);
  const std::vector<int> key(e.begin(), e.end());
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->brackets.find(key); it != cache_->brackets.end()) return it->second;
  }
  const MultiIndex tail(std::vector<int>(e.begin() + 1, e.end()));
  VectorField result = lie_bracket(field(e[0]), multi_commutator(tail));
  std::lock_guard lock(cache_->mutex);
  cache_->brackets.emplace(key, result);
  return result;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.dimension() != y.dimension()) {
    throw DimensionError("lie_bracket: dimensions " + std::to_string(x.dimension()) + " and " +
                         std::to_string(y.dimension()) + " differ");
  }
  const int d = x.dimension();
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) {
    std::vector<Expr> terms;
    for (int j = 1; j <= d; ++j) {
      const Expr& a = x.coefficient(j);
      const Expr& b = y.coefficient(j);
      if (!a.is_zero()) {
        Expr db = differentiate(y.coefficient(k), j);
        if (!db.is_zero()) terms.push_back(a * db);
      }
      if (!b.is_zero()) {
        Expr da = differentiate(x.coefficient(k), j);
        if (!da.is_zero()) terms.push_back(Expr::negate(b * da));
      }
    }
    out.push_back(simplify(Expr::sum(std::move(terms))));
  }
  return VectorField(std::move(out));
}

Expr apply_field(const VectorField& x, const Expr& phi) {
  if (phi.max_coordinate() > x.dimension()) throw DimensionError("apply_field: dimension mismatch");
  std::vector<Expr> terms;
  for (int k = 1; k <= x.dimension(); ++k) {
    const Expr& a = x.coefficient(k);
    if (a.is_zero()) continue;
    Expr d = differentiate(phi, k);
    if (!d.is_zero()) terms.push_back(a * d);
  }
  return simplify(Expr::sum(std::move(terms)));
}

std::size_t multiindex_count(int field_count, int max_length) {
  std::size_t total = 0;
  std::size_t power = 1;
  for (int k = 1; k <= max_length; ++k) {
    power *= static_cast<std::size_t>(field_count);
    total += power;
  }
  return total;
}

std::vector<MultiIndex> enumerate_multiindices(int field_count, int max_length) {
  if (field_count < 1 || max_length < 1) {
    throw RangeError("enumerate_multiindices needs N >= 1 and r >= 1");
  }
  std::vector<MultiIndex> out;
  out.reserve(multiindex_count(field_count, max_length));
  for (int len = 1; len <= max_length; ++len) {
    std::vector<int> digits(static_cast<std::size_t>(len), 1);
    for (;;) {
      out.emplace_back(digits);
      int pos = len - 1;
      while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == field_count) {
        digits[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++digits[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

}  // namespace sublab::vecfield
