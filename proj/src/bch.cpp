#include "sublab/bch.hpp"

#include "sublab/error.hpp"

#include <utility>

namespace sublab::bch {

FreePolynomial FreePolynomial::one(int max_degree) {
  FreePolynomial p(max_degree);
  p.add_term({}, Rational(1));
  return p;
}

FreePolynomial FreePolynomial::letter(int which, int max_degree) {
  FreePolynomial p(max_degree);
  if (max_degree >= 1) p.add_term({which}, Rational(1));
  return p;
}

Rational FreePolynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Rational(0) : it->second;
}

void FreePolynomial::add_term(const Word& w, const Rational& c) {
  if (static_cast<int>(w.size()) > max_degree_ || c == 0) return;
  auto [it, inserted] = terms_.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

FreePolynomial FreePolynomial::homogeneous(int degree) const {
  FreePolynomial out(max_degree_);
  for (const auto& [w, c] : terms_) {
    if (static_cast<int>(w.size()) == degree) out.terms_.emplace(w, c);
  }
  return out;
}

int FreePolynomial::lowest_degree() const noexcept {
  int best = -1;
  for (const auto& kv : terms_) {
    const int d = static_cast<int>(kv.first.size());
    if (best < 0 || d < best) best = d;
  }
  return best;
}

FreePolynomial FreePolynomial::operator+(const FreePolynomial& o) const {
  FreePolynomial out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, c);
  return out;
}

FreePolynomial FreePolynomial::operator-(const FreePolynomial& o) const {
  FreePolynomial out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, -c);
  return out;
}

FreePolynomial FreePolynomial::operator*(const FreePolynomial& o) const {
  FreePolynomial out(std::min(max_degree_, o.max_degree_));
  for (const auto& [u, cu] : terms_) {
    for (const auto& [v, cv] : o.terms_) {
      if (static_cast<int>(u.size() + v.size()) > out.max_degree_) continue;
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      out.add_term(w, cu * cv);
    }
  }
  return out;
}

FreePolynomial FreePolynomial::operator*(const Rational& c) const {
  FreePolynomial out(max_degree_);
  for (const auto& [w, cw] : terms_) out.add_term(w, cw * c);
  return out;
}

FreePolynomial exp_series(const FreePolynomial& x) {
  if (x.coefficient({}) != 0) throw Error(ErrorKind::invalid_argument, "exp_series needs zero constant term");
  const int n = x.max_degree();
  FreePolynomial result = FreePolynomial::one(n);
  FreePolynomial power = FreePolynomial::one(n);
  Rational factorial(1);
  for (int k = 1; k <= n; ++k) {
    power = power * x;
    if (power.is_zero()) break;
    factorial *= k;
    result = result + power * (Rational(1) / factorial);
  }
  return result;
}

FreePolynomial log_series(const FreePolynomial& p) {
  if (p.coefficient({}) != 1) throw Error(ErrorKind::invalid_argument, "log_series needs constant term 1");
  const int n = p.max_degree();
  const FreePolynomial y = p - FreePolynomial::one(n);
  FreePolynomial result(n);
  FreePolynomial power = FreePolynomial::one(n);
  for (int k = 1; k <= n; ++k) {
    power = power * y;
    if (power.is_zero()) break;
    const Rational c = Rational(k % 2 == 1 ? 1 : -1) / k;
    result = result + power * c;
  }
  return result;
}

namespace {

FreePolynomial expand_word_bracket(const Word& w, int max_degree) {
  FreePolynomial acc = FreePolynomial::letter(w.back(), max_degree);
  for (auto it = w.rbegin() + 1; it != w.rend(); ++it) {
    const FreePolynomial l = FreePolynomial::letter(*it, max_degree);
    acc = l * acc - acc * l;
  }
  return acc;
}

}  // namespace

FreePolynomial expand_brackets(const BracketCombination& combo, int max_degree) {
  FreePolynomial out(max_degree);
  for (const auto& [w, c] : combo) {
    if (w.empty()) continue;
    out = out + expand_word_bracket(w, max_degree) * c;
  }
  return out;
}

BracketCombination dynkin_projection(const FreePolynomial& homogeneous, int degree) {
  BracketCombination out;
  for (const auto& [w, c] : homogeneous.terms()) {
    if (static_cast<int>(w.size()) != degree) {
      throw Error(ErrorKind::invalid_argument, "dynkin_projection expects a homogeneous component");
    }
    Word key = w;
    Rational coeff = c / degree;
    if (key.size() >= 2) {
      auto& p = key[key.size() - 2];
      auto& q = key[key.size() - 1];
      if (p == q) continue;
      if (p > q) {
        std::swap(p, q);
        coeff = -coeff;
      }
    }
    auto [it, inserted] = out.emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0) out.erase(it);
    }
  }
  return out;
}

CorrectionSeries correction_series(int order) {
  if (order < 2) throw RangeError("BCH correction order must be >= 2");
  if (order > kMaxOrder) {
    throw CapError("BCH correction order " + std::to_string(order) + " exceeds cap " + std::to_string(kMaxOrder));
  }
  const int n = order;
  const auto a = FreePolynomial::letter(1, n);
  const auto b = FreePolynomial::letter(2, n);
  const FreePolynomial base = exp_series(a + b) * exp_series(a * Rational(-1)) * exp_series(b * Rational(-1));

  CorrectionSeries series;
  series.order = order;
  FreePolynomial product = base;
  for (int j = 2; j <= n; ++j) {
    const FreePolynomial log = log_series(product);
    const int low = log.lowest_degree();
    if (low >= 0 && low < j) {
      throw NumericalError("BCH construction left a nonzero component of degree " + std::to_string(low));
    }
    const FreePolynomial component = log.homogeneous(j);
    BracketCombination z = dynkin_projection(component, j);
    const FreePolynomial z_poly = expand_brackets(z, n);
    if (!(z_poly == component)) {
      throw NumericalError("degree-" + std::to_string(j) + " log component is not a Lie element");
    }
    product = product * exp_series(z_poly * Rational(-1));
    series.brackets.push_back(std::move(z));
  }
  series.corrected_log = log_series(product);
  return series;
}

std::vector<vecfield::VectorField> bch_correction_fields(const vecfield::VectorField& y1,
                                                        const vecfield::VectorField& y2, int order) {
  if (y1.dimension() != y2.dimension()) throw DimensionError("bch_correction_fields: dimensions differ");
  const CorrectionSeries series = correction_series(order);
  const vecfield::FieldSystem pair(y1.dimension(), {y1, y2});
  std::vector<vecfield::VectorField> out;
  for (const auto& combo : series.brackets) {
    vecfield::VectorField z(y1.dimension());
    for (const auto& [w, c] : combo) {
      z = z + pair.multi_commutator(vecfield::MultiIndex(w)).scaled(c);
    }
    out.push_back(std::move(z));
  }
  return out;
}

std::string to_string(const BracketCombination& combo) {
  std::string s;
  for (const auto& [w, c] : combo) {
    if (!s.empty()) s += " + ";
    s += "(" + c.str() + ")*Y[";
    for (std::size_t i = 0; i < w.size(); ++i) s += std::to_string(w[i]);
    s += "]";
  }
  return s.empty() ? "0" : s;
}

}  // namespace sublab::bch
