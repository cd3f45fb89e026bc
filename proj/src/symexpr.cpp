#include "sublab/symexpr.hpp"

#include "sublab/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <utility>

namespace sublab::symexpr {

namespace detail {

struct Node {
  NodeKind kind = NodeKind::constant;
  Rational value{0};
  double numeric = 0.0;
  int index = 0;
  std::vector<Expr> children;
  bool bounded = true;
  int max_coordinate = 0;
  std::size_t size = 1;
};

}  // namespace detail

namespace {

const Rational kZero{0};

std::shared_ptr<detail::Node> make_node(NodeKind kind, std::vector<Expr> children) {
  auto node = std::make_shared<detail::Node>();
  node->kind = kind;
  node->children = std::move(children);
  const bool trig = kind == NodeKind::sin || kind == NodeKind::cos;
  for (const auto& c : node->children) {
    node->bounded = node->bounded && (trig || c.bounded());
    node->max_coordinate = std::max(node->max_coordinate, c.max_coordinate());
    node->size += c.size();
  }
  return node;
}

std::string rational_literal(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  std::string out = numerator(q).str();
  if (denominator(q) != 1) out += "/" + denominator(q).str();
  return out;
}

// Printing ---------------------------------------------------------------

void print_expr(const Expr& e, std::string& out);
void print_term(const Expr& e, std::string& out);

void print_factor(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant:
      out += rational_literal(e.value());
      return;
    case NodeKind::coordinate:
      out += "x" + std::to_string(e.coordinate_index());
      return;
    case NodeKind::negate:
      out += "-";
      print_factor(e.children()[0], out);
      return;
    case NodeKind::sin:
    case NodeKind::cos:
      out += e.kind() == NodeKind::sin ? "sin(" : "cos(";
      print_expr(e.children()[0], out);
      out += ")";
      return;
    case NodeKind::sum:
    case NodeKind::product:
      out += "(";
      print_expr(e, out);
      out += ")";
      return;
  }
}

void print_term(const Expr& e, std::string& out) {
  if (e.kind() != NodeKind::product) {
    print_factor(e, out);
    return;
  }
  bool first = true;
  for (const auto& f : e.children()) {
    if (!first) out += "*";
    first = false;
    print_factor(f, out);
  }
}

void print_expr(const Expr& e, std::string& out) {
  if (e.kind() != NodeKind::sum) {
    print_term(e, out);
    return;
  }
  bool first = true;
  for (const auto& t : e.children()) {
    if (first) {
      print_term(t, out);
      first = false;
      continue;
    }
    // "a - t" parses as sum(a, negate(t)); negated constants fold the same way.
    if (t.kind() == NodeKind::negate) {
      out += " - ";
      print_term(t.children()[0], out);
    } else if (t.is_constant() && t.value() < 0) {
      out += " - " + rational_literal(-t.value());
    } else {
      out += " + ";
      print_term(t, out);
    }
  }
}

// Parsing ----------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dim_(dimension) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(Expr::negate(term()));
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{factor()};
    while (accept('*')) factors.push_back(factor());
    return Expr::product(std::move(factors));
  }

  std::string digits() {
    std::string out;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      out += text_[pos_++];
    }
    return out;
  }

  Expr rational() {
    const std::size_t start = pos_;
    std::string whole = digits();
    std::string frac;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      frac = digits();
      if (frac.empty()) fail("expected digits after '.'");
    }
    using boost::multiprecision::cpp_int;
    cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational q(decimal(whole + frac), scale);
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      const std::string den = digits();
      if (den.empty()) fail("expected denominator after '/'");
      const cpp_int d = decimal(den);
      if (d == 0) {
        pos_ = start;
        fail("zero denominator in rational literal");
      }
      q /= Rational(d);
    }
    return Expr::constant(q);
  }

  // cpp_int reads a leading 0 as an octal prefix.
  static boost::multiprecision::cpp_int decimal(const std::string& s) {
    const auto nz = s.find_first_not_of('0');
    return nz == std::string::npos ? boost::multiprecision::cpp_int(0) : boost::multiprecision::cpp_int(s.substr(nz));
  }

  Expr factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::negate(factor());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return rational();
    if (c == 'x') {
      const std::size_t start = pos_;
      ++pos_;
      const std::string idx = digits();
      if (idx.empty()) fail("expected coordinate index after 'x'");
      if (idx.size() > 6) {
        pos_ = start;
        throw RangeError("coordinate index " + idx + " out of range [1," + std::to_string(dim_) + "]");
      }
      const int k = std::stoi(idx);
      if (k < 1 || k > dim_) {
        throw RangeError("coordinate x" + idx + " at position " + std::to_string(start) +
                         " out of range [1," + std::to_string(dim_) + "]");
      }
      return Expr::coordinate(k);
    }
    if (text_.substr(pos_, 4) == "sin(" || text_.substr(pos_, 4) == "cos(") {
      const bool is_sin = text_[pos_] == 's';
      pos_ += 4;
      Expr inner = expr();
      expect(')');
      return is_sin ? Expr::sin(inner) : Expr::cos(inner);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

// Simplification ---------------------------------------------------------

struct Monomial {
  Rational coeff{1};
  std::vector<Expr> factors;  // non-constant, sorted by printed key
};

std::string key_of(const std::vector<Expr>& factors) {
  std::string k;
  for (const auto& f : factors) {
    k += f.to_string();
    k += '\x1f';
  }
  return k;
}

Expr build(const Monomial& m) {
  if (m.coeff == 0) return Expr();
  if (m.factors.empty()) return Expr::constant(m.coeff);
  if (m.coeff == 1) return Expr::product(m.factors);
  if (m.coeff == -1) return Expr::negate(Expr::product(m.factors));
  std::vector<Expr> all;
  all.reserve(m.factors.size() + 1);
  all.push_back(Expr::constant(m.coeff));
  all.insert(all.end(), m.factors.begin(), m.factors.end());
  return Expr::product(std::move(all));
}

// Splits a simplified expression into rational coefficient times factors.
Monomial as_monomial(const Expr& e) {
  Monomial m;
  switch (e.kind()) {
    case NodeKind::constant:
      m.coeff = e.value();
      break;
    case NodeKind::negate:
      m = as_monomial(e.children()[0]);
      m.coeff = -m.coeff;
      break;
    case NodeKind::product:
      for (const auto& f : e.children()) {
        if (f.is_constant()) {
          m.coeff *= f.value();
        } else if (f.kind() == NodeKind::negate) {
          Monomial inner = as_monomial(f);
          m.coeff *= inner.coeff;
          m.factors.insert(m.factors.end(), inner.factors.begin(), inner.factors.end());
        } else {
          m.factors.push_back(f);
        }
      }
      break;
    default:
      m.factors.push_back(e);
      break;
  }
  return m;
}

Expr simplify_product(const std::vector<Expr>& children) {
  Monomial m;
  std::vector<Expr> pending(children.begin(), children.end());
  while (!pending.empty()) {
    Expr f = pending.back();
    pending.pop_back();
    if (f.kind() == NodeKind::product) {
      for (const auto& g : f.children()) pending.push_back(g);
      continue;
    }
    Monomial part = as_monomial(f);
    if (part.coeff == 0) return Expr();
    m.coeff *= part.coeff;
    for (auto& g : part.factors) {
      if (g.kind() == NodeKind::product) {
        pending.push_back(g);
      } else {
        m.factors.push_back(g);
      }
    }
  }
  std::vector<std::pair<std::string, Expr>> keyed;
  keyed.reserve(m.factors.size());
  for (auto& f : m.factors) keyed.emplace_back(f.to_string(), f);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  m.factors.clear();
  for (auto& kv : keyed) m.factors.push_back(kv.second);
  return build(m);
}

Expr simplify_sum(const std::vector<Expr>& children) {
  std::vector<Expr> flat;
  std::vector<Expr> pending(children.rbegin(), children.rend());
  while (!pending.empty()) {
    Expr t = pending.back();
    pending.pop_back();
    if (t.kind() == NodeKind::sum) {
      for (auto it = t.children().rbegin(); it != t.children().rend(); ++it) pending.push_back(*it);
    } else {
      flat.push_back(t);
    }
  }
  // Like terms are merged by their printed factor list; first-appearance order is kept.
  std::vector<Monomial> terms;
  std::map<std::string, std::size_t> slot;
  Rational constant{0};
  for (const auto& t : flat) {
    Monomial m = as_monomial(t);
    if (m.factors.empty()) {
      constant += m.coeff;
      continue;
    }
    const std::string k = key_of(m.factors);
    auto it = slot.find(k);
    if (it == slot.end()) {
      slot.emplace(k, terms.size());
      terms.push_back(std::move(m));
    } else {
      terms[it->second].coeff += m.coeff;
    }
  }
  std::vector<Expr> out;
  for (const auto& m : terms) {
    if (m.coeff != 0) out.push_back(build(m));
  }
  if (constant != 0) out.push_back(Expr::constant(constant));
  return Expr::sum(std::move(out));
}

}  // namespace

// Expr -------------------------------------------------------------------

Expr::Expr() : node_(make_node(NodeKind::constant, {})) {}

Expr Expr::constant(const Rational& value) {
  auto node = make_node(NodeKind::constant, {});
  node->value = value;
  node->numeric = value.convert_to<double>();
  return Expr(std::move(node));
}

Expr Expr::coordinate(int k) {
  if (k < 1) throw RangeError("coordinate index must be >= 1, got " + std::to_string(k));
  auto node = make_node(NodeKind::coordinate, {});
  node->index = k;
  node->bounded = false;
  node->max_coordinate = k;
  return Expr(std::move(node));
}

Expr Expr::negate(const Expr& e) {
  if (e.is_constant()) return constant(-e.value());
  if (e.kind() == NodeKind::negate) return e.children()[0];
  return Expr(make_node(NodeKind::negate, {e}));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr();
  if (terms.size() == 1) return terms.front();
  return Expr(make_node(NodeKind::sum, std::move(terms)));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1);
  if (factors.size() == 1) return factors.front();
  return Expr(make_node(NodeKind::product, std::move(factors)));
}

Expr Expr::sin(const Expr& e) { return Expr(make_node(NodeKind::sin, {e})); }
Expr Expr::cos(const Expr& e) { return Expr(make_node(NodeKind::cos, {e})); }

NodeKind Expr::kind() const noexcept { return node_->kind; }
const Rational& Expr::value() const noexcept { return node_->value; }
int Expr::coordinate_index() const noexcept { return node_->index; }
std::span<const Expr> Expr::children() const noexcept { return node_->children; }
bool Expr::is_zero() const noexcept { return is_constant() && node_->value == 0; }
bool Expr::is_one() const noexcept { return is_constant() && node_->value == 1; }
bool Expr::bounded() const noexcept { return node_->bounded; }
int Expr::max_coordinate() const noexcept { return node_->max_coordinate; }
std::size_t Expr::size() const noexcept { return node_->size; }

double Expr::eval(std::span<const double> x) const {
  const auto& n = *node_;
  switch (n.kind) {
    case NodeKind::constant:
      return n.numeric;
    case NodeKind::coordinate:
      if (static_cast<std::size_t>(n.index) > x.size()) {
        throw DimensionError("point of dimension " + std::to_string(x.size()) +
                             " does not contain x" + std::to_string(n.index));
      }
      return x[static_cast<std::size_t>(n.index - 1)];
    case NodeKind::negate:
      return -n.children[0].eval(x);
    case NodeKind::sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += c.eval(x);
      return s;
    }
    case NodeKind::product: {
      double p = 1.0;
      for (const auto& c : n.children) p *= c.eval(x);
      return p;
    }
    case NodeKind::sin:
      return std::sin(n.children[0].eval(x));
    case NodeKind::cos:
      return std::cos(n.children[0].eval(x));
  }
  return 0.0;
}

std::string Expr::to_string() const {
  std::string out;
  print_expr(*this, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (node_ == other.node_) return true;
  const auto& a = *node_;
  const auto& b = *other.node_;
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  if (a.kind == NodeKind::constant) return a.value == b.value;
  if (a.kind == NodeKind::coordinate) return a.index == b.index;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!a.children[i].structurally_equal(b.children[i])) return false;
  }
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::negate(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::negate(a); }

Expr parse(std::string_view text, int dimension) {
  if (dimension < 1) throw RangeError("dimension must be >= 1");
  return Parser(text, dimension).run();
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::constant:
    case NodeKind::coordinate:
      return e;
    case NodeKind::negate:
      return simplify_product({Expr::constant(-1), simplify(e.children()[0])});
    case NodeKind::sum: {
      std::vector<Expr> kids;
      for (const auto& c : e.children()) kids.push_back(simplify(c));
      return simplify_sum(kids);
    }
    case NodeKind::product: {
      std::vector<Expr> kids;
      for (const auto& c : e.children()) {
        Expr s = simplify(c);
        if (s.is_zero()) return Expr();
        kids.push_back(std::move(s));
      }
      return simplify_product(kids);
    }
    case NodeKind::sin:
    case NodeKind::cos: {
      const bool is_sin = e.kind() == NodeKind::sin;
      Expr arg = simplify(e.children()[0]);
      if (arg.is_zero()) return is_sin ? Expr() : Expr::constant(1);
      // Odd/even symmetry: pull a negative leading coefficient out of the argument.
      Monomial m = as_monomial(arg);
      if (m.coeff < 0 && arg.kind() != NodeKind::sum) {
        m.coeff = -m.coeff;
        arg = build(m);
        return is_sin ? Expr::negate(Expr::sin(arg)) : Expr::cos(arg);
      }
      return is_sin ? Expr::sin(arg) : Expr::cos(arg);
    }
  }
  return e;
}

Expr differentiate(const Expr& e, int k) {
  if (k < 1) throw RangeError("coordinate index must be >= 1");
  struct Rec {
    int k;
    Expr operator()(const Expr& e) const {
      switch (e.kind()) {
        case NodeKind::constant:
          return Expr();
        case NodeKind::coordinate:
          return e.coordinate_index() == k ? Expr::constant(1) : Expr();
        case NodeKind::negate:
          return Expr::negate((*this)(e.children()[0]));
        case NodeKind::sum: {
          std::vector<Expr> terms;
          for (const auto& c : e.children()) terms.push_back((*this)(c));
          return Expr::sum(std::move(terms));
        }
        case NodeKind::product: {
          const auto kids = e.children();
          std::vector<Expr> terms;
          for (std::size_t i = 0; i < kids.size(); ++i) {
            Expr di = (*this)(kids[i]);
            if (di.is_zero()) continue;
            std::vector<Expr> f(kids.begin(), kids.end());
            f[i] = di;
            terms.push_back(Expr::product(std::move(f)));
          }
          return Expr::sum(std::move(terms));
        }
        case NodeKind::sin: {
          const Expr& u = e.children()[0];
          return Expr::product({Expr::cos(u), (*this)(u)});
        }
        case NodeKind::cos: {
          const Expr& u = e.children()[0];
          return Expr::negate(Expr::product({Expr::sin(u), (*this)(u)}));
        }
      }
      return Expr();
    }
  };
  if (e.max_coordinate() < k) return Expr();
  return simplify(Rec{k}(e));
}

// Program ----------------------------------------------------------------

Program::Program(const Expr& e) {
  emit(e, 0);
  constant_ = e.max_coordinate() == 0;
}

void Program::emit(const Expr& e, int depth) {
  max_depth_ = std::max(max_depth_, depth + 1);
  switch (e.kind()) {
    case NodeKind::constant:
      code_.push_back({Op::push_const, 0, e.eval(std::span<const double>{})});
      return;
    case NodeKind::coordinate:
      code_.push_back({Op::push_coord, e.coordinate_index() - 1, 0.0});
      return;
    case NodeKind::negate:
      emit(e.children()[0], depth);
      code_.push_back({Op::neg, 0, 0.0});
      return;
    case NodeKind::sin:
    case NodeKind::cos:
      emit(e.children()[0], depth);
      code_.push_back({e.kind() == NodeKind::sin ? Op::sin : Op::cos, 0, 0.0});
      return;
    case NodeKind::sum:
    case NodeKind::product: {
      int d = depth;
      for (const auto& c : e.children()) emit(c, d++);
      code_.push_back({e.kind() == NodeKind::sum ? Op::add : Op::mul,
                       static_cast<int>(e.children().size()), 0.0});
      return;
    }
  }
}

double Program::operator()(std::span<const double> x) const {
  constexpr int kInline = 64;
  std::array<double, kInline> inline_stack{};
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_depth_ > kInline) {
    heap_stack.resize(static_cast<std::size_t>(max_depth_));
    stack = heap_stack.data();
  }
  int top = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::push_const:
        stack[top++] = ins.value;
        break;
      case Op::push_coord:
        stack[top++] = x[static_cast<std::size_t>(ins.arg)];
        break;
      case Op::neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::sin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::cos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::add: {
        double s = 0.0;
        for (int i = 0; i < ins.arg; ++i) s += stack[top - ins.arg + i];
        top -= ins.arg;
        stack[top++] = s;
        break;
      }
      case Op::mul: {
        double p = 1.0;
        for (int i = 0; i < ins.arg; ++i) p *= stack[top - ins.arg + i];
        top -= ins.arg;
        stack[top++] = p;
        break;
      }
    }
  }
  return code_.empty() ? 0.0 : stack[0];
}

}  // namespace sublab::symexpr
