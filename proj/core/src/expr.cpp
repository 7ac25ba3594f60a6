#include "folsing/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "folsing/errors.hpp"

namespace folsing {

struct Expr::Node {
  Kind kind = Kind::Constant;
  Rational value;
  double value_d = 0.0;
  int index = -1;
  unsigned exponent = 0;
  std::vector<Expr> children;
};

Expr::Expr() : Expr(Expr::constant(0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(const Rational& value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Constant;
  node->value = value;
  node->value.canonicalize();
  node->value_d = node->value.get_d();
  return Expr(std::move(node));
}

Expr Expr::variable(int index) {
  if (index < 0) throw InputError("variable index must be nonnegative");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Variable;
  node->index = index;
  return Expr(std::move(node));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_zero() const noexcept { return node_->kind == Kind::Constant && node_->value == 0; }

const Rational& Expr::value() const {
  if (node_->kind != Kind::Constant) throw InputError("Expr::value on a non-constant node");
  return node_->value;
}

int Expr::variable_index() const {
  if (node_->kind != Kind::Variable) throw InputError("Expr::variable_index on a non-variable node");
  return node_->index;
}

const std::vector<Expr>& Expr::children() const noexcept { return node_->children; }

unsigned Expr::exponent() const noexcept { return node_->exponent; }

namespace {

bool is_one(const Expr& e) { return e.is_constant() && e.value() == 1; }

}  // namespace

// The builders fold constants and drop neutral elements so that repeated
// differentiation stays small.

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  std::vector<Expr> terms;
  for (const Expr* e : {&a, &b}) {
    if (e->kind() == Expr::Kind::Sum) {
      terms.insert(terms.end(), e->children().begin(), e->children().end());
    } else {
      terms.push_back(*e);
    }
  }
  return Expr::make_nary(Expr::Kind::Sum, std::move(terms));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::Negate) return a.children().front();
  auto node = std::make_shared<Expr::Node>();
  node->kind = Expr::Kind::Negate;
  node->children = {a};
  return Expr(std::move(node));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr::constant(0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  std::vector<Expr> factors;
  for (const Expr* e : {&a, &b}) {
    if (e->kind() == Expr::Kind::Product) {
      factors.insert(factors.end(), e->children().begin(), e->children().end());
    } else {
      factors.push_back(*e);
    }
  }
  return Expr::make_nary(Expr::Kind::Product, std::move(factors));
}

Expr pow(const Expr& base, unsigned exponent) {
  if (exponent == 0) return Expr::constant(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    Rational r = 1;
    for (unsigned k = 0; k < exponent; ++k) r *= base.value();
    return Expr::constant(r);
  }
  auto node = std::make_shared<Expr::Node>();
  node->kind = Expr::Kind::Power;
  node->exponent = exponent;
  node->children = {base};
  return Expr(std::move(node));
}

Expr Expr::make_nary(Kind kind, std::vector<Expr> children) {
  // Fold all constant children into one.
  Rational folded = kind == Expr::Kind::Sum ? Rational(0) : Rational(1);
  std::vector<Expr> rest;
  for (auto& c : children) {
    if (c.is_constant()) {
      if (kind == Expr::Kind::Sum) {
        folded += c.value();
      } else {
        folded *= c.value();
      }
    } else {
      rest.push_back(std::move(c));
    }
  }
  if (kind == Expr::Kind::Product && folded == 0) return Expr::constant(0);
  const bool neutral = kind == Expr::Kind::Sum ? folded == 0 : folded == 1;
  if (!neutral) rest.insert(rest.begin(), Expr::constant(folded));
  if (rest.empty()) return Expr::constant(folded);
  if (rest.size() == 1) return rest.front();
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = std::move(rest);
  return Expr(std::move(node));
}

double Expr::eval(std::span<const double> point) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return n.value_d;
    case Kind::Variable:
      if (static_cast<std::size_t>(n.index) >= point.size()) throw InputError("evaluation point too short");
      return point[static_cast<std::size_t>(n.index)];
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += c.eval(point);
      return s;
    }
    case Kind::Product: {
      double p = 1.0;
      for (const auto& c : n.children) p *= c.eval(point);
      return p;
    }
    case Kind::Power: {
      const double b = n.children.front().eval(point);
      double r = 1.0;
      for (unsigned k = 0; k < n.exponent; ++k) r *= b;
      return r;
    }
    case Kind::Negate:
      return -n.children.front().eval(point);
  }
  return 0.0;
}

Rational Expr::eval_exact(std::span<const Rational> point) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable:
      if (static_cast<std::size_t>(n.index) >= point.size()) throw InputError("evaluation point too short");
      return point[static_cast<std::size_t>(n.index)];
    case Kind::Sum: {
      Rational s = 0;
      for (const auto& c : n.children) s += c.eval_exact(point);
      return s;
    }
    case Kind::Product: {
      Rational p = 1;
      for (const auto& c : n.children) p *= c.eval_exact(point);
      return p;
    }
    case Kind::Power: {
      const Rational b = n.children.front().eval_exact(point);
      Rational r = 1;
      for (unsigned k = 0; k < n.exponent; ++k) r *= b;
      return r;
    }
    case Kind::Negate:
      return -n.children.front().eval_exact(point);
  }
  return 0;
}

Expr Expr::derivative(int index) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return Expr::constant(0);
    case Kind::Variable:
      return Expr::constant(n.index == index ? 1 : 0);
    case Kind::Sum: {
      Expr s = Expr::constant(0);
      for (const auto& c : n.children) s = s + c.derivative(index);
      return s;
    }
    case Kind::Product: {
      // Leibniz rule over all factors.
      Expr total = Expr::constant(0);
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        Expr dk = n.children[k].derivative(index);
        if (dk.is_zero()) continue;
        Expr term = dk;
        for (std::size_t j = 0; j < n.children.size(); ++j) {
          if (j != k) term = term * n.children[j];
        }
        total = total + term;
      }
      return total;
    }
    case Kind::Power: {
      const Expr& base = n.children.front();
      Expr db = base.derivative(index);
      if (db.is_zero()) return Expr::constant(0);
      return Expr::constant(static_cast<long>(n.exponent)) * pow(base, n.exponent - 1) * db;
    }
    case Kind::Negate:
      return -n.children.front().derivative(index);
  }
  return Expr::constant(0);
}

int Expr::degree_bound() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return 0;
    case Kind::Variable:
      return 1;
    case Kind::Sum: {
      int d = 0;
      for (const auto& c : n.children) d = std::max(d, c.degree_bound());
      return d;
    }
    case Kind::Product: {
      int d = 0;
      for (const auto& c : n.children) d += c.degree_bound();
      return d;
    }
    case Kind::Power:
      return static_cast<int>(n.exponent) * n.children.front().degree_bound();
    case Kind::Negate:
      return n.children.front().degree_bound();
  }
  return 0;
}

bool Expr::depends_on(int index) const {
  const Node& n = *node_;
  if (n.kind == Kind::Variable) return n.index == index;
  return std::any_of(n.children.begin(), n.children.end(), [&](const Expr& c) { return c.depends_on(index); });
}

int Expr::max_variable() const {
  const Node& n = *node_;
  if (n.kind == Kind::Variable) return n.index;
  int m = -1;
  for (const auto& c : n.children) m = std::max(m, c.max_variable());
  return m;
}

Expr substitute(const Expr& e, const std::vector<Expr>& values) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e;
    case Expr::Kind::Variable: {
      const auto idx = static_cast<std::size_t>(e.variable_index());
      if (idx >= values.size()) throw InputError("substitute: variable without replacement");
      return values[idx];
    }
    case Expr::Kind::Sum: {
      Expr s = Expr::constant(0);
      for (const auto& c : e.children()) s = s + substitute(c, values);
      return s;
    }
    case Expr::Kind::Product: {
      Expr p = Expr::constant(1);
      for (const auto& c : e.children()) p = p * substitute(c, values);
      return p;
    }
    case Expr::Kind::Power:
      return pow(substitute(e.children().front(), values), e.exponent());
    case Expr::Kind::Negate:
      return -substitute(e.children().front(), values);
  }
  return e;
}

namespace {

TruncatedPoly expand(const Expr& e, RingDims ring) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return TruncatedPoly::constant(ring, e.value());
    case Expr::Kind::Variable:
      if (e.variable_index() >= ring.vars) throw InputError("expression uses a variable outside the chart");
      return TruncatedPoly::variable(ring, e.variable_index());
    case Expr::Kind::Sum: {
      TruncatedPoly s(ring);
      for (const auto& c : e.children()) s += expand(c, ring);
      return s;
    }
    case Expr::Kind::Product: {
      TruncatedPoly p = TruncatedPoly::constant(ring, 1);
      for (const auto& c : e.children()) p = mul_trunc(p, expand(c, ring));
      return p;
    }
    case Expr::Kind::Power: {
      const TruncatedPoly base = expand(e.children().front(), ring);
      TruncatedPoly p = TruncatedPoly::constant(ring, 1);
      for (unsigned k = 0; k < e.exponent(); ++k) p = mul_trunc(p, base);
      return p;
    }
    case Expr::Kind::Negate:
      return -expand(e.children().front(), ring);
  }
  return TruncatedPoly(ring);
}

// Terminating fractions print as decimals so the text reparses; the rest
// fall back to "a/b", which is display only.
std::string constant_text(const Rational& value) {
  Integer den = value.get_den();
  int digits = 0;
  Integer scale = 1;
  while (den != 1) {
    if (den % 10 == 0) {
      den /= 10;
    } else if (den % 2 == 0) {
      den /= 2;
      scale *= 5;
    } else if (den % 5 == 0) {
      den /= 5;
      scale *= 2;
    } else {
      return value.get_str();
    }
    ++digits;
  }
  if (digits == 0) return value.get_str();
  const Integer num = value.get_num();
  Integer scaled = abs(num) * scale;
  std::string text = scaled.get_str();
  if (static_cast<int>(text.size()) <= digits) text.insert(0, static_cast<std::size_t>(digits) + 1 - text.size(), '0');
  text.insert(text.size() - static_cast<std::size_t>(digits), ".");
  return (num < 0 ? "-" : "") + text;
}

void print(const Expr& e, const std::vector<std::string>& names, std::ostringstream& out, int parent_precedence) {
  // Precedences: sum 1, product 2, negate 3, power 4, atoms 5.
  auto name = [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    return idx < names.size() ? names[idx] : "z" + std::to_string(i);
  };
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      const bool negative = e.value() < 0;
      const std::string text = constant_text(e.value());
      const bool fraction = text.find('/') != std::string::npos;
      const bool wrap = (negative && parent_precedence > 1) || (fraction && parent_precedence > 2);
      if (wrap) out << "(";
      out << text;
      if (wrap) out << ")";
      return;
    }
    case Expr::Kind::Variable:
      out << name(e.variable_index());
      return;
    case Expr::Kind::Sum: {
      if (parent_precedence > 1) out << "(";
      for (std::size_t k = 0; k < e.children().size(); ++k) {
        const Expr& c = e.children()[k];
        if (k > 0) {
          if (c.kind() == Expr::Kind::Negate) {
            out << " - ";
            print(c.children().front(), names, out, 2);
            continue;
          }
          out << " + ";
        }
        print(c, names, out, 1);
      }
      if (parent_precedence > 1) out << ")";
      return;
    }
    case Expr::Kind::Product: {
      if (parent_precedence > 2) out << "(";
      for (std::size_t k = 0; k < e.children().size(); ++k) {
        if (k > 0) out << "*";
        print(e.children()[k], names, out, 3);
      }
      if (parent_precedence > 2) out << ")";
      return;
    }
    case Expr::Kind::Power:
      print(e.children().front(), names, out, 5);
      out << "^" << e.exponent();
      return;
    case Expr::Kind::Negate:
      if (parent_precedence > 1) out << "(";
      out << "-";
      print(e.children().front(), names, out, 3);
      if (parent_precedence > 1) out << ")";
      return;
  }
}

}  // namespace

TruncatedPoly Expr::to_polynomial(int vars) const { return expand(*this, RingDims{vars, degree_bound()}); }

std::string Expr::to_string(const std::vector<std::string>& names) const {
  std::ostringstream out;
  print(*this, names, out, 0);
  return out.str();
}

std::vector<std::string> chart_variable_names(int leaf_dim, int transverse_dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= leaf_dim; ++i) names.push_back("x" + std::to_string(i));
  for (int j = 1; j <= transverse_dim; ++j) names.push_back("v" + std::to_string(j));
  return names;
}

}  // namespace folsing
