#pragma once

// Immutable polynomial expression trees over leaf variables x1..xn and
// transverse variables v1..vq. Variables are indexed 0..n-1 (leaf) then
// n..n+q-1 (transverse).

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folsing/jetring.hpp"
#include "folsing/rational.hpp"

namespace folsing {

class Expr {
 public:
  enum class Kind { Constant, Variable, Sum, Product, Power, Negate };

  /// The zero constant.
  Expr();

  static Expr constant(const Rational& value);
  static Expr variable(int index);

  Kind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == Kind::Constant; }
  bool is_zero() const noexcept;
  /// Value of a Constant node.
  const Rational& value() const;
  /// Index of a Variable node.
  int variable_index() const;
  const std::vector<Expr>& children() const noexcept;
  unsigned exponent() const noexcept;

  double eval(std::span<const double> point) const;
  Rational eval_exact(std::span<const Rational> point) const;

  Expr derivative(int index) const;

  /// Upper bound on the total degree.
  int degree_bound() const;
  bool depends_on(int index) const;
  /// Largest variable index used; -1 for a constant expression.
  int max_variable() const;

  /// Exact expansion in `vars` variables; the ring order is the degree bound.
  TruncatedPoly to_polynomial(int vars) const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, unsigned exponent);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  static Expr make_nary(Kind kind, std::vector<Expr> children);
  std::shared_ptr<const Node> node_;
};

/// Replaces variable i by values[i]. Throws InputError if the expression
/// uses a variable without replacement.
Expr substitute(const Expr& e, const std::vector<Expr>& values);

/// Conventional names: x1..xn then v1..vq.
std::vector<std::string> chart_variable_names(int leaf_dim, int transverse_dim);

/// Parses the chart expression grammar: identifiers x1..xn and v1..vq,
/// operators + - * ^ (nonnegative integer exponent), parentheses and decimal
/// literals; whitespace is ignored. Throws ParseError with line and column.
Expr parse_expression(std::string_view text, int leaf_dim, int transverse_dim);

}  // namespace folsing
