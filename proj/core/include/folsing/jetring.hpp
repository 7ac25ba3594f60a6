#pragma once

// Exact arithmetic in the truncated local ring Q[x_1..x_n] / m^(W+1) and the
// linear-algebraic ideal operations built on it.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "folsing/rational.hpp"

namespace folsing {

/// Variable count n and working order W of a truncated ring.
struct RingDims {
  int vars = 0;
  int order = 0;

  friend bool operator==(const RingDims&, const RingDims&) = default;
};

/// x^alpha. Ordered graded-lexicographically: lower total degree first, and
/// within a degree x_1 before x_2 before ... (so 1 < x < y < x^2 < xy < y^2).
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(int vars) { return Monomial(std::vector<int>(static_cast<std::size_t>(vars), 0)); }
  static Monomial variable(int vars, int index);

  int vars() const noexcept { return static_cast<int>(exponents_.size()); }
  int degree() const noexcept { return degree_; }
  const std::vector<int>& exponents() const noexcept { return exponents_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }

  Monomial operator*(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exponents_ == b.exponents_; }
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// All monomials of exactly `degree` in `vars` variables, in Monomial order.
std::vector<Monomial> monomials_of_degree(int vars, int degree);

/// All monomials of degree <= max_degree (including 1), in Monomial order.
std::vector<Monomial> monomials_up_to(int vars, int max_degree);

/// Polynomial with rational coefficients, every term of degree <= ring.order.
/// Zero coefficients are never stored.
class TruncatedPoly {
 public:
  using Terms = std::map<Monomial, Rational>;

  TruncatedPoly() = default;
  explicit TruncatedPoly(RingDims ring);

  static TruncatedPoly constant(RingDims ring, const Rational& value);
  static TruncatedPoly variable(RingDims ring, int index);
  static TruncatedPoly monomial(RingDims ring, const Monomial& m, const Rational& coefficient = 1);

  RingDims ring() const noexcept { return ring_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const;

  /// Highest total degree present; -1 for the zero polynomial.
  int degree() const noexcept;
  /// Lowest total degree present; nullopt for the zero polynomial.
  std::optional<int> order() const noexcept;

  /// Adds c * m; terms of degree above the working order are dropped.
  void add_term(const Monomial& m, const Rational& c);

  /// Copy with every term of degree > cap removed.
  TruncatedPoly truncated(int cap) const;

  /// The same polynomial viewed in a ring with a different working order
  /// (terms above the new order are dropped).
  TruncatedPoly with_order(int order) const;

  TruncatedPoly& operator+=(const TruncatedPoly& other);
  TruncatedPoly& operator-=(const TruncatedPoly& other);
  TruncatedPoly& operator*=(const Rational& scalar);

  friend TruncatedPoly operator+(TruncatedPoly a, const TruncatedPoly& b) { return a += b; }
  friend TruncatedPoly operator-(TruncatedPoly a, const TruncatedPoly& b) { return a -= b; }
  friend TruncatedPoly operator*(TruncatedPoly a, const Rational& s) { return a *= s; }
  friend TruncatedPoly operator*(const Rational& s, TruncatedPoly a) { return a *= s; }
  TruncatedPoly operator-() const;

  friend bool operator==(const TruncatedPoly& a, const TruncatedPoly& b) {
    return a.ring_ == b.ring_ && a.terms_ == b.terms_;
  }

 private:
  RingDims ring_;
  Terms terms_;
};

/// Exact product with every term of degree > W discarded. Throws InputError
/// on ring mismatch.
TruncatedPoly mul_trunc(const TruncatedPoly& p, const TruncatedPoly& q);

/// As mul_trunc, but discards terms of degree > cap (cap <= W).
TruncatedPoly mul_trunc(const TruncatedPoly& p, const TruncatedPoly& q, int cap);

/// Formal partial derivative with respect to variable `index` (0-based).
TruncatedPoly partial_derivative(const TruncatedPoly& p, int index);

/// Substitutes x_i -> sum_j linear[i][j] x_j.
TruncatedPoly compose_linear(const TruncatedPoly& p, const std::vector<std::vector<Rational>>& linear);

/// Substitutes x_i -> point[i] + x_i (Taylor re-expansion about `point`).
TruncatedPoly translate(const TruncatedPoly& p, std::span<const Rational> point);

/// Re-indexes variables into a larger ring: variable i of `p` becomes
/// variable variable_map[i] of `target`.
TruncatedPoly embed(const TruncatedPoly& p, RingDims target, std::span<const int> variable_map);

/// Sets every variable flagged in `zeroed` to 0.
TruncatedPoly substitute_zero(const TruncatedPoly& p, const std::vector<bool>& zeroed);

/// Human-readable form using the given variable names (x1, x2, ... by default).
std::string to_string(const TruncatedPoly& p, const std::vector<std::string>& names = {});

/// Finitely generated ideal of the truncated ring, optionally plus m^t where t
/// is `tail_order`. The tail is materialized on demand as the list of all
/// degree-t monomials.
class JetIdeal {
 public:
  JetIdeal() = default;
  JetIdeal(RingDims ring, std::vector<TruncatedPoly> generators, std::optional<int> tail_order = std::nullopt);

  RingDims ring() const noexcept { return ring_; }
  const std::vector<TruncatedPoly>& generators() const noexcept { return generators_; }
  std::optional<int> tail_order() const noexcept { return tail_order_; }

  /// True when the tail is present and representable (t <= W).
  bool has_tail() const noexcept { return tail_order_ && *tail_order_ <= ring_.order; }

  /// No generator has a nonzero constant term (the ideal lies in m).
  bool is_proper() const;

  std::vector<TruncatedPoly> tail_monomials() const;

  /// Generators followed by the tail monomials.
  std::vector<TruncatedPoly> all_generators() const;

 private:
  RingDims ring_;
  std::vector<TruncatedPoly> generators_;
  std::optional<int> tail_order_;
};

/// I + J. The tail of the sum is the lower of the two tails.
JetIdeal ideal_sum(const JetIdeal& a, const JetIdeal& b);

/// dim (I + m^2) / m^2: the rank of the degree-1 coefficient matrix of the
/// generators, by fraction-free elimination. Throws PreconditionError if the
/// ideal is not proper.
int ideal_rank(const JetIdeal& ideal);

/// Reduced basis of (I + m^(cap+1)) / m^(cap+1), i.e. of the span of all
/// x^alpha * g truncated at degree cap. Basis elements are returned in order
/// of their lowest (pivot) monomial; each is monic at its pivot.
std::vector<TruncatedPoly> ideal_subspace_basis(const JetIdeal& ideal, int degree_cap);

/// Dimension of the degree-capped subspace.
std::size_t ideal_subspace_dimension(const JetIdeal& ideal, int degree_cap);

/// The two degree-capped subspaces coincide.
bool ideal_equal(const JetIdeal& a, const JetIdeal& b, int degree_cap);

/// p truncated at cap lies in the degree-capped subspace of the ideal.
bool ideal_contains(const JetIdeal& ideal, const TruncatedPoly& p, int degree_cap);

/// Minimal presentation of an ideal that contains its tail m^t (t <= W):
/// lowers the tail to the least s with m^s contained in the ideal and replaces
/// the generators by a minimal generating set modulo m^s (in the sense of
/// I / mI). Generators carrying a linear part come first and have
/// independent linear parts. The result is equal to the input as an ideal.
/// Throws PreconditionError if the ideal has no representable tail.
JetIdeal compact(const JetIdeal& ideal);

}  // namespace folsing
