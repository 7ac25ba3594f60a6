#pragma once

// Thom-Boardman symbols of polynomial jets via iterated Jacobian extensions,
// together with the combinatorics of the strata (codimension, nonemptiness,
// ordering).

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "folsing/jetring.hpp"

namespace folsing {

/// Finite integer tuple (i_1, ..., i_k).
class BoardmanSymbol {
 public:
  BoardmanSymbol() = default;
  BoardmanSymbol(std::initializer_list<int> entries) : entries_(entries) {}
  explicit BoardmanSymbol(std::vector<int> entries) : entries_(std::move(entries)) {}

  const std::vector<int>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  int operator[](std::size_t i) const { return entries_[i]; }

  bool is_nonincreasing() const;

  /// The j-fold left shift (i_{j+1}, ..., i_k).
  BoardmanSymbol shifted(std::size_t j) const;

  /// First `count` entries.
  BoardmanSymbol prefix(std::size_t count) const;

  /// "(2,1,0)"
  std::string to_string() const;

  friend bool operator==(const BoardmanSymbol&, const BoardmanSymbol&) = default;

 private:
  std::vector<int> entries_;
};

/// k-jet at 0 of a map (R^n, 0) -> (R^p, 0).
struct MapJet {
  int source_dim = 0;
  int target_dim = 0;
  int order = 0;
  std::vector<TruncatedPoly> components;

  /// Throws InputError unless there are target_dim components in source_dim
  /// variables, each without constant term and of degree <= order.
  void validate() const;
};

/// k-jet at 0 of a function on the product chart R^n (leaf) x R^q
/// (transverse). Variables 0..n-1 are leaf coordinates, n..n+q-1 transverse.
struct FoliatedJet {
  int leaf_dim = 0;
  int transverse_dim = 0;
  int order = 0;
  TruncatedPoly function;

  void validate() const;
};

/// I(z) = (f_1, ..., f_p) + m^(k+1), in the ring of working order k+1.
JetIdeal jet_ideal(const MapJet& z);

/// Delta_r(I) = I + all r x r minors of the Jacobian matrix (D_i g_j) over the
/// full generator list, tail monomials included. Minors are truncated at the
/// ring's working order. Throws InputError unless 1 <= r <= min(n, a).
JetIdeal jacobian_extension(const JetIdeal& ideal, int r);

/// delta(I) = Delta_{rk(I)+1}(I), returned in compact presentation when the
/// ideal carries its tail. Throws PreconditionError for a non-proper input and
/// InvariantViolation if the result fails to be proper.
JetIdeal delta(const JetIdeal& ideal);

/// I, delta(I), ..., delta^(count-1)(I).
std::vector<JetIdeal> delta_chain(const JetIdeal& ideal, int count);

/// (n - r_1, ..., n - r_k) with r_l = rk(delta^(l-1)(I(z))).
BoardmanSymbol boardman_symbol(const MapJet& z);

/// The jet of f restricted to the leaf through 0 (transverse variables set
/// to 0), as an element of J^k(n, 1).
MapJet leaf_restriction(const FoliatedJet& z);

/// The map jet of x -> (f(x), v_1, ..., v_q) in J^k(n+q, 1+q).
MapJet augmented_map(const FoliatedJet& z);

struct FoliatedSymbols {
  BoardmanSymbol leafwise;   ///< symbol of the leaf restriction
  BoardmanSymbol map_jet;    ///< symbol of the augmented map jet
};

/// Both pipelines, without comparing them.
FoliatedSymbols foliated_symbol_pipelines(const FoliatedJet& z);

/// Leafwise symbol; throws InvariantViolation if the augmented-map pipeline
/// disagrees. Off the leafwise critical locus the computed symbol (starting
/// below n) is still returned.
BoardmanSymbol foliated_symbol(const FoliatedJet& z);

/// delta^l(I(j^k f~)) equals (v_1..v_q) + delta^l(I(leaf restriction)) as
/// ideals of the big ring. Requires 0 <= l <= k-1.
bool clara_check(const FoliatedJet& z, int level);

/// Number of sequences j_1 >= ... >= j_l with i_r >= j_r >= 0 and j_1 > 0.
std::int64_t mu(const BoardmanSymbol& symbol);

/// Nonincreasing, bounded by n, and either i_1 > n - p or
/// i_1 = n - p with all entries equal.
bool symbol_nonempty(const BoardmanSymbol& symbol, int n, int p);

/// Codimension of Sigma^I in J^k(n, p). Throws PreconditionError when the
/// stratum is empty.
std::int64_t stratum_codim(const BoardmanSymbol& symbol, int n, int p);

struct SymbolStratum {
  BoardmanSymbol symbol;
  std::int64_t codim = 0;
};

/// Nonempty symbols of length 1..k that do not end in more than one zero and
/// have 1 <= codim <= codim_cap, sorted by codim then lexicographically.
std::vector<SymbolStratum> enumerate_symbols(int n, int p, int k, std::int64_t codim_cap);

/// Lexicographic I >= J; a proper prefix is smaller than its extensions.
bool symbol_lex_geq(const BoardmanSymbol& a, const BoardmanSymbol& b);

/// A stratum Sigma_d^I of the foliated singular locus.
struct StratumKey {
  int d = 0;
  BoardmanSymbol symbol;
};

/// Sigma_d^I <= Sigma_e^J  iff  (n - d, I) >= (n - e, J) lexicographically.
bool stratum_order_leq(int n, const StratumKey& a, const StratumKey& b);

}  // namespace folsing
