#include "folsing/boardman.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "folsing/errors.hpp"

namespace folsing {

// ----------------------------------------------------------- BoardmanSymbol

bool BoardmanSymbol::is_nonincreasing() const {
  return std::is_sorted(entries_.begin(), entries_.end(), std::greater<>());
}

BoardmanSymbol BoardmanSymbol::shifted(std::size_t j) const {
  if (j >= entries_.size()) return {};
  return BoardmanSymbol(std::vector<int>(entries_.begin() + static_cast<long>(j), entries_.end()));
}

BoardmanSymbol BoardmanSymbol::prefix(std::size_t count) const {
  count = std::min(count, entries_.size());
  return BoardmanSymbol(std::vector<int>(entries_.begin(), entries_.begin() + static_cast<long>(count)));
}

std::string BoardmanSymbol::to_string() const {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) out << (i ? "," : "") << entries_[i];
  out << ")";
  return out.str();
}

// ------------------------------------------------------------------- jets

void MapJet::validate() const {
  if (source_dim < 1 || target_dim < 1) throw InputError("map jet dimensions must be positive");
  if (order < 1) throw InputError("jet order must be >= 1");
  if (static_cast<int>(components.size()) != target_dim) throw InputError("map jet component count != target_dim");
  for (const auto& c : components) {
    if (c.ring().vars != source_dim) throw InputError("map jet component has the wrong variable count");
    if (c.constant_term() != 0) throw InputError("map jet component does not vanish at 0");
    if (c.degree() > order) throw InputError("map jet component exceeds the jet order");
  }
}

void FoliatedJet::validate() const {
  if (leaf_dim < 1 || transverse_dim < 0) throw InputError("foliated jet needs leaf_dim >= 1 and transverse_dim >= 0");
  if (order < 1) throw InputError("jet order must be >= 1");
  if (function.ring().vars != leaf_dim + transverse_dim) throw InputError("foliated jet has the wrong variable count");
  if (function.constant_term() != 0) throw InputError("foliated jet does not vanish at 0");
  if (function.degree() > order) throw InputError("foliated jet exceeds the jet order");
}

JetIdeal jet_ideal(const MapJet& z) {
  z.validate();
  const RingDims ring{z.source_dim, z.order + 1};
  std::vector<TruncatedPoly> gens;
  for (const auto& c : z.components) {
    auto g = c.with_order(ring.order);
    if (!g.is_zero()) gens.push_back(std::move(g));
  }
  return JetIdeal(ring, std::move(gens), z.order + 1);
}

// ---------------------------------------------------- Jacobian extensions

namespace {

using PolyMatrix = std::vector<std::vector<TruncatedPoly>>;

// Determinant of the square submatrix on (rows x cols) by cofactor expansion,
// truncated at cap.
TruncatedPoly minor_determinant(const PolyMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols,
                                int cap, RingDims ring) {
  const std::size_t size = rows.size();
  if (size == 1) return m[static_cast<std::size_t>(rows[0])][static_cast<std::size_t>(cols[0])].truncated(cap);
  TruncatedPoly det(ring);
  std::vector<int> rest(cols.begin() + 1, cols.end());
  for (std::size_t k = 0; k < size; ++k) {
    const auto& entry = m[static_cast<std::size_t>(rows[k])][static_cast<std::size_t>(cols[0])];
    if (entry.is_zero()) continue;
    std::vector<int> sub_rows;
    sub_rows.reserve(size - 1);
    for (std::size_t i = 0; i < size; ++i) {
      if (i != k) sub_rows.push_back(rows[i]);
    }
    auto cofactor = mul_trunc(entry, minor_determinant(m, sub_rows, rest, cap, ring), cap);
    if (k % 2 == 0) {
      det += cofactor;
    } else {
      det -= cofactor;
    }
  }
  return det;
}

void for_each_subset(int universe, int size, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> current;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(current.size()) == size) {
      visit(current);
      return;
    }
    for (int i = start; i <= universe - (size - static_cast<int>(current.size())); ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

// I + r x r minors of the Jacobian of the generator list, each truncated at
// cap. Column subsets whose minors provably vanish below degree cap + 1 are
// skipped: a minor has order at least the sum of its column orders.
JetIdeal extend_with_minors(const JetIdeal& ideal, int r, int cap) {
  const RingDims ring = ideal.ring();
  const auto columns = ideal.all_generators();
  const int n = ring.vars;

  PolyMatrix jac(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& g : columns) jac[static_cast<std::size_t>(i)].push_back(partial_derivative(g, i));
  }

  struct Column {
    int index;
    int order;
  };
  std::vector<Column> live;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    int order = -1;
    for (int i = 0; i < n; ++i) {
      if (auto o = jac[static_cast<std::size_t>(i)][j].order(); o && (order < 0 || *o < order)) order = *o;
    }
    if (order >= 0 && order <= cap) live.push_back({static_cast<int>(j), order});
  }
  std::stable_sort(live.begin(), live.end(), [](const Column& a, const Column& b) { return a.order < b.order; });

  std::vector<TruncatedPoly> generators = ideal.generators();
  std::vector<std::vector<int>> row_subsets;
  for_each_subset(n, r, [&](const std::vector<int>& rows) { row_subsets.push_back(rows); });

  std::vector<int> chosen;
  std::function<void(std::size_t, int)> choose = [&](std::size_t start, int order_sum) {
    const int remaining = r - static_cast<int>(chosen.size());
    if (remaining == 0) {
      for (const auto& rows : row_subsets) {
        auto minor = minor_determinant(jac, rows, chosen, cap, ring);
        if (!minor.is_zero()) generators.push_back(std::move(minor));
      }
      return;
    }
    for (std::size_t k = start; k + static_cast<std::size_t>(remaining) <= live.size(); ++k) {
      // Sorted by order: every later completion costs at least this much.
      if (order_sum + remaining * live[k].order > cap) break;
      chosen.push_back(live[k].index);
      choose(k + 1, order_sum + live[k].order);
      chosen.pop_back();
    }
  };
  choose(0, 0);

  return JetIdeal(ring, std::move(generators), ideal.tail_order());
}

std::size_t generator_count(const JetIdeal& ideal) {
  return ideal.generators().size() + ideal.tail_monomials().size();
}

}  // namespace

JetIdeal jacobian_extension(const JetIdeal& ideal, int r) {
  const int n = ideal.ring().vars;
  const auto a = static_cast<int>(generator_count(ideal));
  if (r < 1 || r > std::min(n, a)) {
    throw InputError("jacobian_extension: minor size " + std::to_string(r) + " outside [1, " +
                     std::to_string(std::min(n, a)) + "]");
  }
  return extend_with_minors(ideal, r, ideal.ring().order);
}

JetIdeal delta(const JetIdeal& ideal) {
  if (!ideal.is_proper()) throw PreconditionError("delta: ideal is not proper");
  const JetIdeal base = ideal.has_tail() ? compact(ideal) : ideal;
  const int r = ideal_rank(base);
  const int n = base.ring().vars;
  const auto a = static_cast<int>(generator_count(base));
  if (r + 1 > std::min(n, a)) return base;  // no minors of that size exist

  // Everything of degree >= t already lies in the ideal when it contains m^t.
  const int cap = base.has_tail() ? *base.tail_order() - 1 : base.ring().order;
  JetIdeal extended = extend_with_minors(base, r + 1, cap);
  if (!extended.is_proper()) throw InvariantViolation("delta: Jacobian extension produced a unit");
  if (extended.has_tail()) extended = compact(extended);
  return extended;
}

std::vector<JetIdeal> delta_chain(const JetIdeal& ideal, int count) {
  std::vector<JetIdeal> chain;
  if (count <= 0) return chain;
  chain.push_back(ideal);
  while (static_cast<int>(chain.size()) < count) chain.push_back(delta(chain.back()));
  return chain;
}

BoardmanSymbol boardman_symbol(const MapJet& z) {
  const auto chain = delta_chain(jet_ideal(z), z.order);
  std::vector<int> entries;
  entries.reserve(chain.size());
  for (const auto& ideal : chain) entries.push_back(z.source_dim - ideal_rank(ideal));
  return BoardmanSymbol(std::move(entries));
}

// ------------------------------------------------------ foliated pipelines

MapJet leaf_restriction(const FoliatedJet& z) {
  z.validate();
  const int n = z.leaf_dim;
  const RingDims leaf_ring{n, z.order};
  TruncatedPoly restricted(leaf_ring);
  for (const auto& [m, c] : z.function.terms()) {
    bool on_leaf = true;
    for (int j = n; j < m.vars(); ++j) {
      if (m[j] != 0) {
        on_leaf = false;
        break;
      }
    }
    if (!on_leaf) continue;
    restricted.add_term(Monomial(std::vector<int>(m.exponents().begin(), m.exponents().begin() + n)), c);
  }
  return MapJet{n, 1, z.order, {std::move(restricted)}};
}

MapJet augmented_map(const FoliatedJet& z) {
  z.validate();
  const int m = z.leaf_dim + z.transverse_dim;
  const RingDims ring{m, z.order};
  MapJet out{m, 1 + z.transverse_dim, z.order, {z.function.with_order(z.order)}};
  for (int j = 0; j < z.transverse_dim; ++j) out.components.push_back(TruncatedPoly::variable(ring, z.leaf_dim + j));
  return out;
}

FoliatedSymbols foliated_symbol_pipelines(const FoliatedJet& z) {
  return {boardman_symbol(leaf_restriction(z)), boardman_symbol(augmented_map(z))};
}

BoardmanSymbol foliated_symbol(const FoliatedJet& z) {
  auto both = foliated_symbol_pipelines(z);
  if (!(both.leafwise == both.map_jet)) {
    throw InvariantViolation("foliated_symbol: leafwise pipeline gives " + both.leafwise.to_string() +
                             " but the augmented map gives " + both.map_jet.to_string());
  }
  return both.leafwise;
}

bool clara_check(const FoliatedJet& z, int level) {
  z.validate();
  if (level < 0 || level > z.order - 1) throw InputError("clara_check: level must lie in [0, k-1]");

  const auto big = delta_chain(jet_ideal(augmented_map(z)), level + 1).back();
  const auto small = delta_chain(jet_ideal(leaf_restriction(z)), level + 1).back();

  const RingDims ring = big.ring();
  std::vector<int> leaf_vars(static_cast<std::size_t>(z.leaf_dim));
  std::iota(leaf_vars.begin(), leaf_vars.end(), 0);
  std::vector<TruncatedPoly> gens;
  for (const auto& g : small.all_generators()) gens.push_back(embed(g, ring, leaf_vars));
  for (int j = 0; j < z.transverse_dim; ++j) gens.push_back(TruncatedPoly::variable(ring, z.leaf_dim + j));
  const JetIdeal rhs(ring, std::move(gens));
  return ideal_equal(big, rhs, ring.order);
}

// ------------------------------------------------------------ combinatorics

std::int64_t mu(const BoardmanSymbol& symbol) {
  const auto& i = symbol.entries();
  if (i.empty()) return 0;
  // count(r, bound): sequences j_r..j_l with bound >= j_r and j_s <= i_s.
  std::function<std::int64_t(std::size_t, int)> count = [&](std::size_t r, int bound) -> std::int64_t {
    if (r == i.size()) return 1;
    std::int64_t total = 0;
    const int top = std::min(bound, i[r]);
    const int bottom = r == 0 ? 1 : 0;
    for (int j = bottom; j <= top; ++j) total += count(r + 1, j);
    return total;
  };
  return count(0, i.front());
}

bool symbol_nonempty(const BoardmanSymbol& symbol, int n, int p) {
  const auto& i = symbol.entries();
  if (i.empty()) return false;
  if (i.front() > n || i.back() < 0 || !symbol.is_nonincreasing()) return false;
  if (i.front() > n - p) return true;
  if (i.front() == n - p) return std::all_of(i.begin(), i.end(), [&](int e) { return e == i.front(); });
  return false;
}

std::int64_t stratum_codim(const BoardmanSymbol& symbol, int n, int p) {
  if (!symbol_nonempty(symbol, n, p)) {
    throw PreconditionError("stratum_codim: Sigma^" + symbol.to_string() + " is empty in J(" + std::to_string(n) +
                            "," + std::to_string(p) + ")");
  }
  const auto& i = symbol.entries();
  std::int64_t codim = static_cast<std::int64_t>(p - n + i[0]) * mu(symbol);
  for (std::size_t j = 1; j < i.size(); ++j) {
    codim -= static_cast<std::int64_t>(i[j - 1] - i[j]) * mu(symbol.shifted(j));
  }
  return codim;
}

bool symbol_lex_geq(const BoardmanSymbol& a, const BoardmanSymbol& b) {
  return !std::lexicographical_compare(a.entries().begin(), a.entries().end(), b.entries().begin(),
                                       b.entries().end());
}

std::vector<SymbolStratum> enumerate_symbols(int n, int p, int k, std::int64_t codim_cap) {
  std::vector<SymbolStratum> out;
  if (codim_cap < 1 || n < 1 || p < 1 || k < 1) return out;
  std::vector<int> current;
  std::function<void(int)> rec = [&](int bound) {
    if (!current.empty()) {
      const std::size_t len = current.size();
      const bool double_zero = len >= 2 && current[len - 1] == 0 && current[len - 2] == 0;
      if (double_zero) return;  // and so is every extension
      BoardmanSymbol s(current);
      if (symbol_nonempty(s, n, p)) {
        const auto c = stratum_codim(s, n, p);
        if (c >= 1 && c <= codim_cap) out.push_back({s, c});
      }
    }
    if (static_cast<int>(current.size()) == k) return;
    for (int e = bound; e >= 0; --e) {
      current.push_back(e);
      rec(e);
      current.pop_back();
    }
  };
  rec(n);
  std::sort(out.begin(), out.end(), [](const SymbolStratum& a, const SymbolStratum& b) {
    if (a.codim != b.codim) return a.codim < b.codim;
    return std::lexicographical_compare(a.symbol.entries().begin(), a.symbol.entries().end(),
                                        b.symbol.entries().begin(), b.symbol.entries().end());
  });
  return out;
}

bool stratum_order_leq(int n, const StratumKey& a, const StratumKey& b) {
  std::vector<int> lhs{n - a.d};
  lhs.insert(lhs.end(), a.symbol.entries().begin(), a.symbol.entries().end());
  std::vector<int> rhs{n - b.d};
  rhs.insert(rhs.end(), b.symbol.entries().begin(), b.symbol.entries().end());
  return symbol_lex_geq(BoardmanSymbol(std::move(lhs)), BoardmanSymbol(std::move(rhs)));
}

}  // namespace folsing
