#include "folsing/jetring.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "folsing/errors.hpp"
#include "folsing/exact_linalg.hpp"

namespace folsing {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw InputError("negative exponent in monomial");
    degree_ += e;
  }
}

Monomial Monomial::variable(int vars, int index) {
  if (index < 0 || index >= vars) throw InputError("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(vars), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (vars() != other.vars()) throw InputError("monomial variable count mismatch");
  Monomial out = *this;
  for (std::size_t i = 0; i < exponents_.size(); ++i) out.exponents_[i] += other.exponents_[i];
  out.degree_ += other.degree_;
  return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  // Larger exponent vector (lexicographically) sorts first within a degree.
  return b.exponents_ <=> a.exponents_;
}

namespace {

void fill_degree(int vars, int remaining, std::vector<int>& current, std::size_t at, std::vector<Monomial>& out) {
  if (at + 1 == static_cast<std::size_t>(vars)) {
    current[at] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[at] = e;
    fill_degree(vars, remaining - e, current, at + 1, out);
  }
}

}  // namespace

std::vector<Monomial> monomials_of_degree(int vars, int degree) {
  std::vector<Monomial> out;
  if (degree < 0 || vars < 0) return out;
  if (vars == 0) {
    if (degree == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  std::vector<int> current(static_cast<std::size_t>(vars), 0);
  fill_degree(vars, degree, current, 0, out);
  return out;
}

std::vector<Monomial> monomials_up_to(int vars, int max_degree) {
  std::vector<Monomial> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto layer = monomials_of_degree(vars, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

// ----------------------------------------------------------- TruncatedPoly

TruncatedPoly::TruncatedPoly(RingDims ring) : ring_(ring) {
  if (ring.vars < 0 || ring.order < 0) throw InputError("ring dimensions must be nonnegative");
}

TruncatedPoly TruncatedPoly::constant(RingDims ring, const Rational& value) {
  TruncatedPoly p(ring);
  p.add_term(Monomial::one(ring.vars), value);
  return p;
}

TruncatedPoly TruncatedPoly::variable(RingDims ring, int index) {
  TruncatedPoly p(ring);
  p.add_term(Monomial::variable(ring.vars, index), 1);
  return p;
}

TruncatedPoly TruncatedPoly::monomial(RingDims ring, const Monomial& m, const Rational& coefficient) {
  TruncatedPoly p(ring);
  p.add_term(m, coefficient);
  return p;
}

Rational TruncatedPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational TruncatedPoly::constant_term() const { return coefficient(Monomial::one(ring_.vars)); }

int TruncatedPoly::degree() const noexcept { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

std::optional<int> TruncatedPoly::order() const noexcept {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first.degree();
}

void TruncatedPoly::add_term(const Monomial& m, const Rational& c) {
  if (m.vars() != ring_.vars) throw InputError("monomial does not belong to the ring");
  if (c == 0 || m.degree() > ring_.order) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

TruncatedPoly TruncatedPoly::truncated(int cap) const {
  TruncatedPoly out(ring_);
  for (const auto& [m, c] : terms_) {
    if (m.degree() > cap) break;
    out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

TruncatedPoly TruncatedPoly::with_order(int order) const {
  TruncatedPoly out(RingDims{ring_.vars, order});
  for (const auto& [m, c] : terms_) {
    if (m.degree() > order) break;
    out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

TruncatedPoly& TruncatedPoly::operator+=(const TruncatedPoly& other) {
  if (!(other.ring_ == ring_)) throw InputError("ring dimension mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

TruncatedPoly& TruncatedPoly::operator-=(const TruncatedPoly& other) {
  if (!(other.ring_ == ring_)) throw InputError("ring dimension mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

TruncatedPoly& TruncatedPoly::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& entry : terms_) entry.second *= scalar;
  return *this;
}

TruncatedPoly TruncatedPoly::operator-() const {
  TruncatedPoly out = *this;
  for (auto& entry : out.terms_) entry.second = -entry.second;
  return out;
}

TruncatedPoly mul_trunc(const TruncatedPoly& p, const TruncatedPoly& q) {
  return mul_trunc(p, q, p.ring().order);
}

TruncatedPoly mul_trunc(const TruncatedPoly& p, const TruncatedPoly& q, int cap) {
  if (!(p.ring() == q.ring())) throw InputError("mul_trunc: ring dimension mismatch");
  TruncatedPoly out(p.ring());
  cap = std::min(cap, p.ring().order);
  for (const auto& [mp, cp] : p.terms()) {
    if (mp.degree() > cap) break;
    for (const auto& [mq, cq] : q.terms()) {
      if (mp.degree() + mq.degree() > cap) break;
      out.add_term(mp * mq, cp * cq);
    }
  }
  return out;
}

TruncatedPoly partial_derivative(const TruncatedPoly& p, int index) {
  const RingDims ring = p.ring();
  if (index < 0 || index >= ring.vars) throw InputError("partial_derivative: variable index out of range");
  TruncatedPoly out(ring);
  const auto i = static_cast<std::size_t>(index);
  for (const auto& [m, c] : p.terms()) {
    const int e = m.exponents()[i];
    if (e == 0) continue;
    auto exps = m.exponents();
    exps[i] -= 1;
    out.add_term(Monomial(std::move(exps)), c * e);
  }
  return out;
}

namespace {

// Substitutes every variable by the corresponding polynomial.
TruncatedPoly substitute(const TruncatedPoly& p, const std::vector<TruncatedPoly>& images) {
  TruncatedPoly out(p.ring());
  std::vector<std::vector<TruncatedPoly>> powers(images.size());
  for (const auto& [m, c] : p.terms()) {
    TruncatedPoly term = TruncatedPoly::constant(p.ring(), c);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const int e = m.exponents()[i];
      if (e == 0) continue;
      auto& cache = powers[i];
      while (static_cast<int>(cache.size()) <= e) {
        cache.push_back(cache.empty() ? TruncatedPoly::constant(p.ring(), 1) : mul_trunc(cache.back(), images[i]));
      }
      term = mul_trunc(term, cache[static_cast<std::size_t>(e)]);
    }
    out += term;
  }
  return out;
}

}  // namespace

TruncatedPoly compose_linear(const TruncatedPoly& p, const std::vector<std::vector<Rational>>& linear) {
  const RingDims ring = p.ring();
  if (static_cast<int>(linear.size()) != ring.vars) throw InputError("compose_linear: matrix size mismatch");
  std::vector<TruncatedPoly> images;
  for (const auto& row : linear) {
    if (static_cast<int>(row.size()) != ring.vars) throw InputError("compose_linear: matrix size mismatch");
    TruncatedPoly image(ring);
    for (int j = 0; j < ring.vars; ++j) image.add_term(Monomial::variable(ring.vars, j), row[static_cast<std::size_t>(j)]);
    images.push_back(std::move(image));
  }
  return substitute(p, images);
}

TruncatedPoly translate(const TruncatedPoly& p, std::span<const Rational> point) {
  const RingDims ring = p.ring();
  if (static_cast<int>(point.size()) != ring.vars) throw InputError("translate: point dimension mismatch");
  std::vector<TruncatedPoly> images;
  for (int i = 0; i < ring.vars; ++i) {
    TruncatedPoly image = TruncatedPoly::variable(ring, i);
    image.add_term(Monomial::one(ring.vars), point[static_cast<std::size_t>(i)]);
    images.push_back(std::move(image));
  }
  return substitute(p, images);
}

TruncatedPoly embed(const TruncatedPoly& p, RingDims target, std::span<const int> variable_map) {
  if (static_cast<int>(variable_map.size()) != p.ring().vars) throw InputError("embed: variable map size mismatch");
  TruncatedPoly out(target);
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> e(static_cast<std::size_t>(target.vars), 0);
    for (std::size_t i = 0; i < variable_map.size(); ++i) {
      const int to = variable_map[i];
      if (to < 0 || to >= target.vars) throw InputError("embed: target variable out of range");
      e[static_cast<std::size_t>(to)] += m.exponents()[i];
    }
    out.add_term(Monomial(std::move(e)), c);
  }
  return out;
}

TruncatedPoly substitute_zero(const TruncatedPoly& p, const std::vector<bool>& zeroed) {
  if (static_cast<int>(zeroed.size()) != p.ring().vars) throw InputError("substitute_zero: mask size mismatch");
  TruncatedPoly out(p.ring());
  for (const auto& [m, c] : p.terms()) {
    bool keep = true;
    for (std::size_t i = 0; i < zeroed.size(); ++i) {
      if (zeroed[i] && m.exponents()[i] > 0) {
        keep = false;
        break;
      }
    }
    if (keep) out.add_term(m, c);
  }
  return out;
}

std::string to_string(const TruncatedPoly& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rational magnitude = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (magnitude != 1 || m.degree() == 0) {
      out << magnitude.get_str();
      wrote = true;
    }
    for (int i = 0; i < m.vars(); ++i) {
      const int e = m[i];
      if (e == 0) continue;
      if (wrote) out << "*";
      const auto idx = static_cast<std::size_t>(i);
      out << (idx < names.size() ? names[idx] : "x" + std::to_string(i + 1));
      if (e > 1) out << "^" << e;
      wrote = true;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------- JetIdeal

JetIdeal::JetIdeal(RingDims ring, std::vector<TruncatedPoly> generators, std::optional<int> tail_order)
    : ring_(ring), generators_(std::move(generators)), tail_order_(tail_order) {
  for (const auto& g : generators_) {
    if (!(g.ring() == ring_)) throw InputError("JetIdeal: generator ring mismatch");
  }
  if (tail_order_ && *tail_order_ < 1) throw InputError("JetIdeal: tail order must be >= 1");
}

bool JetIdeal::is_proper() const {
  return std::all_of(generators_.begin(), generators_.end(),
                     [](const TruncatedPoly& g) { return g.constant_term() == 0; });
}

std::vector<TruncatedPoly> JetIdeal::tail_monomials() const {
  std::vector<TruncatedPoly> out;
  if (!has_tail()) return out;
  for (const auto& m : monomials_of_degree(ring_.vars, *tail_order_)) out.push_back(TruncatedPoly::monomial(ring_, m));
  return out;
}

std::vector<TruncatedPoly> JetIdeal::all_generators() const {
  auto out = generators_;
  auto tail = tail_monomials();
  out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  return out;
}

JetIdeal ideal_sum(const JetIdeal& a, const JetIdeal& b) {
  if (!(a.ring() == b.ring())) throw InputError("ideal_sum: ring dimension mismatch");
  auto gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  std::optional<int> tail;
  if (a.tail_order() && b.tail_order()) {
    tail = std::min(*a.tail_order(), *b.tail_order());
  } else {
    tail = a.tail_order() ? a.tail_order() : b.tail_order();
  }
  return JetIdeal(a.ring(), std::move(gens), tail);
}

int ideal_rank(const JetIdeal& ideal) {
  if (!ideal.is_proper()) throw PreconditionError("ideal_rank: ideal is not proper (a generator is a unit)");
  const int n = ideal.ring().vars;
  std::vector<RationalRow> rows;
  auto linear_row = [n](const TruncatedPoly& g) {
    RationalRow row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = g.coefficient(Monomial::variable(n, i));
    return row;
  };
  for (const auto& g : ideal.generators()) rows.push_back(linear_row(g));
  if (ideal.tail_order() == 1 && ideal.has_tail()) {
    for (const auto& t : ideal.tail_monomials()) rows.push_back(linear_row(t));
  }
  return static_cast<int>(bareiss_rank(rows));
}

namespace {

// Column layout for polynomials of degree <= cap, in Monomial order.
class MonomialTable {
 public:
  MonomialTable(int vars, int cap) : vars_(vars), cap_(cap), columns_(monomials_up_to(vars, cap)) {
    for (std::size_t c = 0; c < columns_.size(); ++c) index_.emplace(columns_[c], c);
    times_.resize(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      for (int j = 0; j < vars; ++j) {
        auto product = columns_[c] * Monomial::variable(vars, j);
        times_[c].push_back(product.degree() <= cap ? static_cast<long>(index_.at(product)) : -1L);
      }
    }
  }

  std::size_t size() const noexcept { return columns_.size(); }
  int cap() const noexcept { return cap_; }
  const Monomial& monomial(std::size_t c) const { return columns_[c]; }

  RationalRow row(const TruncatedPoly& p) const {
    RationalRow r(columns_.size());
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() > cap_) break;
      r[index_.at(m)] = c;
    }
    return r;
  }

  TruncatedPoly poly(RingDims ring, const RationalRow& r) const {
    TruncatedPoly p(ring);
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (r[c] != 0) p.add_term(columns_[c], r[c]);
    }
    return p;
  }

  // x_j * row, dropping terms above the cap. Returns false if the result is zero.
  bool times_variable(const RationalRow& r, int j, RationalRow& out) const {
    out.assign(columns_.size(), Rational(0));
    bool nonzero = false;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (r[c] == 0) continue;
      const long to = times_[c][static_cast<std::size_t>(j)];
      if (to < 0) continue;
      out[static_cast<std::size_t>(to)] = r[c];
      nonzero = true;
    }
    return nonzero;
  }

  int vars() const noexcept { return vars_; }

 private:
  int vars_;
  int cap_;
  std::vector<Monomial> columns_;
  std::map<Monomial, std::size_t> index_;
  std::vector<std::vector<long>> times_;
};

// Echelon form of span{ x^alpha g : g in generators } truncated at table.cap().
RowEchelon span_of_multiples(const std::vector<TruncatedPoly>& generators, const MonomialTable& table) {
  RowEchelon echelon(table.size());
  std::deque<RationalRow> queue;
  for (const auto& g : generators) queue.push_back(table.row(g));
  RationalRow product;
  while (!queue.empty() && !echelon.full()) {
    RationalRow v = std::move(queue.front());
    queue.pop_front();
    if (!echelon.insert(v)) continue;
    for (int j = 0; j < table.vars(); ++j) {
      if (table.times_variable(v, j, product)) queue.push_back(product);
    }
  }
  return echelon;
}

// Cap below which the tail has to be handled explicitly.
int effective_cap(const JetIdeal& ideal, int cap) {
  if (ideal.has_tail() && *ideal.tail_order() <= cap) return *ideal.tail_order() - 1;
  return cap;
}

void check_cap(const JetIdeal& ideal, int cap) {
  if (cap > ideal.ring().order) throw InputError("degree cap exceeds the working order of the ring");
}

}  // namespace

std::vector<TruncatedPoly> ideal_subspace_basis(const JetIdeal& ideal, int degree_cap) {
  check_cap(ideal, degree_cap);
  std::vector<TruncatedPoly> out;
  if (degree_cap < 0) return out;
  const int low = effective_cap(ideal, degree_cap);
  if (low >= 0) {
    MonomialTable table(ideal.ring().vars, low);
    auto echelon = span_of_multiples(ideal.generators(), table);
    for (const auto& r : echelon.rows()) out.push_back(table.poly(ideal.ring(), r));
  }
  if (low < degree_cap) {
    for (int d = low + 1; d <= degree_cap; ++d) {
      for (const auto& m : monomials_of_degree(ideal.ring().vars, d)) out.push_back(TruncatedPoly::monomial(ideal.ring(), m));
    }
  }
  return out;
}

std::size_t ideal_subspace_dimension(const JetIdeal& ideal, int degree_cap) {
  check_cap(ideal, degree_cap);
  if (degree_cap < 0) return 0;
  const int low = effective_cap(ideal, degree_cap);
  std::size_t dim = 0;
  if (low >= 0) {
    MonomialTable table(ideal.ring().vars, low);
    dim = span_of_multiples(ideal.generators(), table).rank();
  }
  for (int d = low + 1; d <= degree_cap; ++d) dim += monomials_of_degree(ideal.ring().vars, d).size();
  return dim;
}

bool ideal_equal(const JetIdeal& a, const JetIdeal& b, int degree_cap) {
  if (!(a.ring() == b.ring())) throw InputError("ideal_equal: ring dimension mismatch");
  return ideal_subspace_basis(a, degree_cap) == ideal_subspace_basis(b, degree_cap);
}

bool ideal_contains(const JetIdeal& ideal, const TruncatedPoly& p, int degree_cap) {
  if (!(ideal.ring() == p.ring())) throw InputError("ideal_contains: ring dimension mismatch");
  check_cap(ideal, degree_cap);
  if (degree_cap < 0) return true;
  MonomialTable table(ideal.ring().vars, degree_cap);
  RowEchelon echelon(table.size());
  for (const auto& b : ideal_subspace_basis(ideal, degree_cap)) echelon.insert(table.row(b));
  return echelon.contains(table.row(p));
}

JetIdeal compact(const JetIdeal& ideal) {
  if (!ideal.has_tail()) throw PreconditionError("compact: the ideal has no representable m^t tail");
  const RingDims ring = ideal.ring();
  const int t = *ideal.tail_order();
  if (t == 1) return JetIdeal(ring, {}, 1);

  MonomialTable table(ring.vars, t - 1);
  const auto echelon = span_of_multiples(ideal.generators(), table);
  const auto pivots = echelon.pivots();
  const auto rows = echelon.rows();

  // Least s <= t with m^s inside the ideal: every degree-s column is a pivot.
  std::vector<std::size_t> pivot_count(static_cast<std::size_t>(t), 0);
  for (auto p : pivots) ++pivot_count[static_cast<std::size_t>(table.monomial(p).degree())];
  int s = t;
  for (int d = 1; d < t; ++d) {
    if (pivot_count[static_cast<std::size_t>(d)] == monomials_of_degree(ring.vars, d).size()) {
      s = d;
      break;
    }
  }
  if (s == 1) return JetIdeal(ring, {}, 1);

  // Basis of (I + m^s)/m^s: rows whose pivot has degree < s, truncated. With
  // lowest-degree pivots these stay independent after truncation.
  MonomialTable low(ring.vars, s - 1);
  std::vector<RationalRow> basis;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (table.monomial(pivots[k]).degree() >= s) continue;
    basis.push_back(low.row(table.poly(ring, rows[k])));
  }

  // m * I modulo m^s.
  RowEchelon accumulated(low.size());
  RationalRow product;
  for (const auto& b : basis) {
    for (int j = 0; j < ring.vars; ++j) {
      if (low.times_variable(b, j, product)) accumulated.insert(product);
    }
  }
  std::vector<TruncatedPoly> generators;
  for (const auto& b : basis) {
    if (accumulated.insert(b)) generators.push_back(low.poly(ring, b));
  }
  return JetIdeal(ring, std::move(generators), s);
}

}  // namespace folsing
