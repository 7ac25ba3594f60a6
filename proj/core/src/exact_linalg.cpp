#include "folsing/exact_linalg.hpp"

#include <algorithm>

#include "folsing/errors.hpp"

namespace folsing {

namespace {

// Scales a rational row to a primitive integer row spanning the same line.
std::vector<Integer> primitive_integer_row(const RationalRow& row) {
  Integer lcm = 1;
  for (const auto& q : row) {
    if (q != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
  }
  std::vector<Integer> out(row.size());
  Integer content = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0) continue;
    out[j] = row[j].get_num() * (lcm / row[j].get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), out[j].get_mpz_t());
  }
  if (content > 1) {
    for (auto& v : out) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), content.get_mpz_t());
  }
  return out;
}

}  // namespace

std::size_t bareiss_rank(const std::vector<RationalRow>& rows) {
  if (rows.empty()) return 0;
  const std::size_t columns = rows.front().size();
  std::vector<std::vector<Integer>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != columns) throw InputError("bareiss_rank: ragged matrix");
    m.push_back(primitive_integer_row(r));
  }

  Integer previous = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < columns && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[pivot], m[rank]);
    const Integer& p = m[rank][c];
    for (std::size_t i = rank + 1; i < m.size(); ++i) {
      for (std::size_t j = c + 1; j < columns; ++j) {
        Integer v = p * m[i][j] - m[i][c] * m[rank][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), previous.get_mpz_t());
        m[i][j] = std::move(v);
      }
      m[i][c] = 0;
    }
    previous = p;
    ++rank;
  }
  return rank;
}

RowEchelon::RowEchelon(std::size_t columns) : columns_(columns) {}

RationalRow RowEchelon::reduce(RationalRow row) const {
  if (row.size() != columns_) throw InputError("RowEchelon: row width mismatch");
  for (const auto& [pivot, basis] : rows_) {
    if (row[pivot] == 0) continue;
    const Rational factor = row[pivot];
    for (std::size_t j = pivot; j < columns_; ++j) {
      if (basis[j] != 0) row[j] -= factor * basis[j];
    }
  }
  return row;
}

bool RowEchelon::contains(const RationalRow& row) const {
  auto rest = reduce(row);
  return std::all_of(rest.begin(), rest.end(), [](const Rational& q) { return q == 0; });
}

bool RowEchelon::insert(RationalRow row) {
  row = reduce(std::move(row));
  auto lead = std::find_if(row.begin(), row.end(), [](const Rational& q) { return q != 0; });
  if (lead == row.end()) return false;
  const auto pivot = static_cast<std::size_t>(lead - row.begin());
  const Rational scale = 1 / row[pivot];
  for (std::size_t j = pivot; j < columns_; ++j) {
    if (row[j] != 0) row[j] *= scale;
  }
  // Clear the new pivot column from the existing rows.
  for (auto& [p, basis] : rows_) {
    if (basis[pivot] == 0) continue;
    const Rational factor = basis[pivot];
    for (std::size_t j = pivot; j < columns_; ++j) {
      if (row[j] != 0) basis[j] -= factor * row[j];
    }
  }
  auto at = std::lower_bound(rows_.begin(), rows_.end(), pivot,
                             [](const auto& entry, std::size_t value) { return entry.first < value; });
  rows_.insert(at, {pivot, std::move(row)});
  return true;
}

std::vector<RationalRow> RowEchelon::rows() const {
  std::vector<RationalRow> out;
  out.reserve(rows_.size());
  for (const auto& entry : rows_) out.push_back(entry.second);
  return out;
}

std::vector<std::size_t> RowEchelon::pivots() const {
  std::vector<std::size_t> out;
  out.reserve(rows_.size());
  for (const auto& entry : rows_) out.push_back(entry.first);
  return out;
}

}  // namespace folsing
