#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "folsing/rational.hpp"

namespace folsing {

using RationalRow = std::vector<Rational>;

/// Rank of a rational matrix by Bareiss fraction-free elimination. Each row is
/// first scaled to a primitive integer row; all intermediate divisions are
/// exact.
std::size_t bareiss_rank(const std::vector<RationalRow>& rows);

/// Incrementally maintained reduced row echelon form of a subspace of Q^columns.
///
/// Pivots are the leftmost nonzero entry of each row; every stored row has a
/// unit pivot and zeros in all other pivot columns, so the stored basis is
/// canonical for the spanned subspace.
class RowEchelon {
 public:
  explicit RowEchelon(std::size_t columns);

  std::size_t columns() const noexcept { return columns_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  bool full() const noexcept { return rows_.size() == columns_; }

  /// Remainder of `row` after elimination against the current basis.
  RationalRow reduce(RationalRow row) const;

  bool contains(const RationalRow& row) const;

  /// Adds `row` to the span. Returns true iff the rank grew.
  bool insert(RationalRow row);

  /// Basis rows ordered by increasing pivot column.
  std::vector<RationalRow> rows() const;

  /// Pivot column of each basis row, increasing.
  std::vector<std::size_t> pivots() const;

 private:
  std::size_t columns_;
  // Keyed by pivot column, kept sorted.
  std::vector<std::pair<std::size_t, RationalRow>> rows_;
};

}  // namespace folsing
