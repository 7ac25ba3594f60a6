#pragma once

// Functions on product-foliated charts R^n x R^q: derivatives, the leafwise
// critical locus, the foliated second differential and the strata it
// defines, plus genericity and openness reports.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "folsing/boardman.hpp"
#include "folsing/expr.hpp"
#include "folsing/rational.hpp"

namespace folsing {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Leaf coordinates x1..xn followed by transverse coordinates v1..vq, each
/// confined to a closed interval.
struct ChartSpec {
  int leaf_dim = 1;
  int transverse_dim = 0;
  std::vector<Interval> box;

  int dims() const noexcept { return leaf_dim + transverse_dim; }
  /// Throws InputError unless n >= 1, q >= 0 and the box has n+q nonempty
  /// finite intervals.
  void validate() const;
  bool contains(std::span<const double> point, double slack = 0.0) const;
};

/// n x n leafwise metric block as a matrix of expressions in all chart
/// coordinates. Default constructed: the identity.
class MetricSpec {
 public:
  MetricSpec() = default;
  /// Throws InputError unless the matrix is square.
  explicit MetricSpec(std::vector<std::vector<Expr>> entries);

  static MetricSpec identity() { return MetricSpec(); }

  bool is_identity() const noexcept { return entries_.empty(); }
  const std::vector<std::vector<Expr>>& entries() const noexcept { return entries_; }

  Eigen::MatrixXd at(std::span<const double> point, int leaf_dim) const;

  /// Spot-checks symmetry and positive-definiteness at a 3^(n+q) grid of the
  /// box (capped at 729 points). Throws InputError on failure.
  void validate(const ChartSpec& chart) const;

 private:
  std::vector<std::vector<Expr>> entries_;
};

/// f together with its first and second partial derivatives.
class FoliatedFunction {
 public:
  FoliatedFunction(Expr f, int leaf_dim, int transverse_dim);

  int leaf_dim() const noexcept { return leaf_dim_; }
  int transverse_dim() const noexcept { return transverse_dim_; }
  int dims() const noexcept { return leaf_dim_ + transverse_dim_; }
  const Expr& expr() const noexcept { return f_; }

  /// D_i f for any chart variable i.
  const Expr& partial(int i) const { return first_[static_cast<std::size_t>(i)]; }
  /// D_i D_j f for any chart variables i, j.
  const Expr& second_partial(int i, int j) const;

  double value(std::span<const double> point) const { return f_.eval(point); }
  /// Partials in the leaf variables.
  Eigen::VectorXd leaf_partials(std::span<const double> point) const;
  /// Second partials in the leaf variables, without a criticality check.
  Eigen::MatrixXd leaf_hessian(std::span<const double> point) const;
  std::vector<Rational> leaf_partials_exact(std::span<const Rational> point) const;

 private:
  Expr f_;
  int leaf_dim_;
  int transverse_dim_;
  std::vector<Expr> first_;
  std::vector<Expr> second_;
};

/// Matrix of the foliated second differential on leaf directions. Throws
/// PreconditionError when the leafwise partials at `point` exceed
/// `tolerance` in norm, since the form is only intrinsic on the critical set.
Eigen::MatrixXd foliated_hessian(const FoliatedFunction& f, std::span<const double> point, double tolerance = 1e-6);

struct Signature {
  int plus = 0;
  int minus = 0;
  int zero = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Signs of the eigenvalues of H relative to the metric G (the pencil
/// H w = lambda G w). |lambda| < threshold * (1 + ||H||_2) counts as zero.
Signature metric_signature(const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& metric, double threshold = 1e-7,
                           std::vector<double>* eigenvalues = nullptr);

/// Sigma_d^I.
struct StratumLabel {
  int d = 0;
  BoardmanSymbol symbol;

  /// "Sigma_1^(2,1,0)"
  std::string to_string() const;
};

struct CriticalPointRecord {
  std::vector<double> location;
  double leafwise_gradient_norm = 0.0;
  Eigen::MatrixXd foliated_hessian;
  std::vector<double> eigenvalues;
  Signature signature;
  /// Set when the location was recognised as an exact rational critical point.
  std::optional<std::vector<Rational>> exact_location;
  std::optional<BoardmanSymbol> symbol;
  StratumLabel stratum_label;
  bool is_leafwise_max = false;
  /// Position of the transverse coordinates in the transverse sweep grid.
  std::vector<int> transverse_index;
};

struct CriticalSearchOptions {
  int leaf_density = 9;
  int transverse_density = 9;
  double residual_tolerance = 1e-12;
  double dedup_radius = 1e-8;
  double eigenvalue_threshold = 1e-7;
  int max_newton_iterations = 200;
  /// Jet order used for exact symbols.
  int symbol_order = 3;
  /// Largest denominator tried when recognising rational coordinates.
  int max_denominator = 1000;
};

struct CriticalSearch {
  std::vector<CriticalPointRecord> records;
  std::size_t seeds = 0;
  /// Seeds whose Newton run did not converge inside the box.
  std::size_t dropped = 0;
};

/// Regular grid values over [lo, hi] with `density` points (midpoint if 1).
std::vector<double> grid_values(const Interval& range, int density);

/// Newton iteration on the leafwise gradient system from every leaf grid
/// seed, for every transverse grid value; converged in-box roots are
/// deduplicated per leaf, classified, and sorted by coordinates.
CriticalSearch find_critical_points(const FoliatedFunction& f, const ChartSpec& chart, const MetricSpec& metric,
                                    const CriticalSearchOptions& options = {});

/// Sigma_d^I from the record: (n, n - rank H) from the eigenvalues, or the
/// full exact symbol when present (after checking it agrees on its first two
/// entries; InvariantViolation otherwise).
StratumLabel classify_point(const CriticalPointRecord& record, int leaf_dim);

/// Exact leafwise symbol of f at a rational point (jet of the given order).
BoardmanSymbol exact_symbol_at(const FoliatedFunction& f, std::span<const Rational> point, int order);

enum class OpennessVerdict { Pass, Fail, Undecided };

std::string to_string(OpennessVerdict verdict);

struct OpennessReport {
  OpennessVerdict verdict = OpennessVerdict::Pass;
  /// d_plus = 0 and d_zero = 0: definite leafwise local maxima.
  std::vector<CriticalPointRecord> witnesses;
  /// d_plus = 0 and d_zero > 0: degenerate, undecided at second order.
  std::vector<CriticalPointRecord> suspects;
  std::size_t records = 0;
  std::size_t seeds = 0;
  std::size_t dropped = 0;
  /// Properness is a user declaration and is never checked.
  bool declared_proper = false;
};

OpennessReport openness_check(const FoliatedFunction& f, const ChartSpec& chart, const MetricSpec& metric,
                              const CriticalSearchOptions& options = {}, bool declared_proper = false);

struct LeafIsolation {
  std::vector<double> transverse;
  std::size_t points = 0;
  /// Smallest pairwise distance; infinity with fewer than two points.
  double min_distance = 0.0;
  bool isolated = true;
};

struct GenericityReport {
  std::vector<LeafIsolation> leaves;
  bool all_isolated = true;
  std::size_t degenerate_records = 0;
  /// Distinct transverse values carrying a degenerate record.
  std::vector<std::vector<double>> degenerate_transverse_values;
  /// No two degenerate transverse values are neighbours in the sweep grid.
  bool degenerate_set_discrete = true;
};

GenericityReport genericity_spotcheck(const std::vector<CriticalPointRecord>& records, int leaf_dim,
                                      double dedup_radius = 1e-8);

/// f + t^2 with a fresh leaf variable t inserted after the existing leaf
/// variables (transverse variables shift up by one), and the matching chart
/// with t in `t_range`.
struct AugmentedChart {
  Expr expr;
  ChartSpec chart;
  MetricSpec metric;
};

AugmentedChart augment_with_square(const Expr& f, const ChartSpec& chart, const MetricSpec& metric = {},
                                   Interval t_range = {-1.0, 1.0});

}  // namespace folsing
