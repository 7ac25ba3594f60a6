#pragma once

// Leafwise gradient flow on product charts: integration, limit points,
// skeleton sampling and the model-chart checks built on them.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "folsing/folchart.hpp"

namespace folsing {

/// Forward follows +grad_F f, so f increases.
enum class Direction { Forward, Backward };

enum class TrajectoryStatus {
  Converged,
  ExitedBox,
  TimeBudgetExhausted,
  /// A caller-supplied stop condition fired (see integrate_until).
  Stopped,
};

std::string to_string(Direction direction);
std::string to_string(TrajectoryStatus status);

struct FlowSample {
  /// Signed time: positive forward, negative backward.
  double t = 0.0;
  std::vector<double> point;
  double value = 0.0;
};

struct Trajectory {
  int leaf_dim = 0;
  int transverse_dim = 0;
  Direction direction = Direction::Forward;
  TrajectoryStatus status = TrajectoryStatus::TimeBudgetExhausted;
  std::vector<FlowSample> samples;
  /// Newton-polished terminal point of a Converged run.
  std::optional<std::vector<double>> limit;
  /// Converged on a small gradient, but the polish did not reach a
  /// nondegenerate root (slow approach to a degenerate critical point).
  bool degenerate_limit = false;
  /// The step-size controller underflowed.
  bool step_underflow = false;
};

struct FlowBudget {
  double max_time = 50.0;
  std::size_t max_steps = 1'000'000;
  double error_tolerance = 1e-9;
  double gradient_stop = 1e-8;
  double polish_tolerance = 1e-12;
};

/// G_leaf(point)^-1 times the leaf partials of f. Throws PreconditionError if
/// the metric block is not positive-definite at the point.
Eigen::VectorXd leafwise_gradient(const FoliatedFunction& f, const MetricSpec& metric, std::span<const double> point);

/// Adaptive Dormand-Prince integration of the n leaf coordinates of
/// x' = +-grad_F f; transverse coordinates are copied, never integrated.
/// Throws InputError if start is outside the box.
Trajectory integrate(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                     std::span<const double> start, Direction direction, const FlowBudget& budget = {});

/// As integrate, but stops with status Stopped as soon as `stop` returns true
/// on an accepted sample.
Trajectory integrate_until(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                           std::span<const double> start, Direction direction, const FlowBudget& budget,
                           const std::function<bool(const FlowSample&)>& stop);

struct LimitPoints {
  /// Backward limit x-, when the backward run converged.
  std::optional<std::vector<double>> minus;
  /// Forward limit x+; none when the forward run left the box.
  std::optional<std::vector<double>> plus;
  /// The backward run ran out of budget: x- is unresolved, not absent.
  bool minus_unresolved = false;
  Trajectory backward;
  Trajectory forward;
};

LimitPoints limit_points(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                         std::span<const double> point, const FlowBudget& budget = {});

/// [a, b] with a < b; both are declared regular values.
struct SliceSpec {
  double a = 0.0;
  double b = 0.0;

  void validate() const;
  bool contains(double value) const { return value >= a && value <= b; }
};

/// Points per axis of the regular sampling grid over the whole box.
struct GridSpec {
  int leaf_density = 21;
  int transverse_density = 21;
};

struct SkeletonPoint {
  std::vector<double> start;
  std::vector<double> limit;
};

struct SkeletonSample {
  std::vector<SkeletonPoint> points;
  /// Grid points whose value lies in the slice.
  std::size_t candidates = 0;
};

/// Grid points with f in [a, b] whose forward run converges in the box to a
/// critical point with f in [a, b].
SkeletonSample skeleton_sample(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                               const SliceSpec& slice, const GridSpec& grid, const FlowBudget& budget = {});

struct ConfinementReport {
  bool pass = false;
  double tolerance = 1e-6;
  /// max |x_i|, i <= d, over skeleton samples.
  double skeleton_deviation = 0.0;
  /// max |x_i|, i <= d, along forward runs that start on {x_1..x_d = 0}.
  double plane_drift = 0.0;
  double max_deviation = 0.0;
  std::size_t skeleton_points = 0;
  std::size_t plane_starts = 0;
};

/// Checks that the skeleton of the slice (and every forward run from the
/// plane {x_1 = .. = x_d = 0}) stays within `tolerance` of that plane. First
/// spot-checks the model shape by requiring D_i D_j f = 0 for i <= d, j != i
/// at sample points; throws PreconditionError if that fails.
ConfinementReport confinement_check(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                                    int d, const SliceSpec& slice, const GridSpec& grid, double tolerance = 1e-6,
                                    const FlowBudget& budget = {});

struct RossiniReport {
  bool pass = false;
  double on_plane_drift = 0.0;
  std::size_t on_plane_runs = 0;
  std::size_t off_plane_runs = 0;
  std::size_t monotonicity_violations = 0;
  /// Largest per-step decrease of the distance to the plane.
  double worst_decrease = 0.0;
};

/// Flow invariance of P = {x_1 = .. = x_d = 0} and repulsion from it within
/// `radius`, tested from `samples` deterministic pseudo-random starts of each
/// kind. Throws PreconditionError unless the metric block between the first d
/// and the remaining leaf directions vanishes on P at sample points.
RossiniReport rossini_check(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart, int d,
                            double radius, std::size_t samples, const FlowBudget& budget = {});

enum class AltoClass { ReachedBelowA, NearSkeleton, Unresolved };

std::string to_string(AltoClass c);

struct AltoEntry {
  std::vector<int> grid_index;
  std::vector<double> start;
  AltoClass classification = AltoClass::Unresolved;
  double final_value = 0.0;
};

struct AltoReport {
  std::vector<AltoEntry> entries;
  std::size_t reached_below = 0;
  std::size_t near_skeleton = 0;
  std::size_t unresolved = 0;
  double epsilon = 1e-3;
  bool pass = false;
};

/// Flows every grid point of the slice backward and sorts it into
/// ReachedBelowA, NearSkeleton (ends within epsilon of a critical point of
/// the slice and stays there) or Unresolved. PASS iff at most 1% unresolved.
AltoReport alto_dichotomy(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                          const SliceSpec& slice, const GridSpec& grid, const FlowBudget& budget = {},
                          double epsilon = 1e-3);

/// CSV with header t,x1..xn,v1..vq,f and one row per sample, 17 significant
/// digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& text);

/// "%.17g"
std::string format_double(double value);

}  // namespace folsing
