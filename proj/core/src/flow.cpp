#include "folsing/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "folsing/errors.hpp"

namespace folsing {

std::string to_string(Direction direction) { return direction == Direction::Forward ? "forward" : "backward"; }

std::string to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::Converged:
      return "Converged";
    case TrajectoryStatus::ExitedBox:
      return "ExitedBox";
    case TrajectoryStatus::TimeBudgetExhausted:
      return "TimeBudgetExhausted";
    case TrajectoryStatus::Stopped:
      return "Stopped";
  }
  return "Stopped";
}

std::string to_string(AltoClass c) {
  switch (c) {
    case AltoClass::ReachedBelowA:
      return "ReachedBelowA";
    case AltoClass::NearSkeleton:
      return "NearSkeleton";
    case AltoClass::Unresolved:
      return "Unresolved";
  }
  return "Unresolved";
}

void SliceSpec::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw InputError("slice needs finite a < b");
}

Eigen::VectorXd leafwise_gradient(const FoliatedFunction& f, const MetricSpec& metric, std::span<const double> point) {
  if (static_cast<int>(point.size()) != f.dims()) throw InputError("point has the wrong dimension");
  const Eigen::VectorXd partials = f.leaf_partials(point);
  if (metric.is_identity()) return partials;
  Eigen::LLT<Eigen::MatrixXd> llt(metric.at(point, f.leaf_dim()));
  if (llt.info() != Eigen::Success) throw PreconditionError("leafwise metric block is not positive-definite");
  return llt.solve(partials);
}

namespace {

constexpr double kExitResolution = 1e-9;

using State = std::vector<double>;

void check_start(const FoliatedFunction& f, const ChartSpec& chart, std::span<const double> start) {
  chart.validate();
  if (chart.leaf_dim != f.leaf_dim() || chart.transverse_dim != f.transverse_dim()) {
    throw InputError("chart dimensions do not match the function");
  }
  if (static_cast<int>(start.size()) != chart.dims()) throw InputError("start point has the wrong dimension");
  if (!chart.contains(start)) throw InputError("start point lies outside the chart box");
}

// Newton on the Euclidean leaf partials (the critical set does not depend on
// the metric), transverse coordinates fixed.
std::optional<std::vector<double>> polish(const FoliatedFunction& f, std::vector<double> point, double tolerance) {
  const auto n = static_cast<std::size_t>(f.leaf_dim());
  const std::vector<double> origin = point;
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd g = f.leaf_partials(point);
    if (!g.allFinite()) return std::nullopt;
    if (g.norm() == 0.0) break;
    const Eigen::VectorXd step = f.leaf_hessian(point).completeOrthogonalDecomposition().solve(g);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) point[i] -= step(static_cast<Eigen::Index>(i));
    if (step.norm() <= 1e-15 * (1.0 + Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(n)).norm())) {
      break;
    }
  }
  double moved = 0.0;
  for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(point[i] - origin[i]));
  if (!(f.leaf_partials(point).norm() <= tolerance) || moved > 1e-3) return std::nullopt;
  return point;
}

}  // namespace

Trajectory integrate_until(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                           std::span<const double> start, Direction direction, const FlowBudget& budget,
                           const std::function<bool(const FlowSample&)>& stop) {
  namespace odeint = boost::numeric::odeint;
  check_start(f, chart, start);
  const int n = f.leaf_dim();
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;

  Trajectory tr;
  tr.leaf_dim = n;
  tr.transverse_dim = f.transverse_dim();
  tr.direction = direction;

  std::vector<double> full(start.begin(), start.end());
  std::vector<double> scratch = full;
  auto system = [&](const State& x, State& dxdt, double /*t*/) {
    std::copy(x.begin(), x.end(), scratch.begin());
    const Eigen::VectorXd g = leafwise_gradient(f, metric, scratch);
    dxdt.resize(x.size());
    for (int i = 0; i < n; ++i) dxdt[static_cast<std::size_t>(i)] = sign * g(i);
  };

  auto stepper = odeint::make_controlled(budget.error_tolerance, budget.error_tolerance,
                                         odeint::runge_kutta_dopri5<State>());
  State x(full.begin(), full.begin() + n);
  double tau = 0.0;
  double dt = 1e-3;
  std::size_t steps = 0;
  tr.samples.push_back({0.0, full, f.value(full)});

  for (;;) {
    if (leafwise_gradient(f, metric, full).norm() < budget.gradient_stop) {
      tr.status = TrajectoryStatus::Converged;
      auto polished = polish(f, full, budget.polish_tolerance);
      if (polished) {
        std::vector<double> eig;
        const Signature s = metric_signature(f.leaf_hessian(*polished), metric.at(*polished, n), 1e-7, &eig);
        tr.degenerate_limit = s.zero > 0;
        tr.limit = std::move(polished);
      } else {
        tr.degenerate_limit = true;
        tr.limit = full;
      }
      break;
    }
    if (tau >= budget.max_time || steps >= budget.max_steps) {
      tr.status = TrajectoryStatus::TimeBudgetExhausted;
      break;
    }
    double h = std::min(dt, budget.max_time - tau);
    const State x_before = x;
    const double tau_before = tau;
    const auto result = stepper.try_step(system, x, tau, h);
    dt = h;
    if (result == odeint::fail) {
      if (dt < 1e-14 * (1.0 + tau)) {
        tr.step_underflow = true;
        tr.status = TrajectoryStatus::TimeBudgetExhausted;
        break;
      }
      continue;
    }
    ++steps;
    std::copy(x.begin(), x.end(), full.begin());
    if (!chart.contains(full)) {
      // Shrink the crossing step so the exit time is resolved.
      const double taken = tau - tau_before;
      if (taken > kExitResolution * (1.0 + tau_before)) {
        x = x_before;
        tau = tau_before;
        std::copy(x.begin(), x.end(), full.begin());
        dt = taken / 2;
        stepper.reset();  // drop the cached end-of-step derivative
        continue;
      }
      tr.samples.push_back({sign * tau, full, f.value(full)});
      tr.status = TrajectoryStatus::ExitedBox;
      break;
    }
    tr.samples.push_back({sign * tau, full, f.value(full)});
    if (stop && stop(tr.samples.back())) {
      tr.status = TrajectoryStatus::Stopped;
      break;
    }
  }
  return tr;
}

Trajectory integrate(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                     std::span<const double> start, Direction direction, const FlowBudget& budget) {
  return integrate_until(f, metric, chart, start, direction, budget, {});
}

LimitPoints limit_points(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                         std::span<const double> point, const FlowBudget& budget) {
  LimitPoints out;
  out.backward = integrate(f, metric, chart, point, Direction::Backward, budget);
  out.forward = integrate(f, metric, chart, point, Direction::Forward, budget);
  if (out.backward.status == TrajectoryStatus::Converged) {
    out.minus = out.backward.limit;
  } else {
    out.minus_unresolved = true;
  }
  if (out.forward.status == TrajectoryStatus::Converged) out.plus = out.forward.limit;
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> grid_tuples(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (;;) {
    out.push_back(idx);
    std::size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (sizes.empty()) return out;
  }
}

// Regular grid over the box (all coordinates), in lexicographic index order.
struct BoxGrid {
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<std::size_t>> tuples;

  std::vector<double> point(const std::vector<std::size_t>& idx) const {
    std::vector<double> p(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) p[i] = axes[i][idx[i]];
    return p;
  }
};

BoxGrid make_grid(const ChartSpec& chart, const GridSpec& grid) {
  BoxGrid g;
  std::vector<std::size_t> sizes;
  for (int i = 0; i < chart.dims(); ++i) {
    const int density = i < chart.leaf_dim ? grid.leaf_density : grid.transverse_density;
    g.axes.push_back(grid_values(chart.box[static_cast<std::size_t>(i)], density));
    sizes.push_back(g.axes.back().size());
  }
  g.tuples = grid_tuples(sizes);
  return g;
}

double plane_distance(const std::vector<double>& p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

double plane_max_abs(const std::vector<double>& p, int d) {
  double m = 0.0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(p[static_cast<std::size_t>(i)]));
  return m;
}

}  // namespace

SkeletonSample skeleton_sample(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                               const SliceSpec& slice, const GridSpec& grid, const FlowBudget& budget) {
  slice.validate();
  chart.validate();
  SkeletonSample out;
  const BoxGrid g = make_grid(chart, grid);
  for (const auto& idx : g.tuples) {
    const auto start = g.point(idx);
    if (!slice.contains(f.value(start))) continue;
    ++out.candidates;
    const Trajectory tr = integrate(f, metric, chart, start, Direction::Forward, budget);
    if (tr.status != TrajectoryStatus::Converged || !tr.limit) continue;
    if (!slice.contains(f.value(*tr.limit)) || !chart.contains(*tr.limit)) continue;
    out.points.push_back({start, *tr.limit});
  }
  return out;
}

ConfinementReport confinement_check(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                                    int d, const SliceSpec& slice, const GridSpec& grid, double tolerance,
                                    const FlowBudget& budget) {
  chart.validate();
  slice.validate();
  if (d < 1 || d > chart.leaf_dim) throw InputError("model dimension d must satisfy 1 <= d <= n");

  // Model shape: the first d coordinates enter only through x_i^2 terms.
  const BoxGrid probe = make_grid(chart, GridSpec{3, 3});
  for (const auto& idx : probe.tuples) {
    const auto p = probe.point(idx);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < chart.dims(); ++j) {
        if (j == i) continue;
        if (std::abs(f.second_partial(i, j).eval(p)) > 1e-12) {
          throw PreconditionError("function does not have the model shape x_1^2 + .. + x_d^2 + rest");
        }
      }
    }
  }

  ConfinementReport report;
  report.tolerance = tolerance;
  const SkeletonSample skeleton = skeleton_sample(f, metric, chart, slice, grid, budget);
  report.skeleton_points = skeleton.points.size();
  for (const auto& sp : skeleton.points) {
    report.skeleton_deviation = std::max(report.skeleton_deviation, plane_max_abs(sp.start, d));
  }

  const BoxGrid g = make_grid(chart, grid);
  for (const auto& idx : g.tuples) {
    auto start = g.point(idx);
    if (plane_max_abs(start, d) != 0.0) continue;
    if (leafwise_gradient(f, metric, start).norm() < budget.gradient_stop) continue;
    ++report.plane_starts;
    const Trajectory tr = integrate(f, metric, chart, start, Direction::Forward, budget);
    for (const auto& s : tr.samples) {
      if (chart.contains(s.point)) report.plane_drift = std::max(report.plane_drift, plane_max_abs(s.point, d));
    }
  }
  report.max_deviation = std::max(report.skeleton_deviation, report.plane_drift);
  report.pass = report.max_deviation <= tolerance;
  return report;
}

RossiniReport rossini_check(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart, int d,
                            double radius, std::size_t samples, const FlowBudget& budget) {
  chart.validate();
  if (d < 1 || d > chart.leaf_dim) throw InputError("plane dimension d must satisfy 1 <= d <= n");
  if (!(radius > 0.0)) throw InputError("neighbourhood radius must be positive");
  const int n = chart.leaf_dim;

  // Adaptedness: on P the metric has no block coupling x_1..x_d to the other
  // leaf directions.
  if (!metric.is_identity()) {
    const BoxGrid probe = make_grid(chart, GridSpec{3, 3});
    for (const auto& idx : probe.tuples) {
      auto p = probe.point(idx);
      for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = 0.0;
      const Eigen::MatrixXd g = metric.at(p, n);
      for (int i = 0; i < d; ++i) {
        for (int j = d; j < n; ++j) {
          if (std::abs(g(i, j)) > 1e-12 || std::abs(g(j, i)) > 1e-12) {
            throw PreconditionError("metric is not adapted to the plane {x_1 = .. = x_d = 0}");
          }
        }
      }
    }
  }

  std::mt19937_64 rng(0x5eedf01aULL);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };
  auto random_point = [&]() {
    std::vector<double> p(static_cast<std::size_t>(chart.dims()));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(chart.box[i].lo, chart.box[i].hi);
    return p;
  };

  RossiniReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    auto start = random_point();
    for (int i = 0; i < d; ++i) start[static_cast<std::size_t>(i)] = 0.0;
    if (!chart.contains(start)) continue;
    ++report.on_plane_runs;
    const Trajectory tr = integrate(f, metric, chart, start, Direction::Forward, budget);
    for (const auto& smp : tr.samples) report.on_plane_drift = std::max(report.on_plane_drift, plane_distance(smp.point, d));
  }

  std::size_t attempts = 0;
  while (report.off_plane_runs < samples && attempts < 100 * samples + 100) {
    ++attempts;
    auto start = random_point();
    for (int i = 0; i < d; ++i) {
      const Interval& iv = chart.box[static_cast<std::size_t>(i)];
      start[static_cast<std::size_t>(i)] = uniform(std::max(iv.lo, -radius), std::min(iv.hi, radius));
    }
    const double r0 = plane_distance(start, d);
    if (r0 == 0.0 || r0 > radius || !chart.contains(start)) continue;
    ++report.off_plane_runs;
    const Trajectory tr = integrate_until(f, metric, chart, start, Direction::Forward, budget,
                                          [&](const FlowSample& smp) { return plane_distance(smp.point, d) > radius; });
    for (std::size_t j = 1; j < tr.samples.size(); ++j) {
      const double before = plane_distance(tr.samples[j - 1].point, d);
      const double after = plane_distance(tr.samples[j].point, d);
      if (before > radius || after > radius) break;
      const double decrease = before - after;
      report.worst_decrease = std::max(report.worst_decrease, decrease);
      if (decrease > 1e-10) ++report.monotonicity_violations;
    }
  }
  report.pass = report.on_plane_drift <= 1e-8 && report.monotonicity_violations == 0;
  return report;
}

AltoReport alto_dichotomy(const FoliatedFunction& f, const MetricSpec& metric, const ChartSpec& chart,
                          const SliceSpec& slice, const GridSpec& grid, const FlowBudget& budget, double epsilon) {
  chart.validate();
  slice.validate();
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  AltoReport report;
  report.epsilon = epsilon;
  const BoxGrid g = make_grid(chart, grid);
  for (const auto& idx : g.tuples) {
    AltoEntry entry;
    entry.start = g.point(idx);
    if (!slice.contains(f.value(entry.start))) continue;
    entry.grid_index.assign(idx.begin(), idx.end());
    const Trajectory tr = integrate_until(f, metric, chart, entry.start, Direction::Backward, budget,
                                          [&](const FlowSample& s) { return s.value < slice.a; });
    entry.final_value = tr.samples.back().value;
    if (tr.status == TrajectoryStatus::Stopped) {
      entry.classification = AltoClass::ReachedBelowA;
    } else if (tr.status == TrajectoryStatus::Converged && tr.limit) {
      const double limit_value = f.value(*tr.limit);
      // The run ends at the limit, so from the first sample within epsilon
      // of it onward it must stay within epsilon.
      bool stays = false;
      const auto& lim = *tr.limit;
      std::size_t first_inside = tr.samples.size();
      for (std::size_t j = tr.samples.size(); j > 0; --j) {
        double dist = 0.0;
        for (std::size_t i = 0; i < lim.size(); ++i) dist = std::max(dist, std::abs(tr.samples[j - 1].point[i] - lim[i]));
        if (dist > epsilon) break;
        first_inside = j - 1;
      }
      stays = first_inside < tr.samples.size();
      if (stays && limit_value >= slice.a - 1e-9 && limit_value <= slice.b + 1e-9) {
        entry.classification = AltoClass::NearSkeleton;
      }
    }
    switch (entry.classification) {
      case AltoClass::ReachedBelowA:
        ++report.reached_below;
        break;
      case AltoClass::NearSkeleton:
        ++report.near_skeleton;
        break;
      case AltoClass::Unresolved:
        ++report.unresolved;
        break;
    }
    report.entries.push_back(std::move(entry));
  }
  const std::size_t total = report.entries.size();
  report.pass = total == 0 || static_cast<double>(report.unresolved) <= 0.01 * static_cast<double>(total);
  return report;
}

}  // namespace folsing
