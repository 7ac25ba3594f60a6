#include "folsing/folchart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "folsing/errors.hpp"

namespace folsing {

// ------------------------------------------------------------------ charts

void ChartSpec::validate() const {
  if (leaf_dim < 1) throw InputError("chart needs at least one leaf variable");
  if (transverse_dim < 0) throw InputError("transverse dimension must be nonnegative");
  if (static_cast<int>(box.size()) != dims()) throw InputError("chart box must have one interval per variable");
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
      throw InputError("chart box intervals must be finite with lo <= hi");
    }
  }
}

bool ChartSpec::contains(std::span<const double> point, double slack) const {
  if (point.size() != box.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double s = slack * (1.0 + std::max(std::abs(box[i].lo), std::abs(box[i].hi)));
    if (!(point[i] >= box[i].lo - s && point[i] <= box[i].hi + s)) return false;
  }
  return true;
}

std::vector<double> grid_values(const Interval& range, int density) {
  if (density < 1) throw InputError("grid density must be positive");
  if (density == 1) return {0.5 * (range.lo + range.hi)};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(density));
  for (int j = 0; j < density; ++j) {
    out.push_back(j == density - 1 ? range.hi : range.lo + (range.hi - range.lo) * j / (density - 1));
  }
  return out;
}

namespace {

// All index tuples of a grid with `dims` axes and `density` points per axis.
std::vector<std::vector<int>> grid_indices(int dims, int density) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  for (;;) {
    out.push_back(idx);
    int k = dims - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == density) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ metric

MetricSpec::MetricSpec(std::vector<std::vector<Expr>> entries) : entries_(std::move(entries)) {
  for (const auto& row : entries_) {
    if (row.size() != entries_.size()) throw InputError("metric must be a square matrix");
  }
}

Eigen::MatrixXd MetricSpec::at(std::span<const double> point, int leaf_dim) const {
  if (is_identity()) return Eigen::MatrixXd::Identity(leaf_dim, leaf_dim);
  if (static_cast<int>(entries_.size()) != leaf_dim) throw InputError("metric size does not match the leaf dimension");
  Eigen::MatrixXd g(leaf_dim, leaf_dim);
  for (int i = 0; i < leaf_dim; ++i) {
    for (int j = 0; j < leaf_dim; ++j) {
      g(i, j) = entries_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(point);
    }
  }
  return g;
}

void MetricSpec::validate(const ChartSpec& chart) const {
  chart.validate();
  if (is_identity()) return;
  if (static_cast<int>(entries_.size()) != chart.leaf_dim) {
    throw InputError("metric size does not match the leaf dimension");
  }
  for (const auto& row : entries_) {
    for (const auto& e : row) {
      if (e.max_variable() >= chart.dims()) throw InputError("metric uses a variable outside the chart");
    }
  }
  const int density = chart.dims() <= 6 ? 3 : 1;
  std::vector<std::vector<double>> axes;
  for (const auto& iv : chart.box) axes.push_back(grid_values(iv, density));
  for (const auto& idx : grid_indices(chart.dims(), density)) {
    std::vector<double> point(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) point[i] = axes[i][static_cast<std::size_t>(idx[i])];
    const Eigen::MatrixXd g = at(point, chart.leaf_dim);
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff())) {
      throw InputError("metric is not symmetric on the box");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw InputError("metric is not positive-definite on the box");
  }
}

// -------------------------------------------------------- foliated function

FoliatedFunction::FoliatedFunction(Expr f, int leaf_dim, int transverse_dim)
    : f_(std::move(f)), leaf_dim_(leaf_dim), transverse_dim_(transverse_dim) {
  if (leaf_dim < 1 || transverse_dim < 0) throw InputError("chart needs leaf_dim >= 1 and transverse_dim >= 0");
  if (f_.max_variable() >= dims()) throw InputError("expression uses a variable outside the chart");
  for (int i = 0; i < dims(); ++i) first_.push_back(f_.derivative(i));
  for (int i = 0; i < dims(); ++i) {
    for (int j = 0; j < dims(); ++j) {
      second_.push_back(j < i ? second_[static_cast<std::size_t>(j * dims() + i)]
                              : first_[static_cast<std::size_t>(i)].derivative(j));
    }
  }
}

const Expr& FoliatedFunction::second_partial(int i, int j) const {
  return second_[static_cast<std::size_t>(i * dims() + j)];
}

Eigen::VectorXd FoliatedFunction::leaf_partials(std::span<const double> point) const {
  Eigen::VectorXd g(leaf_dim_);
  for (int i = 0; i < leaf_dim_; ++i) g(i) = partial(i).eval(point);
  return g;
}

Eigen::MatrixXd FoliatedFunction::leaf_hessian(std::span<const double> point) const {
  Eigen::MatrixXd h(leaf_dim_, leaf_dim_);
  for (int i = 0; i < leaf_dim_; ++i) {
    for (int j = i; j < leaf_dim_; ++j) h(i, j) = h(j, i) = second_partial(i, j).eval(point);
  }
  return h;
}

std::vector<Rational> FoliatedFunction::leaf_partials_exact(std::span<const Rational> point) const {
  std::vector<Rational> g;
  for (int i = 0; i < leaf_dim_; ++i) g.push_back(partial(i).eval_exact(point));
  return g;
}

Eigen::MatrixXd foliated_hessian(const FoliatedFunction& f, std::span<const double> point, double tolerance) {
  if (static_cast<int>(point.size()) != f.dims()) throw InputError("point has the wrong dimension");
  const double residual = f.leaf_partials(point).norm();
  if (residual > tolerance) {
    throw PreconditionError("foliated Hessian requested at a point that is not leafwise critical (residual " +
                            std::to_string(residual) + ")");
  }
  return f.leaf_hessian(point);
}

Signature metric_signature(const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& metric, double threshold,
                           std::vector<double>* eigenvalues) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian, metric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw PreconditionError("metric block is not positive-definite");
  const double norm = hessian.size() == 0 ? 0.0 : hessian.operatorNorm();
  const double cut = threshold * (1.0 + norm);
  Signature s;
  const Eigen::VectorXd& ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < cut) {
      ++s.zero;
    } else if (ev(i) > 0) {
      ++s.plus;
    } else {
      ++s.minus;
    }
  }
  if (eigenvalues) eigenvalues->assign(ev.data(), ev.data() + ev.size());
  return s;
}

std::string StratumLabel::to_string() const { return "Sigma_" + std::to_string(d) + "^" + symbol.to_string(); }

// ---------------------------------------------------------- critical search

namespace {

struct NewtonResult {
  bool converged = false;
  std::vector<double> point;
  double residual = 0.0;
};

// Newton on the leaf gradient with a pseudo-inverse step. The iteration goes
// on past the residual tolerance until the step itself is negligible, which
// pulls degenerate roots (linear convergence) close enough to deduplicate.
NewtonResult newton_leaf(const FoliatedFunction& f, const ChartSpec& chart, std::vector<double> point,
                         const CriticalSearchOptions& options) {
  const int n = f.leaf_dim();
  NewtonResult out;
  double width = 0.0;
  for (const auto& iv : chart.box) width = std::max(width, iv.hi - iv.lo);
  const double escape = 2.0 * width + 1.0;
  for (int it = 0; it < options.max_newton_iterations; ++it) {
    const Eigen::VectorXd g = f.leaf_partials(point);
    if (!g.allFinite()) return out;
    if (g.norm() == 0.0) break;
    const Eigen::MatrixXd h = f.leaf_hessian(point);
    const Eigen::VectorXd step = h.completeOrthogonalDecomposition().solve(g);
    if (!step.allFinite()) return out;
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
      point[static_cast<std::size_t>(i)] -= step(i);
      scale = std::max(scale, std::abs(point[static_cast<std::size_t>(i)]));
      const Interval& iv = chart.box[static_cast<std::size_t>(i)];
      if (point[static_cast<std::size_t>(i)] < iv.lo - escape || point[static_cast<std::size_t>(i)] > iv.hi + escape) {
        return out;
      }
    }
    if (step.norm() <= 1e-15 * scale) break;
    if (g.norm() <= options.residual_tolerance && step.norm() <= 1e-13 * scale) break;
  }
  out.residual = f.leaf_partials(point).norm();
  out.converged = std::isfinite(out.residual) && out.residual <= options.residual_tolerance;
  out.point = std::move(point);
  return out;
}

std::optional<Rational> recognise_rational(double x, int max_denominator) {
  if (!std::isfinite(x)) return std::nullopt;
  for (long q = 1; q <= max_denominator; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::abs(p) > 1e15) return std::nullopt;
    if (std::abs(x - p / static_cast<double>(q)) <= 1e-9) {
      Rational r(static_cast<long>(p), q);
      r.canonicalize();
      return r;
    }
  }
  return std::nullopt;
}

// Rational point near `location` at which the leaf gradient vanishes exactly.
std::optional<std::vector<Rational>> exact_critical_point(const FoliatedFunction& f, const std::vector<double>& location,
                                                          int max_denominator) {
  std::vector<Rational> exact;
  for (double x : location) {
    auto r = recognise_rational(x, max_denominator);
    if (!r) return std::nullopt;
    exact.push_back(*r);
  }
  for (const auto& g : f.leaf_partials_exact(exact)) {
    if (g != 0) return std::nullopt;
  }
  return exact;
}

double max_distance(const std::vector<double>& a, const std::vector<double>& b, std::size_t count) {
  double d = 0.0;
  for (std::size_t i = 0; i < count; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

BoardmanSymbol exact_symbol_at(const FoliatedFunction& f, std::span<const Rational> point, int order) {
  if (static_cast<int>(point.size()) != f.dims()) throw InputError("point has the wrong dimension");
  TruncatedPoly p = translate(f.expr().to_polynomial(f.dims()), point);
  p -= TruncatedPoly::constant(p.ring(), p.constant_term());
  const FoliatedJet jet{f.leaf_dim(), f.transverse_dim(), order, p.with_order(order)};
  return foliated_symbol(jet);
}

StratumLabel classify_point(const CriticalPointRecord& record, int leaf_dim) {
  StratumLabel label;
  label.d = record.signature.plus;
  const int rank = record.signature.plus + record.signature.minus;
  const BoardmanSymbol from_hessian{leaf_dim, leaf_dim - rank};
  if (!record.symbol) {
    label.symbol = from_hessian;
    return label;
  }
  const BoardmanSymbol& exact = *record.symbol;
  if (exact.size() < 2 || exact[0] != from_hessian[0] || exact[1] != from_hessian[1]) {
    throw InvariantViolation("exact symbol " + exact.to_string() + " disagrees with the Hessian prefix " +
                             from_hessian.to_string());
  }
  // Entries after the first zero are all zero; the label keeps one.
  std::size_t keep = 0;
  while (keep < exact.size() && exact[keep] != 0) ++keep;
  label.symbol = exact.prefix(std::min(keep + 1, exact.size()));
  return label;
}

CriticalSearch find_critical_points(const FoliatedFunction& f, const ChartSpec& chart, const MetricSpec& metric,
                                    const CriticalSearchOptions& options) {
  chart.validate();
  if (chart.leaf_dim != f.leaf_dim() || chart.transverse_dim != f.transverse_dim()) {
    throw InputError("chart dimensions do not match the function");
  }
  if (options.symbol_order < 2) throw InputError("symbol order must be at least 2");
  const int n = chart.leaf_dim;
  const int q = chart.transverse_dim;
  std::vector<std::vector<double>> leaf_axes;
  std::vector<std::vector<double>> transverse_axes;
  for (int i = 0; i < n; ++i) leaf_axes.push_back(grid_values(chart.box[static_cast<std::size_t>(i)], options.leaf_density));
  for (int j = 0; j < q; ++j) {
    transverse_axes.push_back(grid_values(chart.box[static_cast<std::size_t>(n + j)], options.transverse_density));
  }
  const auto leaf_seeds = grid_indices(n, options.leaf_density);
  const auto sweep = grid_indices(q, options.transverse_density);

  CriticalSearch out;
  for (const auto& tidx : sweep) {
    std::vector<double> transverse(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
      transverse[static_cast<std::size_t>(j)] =
          transverse_axes[static_cast<std::size_t>(j)][static_cast<std::size_t>(tidx[static_cast<std::size_t>(j)])];
    }
    std::vector<NewtonResult> roots;
    for (const auto& sidx : leaf_seeds) {
      ++out.seeds;
      std::vector<double> point(static_cast<std::size_t>(n + q));
      for (int i = 0; i < n; ++i) {
        point[static_cast<std::size_t>(i)] =
            leaf_axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(sidx[static_cast<std::size_t>(i)])];
      }
      std::copy(transverse.begin(), transverse.end(), point.begin() + n);
      NewtonResult r = newton_leaf(f, chart, std::move(point), options);
      if (!r.converged || !chart.contains(r.point, 1e-12)) {
        ++out.dropped;
        continue;
      }
      auto dup = std::find_if(roots.begin(), roots.end(), [&](const NewtonResult& k) {
        return max_distance(k.point, r.point, static_cast<std::size_t>(n)) < options.dedup_radius;
      });
      if (dup == roots.end()) {
        roots.push_back(std::move(r));
      } else if (r.residual < dup->residual) {
        *dup = std::move(r);
      }
    }
    for (auto& r : roots) {
      CriticalPointRecord rec;
      rec.location = std::move(r.point);
      rec.leafwise_gradient_norm = r.residual;
      rec.foliated_hessian = f.leaf_hessian(rec.location);
      rec.signature = metric_signature(rec.foliated_hessian, metric.at(rec.location, n), options.eigenvalue_threshold,
                                       &rec.eigenvalues);
      rec.transverse_index = tidx;
      rec.exact_location = exact_critical_point(f, rec.location, options.max_denominator);
      if (rec.exact_location) rec.symbol = exact_symbol_at(f, *rec.exact_location, options.symbol_order);
      rec.stratum_label = classify_point(rec, n);
      rec.is_leafwise_max = rec.signature.plus == 0 && rec.signature.zero == 0;
      out.records.push_back(std::move(rec));
    }
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const CriticalPointRecord& a, const CriticalPointRecord& b) { return a.location < b.location; });
  return out;
}

// ---------------------------------------------------------------- openness

std::string to_string(OpennessVerdict verdict) {
  switch (verdict) {
    case OpennessVerdict::Pass:
      return "PASS";
    case OpennessVerdict::Fail:
      return "FAIL";
    case OpennessVerdict::Undecided:
      return "UNDECIDED";
  }
  return "UNDECIDED";
}

OpennessReport openness_check(const FoliatedFunction& f, const ChartSpec& chart, const MetricSpec& metric,
                              const CriticalSearchOptions& options, bool declared_proper) {
  const CriticalSearch search = find_critical_points(f, chart, metric, options);
  OpennessReport report;
  report.records = search.records.size();
  report.seeds = search.seeds;
  report.dropped = search.dropped;
  report.declared_proper = declared_proper;
  for (const auto& rec : search.records) {
    if (rec.signature.plus > 0) continue;
    if (rec.signature.zero == 0) {
      report.witnesses.push_back(rec);
    } else {
      report.suspects.push_back(rec);
    }
  }
  if (!report.witnesses.empty()) {
    report.verdict = OpennessVerdict::Fail;
  } else if (!report.suspects.empty()) {
    report.verdict = OpennessVerdict::Undecided;
  }
  return report;
}

// -------------------------------------------------------------- genericity

GenericityReport genericity_spotcheck(const std::vector<CriticalPointRecord>& records, int leaf_dim,
                                      double dedup_radius) {
  GenericityReport report;
  const auto n = static_cast<std::size_t>(leaf_dim);
  std::map<std::vector<int>, std::vector<const CriticalPointRecord*>> by_leaf;
  for (const auto& rec : records) by_leaf[rec.transverse_index].push_back(&rec);

  std::set<std::vector<int>> degenerate_leaves;
  for (const auto& [tidx, recs] : by_leaf) {
    LeafIsolation leaf;
    leaf.transverse.assign(recs.front()->location.begin() + leaf_dim, recs.front()->location.end());
    leaf.points = recs.size();
    leaf.min_distance = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < recs.size(); ++a) {
      for (std::size_t b = a + 1; b < recs.size(); ++b) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = recs[a]->location[i] - recs[b]->location[i];
          d2 += d * d;
        }
        leaf.min_distance = std::min(leaf.min_distance, std::sqrt(d2));
      }
    }
    leaf.isolated = leaf.min_distance > dedup_radius;
    report.all_isolated = report.all_isolated && leaf.isolated;
    bool degenerate = false;
    for (const auto* rec : recs) {
      if (rec->signature.zero > 0) {
        ++report.degenerate_records;
        degenerate = true;
      }
    }
    if (degenerate) {
      degenerate_leaves.insert(tidx);
      report.degenerate_transverse_values.push_back(leaf.transverse);
    }
    report.leaves.push_back(std::move(leaf));
  }
  for (const auto& a : degenerate_leaves) {
    for (const auto& b : degenerate_leaves) {
      int steps = 0;
      for (std::size_t j = 0; j < a.size(); ++j) steps += std::abs(a[j] - b[j]);
      if (steps == 1) report.degenerate_set_discrete = false;
    }
  }
  return report;
}

// ------------------------------------------------------------ augmentation

AugmentedChart augment_with_square(const Expr& f, const ChartSpec& chart, const MetricSpec& metric,
                                   Interval t_range) {
  chart.validate();
  const int n = chart.leaf_dim;
  std::vector<Expr> shift;
  for (int i = 0; i < chart.dims(); ++i) shift.push_back(Expr::variable(i < n ? i : i + 1));
  AugmentedChart out;
  out.expr = substitute(f, shift) + pow(Expr::variable(n), 2);
  out.chart = chart;
  out.chart.leaf_dim = n + 1;
  out.chart.box.insert(out.chart.box.begin() + n, t_range);
  if (!metric.is_identity()) {
    std::vector<std::vector<Expr>> g(static_cast<std::size_t>(n + 1),
                                     std::vector<Expr>(static_cast<std::size_t>(n + 1), Expr::constant(0)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            substitute(metric.entries()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], shift);
      }
    }
    g[static_cast<std::size_t>(n)][static_cast<std::size_t>(n)] = Expr::constant(1);
    out.metric = MetricSpec(std::move(g));
  }
  return out;
}

}  // namespace folsing
