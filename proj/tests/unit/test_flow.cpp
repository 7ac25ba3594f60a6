#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "folsing/errors.hpp"
#include "folsing/flow.hpp"
#include "test_support.hpp"

using namespace folsing;

namespace {

ChartSpec square_chart(int n, int q, double r = 1.0) {
  ChartSpec c;
  c.leaf_dim = n;
  c.transverse_dim = q;
  c.box.assign(static_cast<std::size_t>(n + q), Interval{-r, r});
  return c;
}

FoliatedFunction make(const std::string& text, int n, int q) { return FoliatedFunction(parse_expression(text, n, q), n, q); }

MetricSpec skewed() {
  return MetricSpec({{Expr::constant(1), Expr::constant(make_rational(1, 2))}, {Expr::constant(make_rational(1, 2)), Expr::constant(1)}});
}

struct FlowCase {
  std::string text;
  int n;
  int q;
};

const std::vector<FlowCase>& flow_catalog() {
  static const std::vector<FlowCase> c{{"x1^2 + v1^2", 1, 1}, {"x1^2 - x2^2", 2, 0}, {"x1^2 + x2^3 - v1*x2", 2, 1}};
  return c;
}

void expect_monotone(const Trajectory& t, Direction dir, const std::string& label) {
  for (std::size_t j = 1; j < t.samples.size(); ++j) {
    const double step = t.samples[j].value - t.samples[j - 1].value;
    if (dir == Direction::Forward) {
      EXPECT_GE(step, -1e-9) << label << " sample " << j;
    } else {
      EXPECT_LE(step, 1e-9) << label << " sample " << j;
    }
  }
}

}  // namespace

TEST(LeafwiseGradient, SpecExamples) {
  const std::vector<double> one{1.0};
  EXPECT_DOUBLE_EQ(leafwise_gradient(make("x1^2", 1, 0), MetricSpec{}, one)(0), 2.0);
  const MetricSpec four({{Expr::constant(4)}});
  EXPECT_DOUBLE_EQ(leafwise_gradient(make("x1^2", 1, 0), four, one)(0), 0.5);
  const std::vector<double> p{0.3, 0.4};
  const auto g = leafwise_gradient(make("x2", 2, 0), MetricSpec{}, p);
  EXPECT_DOUBLE_EQ(g(0), 0.0);
  EXPECT_DOUBLE_EQ(g(1), 1.0);
}

TEST(LeafwiseGradient, SingularMetricRejected) {
  const MetricSpec zero({{Expr::constant(0)}});
  const std::vector<double> one{1.0};
  EXPECT_THROW(leafwise_gradient(make("x1^2", 1, 0), zero, one), PreconditionError);
}

TEST(Integrate, SquareForwardExitsAndBackwardConverges) {
  const auto f = make("x1^2", 1, 0);
  const auto chart = square_chart(1, 0, 2.0);
  const std::vector<double> start{1.0};
  const auto fw = integrate(f, MetricSpec{}, chart, start, Direction::Forward);
  EXPECT_EQ(fw.status, TrajectoryStatus::ExitedBox);
  // x(t) = e^(2t) reaches the wall at t = ln(2) / 2.
  EXPECT_NEAR(fw.samples.back().t, std::log(2.0) / 2, 1e-2);
  const auto bw = integrate(f, MetricSpec{}, chart, start, Direction::Backward);
  ASSERT_EQ(bw.status, TrajectoryStatus::Converged);
  ASSERT_TRUE(bw.limit.has_value());
  EXPECT_NEAR((*bw.limit)[0], 0.0, 1e-12);
  EXPECT_FALSE(bw.degenerate_limit);
  EXPECT_LT(bw.samples.back().t, 0.0);
}

TEST(Integrate, ClosedFormAgreement) {
  const auto f = make("x1^2", 1, 0);
  const std::vector<double> start{0.01};
  const auto fw = integrate(f, MetricSpec{}, square_chart(1, 0), start, Direction::Forward);
  for (const auto& s : fw.samples) EXPECT_NEAR(s.point[0], 0.01 * std::exp(2 * s.t), 1e-7);
}

TEST(Integrate, PhaseLineConvergesToAttractor) {
  // x' = 3 x^2 - 3 on the leaf x2; the x1 direction is flat.
  const auto f = make("x2^3 - 3*x2", 2, 0);
  const std::vector<double> start{0.0, 0.0};
  const auto t = integrate(f, MetricSpec{}, square_chart(2, 0, 2.0), start, Direction::Forward);
  ASSERT_EQ(t.status, TrajectoryStatus::Converged);
  EXPECT_NEAR((*t.limit)[1], -1.0, 1e-10);
  EXPECT_EQ((*t.limit)[0], 0.0);
}

TEST(Integrate, StartOutsideBoxRejected) {
  const std::vector<double> p{3.0};
  EXPECT_THROW(integrate(make("x1^2", 1, 0), MetricSpec{}, square_chart(1, 0), p, Direction::Forward), InputError);
}

TEST(Integrate, StopPredicate) {
  const auto f = make("x1^2", 1, 0);
  const std::vector<double> start{0.5};
  const auto t = integrate_until(f, MetricSpec{}, square_chart(1, 0), start, Direction::Backward, {},
                                 [](const FlowSample& s) { return s.value < 0.01; });
  EXPECT_EQ(t.status, TrajectoryStatus::Stopped);
  EXPECT_LT(t.samples.back().value, 0.01);
}

TEST(Integrate, MonotoneAndLeafPreservingOnCatalog) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const auto& c : flow_catalog()) {
    const auto f = make(c.text, c.n, c.q);
    const auto chart = square_chart(c.n, c.q);
    for (int k = 0; k < 12; ++k) {
      std::vector<double> start(static_cast<std::size_t>(c.n + c.q));
      for (auto& x : start) x = u(rng);
      for (auto dir : {Direction::Forward, Direction::Backward}) {
        const auto t = integrate(f, MetricSpec{}, chart, start, dir);
        ASSERT_FALSE(t.samples.empty());
        expect_monotone(t, dir, c.text);
        for (const auto& s : t.samples) {
          for (int j = c.n; j < c.n + c.q; ++j) {
            EXPECT_EQ(s.point[static_cast<std::size_t>(j)], start[static_cast<std::size_t>(j)]);
          }
        }
        if (t.limit) {
          for (int j = c.n; j < c.n + c.q; ++j) {
            EXPECT_EQ((*t.limit)[static_cast<std::size_t>(j)], start[static_cast<std::size_t>(j)]);
          }
        }
      }
    }
  }
}

TEST(Integrate, LimitsStableUnderHalvedErrorControl) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  FlowBudget tight;
  tight.error_tolerance /= 2;
  int converged = 0;
  for (const auto& c : flow_catalog()) {
    const auto f = make(c.text, c.n, c.q);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> start(static_cast<std::size_t>(c.n + c.q));
      for (auto& x : start) x = u(rng);
      for (auto dir : {Direction::Forward, Direction::Backward}) {
        const auto a = integrate(f, MetricSpec{}, square_chart(c.n, c.q), start, dir);
        if (a.status != TrajectoryStatus::Converged || a.degenerate_limit) continue;
        const auto b = integrate(f, MetricSpec{}, square_chart(c.n, c.q), start, dir, tight);
        ASSERT_EQ(b.status, TrajectoryStatus::Converged);
        const auto ga = f.leaf_partials(*a.limit);
        EXPECT_LT(ga.norm(), 1e-12);
        double move = 0;
        for (std::size_t i = 0; i < a.limit->size(); ++i) move = std::max(move, std::abs((*a.limit)[i] - (*b.limit)[i]));
        EXPECT_LT(move, 1e-6) << c.text;
        ++converged;
      }
    }
  }
  EXPECT_GT(converged, 10);
}

TEST(Integrate, EquilibriaStayFixed) {
  const auto f = make("x1^2 + x2^3 - v1*x2", 2, 1);
  const std::vector<std::vector<double>> points{{0.0, 0.0, 0.0}, {0.0, 0.5, 0.75}, {0.0, -0.5, 0.75}};
  for (const auto& p : points) {
    for (auto dir : {Direction::Forward, Direction::Backward}) {
      const auto t = integrate(f, MetricSpec{}, square_chart(2, 1), p, dir);
      for (const auto& s : t.samples) {
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(s.point[i], p[i], 1e-8);
      }
      EXPECT_EQ(t.status, TrajectoryStatus::Converged);
    }
  }
}

TEST(LimitPoints, SpecExamples) {
  {
    const auto f = make("x1^2 + v1^2", 1, 1);
    const std::vector<double> p{1.0, 0.5};
    const auto lp = limit_points(f, MetricSpec{}, square_chart(1, 1), p);
    ASSERT_TRUE(lp.minus.has_value());
    EXPECT_NEAR((*lp.minus)[0], 0.0, 1e-12);
    EXPECT_EQ((*lp.minus)[1], 0.5);
    EXPECT_FALSE(lp.plus.has_value());
    EXPECT_FALSE(lp.minus_unresolved);
  }
  {
    const auto f = make("x1^2 - x2^2", 2, 0);
    const std::vector<double> p{0.0, 1.0};
    const auto lp = limit_points(f, MetricSpec{}, square_chart(2, 0), p);
    ASSERT_TRUE(lp.plus.has_value());
    EXPECT_NEAR((*lp.plus)[0], 0.0, 1e-12);
    EXPECT_NEAR((*lp.plus)[1], 0.0, 1e-12);
  }
  {
    const auto f = make("x1^2 + v1^2", 1, 1);
    const std::vector<double> p{0.0, 0.25};
    const auto lp = limit_points(f, MetricSpec{}, square_chart(1, 1), p);
    ASSERT_TRUE(lp.minus && lp.plus);
    EXPECT_EQ(*lp.minus, p);
    EXPECT_EQ(*lp.plus, p);
  }
}

TEST(Skeleton, SaddleSkeletonIsTheStableAxis) {
  const auto f = make("x1^2 - x2^2", 2, 0);
  const auto s = skeleton_sample(f, MetricSpec{}, square_chart(2, 0), SliceSpec{-0.5, 0.5}, GridSpec{21, 21});
  ASSERT_FALSE(s.points.empty());
  for (const auto& p : s.points) EXPECT_LE(std::abs(p.start[0]), 1e-6);
}

TEST(Skeleton, SquareSumSkeletonIsTheCriticalSlice) {
  const auto f = make("x1^2 + v1^2", 1, 1);
  const auto grid = GridSpec{21, 21};
  const auto s = skeleton_sample(f, MetricSpec{}, square_chart(1, 1), SliceSpec{0.25, 1.0}, grid);
  const auto xs = grid_values({-1, 1}, 21);
  std::size_t expected = 0;
  for (double v : xs) {
    if (v * v >= 0.25 && v * v <= 1.0) ++expected;
  }
  ASSERT_EQ(s.points.size(), expected);
  for (const auto& p : s.points) {
    EXPECT_EQ(p.start[0], 0.0);
    EXPECT_GE(p.start[1] * p.start[1], 0.25);
  }
}

TEST(Skeleton, ModelShapeConfinedWithEuclideanMetric) {
  const auto f = make("x1^2 + x2^3 - v1*x2", 2, 1);
  const auto s = skeleton_sample(f, MetricSpec{}, square_chart(2, 1), SliceSpec{-0.5, 0.5}, GridSpec{11, 5});
  ASSERT_FALSE(s.points.empty());
  for (const auto& p : s.points) EXPECT_LE(std::abs(p.start[0]), 1e-6);
}

TEST(Confinement, PassesOnModelsAndFailsOnSkewedMetric) {
  const auto f = make("x1^2 + x2^3 - v1*x2", 2, 1);
  const auto chart = square_chart(2, 1);
  const GridSpec grid{11, 5};
  const auto ok = confinement_check(f, MetricSpec{}, chart, 1, SliceSpec{-0.5, 0.5}, grid);
  EXPECT_TRUE(ok.pass);
  EXPECT_GT(ok.skeleton_points, 0U);
  EXPECT_GT(ok.plane_starts, 0U);
  EXPECT_LE(ok.max_deviation, 1e-6);
  const auto bad = confinement_check(f, skewed(), chart, 1, SliceSpec{-0.5, 0.5}, grid);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(bad.max_deviation, 1e-6);

  const auto bowl = make("x1^2 + x2^2", 2, 0);
  const auto b = confinement_check(bowl, MetricSpec{}, square_chart(2, 0), 2, SliceSpec{-0.5, 0.5}, GridSpec{11, 1});
  EXPECT_TRUE(b.pass);
  EXPECT_EQ(b.skeleton_points, 1U);
}

TEST(Confinement, ModelShapeSpotCheck) {
  const auto f = make("x1^2 + x1*x2", 2, 0);
  EXPECT_THROW(confinement_check(f, MetricSpec{}, square_chart(2, 0), 1, SliceSpec{-0.5, 0.5}, GridSpec{5, 1}),
               PreconditionError);
}

TEST(Rossini, ModelPassesAndSkewedIsRejected) {
  const auto f = make("x1^2 + x2^3 - v1*x2", 2, 1);
  const auto r = rossini_check(f, MetricSpec{}, square_chart(2, 1), 1, 0.5, 16);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.on_plane_drift, 0.0);
  EXPECT_EQ(r.monotonicity_violations, 0U);
  EXPECT_EQ(r.on_plane_runs, 16U);
  EXPECT_THROW(rossini_check(f, skewed(), square_chart(2, 1), 1, 0.5, 16), PreconditionError);
}

TEST(Alto, SpecExamples) {
  {
    const auto f = make("x1^2 + v1^2", 1, 1);
    const auto rep = alto_dichotomy(f, MetricSpec{}, square_chart(1, 1), SliceSpec{0.25, 1.0}, GridSpec{50, 50});
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.unresolved, 0U);
    ASSERT_FALSE(rep.entries.empty());
    for (const auto& e : rep.entries) {
      const double v = e.start[1];
      const auto expected = v * v >= 0.25 ? AltoClass::NearSkeleton : AltoClass::ReachedBelowA;
      EXPECT_EQ(e.classification, expected) << e.start[0] << " " << v;
    }
  }
  {
    const auto f = make("x1^2", 1, 0);
    const auto rep = alto_dichotomy(f, MetricSpec{}, square_chart(1, 0), SliceSpec{0.25, 1.0}, GridSpec{21, 1});
    EXPECT_EQ(rep.near_skeleton, 0U);
    EXPECT_EQ(rep.unresolved, 0U);
    EXPECT_EQ(rep.reached_below, rep.entries.size());
  }
}

TEST(Alto, CriticalGridPointIsNearSkeleton) {
  const auto f = make("x1^2 + v1^2", 1, 1);
  const auto rep = alto_dichotomy(f, MetricSpec{}, square_chart(1, 1), SliceSpec{0.25, 1.0}, GridSpec{5, 5});
  bool seen = false;
  for (const auto& e : rep.entries) {
    if (e.start[0] == 0.0 && e.start[1] == 1.0) {
      EXPECT_EQ(e.classification, AltoClass::NearSkeleton);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Csv, FormatAndQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);

  Trajectory t;
  t.leaf_dim = 1;
  t.transverse_dim = 1;
  t.samples.push_back(FlowSample{0.0, {0.5, 0.25}, 0.3125});
  std::ostringstream out;
  write_trajectory_csv(out, t);
  EXPECT_EQ(out.str(), "t,x1,v1,f\r\n0,0.5,0.25,0.3125\r\n");
}

TEST(SliceSpec, Validation) {
  EXPECT_THROW((SliceSpec{1.0, 0.5}).validate(), InputError);
  EXPECT_NO_THROW((SliceSpec{0.0, 0.5}).validate());
}
