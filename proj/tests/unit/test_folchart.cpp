#include <gtest/gtest.h>

#include <random>

#include "folsing/errors.hpp"
#include "folsing/folchart.hpp"
#include "test_support.hpp"

using namespace folsing;

namespace {

struct CatalogEntry {
  std::string text;
  int n;
  int q;
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c{
      {"x1^2 + v1^2", 1, 1},         {"x1^3 - v1*x1", 1, 1},  {"x1^2 + x2^3 + v1*x2", 2, 1},
      {"-x1^2 + v1^2", 1, 1},        {"x1^4 + v1*x1^2", 1, 1}, {"x1^2 - x2^2", 2, 0},
      {"x1^3", 1, 0},                {"x1^2*x2 - x2^3 + v1*x1", 2, 1},
  };
  return c;
}

ChartSpec square_chart(int n, int q, double r = 1.0) {
  ChartSpec c;
  c.leaf_dim = n;
  c.transverse_dim = q;
  c.box.assign(static_cast<std::size_t>(n + q), Interval{-r, r});
  return c;
}

FoliatedFunction make(const std::string& text, int n, int q) { return FoliatedFunction(parse_expression(text, n, q), n, q); }

}  // namespace

TEST(FoliatedHessian, SpecExamples) {
  const auto a = make("x1^2 + v1^2", 1, 1);
  const std::vector<double> p{0.0, 0.7};
  EXPECT_DOUBLE_EQ(foliated_hessian(a, p)(0, 0), 2.0);
  const auto b = make("x1^2 - x2^2", 2, 0);
  const std::vector<double> o{0.0, 0.0};
  const auto hb = foliated_hessian(b, o);
  EXPECT_DOUBLE_EQ(hb(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(hb(1, 1), -2.0);
  EXPECT_DOUBLE_EQ(hb(0, 1), 0.0);
  const auto c = make("x1^3 - v1*x1", 1, 1);
  const std::vector<double> pc{1.0, 3.0};
  EXPECT_DOUBLE_EQ(foliated_hessian(c, pc)(0, 0), 6.0);
}

TEST(FoliatedHessian, RejectsNonCriticalPoint) {
  const auto a = make("x1^2 + v1^2", 1, 1);
  const std::vector<double> p{0.5, 0.0};
  EXPECT_THROW(foliated_hessian(a, p), PreconditionError);
}

TEST(FoliatedHessian, SymmetricExactly) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& e : catalog()) {
    const auto f = make(e.text, e.n, e.q);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> p(static_cast<std::size_t>(e.n + e.q));
      for (auto& x : p) x = u(rng);
      const auto h = f.leaf_hessian(p);
      EXPECT_EQ((h - h.transpose()).norm(), 0.0) << e.text;
    }
  }
}

TEST(FoliatedFunction, DerivativesMatchFiniteDifferencesOnCatalog) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& e : catalog()) {
    const auto f = make(e.text, e.n, e.q);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> p(static_cast<std::size_t>(f.dims()));
      for (auto& x : p) x = u(rng);
      const auto g = f.leaf_partials(p);
      for (int i = 0; i < e.n; ++i) {
        auto plus = p;
        auto minus = p;
        const double h = 1e-5;
        plus[static_cast<std::size_t>(i)] += h;
        minus[static_cast<std::size_t>(i)] -= h;
        const double fd = (f.value(plus) - f.value(minus)) / (2 * h);
        EXPECT_NEAR(g(i), fd, 1e-6 * (1 + std::abs(fd))) << e.text;
      }
    }
  }
}

TEST(Signature, RelativeToMetric) {
  Eigen::MatrixXd h(2, 2);
  h << 2, 0, 0, -3;
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(metric_signature(h, g), (Signature{1, 1, 0}));
  g << 5, 1, 1, 2;
  // Congruence class of H does not depend on G.
  EXPECT_EQ(metric_signature(h, g), (Signature{1, 1, 0}));
  h << 1, 1, 1, 1;
  EXPECT_EQ(metric_signature(h, g), (Signature{1, 0, 1}));
}

TEST(CriticalSearch, SquareSumSweep) {
  const auto f = make("x1^2 + v1^2", 1, 1);
  const auto r = find_critical_points(f, square_chart(1, 1), MetricSpec{});
  ASSERT_EQ(r.records.size(), 9U);
  const auto vs = grid_values({-1, 1}, 9);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& rec = r.records[k];
    EXPECT_NEAR(rec.location[0], 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(rec.location[1], vs[k]);
    EXPECT_EQ(rec.signature, (Signature{1, 0, 0}));
    EXPECT_EQ(rec.stratum_label.to_string(), "Sigma_1^(1,0)");
  }
}

TEST(CriticalSearch, FoldFamily) {
  const auto f = make("x1^3 - v1*x1", 1, 1);
  ChartSpec chart = square_chart(1, 1, 2.0);
  chart.box[1] = Interval{0.0, 3.0};
  CriticalSearchOptions opt;
  opt.transverse_density = 4;  // v = 0, 1, 2, 3
  const auto r = find_critical_points(f, chart, MetricSpec{}, opt);
  std::vector<const CriticalPointRecord*> at3;
  std::vector<const CriticalPointRecord*> at0;
  for (const auto& rec : r.records) {
    if (rec.location[1] == 3.0) at3.push_back(&rec);
    if (rec.location[1] == 0.0) at0.push_back(&rec);
  }
  ASSERT_EQ(at3.size(), 2U);
  EXPECT_NEAR(at3[0]->location[0], -1.0, 1e-12);
  EXPECT_EQ(at3[0]->signature, (Signature{0, 1, 0}));
  EXPECT_TRUE(at3[0]->is_leafwise_max);
  EXPECT_NEAR(at3[1]->location[0], 1.0, 1e-12);
  EXPECT_EQ(at3[1]->signature, (Signature{1, 0, 0}));
  ASSERT_EQ(at0.size(), 1U);
  EXPECT_EQ(at0[0]->signature, (Signature{0, 0, 1}));
  ASSERT_TRUE(at0[0]->symbol.has_value());
  EXPECT_EQ(*at0[0]->symbol, (BoardmanSymbol{1, 1, 0}));
  EXPECT_EQ(at0[0]->stratum_label.to_string(), "Sigma_0^(1,1,0)");
}

TEST(CriticalSearch, CuspLeafAtOrigin) {
  const auto f = make("x1^2 + x2^3 + v1*x2", 2, 1);
  const auto r = find_critical_points(f, square_chart(2, 1), MetricSpec{});
  const CriticalPointRecord* origin = nullptr;
  for (const auto& rec : r.records) {
    if (std::abs(rec.location[0]) < 1e-9 && std::abs(rec.location[1]) < 1e-9 && rec.location[2] == 0.0) origin = &rec;
  }
  ASSERT_NE(origin, nullptr);
  EXPECT_EQ(origin->signature, (Signature{1, 0, 1}));
  EXPECT_EQ(origin->stratum_label.to_string(), "Sigma_1^(2,1,0)");
}

TEST(CriticalSearch, InvariantsOverCatalog) {
  for (const auto& e : catalog()) {
    const auto f = make(e.text, e.n, e.q);
    const auto r = find_critical_points(f, square_chart(e.n, e.q), MetricSpec{});
    for (const auto& rec : r.records) {
      const auto& s = rec.signature;
      EXPECT_EQ(s.plus + s.minus + s.zero, e.n) << e.text;
      if (rec.is_leafwise_max) EXPECT_EQ(s.plus, 0);
      EXPECT_LE(rec.leafwise_gradient_norm, 1e-10) << e.text;
      const auto label = classify_point(rec, e.n);
      EXPECT_EQ(label.d, s.plus);
      ASSERT_GE(label.symbol.size(), 2U);
      EXPECT_EQ(label.symbol[0], e.n);
      EXPECT_EQ(label.symbol[1], s.zero);
      // Hessian corank agrees with the exact symbol where one exists.
      if (rec.symbol) EXPECT_EQ((*rec.symbol)[1], s.zero) << e.text;
    }
  }
}

TEST(CriticalSearch, ExactSymbolAgreesWithHessianAtRationalPoints) {
  int exact = 0;
  for (const auto& e : catalog()) {
    const auto f = make(e.text, e.n, e.q);
    for (const auto& rec : find_critical_points(f, square_chart(e.n, e.q), MetricSpec{}).records) {
      if (!rec.exact_location) continue;
      ++exact;
      const auto s = exact_symbol_at(f, *rec.exact_location, 3);
      EXPECT_EQ(s[0], e.n);
      EXPECT_EQ(s[1], rec.signature.zero) << e.text;
    }
  }
  EXPECT_GT(exact, 20);
}

TEST(CriticalSearch, NonIdentityMetricKeepsTheCriticalSet) {
  const auto f = make("x1^2 - x2^2 + v1*x1", 2, 1);
  const MetricSpec g({{Expr::constant(2), Expr::constant(make_rational(1, 2))}, {Expr::constant(make_rational(1, 2)), Expr::constant(1)}});
  const auto a = find_critical_points(f, square_chart(2, 1), MetricSpec{});
  const auto b = find_critical_points(f, square_chart(2, 1), g);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].signature, b.records[k].signature);
    EXPECT_NEAR(a.records[k].location[0], b.records[k].location[0], 1e-12);
  }
}

TEST(Openness, SpecExamples) {
  const auto fail = openness_check(make("-x1^2 + v1^2", 1, 1), square_chart(1, 1), MetricSpec{});
  EXPECT_EQ(fail.verdict, OpennessVerdict::Fail);
  ASSERT_FALSE(fail.witnesses.empty());
  for (const auto& w : fail.witnesses) EXPECT_NEAR(w.location[0], 0.0, 1e-12);
  EXPECT_EQ(openness_check(make("x1^2 + v1^2", 1, 1), square_chart(1, 1), MetricSpec{}).verdict, OpennessVerdict::Pass);
  const auto cubic = openness_check(make("x1^3", 1, 0), square_chart(1, 0), MetricSpec{});
  EXPECT_EQ(cubic.verdict, OpennessVerdict::Undecided);
  EXPECT_TRUE(cubic.witnesses.empty());
  EXPECT_EQ(cubic.suspects.size(), 1U);
  EXPECT_FALSE(cubic.declared_proper);
  EXPECT_TRUE(openness_check(make("x1^2", 1, 0), square_chart(1, 0), MetricSpec{}, {}, true).declared_proper);
}

TEST(Openness, AddingASquareAlwaysPasses) {
  for (const auto& e : catalog()) {
    const auto aug = augment_with_square(parse_expression(e.text, e.n, e.q), square_chart(e.n, e.q));
    EXPECT_EQ(aug.chart.leaf_dim, e.n + 1);
    const FoliatedFunction f(aug.expr, e.n + 1, e.q);
    const auto rep = openness_check(f, aug.chart, aug.metric);
    EXPECT_EQ(rep.verdict, OpennessVerdict::Pass) << e.text;
    EXPECT_GT(rep.records, 0U) << e.text;
  }
}

TEST(Openness, AugmentShiftsTransverseVariables) {
  const auto aug = augment_with_square(parse_expression("x1 + v1", 1, 1), square_chart(1, 1));
  const std::vector<double> p{0.25, 0.5, 2.0};
  EXPECT_DOUBLE_EQ(aug.expr.eval(p), 0.25 + 0.25 + 2.0);
}

TEST(Genericity, Examples) {
  {
    const auto f = make("x1^3 - v1*x1", 1, 1);
    const auto g = genericity_spotcheck(find_critical_points(f, square_chart(1, 1), MetricSpec{}).records, 1);
    EXPECT_TRUE(g.all_isolated);
    EXPECT_EQ(g.degenerate_records, 1U);
    ASSERT_EQ(g.degenerate_transverse_values.size(), 1U);
    EXPECT_EQ(g.degenerate_transverse_values[0][0], 0.0);
    EXPECT_TRUE(g.degenerate_set_discrete);
  }
  {
    const auto f = make("x1^2 + v1^2", 1, 1);
    const auto g = genericity_spotcheck(find_critical_points(f, square_chart(1, 1), MetricSpec{}).records, 1);
    EXPECT_EQ(g.degenerate_records, 0U);
    EXPECT_TRUE(g.all_isolated);
  }
  {
    const auto f = make("x1^4 + v1*x1^2", 1, 1);
    const auto g = genericity_spotcheck(find_critical_points(f, square_chart(1, 1), MetricSpec{}).records, 1);
    ASSERT_EQ(g.degenerate_transverse_values.size(), 1U);
    EXPECT_EQ(g.degenerate_transverse_values[0][0], 0.0);
    EXPECT_TRUE(g.degenerate_set_discrete);
  }
}

TEST(ChartSpec, Validation) {
  ChartSpec c = square_chart(1, 1);
  EXPECT_NO_THROW(c.validate());
  c.box[0] = Interval{1, -1};
  EXPECT_THROW(c.validate(), InputError);
  ChartSpec d = square_chart(1, 1);
  d.box.pop_back();
  EXPECT_THROW(d.validate(), InputError);
  const MetricSpec bad({{Expr::constant(1), Expr::constant(2)}, {Expr::constant(2), Expr::constant(1)}});
  EXPECT_THROW(bad.validate(square_chart(2, 0)), InputError);
  const MetricSpec asym({{Expr::constant(1), Expr::constant(0)}, {Expr::constant(make_rational(1, 10)), Expr::constant(1)}});
  EXPECT_THROW(asym.validate(square_chart(2, 0)), InputError);
}
