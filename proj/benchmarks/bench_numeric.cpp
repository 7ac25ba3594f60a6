#include <benchmark/benchmark.h>

#include "folsing/flow.hpp"
#include "folsing/folchart.hpp"

using namespace folsing;

namespace {

FoliatedFunction make(const std::string& text, int n, int q) {
  return FoliatedFunction(parse_expression(text, n, q), n, q);
}

ChartSpec cube(int n, int q, double r) {
  ChartSpec c;
  c.leaf_dim = n;
  c.transverse_dim = q;
  c.box.assign(static_cast<std::size_t>(n + q), Interval{-r, r});
  return c;
}

void BM_FindCriticalPoints(benchmark::State& state) {
  const auto f = make("x1^2 + x2^3 - v1*x2", 2, 1);
  CriticalSearchOptions options;
  options.leaf_density = static_cast<int>(state.range(0));
  options.transverse_density = 5;
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(f, cube(2, 1, 1.0), MetricSpec{}, options));
}
BENCHMARK(BM_FindCriticalPoints)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_IntegrateToLimit(benchmark::State& state) {
  const auto f = make("x2^3 - 3*x2 + x1^2", 2, 0);
  const std::vector<double> start{0.4, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(f, MetricSpec{}, cube(2, 0, 2.0), start, Direction::Backward));
  }
}
BENCHMARK(BM_IntegrateToLimit)->Unit(benchmark::kMicrosecond);

void BM_IntegrateToExit(benchmark::State& state) {
  const auto f = make("x1^2", 1, 0);
  const std::vector<double> start{0.01};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(f, MetricSpec{}, cube(1, 0, 1.0), start, Direction::Forward));
  }
}
BENCHMARK(BM_IntegrateToExit)->Unit(benchmark::kMicrosecond);

}  // namespace
