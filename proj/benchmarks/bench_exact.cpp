#include <benchmark/benchmark.h>

#include <random>

#include "folsing/boardman.hpp"
#include "folsing/exact_linalg.hpp"
#include "folsing/expr.hpp"
#include "folsing/germ.hpp"

using namespace folsing;

namespace {

TruncatedPoly poly(const std::string& text, int vars, int order) {
  return parse_expression(text, vars, 0).to_polynomial(vars).with_order(order);
}

void BM_BareissRank(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> coeff(-9, 9);
  std::vector<RationalRow> rows(size, RationalRow(size));
  for (auto& row : rows) {
    for (auto& c : row) c = make_rational(coeff(rng), 1 + std::abs(coeff(rng)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(bareiss_rank(rows));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BareissRank)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_BoardmanSymbol(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  MapJet z{2, 1, k, {poly("x1^2 + x2^" + std::to_string(k), 2, k)}};
  for (auto _ : state) benchmark::DoNotOptimize(boardman_symbol(z));
}
BENCHMARK(BM_BoardmanSymbol)->DenseRange(3, 6);

void BM_CuspMapSymbol(benchmark::State& state) {
  MapJet z{2, 2, 3, {poly("x1", 2, 3), poly("x2^3 + x1*x2", 2, 3)}};
  for (auto _ : state) benchmark::DoNotOptimize(boardman_symbol(z));
}
BENCHMARK(BM_CuspMapSymbol);

void BM_JacobianCodimAk(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto f = poly("x1^" + std::to_string(k + 1) + " + x2^2", 2, k + 1);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_codim(f));
}
BENCHMARK(BM_JacobianCodimAk)->DenseRange(2, 6, 2);

void BM_ZkMembership(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto f = poly("x1^3 + x1*x2^2 + x3^2", 3, k);
  for (auto _ : state) benchmark::DoNotOptimize(zk_membership(f, k));
}
BENCHMARK(BM_ZkMembership)->DenseRange(2, 4);

void BM_EnumerateSymbols(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_symbols(4, 4, 4, 20));
}
BENCHMARK(BM_EnumerateSymbols);

}  // namespace
