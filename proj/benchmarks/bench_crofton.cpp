#include "crofton/bodies.hpp"
#include "crofton/crofton.hpp"
#include "crofton/minkowski.hpp"
#include "crofton/montecarlo.hpp"
#include "crofton/rng.hpp"
#include "crofton/specfun.hpp"
#include "crofton/symtensor.hpp"

#include <benchmark/benchmark.h>

using namespace crofton;

namespace {

Vector offset() {
  Vector c(3);
  c << 0.3, 0.0, 0.1;
  return c;
}

ConvexBody off_center_ball() { return ConvexBody(Ball{offset(), 1.0}); }

ConvexBody cube() {
  return ConvexBody(Polytope::box(Vector::Constant(3, 0.1), Vector::Constant(3, 1.1)));
}

void BM_SymProduct(benchmark::State& state) {
  const int rank = static_cast<int>(state.range(0));
  Vector u(3), v(3);
  u << 0.3, -0.2, 0.9;
  v << 0.1, 0.8, -0.4;
  const SymTensor a = vector_power(u, rank / 2);
  const SymTensor b = vector_power(v, rank - rank / 2);
  for (auto _ : state) benchmark::DoNotOptimize(sym_product(a, b));
}
BENCHMARK(BM_SymProduct)->Arg(2)->Arg(4)->Arg(8);

void BM_Hyp2F1(benchmark::State& state) {
  double z = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hyp2f1(0.5, 1.5, 2.0, z));
    z = z > 0.98 ? 0.0 : z + 0.01;
  }
}
BENCHMARK(BM_Hyp2F1);

void BM_PhiBall(benchmark::State& state) {
  const ConvexBody body = off_center_ball();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(phi(body, 2, 1, 2, order));
}
BENCHMARK(BM_PhiBall)->Arg(16)->Arg(32)->Arg(64);

void BM_RotRhsSurface(benchmark::State& state) {
  const ConvexBody body = off_center_ball();
  for (auto _ : state) benchmark::DoNotOptimize(rot_rhs_surface(body, 2, 1, 1));
}
BENCHMARK(BM_RotRhsSurface)->Unit(benchmark::kMillisecond);

void BM_PolytopeSection(benchmark::State& state) {
  const ConvexBody body = cube();
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(1, i++);
    const AffineFlat flat(sample_linear(3, 2, rng));
    benchmark::DoNotOptimize(section(body, flat));
  }
}
BENCHMARK(BM_PolytopeSection);

void BM_RotEstimator(benchmark::State& state) {
  const ConvexBody body = off_center_ball();
  EstimatorConfig cfg;
  cfg.samples = 1024;
  cfg.workers = 1;
  const Functional f = Functional::phi(1, 0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_rot_lhs(body, 2, f, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.samples);
}
BENCHMARK(BM_RotEstimator)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
