#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "krf/flow.hpp"
#include "krf/grid.hpp"
#include "krf/kernels.hpp"
#include "krf/presets.hpp"

namespace {

struct Fixture {
  krf::GridPtr grid;
  std::vector<double> f;
  explicit Fixture(std::size_t count) : grid(krf::make_grid(1e-6, 1e6, count)), f(count) {
    for (std::size_t i = 0; i < count; ++i) f[i] = std::log1p(grid->r(i)) / grid->r(i);
  }
};

template <auto Rhs>
void rhs(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(fx.f.size());
  for (auto _ : state) {
    Rhs(fx.f, fx.grid->nodes(), fx.grid->dx(), 2, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Jac>
void jacobian(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  krf::kernels::TriJacobian J;
  for (auto _ : state) {
    Jac(fx.f, fx.grid->nodes(), fx.grid->dx(), 2, J);
    benchmark::DoNotOptimize(J.diag.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void solve(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  krf::kernels::TriJacobian J;
  krf::kernels::serial::flow_jacobian(fx.f, fx.grid->nodes(), fx.grid->dx(), 2, J);
  std::vector<double> b(fx.f.size());
  for (auto _ : state) {
    std::fill(b.begin(), b.end(), 1.0);
    krf::kernels::solve_shifted(J, 0.1 * fx.grid->r(0), b);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void cigar_flow(benchmark::State& state) {
  krf::FlowConfig c;
  c.n = 2;
  c.grid = krf::make_grid(1e-6, 1e6, static_cast<std::size_t>(state.range(0)));
  c.t_end = 0.5;
  c.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(krf::run_flow(krf::make_preset("cigar"), c).steps);
}

}  // namespace

BENCHMARK(rhs<krf::kernels::serial::flow_rhs>)->Name("flow_rhs/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(rhs<krf::kernels::parallel::flow_rhs>)->Name("flow_rhs/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(jacobian<krf::kernels::serial::flow_jacobian>)->Name("flow_jacobian/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(jacobian<krf::kernels::parallel::flow_jacobian>)->Name("flow_jacobian/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(solve)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(cigar_flow)->Args({513, 0})->Args({513, 1})->Args({2049, 0})->Args({2049, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
