#include <benchmark/benchmark.h>

#include "bifurc/equilibria.hpp"
#include "bifurc/normal_form.hpp"
#include "bifurc/scan.hpp"
#include "bifurc/simulate.hpp"

using namespace bifurc;

namespace {

ParameterSet inhost(double A, double B) {
  return ParameterSet(ModelId::inhost_convex, std::vector<double>{A, B, 0.823, 0.057});
}

ParameterSet autoimmune() {
  return ParameterSet(ModelId::autoimmune_3d,
                      std::vector<double>{1e-4, 2.5e-3, 3e-6, 0.25, 0.2, 0.016, 200.0, 0.1,
                                          0.2, 2000.0, 5.0, 1000.0, 0.2, 8.0, 2.0, 0.025});
}

void BM_infected_equilibria(benchmark::State& state) {
  auto p = inhost(0.07, 0.06);
  for (auto _ : state) benchmark::DoNotOptimize(infected_equilibria(p));
}
BENCHMARK(BM_infected_equilibria);

void BM_find_hopf_planar(benchmark::State& state) {
  auto p = inhost(0.06, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(find_hopf(p));
}
BENCHMARK(BM_find_hopf_planar);

void BM_find_hopf_3d(benchmark::State& state) {
  auto p = autoimmune();
  for (auto _ : state) benchmark::DoNotOptimize(find_hopf(p));
}
BENCHMARK(BM_find_hopf_3d);

void BM_normal_form(benchmark::State& state) {
  auto p = inhost(0.07, 0.05);
  auto cands = find_hopf(p);
  const BifurcationPoint* hp = nullptr;
  for (const auto& b : cands)
    if (b.kind == BifKind::hopf && b.state[1] > 0.3) hp = &b;
  for (auto _ : state) benchmark::DoNotOptimize(hopf_normal_form(p, *hp));
}
BENCHMARK(BM_normal_form);

void BM_integrate_recurrent(benchmark::State& state) {
  auto p = inhost(0.71, 0.0572);
  IntegratorConfig cfg;
  cfg.t_end = double(state.range(0));
  for (auto _ : state) {
    Trajectory tr = integrate(p, State(2.4, 0.5), cfg);
    benchmark::DoNotOptimize(tr.stats.accepted);
  }
}
BENCHMARK(BM_integrate_recurrent)->Arg(500)->Arg(5000);

void BM_sweep_branch(benchmark::State& state) {
  auto p = inhost(0.07, 0.06);
  for (auto _ : state) {
    auto d = sweep_branch(p, 0.058, 0.11, int(state.range(0)));
    benchmark::DoNotOptimize(d.samples.size());
  }
}
BENCHMARK(BM_sweep_branch)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
