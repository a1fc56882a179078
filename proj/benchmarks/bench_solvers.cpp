// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <memory>

#include "hmlens/banded.hpp"
#include "hmlens/harness.hpp"
#include "hmlens/medium.hpp"
#include "hmlens/modal_solver.hpp"
#include "hmlens/oracle.hpp"

using namespace hmlens;

namespace
{

struct Setup
{
  ExperimentConfig cfg;
  std::shared_ptr<const Scenario> s;
  RadialGrid grid;
};

Setup lens_setup(double h)
{
  Setup out;
  out.cfg = preset(ExperimentKind::validate_oracle);
  out.s = std::make_shared<const Scenario>(make_scenario(out.cfg.scenario));
  out.grid = RadialGrid::build(out.s->R, out.s->breakpoints(), h);
  return out;
}

void BM_SolveBanded(benchmark::State &state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  TridiagonalSystem a;
  a.lower.assign(n - 1, Complex(1.0));
  a.upper.assign(n - 1, Complex(1.0));
  a.diag.assign(n, Complex(-1.9, 1e-3));
  a.rhs.assign(n, Complex(1.0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(solve_banded(a));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveBanded)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_SolveMode(benchmark::State &state)
{
  const Setup st = lens_setup(1.0 / static_cast<double>(state.range(0)));
  const ModeIndex m{2, 3, AngularBranch::cosine};
  for (auto _ : state)
  {
    const ModeProblem mp = reduce_to_mode(*st.s, m, st.cfg.source, st.grid);
    benchmark::DoNotOptimize(solve_mode(mp));
  }
  state.counters["nodes"] = static_cast<double>(st.grid.nodes.size());
}
BENCHMARK(BM_SolveMode)->Arg(64)->Arg(256)->Arg(1024);

void BM_SolveScenario(benchmark::State &state)
{
  const Setup st = lens_setup(1.0 / 256.0);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(solve_scenario(st.s, st.cfg.source, st.cfg.n_max, st.grid, threads));
  }
}
BENCHMARK(BM_SolveScenario)->Arg(1)->Arg(4)->UseRealTime();

void BM_FdPolarSolve(benchmark::State &state)
{
  const Setup st = lens_setup(1.0 / static_cast<double>(state.range(0)));
  const PolarGrid pg = PolarGrid::matched(st.grid, 64);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(fd_polar_solve(*st.s, st.cfg.source, pg));
  }
}
BENCHMARK(BM_FdPolarSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
