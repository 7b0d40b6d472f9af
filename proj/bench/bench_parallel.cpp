// Serial vs OpenMP: the two embarrassingly parallel hot loops, per-segment
// likelihood terms and per-demonstration KKT halfspaces.

#include <benchmark/benchmark.h>

#include "rsirl/driving.hpp"
#include "rsirl/harness.hpp"
#include "rsirl/lq.hpp"
#include "rsirl/single_step.hpp"

using namespace rsirl;

namespace {

struct DrivingFixture {
  SemiParametricCrm crm = SemiParametricCrm::axis_aligned(4);
  Vec r;
  Vec c = default_driving_weights();
  LikelihoodData data;

  explicit DrivingFixture(int segments) {
    auto cfg = default_driving_options().cfg;
    cfg.scenario.T = 1;  // keeps setup short; the loop structure is the same
    r = profile_offsets(ExpertProfile::RiskAverse, cfg.scenario.pmf);
    const auto lib = default_driving_library(cfg);
    const auto segs = synthetic_expert_run(cfg, crm, r, c, lib, segments, 3);
    data = LikelihoodData::build(segs, lib, cfg.scenario, driving_rollout(cfg));
  }
};

const DrivingFixture& driving_fixture() {
  static const DrivingFixture f(16);
  return f;
}

void likelihood(benchmark::State& state, Execution mode) {
  const auto& f = driving_fixture();
  LikelihoodOptions opt;
  opt.execution = mode;
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(f.crm, f.r, f.c, f.data, opt).value);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.size()));
}

struct LqFixture {
  LqSystem sys = sample_lq_system(1, 10, 5, 3, 6);
  CostOracle cost = lq_cost(sys);
  std::vector<Demonstration> demos = lq_expert_demos(sys, cost, sample_states(101, 10, 64));
};

const LqFixture& lq_fixture() {
  static const LqFixture f;
  return f;
}

void halfspaces(benchmark::State& state, bool parallel) {
  const auto& f = lq_fixture();
  const auto env = RiskEnvelope::simplex(3);
  for (auto _ : state) {
    auto hs = parallel ? kkt_halfspaces_parallel(f.demos, f.cost, env, f.sys.bounds)
                       : kkt_halfspaces_serial(f.demos, f.cost, env, f.sys.bounds);
    benchmark::DoNotOptimize(hs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.demos.size()));
}

}  // namespace

BENCHMARK_CAPTURE(likelihood, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(likelihood, openmp, Execution::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(halfspaces, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(halfspaces, openmp, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
