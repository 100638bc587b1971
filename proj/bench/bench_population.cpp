// Population evaluation on the hopper: serial kernel vs OpenMP kernel.
#include <benchmark/benchmark.h>

#include "morphgrad/cli/run_config.hpp"
#include "morphgrad/trainer.hpp"

using namespace morphgrad;

namespace {

struct Fixture {
  RunConfig cfg;
  std::unique_ptr<Task> task;
  Population pop;

  Fixture() {
    cfg.env_id = "hopper";
    cfg.hidden = {16, 16};
    cfg.augment = true;
    cfg.morphology.params = {{"thigh_length", 0.7, 0.75},
                             {"shin_length", 0.7, 0.75},
                             {"thigh_width", 0.3, 0.75},
                             {"shin_width", 0.3, 0.75}};
    cfg.train.population_size = 32;
    cfg.train.rollouts_per_candidate = 1;
    cfg.hopper.max_steps = 300;
    task = make_task(cfg);
    OptimizerConfig opt = cfg.optimizer;
    opt.population_size = cfg.train.population_size;
    const TrainState s = initial_state(cfg.train, *task, opt);
    pop = sample_population(s.dist, cfg.train.population_size, 11);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Serial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_population_serial(*f.task, f.pop, 0, f.cfg.train));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.pop.candidates.size()));
}

void BM_Parallel(benchmark::State& state) {
  const Fixture& f = fixture();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        evaluate_population_parallel(*f.task, f.pop, 0, f.cfg.train, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.pop.candidates.size()));
}

}  // namespace

BENCHMARK(BM_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)
    ->Unit(benchmark::kMillisecond)
    ->RangeMultiplier(2)
    ->Range(1, 8)
    ->UseRealTime();

BENCHMARK_MAIN();
