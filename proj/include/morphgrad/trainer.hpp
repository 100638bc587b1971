#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphgrad/es_optimizer.hpp"
#include "morphgrad/task.hpp"

namespace morphgrad {

struct TrainConfig {
  std::size_t generations = 100;  // 0 leaves the initial state untouched
  std::size_t population_size = 192;
  std::size_t rollouts_per_candidate = 16;
  std::uint64_t master_seed = 0;
  std::size_t eval_every = 10;
  std::size_t eval_rollouts = 100;
  // 0 = only the final checkpoint.
  std::size_t checkpoint_every = 0;
  // Initial mean of the policy segment is drawn from U[-r, r]; the
  // morphology segment always starts at the original design (raw 0).
  double mu_init_range = 0.0;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct HistoryRow {
  std::size_t generation = 0;  // 1-based: row g is written after generation g
  double mean_fitness = 0.0;
  double best_fitness = 0.0;
  double sigma_mean = 0.0;
  double best_avg_score = 0.0;

  friend bool operator==(const HistoryRow&, const HistoryRow&) = default;
};

inline constexpr double kUnsetScore = -std::numeric_limits<double>::infinity();

struct TrainState {
  std::size_t generation = 0;
  SearchDistribution dist;
  std::vector<double> best_params;  // empty until the first evaluation
  double best_avg_score = kUnsetScore;
  std::vector<HistoryRow> history;

  bool has_best() const { return !best_params.empty(); }
};

// Parallelism knobs. None of them changes results.
struct ExecutionOptions {
  // OpenMP threads for rollouts; 0 = runtime default, 1 = serial kernel.
  int workers = 0;
  std::function<void(const TrainState&)> on_generation;
  // Called with the last good state before an EvaluationError propagates.
  std::function<void(const TrainState&)> on_abort;
};

// Seed of rollout k of candidate i in generation g.
std::uint64_t rollout_seed(std::uint64_t master_seed, std::size_t generation,
                           std::size_t candidate, std::size_t rollout);
// The held-out seeds used to score the best agent; fixed per run.
std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, std::size_t count);

// Mean augmented fitness of one candidate over K seeded rollouts. Diverged
// rollouts stay in the mean with their sentinel score.
double evaluate_candidate(const Task& task, std::span<const double> w, std::size_t candidate,
                          std::size_t generation, const TrainConfig& cfg);

// Fitness of every candidate. The serial kernel is the reference; the OpenMP
// kernel must match it bitwise for any worker count.
std::vector<double> evaluate_population_serial(const Task& task, const Population& pop,
                                               std::size_t generation, const TrainConfig& cfg);
std::vector<double> evaluate_population_parallel(const Task& task, const Population& pop,
                                                 std::size_t generation, const TrainConfig& cfg,
                                                 int workers);

// Unaugmented task scores of w, one per seed.
std::vector<double> score_rollouts(const Task& task, std::span<const double> w,
                                   std::span<const std::uint64_t> seeds, int workers);

TrainState initial_state(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt);

// Runs generations [state.generation, cfg.generations). Pass the result of
// initial_state() for a fresh run or a loaded checkpoint to resume.
TrainState train(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt,
                 TrainState state, const ExecutionOptions& exec = {});
TrainState train(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt,
                 const ExecutionOptions& exec = {});

struct RunOutcome {
  std::size_t run = 0;
  std::uint64_t master_seed = 0;
  bool ok = false;
  double final_score = 0.0;
  std::string error;
  TrainState state;
};

struct MultiRunSummary {
  std::vector<RunOutcome> runs;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over successful runs
  std::size_t failures = 0;
};

// Run r trains with master_seed + r. Failed runs are kept in `runs` with
// ok = false and excluded from mean/stddev.
MultiRunSummary multi_run(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt,
                          std::size_t n_runs, const ExecutionOptions& exec = {});

// First history generation whose best_avg_score reaches `threshold`.
std::optional<std::size_t> first_generation_reaching(std::span<const HistoryRow> history,
                                                     double threshold);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
MeanStd mean_std(std::span<const double> values);

}  // namespace morphgrad
