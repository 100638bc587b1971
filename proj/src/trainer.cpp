#include "morphgrad/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

#include <omp.h>

#include "morphgrad/errors.hpp"
#include "morphgrad/seeding.hpp"

namespace morphgrad {

void TrainConfig::validate() const {
  require(population_size >= 2, "train.population_size must be >= 2");
  require(rollouts_per_candidate >= 1, "train.rollouts_per_candidate must be >= 1");
  require(eval_every >= 1, "train.eval_every must be >= 1");
  require(eval_rollouts >= 1, "train.eval_rollouts must be >= 1");
  require(mu_init_range >= 0.0, "train.mu_init_range must be >= 0");
}

std::uint64_t rollout_seed(std::uint64_t master_seed, std::size_t generation,
                           std::size_t candidate, std::size_t rollout) {
  return stream_seed(SeedStream::kRollout, master_seed, {generation, candidate, rollout});
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k)
    seeds[k] = stream_seed(SeedStream::kEvaluation, master_seed, {k});
  return seeds;
}

namespace {

// Number of rollouts that actually need running for one candidate.
std::size_t effective_rollouts(const Task& task, const TrainConfig& cfg) {
  return task.seed_independent() ? 1 : cfg.rollouts_per_candidate;
}

// Summation order is fixed (k ascending) so every kernel agrees bitwise.
double mean_of(const double* values, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += values[k];
  return sum / static_cast<double>(n);
}

int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace

double evaluate_candidate(const Task& task, std::span<const double> w, std::size_t candidate,
                          std::size_t generation, const TrainConfig& cfg) {
  const std::size_t k_count = effective_rollouts(task, cfg);
  std::vector<double> scores(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    scores[k] =
        task.run_episode(w, rollout_seed(cfg.master_seed, generation, candidate, k)).fitness;
  return mean_of(scores.data(), k_count);
}

std::vector<double> evaluate_population_serial(const Task& task, const Population& pop,
                                               std::size_t generation, const TrainConfig& cfg) {
  std::vector<double> fitness(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i)
    fitness[i] = evaluate_candidate(task, pop.candidates[i], i, generation, cfg);
  return fitness;
}

std::vector<double> evaluate_population_parallel(const Task& task, const Population& pop,
                                                 std::size_t generation, const TrainConfig& cfg,
                                                 int workers) {
  const std::size_t n = pop.size();
  const std::size_t k_count = effective_rollouts(task, cfg);
  const auto jobs = static_cast<std::int64_t>(n * k_count);
  std::vector<double> scores(n * k_count);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(workers))
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto i = static_cast<std::size_t>(job) / k_count;
    const auto k = static_cast<std::size_t>(job) % k_count;
    try {
      scores[static_cast<std::size_t>(job)] =
          task.run_episode(pop.candidates[i], rollout_seed(cfg.master_seed, generation, i, k))
              .fitness;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> fitness(n);
  for (std::size_t i = 0; i < n; ++i) fitness[i] = mean_of(&scores[i * k_count], k_count);
  return fitness;
}

std::vector<double> score_rollouts(const Task& task, std::span<const double> w,
                                   std::span<const std::uint64_t> seeds, int workers) {
  std::vector<double> scores(seeds.size());
  const auto count = static_cast<std::int64_t>(seeds.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(workers))
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      scores[static_cast<std::size_t>(k)] =
          task.run_episode(w, seeds[static_cast<std::size_t>(k)]).task_score;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

TrainState initial_state(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt) {
  const ParamPartition part = task.partition();
  std::vector<double> mu(part.total(), 0.0);
  if (cfg.mu_init_range > 0.0) {
    std::mt19937_64 rng(stream_seed(SeedStream::kInit, cfg.master_seed, {}));
    std::uniform_real_distribution<double> u(-cfg.mu_init_range, cfg.mu_init_range);
    for (std::size_t j = 0; j < part.policy_len; ++j) mu[j] = u(rng);
  }
  TrainState state;
  state.dist = SearchDistribution::isotropic(std::move(mu), opt.sigma_init);
  return state;
}

TrainState train(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt,
                 const ExecutionOptions& exec) {
  return train(cfg, task, opt, initial_state(cfg, task, opt), exec);
}

TrainState train(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt_in,
                 TrainState state, const ExecutionOptions& exec) {
  cfg.validate();
  OptimizerConfig opt = opt_in;
  opt.population_size = cfg.population_size;
  opt.validate();
  require(state.dist.dim() == task.dim(), "distribution dim " +
                                              std::to_string(state.dist.dim()) +
                                              " != task dim " + std::to_string(task.dim()));
  require(state.generation <= cfg.generations, "state is past the configured generation budget");

  const std::vector<std::uint64_t> eval_seeds = evaluation_seeds(cfg.master_seed, cfg.eval_rollouts);

  for (std::size_t g = state.generation; g < cfg.generations; ++g) {
    try {
      Population pop =
          sample_population(state.dist, cfg.population_size,
                            stream_seed(SeedStream::kSampling, cfg.master_seed, {g}),
                            opt.antithetic);
      pop.fitnesses = exec.workers == 1
                          ? evaluate_population_serial(task, pop, g, cfg)
                          : evaluate_population_parallel(task, pop, g, cfg, exec.workers);

      const Gradient grad = estimate_gradient(state.dist, pop, opt);
      SearchDistribution next = update(state.dist, grad, opt);

      const auto best_it = std::max_element(pop.fitnesses.begin(), pop.fitnesses.end());
      const auto best_idx = static_cast<std::size_t>(best_it - pop.fitnesses.begin());

      if (g % cfg.eval_every == 0 || g + 1 == cfg.generations) {
        const std::vector<double> scores =
            score_rollouts(task, pop.candidates[best_idx], eval_seeds, exec.workers);
        const double avg = mean_of(scores.data(), scores.size());
        if (!std::isfinite(avg)) throw EvaluationError("non-finite evaluation score");
        if (avg > state.best_avg_score) {
          state.best_avg_score = avg;
          state.best_params = pop.candidates[best_idx];
        }
      }

      HistoryRow row;
      row.generation = g + 1;
      row.mean_fitness = mean_of(pop.fitnesses.data(), pop.fitnesses.size());
      row.best_fitness = *best_it;
      row.sigma_mean = next.mean_sigma();
      row.best_avg_score = state.best_avg_score;

      state.dist = std::move(next);
      state.history.push_back(row);
      state.generation = g + 1;
    } catch (const EvaluationError&) {
      if (exec.on_abort) exec.on_abort(state);
      throw;
    }
    if (exec.on_generation) exec.on_generation(state);
  }
  return state;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  // Shifted by the first value so identical inputs give their value and 0 exactly.
  const double shift = values[0];
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double mean_dev = sum / n;
  out.mean = shift + mean_dev;
  double ss = 0.0;
  for (double v : values) ss += (v - shift - mean_dev) * (v - shift - mean_dev);
  out.stddev = std::sqrt(ss / n);
  return out;
}

MultiRunSummary multi_run(const TrainConfig& cfg, const Task& task, const OptimizerConfig& opt,
                          std::size_t n_runs, const ExecutionOptions& exec) {
  require(n_runs >= 1, "n_runs must be >= 1");
  MultiRunSummary summary;
  std::vector<double> finals;
  for (std::size_t r = 0; r < n_runs; ++r) {
    RunOutcome outcome;
    outcome.run = r;
    TrainConfig run_cfg = cfg;
    run_cfg.master_seed = cfg.master_seed + r;
    outcome.master_seed = run_cfg.master_seed;
    try {
      outcome.state = train(run_cfg, task, opt, exec);
      outcome.final_score = outcome.state.best_avg_score;
      outcome.ok = true;
      finals.push_back(outcome.final_score);
    } catch (const std::exception& e) {
      outcome.error = e.what();
      ++summary.failures;
    }
    summary.runs.push_back(std::move(outcome));
  }
  const MeanStd ms = mean_std(finals);
  summary.mean = ms.mean;
  summary.stddev = ms.stddev;
  return summary;
}

std::optional<std::size_t> first_generation_reaching(std::span<const HistoryRow> history,
                                                     double threshold) {
  for (const HistoryRow& row : history)
    if (row.best_avg_score >= threshold) return row.generation;
  return std::nullopt;
}

}  // namespace morphgrad
