#include "morphgrad/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "morphgrad/cli/checkpoint.hpp"
#include "morphgrad/cli/history_csv.hpp"
#include "morphgrad/cli/plot.hpp"
#include "morphgrad/cli/run_config.hpp"
#include "morphgrad/errors.hpp"
#include "morphgrad/task.hpp"
#include "morphgrad/trainer.hpp"

namespace morphgrad {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

OptimizerConfig optimizer_for(const RunConfig& cfg) {
  OptimizerConfig opt = cfg.optimizer;
  opt.population_size = cfg.train.population_size;
  return opt;
}

// Loads and validates a config, printing diagnostics on failure.
std::optional<RunConfig> read_config(const std::string& path,
                                     const std::optional<std::string>& output_dir, CommandIo io) {
  try {
    RunConfig cfg = load_run_config(path);
    if (output_dir) cfg.output_dir = *output_dir;
    return cfg;
  } catch (const ConfigError& e) {
    io.err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int cmd_train(const std::string& config_path, const std::optional<std::string>& resume_path,
              const std::optional<std::string>& output_dir, int workers, CommandIo io) {
  const auto cfg = read_config(config_path, output_dir, io);
  if (!cfg) return kExitConfig;
  const auto task = make_task(*cfg);
  const OptimizerConfig opt = optimizer_for(*cfg);

  TrainState state;
  if (resume_path) {
    try {
      Checkpoint ckpt = load_checkpoint(*resume_path);
      require_same_config(ckpt, *cfg);
      state = std::move(ckpt.state);
    } catch (const DigestMismatchError& e) {
      io.err << "error: " << e.what() << '\n';
      return kExitDigest;
    } catch (const CheckpointError& e) {
      io.err << "error: " << e.what() << '\n';
      return kExitCheckpoint;
    }
    if (state.dist.dim() != task->dim()) {
      io.err << "error: checkpoint dimension " << state.dist.dim() << " != task dimension "
             << task->dim() << '\n';
      return kExitCheckpoint;
    }
  } else {
    state = initial_state(cfg->train, *task, opt);
  }

  const fs::path out_dir(cfg->output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    io.err << "error: cannot create '" << out_dir.string() << "': " << ec.message() << '\n';
    return kExitFailure;
  }

  ExecutionOptions exec;
  exec.workers = workers;
  exec.on_generation = [&](const TrainState& s) {
    const std::size_t every = cfg->train.checkpoint_every;
    if (every > 0 && s.generation % every == 0)
      save_checkpoint((out_dir / ("checkpoint_gen" + std::to_string(s.generation) + ".txt")).string(),
                      *cfg, s);
  };
  const fs::path abort_path = out_dir / "checkpoint_abort.txt";
  exec.on_abort = [&](const TrainState& s) {
    save_checkpoint(abort_path.string(), *cfg, s);
    write_history_csv((out_dir / "history.csv").string(), s.history);
  };

  try {
    state = train(cfg->train, *task, opt, std::move(state), exec);
    write_history_csv((out_dir / "history.csv").string(), state.history);
    save_checkpoint((out_dir / "checkpoint.txt").string(), *cfg, state);
  } catch (const EvaluationError& e) {
    io.err << "error: training aborted: " << e.what() << "; diagnostic checkpoint at "
           << abort_path.string() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  io.out << "trained " << state.generation << " generations: best_avg_score "
         << format_double(state.best_avg_score) << ", sigma_mean "
         << format_double(state.dist.mean_sigma()) << ", output " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, std::size_t n_rollouts, std::uint64_t seed,
             int workers, CommandIo io) {
  Checkpoint ckpt;
  try {
    ckpt = load_checkpoint(checkpoint_path);
  } catch (const DigestMismatchError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitDigest;
  } catch (const CheckpointError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitCheckpoint;
  }
  if (n_rollouts < 1) {
    io.err << "error: need at least one rollout\n";
    return kExitFailure;
  }
  const auto task = make_task(ckpt.config);
  const std::vector<double>& w = ckpt.state.has_best() ? ckpt.state.best_params : ckpt.state.dist.mu;
  if (w.size() != task->dim()) {
    io.err << "error: checkpoint parameters do not fit the configured task\n";
    return kExitCheckpoint;
  }

  const auto seeds = evaluation_seeds(seed, n_rollouts);
  const auto scores = score_rollouts(*task, w, seeds, workers);
  const MeanStd ms = mean_std(scores);
  io.out << "agent: " << (ckpt.state.has_best() ? "best" : "mean") << " after generation "
         << ckpt.state.generation << '\n';
  io.out << "score over " << n_rollouts << " rollouts: " << format_double(ms.mean) << " +- "
         << format_double(ms.stddev) << '\n';

  const auto* embodied = dynamic_cast<const EmbodiedTask*>(task.get());
  if (embodied == nullptr || embodied->morphology().params.empty()) {
    io.out << "morphology: fixed (baseline)\n";
    return kExitOk;
  }
  const auto learned = embodied->physical_morphology(w);
  const auto& params = embodied->morphology().params;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %10s\n", "name", "original", "learned",
                "percent");
  io.out << line;
  for (std::size_t j = 0; j < params.size(); ++j) {
    std::snprintf(line, sizeof line, "%-16s %12s %12s %9s%%\n", params[j].name.c_str(),
                  fixed(params[j].original, 3).c_str(), fixed(learned[j], 3).c_str(),
                  fixed(100.0 * learned[j] / params[j].original, 1).c_str());
    io.out << line;
  }
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_path,
             CommandIo io) {
  if (csv_paths.empty()) {
    io.err << "error: no history files given\n";
    return kExitFailure;
  }
  std::vector<PlotSeries> series;
  for (const std::string& path : csv_paths) {
    try {
      series.push_back({fs::path(path).stem().string(), read_history_csv(path)});
    } catch (const CsvError& e) {
      io.err << "error: " << path << ": " << e.what() << '\n';
      return kExitCsv;
    }
  }
  std::ofstream out(out_path, std::ios::binary);
  out << render_history_svg(series);
  if (!out) {
    io.err << "error: cannot write '" << out_path << "'\n";
    return kExitFailure;
  }
  io.out << "wrote " << out_path << " (" << series.size() << " series)\n";
  return kExitOk;
}

int cmd_multirun(const std::string& config_path, std::size_t n_runs,
                 const std::optional<std::string>& output_dir, int workers, CommandIo io) {
  const auto cfg = read_config(config_path, output_dir, io);
  if (!cfg) return kExitConfig;
  if (n_runs < 1) {
    io.err << "error: need at least one run\n";
    return kExitFailure;
  }
  const auto task = make_task(*cfg);
  ExecutionOptions exec;
  exec.workers = workers;
  const MultiRunSummary summary = multi_run(cfg->train, *task, optimizer_for(*cfg), n_runs, exec);

  const fs::path out_dir(cfg->output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    io.err << "error: cannot create '" << out_dir.string() << "': " << ec.message() << '\n';
    return kExitFailure;
  }
  std::ofstream csv(out_dir / "summary.csv", std::ios::binary);
  csv << "run,final_score\n";
  for (const RunOutcome& run : summary.runs) {
    csv << run.run << ',' << (run.ok ? format_double(run.final_score) : "nan") << '\n';
    if (run.ok) {
      const fs::path run_dir = out_dir / ("run" + std::to_string(run.run));
      fs::create_directories(run_dir, ec);
      write_history_csv((run_dir / "history.csv").string(), run.state.history);
      io.out << "run " << run.run << " (seed " << run.master_seed
             << "): " << format_double(run.final_score) << '\n';
    } else {
      io.err << "run " << run.run << " (seed " << run.master_seed << ") failed: " << run.error
             << '\n';
    }
  }
  if (!csv) {
    io.err << "error: cannot write summary.csv\n";
    return kExitFailure;
  }
  const std::size_t ok = summary.runs.size() - summary.failures;
  io.out << "final score over " << ok << " runs: " << format_double(summary.mean) << " +- "
         << format_double(summary.stddev);
  if (summary.failures > 0) io.out << " (" << summary.failures << " failed)";
  io.out << '\n';
  return ok > 0 ? kExitOk : kExitFailure;
}

}  // namespace morphgrad
