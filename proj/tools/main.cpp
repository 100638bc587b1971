#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morphgrad/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Joint policy and morphology search with population REINFORCE"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("-j,--workers", workers, "OpenMP threads for rollouts (0 = all, 1 = serial)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, resume_path, out_dir;
  auto* train = app.add_subcommand("train", "Train from a config file");
  train->add_option("config", config_path, "Run config")->required();
  train->add_option("--resume", resume_path, "Checkpoint to continue from");
  train->add_option("-o,--out", out_dir, "Output directory (overrides run.output_dir)");

  std::string ckpt_path;
  std::size_t n_rollouts = 100;
  std::uint64_t seed = 0;
  auto* eval = app.add_subcommand("eval", "Score a checkpoint's best agent");
  eval->add_option("checkpoint", ckpt_path, "Checkpoint file")->required();
  eval->add_option("-n,--rollouts", n_rollouts, "Number of rollouts");
  eval->add_option("-s,--seed", seed, "Evaluation seed");

  std::vector<std::string> csvs;
  std::string plot_out = "history.svg";
  auto* plot = app.add_subcommand("plot", "Render history CSVs as SVG");
  plot->add_option("--csv", csvs, "History CSV (repeat to overlay runs)")->required();
  plot->add_option("-o,--out", plot_out, "Output SVG path");

  std::size_t n_runs = 5;
  auto* multirun = app.add_subcommand("multirun", "Independent runs with seeds master_seed + r");
  multirun->add_option("config", config_path, "Run config")->required();
  multirun->add_option("-n,--runs", n_runs, "Number of runs");
  multirun->add_option("-o,--out", out_dir, "Output directory (overrides run.output_dir)");

  CLI11_PARSE(app, argc, argv);

  morphgrad::CommandIo io{std::cout, std::cerr};
  auto optional = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
  };
  if (*train) return morphgrad::cmd_train(config_path, optional(resume_path), optional(out_dir),
                                          workers, io);
  if (*eval) return morphgrad::cmd_eval(ckpt_path, n_rollouts, seed, workers, io);
  if (*plot) return morphgrad::cmd_plot(csvs, plot_out, io);
  return morphgrad::cmd_multirun(config_path, n_runs, optional(out_dir), workers, io);
}
