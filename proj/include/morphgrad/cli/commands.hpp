#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace morphgrad {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitDigest = 3,
  kExitCheckpoint = 4,
  kExitCsv = 5,
};

struct CommandIo {
  std::ostream& out;
  std::ostream& err;
};

// Trains from a config file; `output_dir` overrides the config's run.output_dir.
// Writes history.csv, checkpoint.txt and checkpoint_gen<g>.txt every
// train.checkpoint_every generations.
int cmd_train(const std::string& config_path, const std::optional<std::string>& resume_path,
              const std::optional<std::string>& output_dir, int workers, CommandIo io);

// Scores the checkpoint's best agent (or its mean if no best was recorded)
// on n rollouts seeded from `seed`.
int cmd_eval(const std::string& checkpoint_path, std::size_t n_rollouts, std::uint64_t seed,
             int workers, CommandIo io);

// One series per csv, labelled by file stem.
int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& out_path, CommandIo io);

// Writes summary.csv (run,final_score) and run<r>/history.csv.
int cmd_multirun(const std::string& config_path, std::size_t n_runs,
                 const std::optional<std::string>& output_dir, int workers, CommandIo io);

}  // namespace morphgrad
