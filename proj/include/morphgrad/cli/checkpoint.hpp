#pragma once

#include <stdexcept>
#include <string>

#include "morphgrad/cli/run_config.hpp"
#include "morphgrad/trainer.hpp"

namespace morphgrad {

// Missing, truncated or otherwise unparseable checkpoint.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint written for a different configuration.
class DigestMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

// Text layout, one item per line:
//
//   morphgrad-checkpoint 1
//   digest <16 hex>
//   config <n>            followed by n lines of serialized RunConfig
//   generation <g>
//   dim <d>
//   mu <d values>
//   sigma <d values>
//   best_avg_score <x>
//   best_params <m> <m values>
//   history <r>           followed by r csv rows
//   end
//
// Every real is printed with 17 significant digits.
struct Checkpoint {
  RunConfig config;
  TrainState state;
};

std::string format_checkpoint(const RunConfig& cfg, const TrainState& state);
// Throws CheckpointError on malformed text, DigestMismatchError when the
// recorded digest disagrees with the embedded config.
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::string& path, const RunConfig& cfg, const TrainState& state);
Checkpoint load_checkpoint(const std::string& path);

// Throws DigestMismatchError unless `ckpt` was produced from `cfg`.
void require_same_config(const Checkpoint& ckpt, const RunConfig& cfg);

}  // namespace morphgrad
