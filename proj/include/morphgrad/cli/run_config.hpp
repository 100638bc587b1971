#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "morphgrad/env_core.hpp"
#include "morphgrad/envs/hopper.hpp"
#include "morphgrad/envs/spring_mass.hpp"
#include "morphgrad/es_optimizer.hpp"
#include "morphgrad/task.hpp"
#include "morphgrad/trainer.hpp"

namespace morphgrad {

// Bad or incomplete run configuration. `line` is 0 when the problem is not
// tied to one line (e.g. a missing required key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, std::size_t line, const std::string& message);
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

enum class PolicyKind { kNetwork, kReference };

// Everything needed to reproduce a run. File grammar:
//
//   # comment
//   [section]
//   key = value
//
// Sections: run, env, policy, train, optimizer, morphology, augmentation,
// hopper, springmass. In [morphology] each key names an environment design
// parameter and the value is "<original> <scale_limit>".
struct RunConfig {
  std::string env_id;        // sphere | rastrigin | springmass | hopper
  std::size_t env_dim = 0;   // benchmark dimension
  PolicyKind policy = PolicyKind::kNetwork;
  std::vector<std::size_t> hidden{16, 16};
  TrainConfig train;
  OptimizerConfig optimizer;
  MorphologySpec morphology;
  bool augment = false;
  HopperParams hopper;
  SpringMassParams springmass;
  std::string output_dir = "out";

  bool is_benchmark() const { return env_id == "sphere" || env_id == "rastrigin"; }
  // Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
// Canonical text form; parse_run_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

// FNV-1a 64 of the canonical text, ignoring output_dir. 16 hex digits.
std::string config_digest(const RunConfig& cfg);

std::shared_ptr<const Environment> make_environment(const RunConfig& cfg);
std::unique_ptr<Task> make_task(const RunConfig& cfg);

// 17 significant digits; round-trips every finite double and +-inf.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace morphgrad
