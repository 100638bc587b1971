#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphgrad/env_core.hpp"
#include "morphgrad/envs/benchmark.hpp"
#include "morphgrad/policy_net.hpp"

namespace morphgrad {

struct EpisodeScore {
  double fitness = 0.0;     // training signal (possibly augmented)
  double task_score = 0.0;  // unaugmented, used for all reporting
  bool diverged = false;
};

// Everything the trainer needs to know about a problem: how long w is and
// what one seeded episode of w scores.
class Task {
 public:
  virtual ~Task() = default;
  virtual ParamPartition partition() const = 0;
  virtual EpisodeScore run_episode(std::span<const double> w, std::uint64_t seed) const = 0;
  virtual bool seed_independent() const = 0;
  std::size_t dim() const { return partition().total(); }
};

// Analytic benchmark: w is scored directly, no policy or morphology.
class BenchmarkTask final : public Task {
 public:
  explicit BenchmarkTask(BenchmarkEnv env) : env_(env) {}
  ParamPartition partition() const override { return {env_.dim, 0}; }
  EpisodeScore run_episode(std::span<const double> w, std::uint64_t seed) const override;
  bool seed_independent() const override { return true; }

 private:
  BenchmarkEnv env_;
};

// Policy network (or a fixed policy) acting in an environment whose design is
// decoded from the tail of w. An empty MorphologySpec gives the
// fixed-morphology baseline.
class EmbodiedTask final : public Task {
 public:
  // Network policy: w = [network weights | raw morphology].
  EmbodiedTask(std::shared_ptr<const Environment> env, NetworkShape shape, MorphologySpec morph,
               bool augment);
  // Fixed policy: w = [raw morphology].
  EmbodiedTask(std::shared_ptr<const Environment> env, PolicyFn fixed_policy, MorphologySpec morph,
               bool augment);

  ParamPartition partition() const override { return partition_; }
  EpisodeScore run_episode(std::span<const double> w, std::uint64_t seed) const override;
  bool seed_independent() const override { return env_->seed_independent(); }

  // Decoded physical values of the learnable design parameters.
  std::vector<double> physical_morphology(std::span<const double> w) const;
  const Environment& environment() const { return *env_; }
  const MorphologySpec& morphology() const { return morph_; }
  const AugmentationSpec& augmentation() const { return aug_; }

 private:
  void bind();

  std::shared_ptr<const Environment> env_;
  std::optional<NetworkShape> shape_;
  PolicyFn fixed_policy_;
  MorphologySpec morph_;
  AugmentationSpec aug_;
  std::unique_ptr<DesignBinding> binding_;
  ParamPartition partition_;
  bool augment_ = false;
};

}  // namespace morphgrad
