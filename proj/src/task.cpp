#include "morphgrad/task.hpp"

#include "morphgrad/errors.hpp"

namespace morphgrad {

EpisodeScore BenchmarkTask::run_episode(std::span<const double> w, std::uint64_t) const {
  const double f = benchmark_fitness(env_, w);
  return {f, f, false};
}

EmbodiedTask::EmbodiedTask(std::shared_ptr<const Environment> env, NetworkShape shape,
                           MorphologySpec morph, bool augment)
    : env_(std::move(env)), shape_(std::move(shape)), morph_(std::move(morph)), augment_(augment) {
  require(shape_->input_dim == env_->obs_dim(),
          "network input_dim " + std::to_string(shape_->input_dim) + " != " + env_->id() +
              " obs_dim " + std::to_string(env_->obs_dim()));
  require(shape_->output_dim == env_->act_dim(),
          "network output_dim " + std::to_string(shape_->output_dim) + " != " + env_->id() +
              " act_dim " + std::to_string(env_->act_dim()));
  partition_ = {parameter_count(*shape_), morph_.size()};
  bind();
}

EmbodiedTask::EmbodiedTask(std::shared_ptr<const Environment> env, PolicyFn fixed_policy,
                           MorphologySpec morph, bool augment)
    : env_(std::move(env)), fixed_policy_(std::move(fixed_policy)), morph_(std::move(morph)),
      augment_(augment) {
  require(static_cast<bool>(fixed_policy_), "fixed policy is empty");
  partition_ = {0, morph_.size()};
  bind();
}

void EmbodiedTask::bind() {
  morph_.validate();
  binding_ = std::make_unique<DesignBinding>(*env_, morph_);
  aug_ = make_leg_area_augmentation(env_, morph_, augment_);
}

std::vector<double> EmbodiedTask::physical_morphology(std::span<const double> w) const {
  auto [policy_raw, morph_raw] = split(w, partition_);
  return decode_morphology(morph_raw, morph_);
}

EpisodeScore EmbodiedTask::run_episode(std::span<const double> w, std::uint64_t seed) const {
  auto [policy_raw, morph_raw] = split(w, partition_);
  const std::vector<double> physical = decode_morphology(morph_raw, morph_);
  const std::vector<double> design = binding_->apply(physical);

  RolloutResult r;
  if (shape_) {
    MlpPolicy net(*shape_, policy_raw);
    r = env_->rollout(design, [&net](std::span<const double> o, std::span<double> a) { net(o, a); },
                      seed);
  } else {
    r = env_->rollout(design, fixed_policy_, seed);
  }
  EpisodeScore out;
  out.task_score = r.task_score;
  out.diverged = r.diverged;
  // The sentinel is a penalty, not a task score, so it is not rescaled.
  out.fitness = r.diverged ? r.task_score : augment_reward(r.task_score, physical, aug_);
  return out;
}

}  // namespace morphgrad
