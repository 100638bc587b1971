#include "morphgrad/env_core.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "morphgrad/errors.hpp"

namespace morphgrad {

std::pair<std::span<const double>, std::span<const double>> split(std::span<const double> w,
                                                                  const ParamPartition& part) {
  require(w.size() == part.total(), "joint vector length " + std::to_string(w.size()) +
                                        " != policy_len + morph_len (" +
                                        std::to_string(part.total()) + ")");
  return {w.first(part.policy_len), w.subspan(part.policy_len, part.morph_len)};
}

std::vector<double> join(std::span<const double> policy_raw, std::span<const double> morph_raw) {
  std::vector<double> w(policy_raw.begin(), policy_raw.end());
  w.insert(w.end(), morph_raw.begin(), morph_raw.end());
  return w;
}

std::vector<double> MorphologySpec::originals() const {
  std::vector<double> v;
  v.reserve(params.size());
  for (const auto& p : params) v.push_back(p.original);
  return v;
}

void MorphologySpec::validate() const {
  for (const auto& p : params) {
    require(!p.name.empty(), "morphology parameter without a name");
    require(std::isfinite(p.original) && p.original > 0.0,
            "morphology '" + p.name + "': original value must be > 0");
    require(p.scale_limit > 0.0 && p.scale_limit < 1.0,
            "morphology '" + p.name + "': scale_limit must be in (0, 1)");
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = i + 1; j < params.size(); ++j)
      require(params[i].name != params[j].name, "duplicate morphology parameter '" +
                                                    params[i].name + "'");
}

std::vector<double> decode_morphology(std::span<const double> raw, const MorphologySpec& spec) {
  require(raw.size() == spec.size(), "raw morphology length != number of morphology parameters");
  std::vector<double> physical(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const MorphParam& p = spec.params[j];
    // NaN clamps to the center.
    const double r = std::isnan(raw[j]) ? 0.0 : std::clamp(raw[j], -1.0, 1.0);
    physical[j] = p.original * (1.0 + p.scale_limit * r);
  }
  return physical;
}

double augment_reward(double task_score, std::span<const double> physical,
                      const AugmentationSpec& aug) {
  if (!aug.enabled) return task_score;
  require(static_cast<bool>(aug.area_of), "augmentation enabled without an area function");
  const double area = aug.area_of(physical);
  require(area > 0.0, "augmentation requires a positive design area");
  return task_score * (1.0 + std::log(aug.orig_area / area));
}

DesignBinding::DesignBinding(const Environment& env, const MorphologySpec& spec)
    : base_(env.default_design()) {
  const auto names = env.design_names();
  for (const auto& p : spec.params) {
    auto it = std::find(names.begin(), names.end(), p.name);
    require(it != names.end(), "environment '" + env.id() + "' has no design parameter '" +
                                   p.name + "'");
    const auto slot = static_cast<std::size_t>(it - names.begin());
    slots_.push_back(slot);
    // Unlearned design values still follow the spec's originals.
    base_[slot] = p.original;
  }
}

std::vector<double> DesignBinding::apply(std::span<const double> physical) const {
  require(physical.size() == slots_.size(), "physical morphology length mismatch");
  std::vector<double> design = base_;
  for (std::size_t j = 0; j < slots_.size(); ++j) design[slots_[j]] = physical[j];
  return design;
}

AugmentationSpec make_leg_area_augmentation(std::shared_ptr<const Environment> env,
                                            const MorphologySpec& spec, bool enabled) {
  auto binding = std::make_shared<DesignBinding>(*env, spec);
  AugmentationSpec aug;
  aug.enabled = enabled;
  aug.orig_area = env->leg_area(binding->base());
  aug.area_of = [binding, env = std::move(env)](std::span<const double> physical) {
    return env->leg_area(binding->apply(physical));
  };
  return aug;
}

}  // namespace morphgrad
