#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace morphgrad {

// Layout of the joint vector w: [policy weights | raw morphology].
struct ParamPartition {
  std::size_t policy_len = 0;
  std::size_t morph_len = 0;

  std::size_t total() const { return policy_len + morph_len; }
  friend bool operator==(const ParamPartition&, const ParamPartition&) = default;
};

// Exact prefix/suffix split of w. Throws ContractError on length mismatch.
std::pair<std::span<const double>, std::span<const double>> split(std::span<const double> w,
                                                                  const ParamPartition& part);
std::vector<double> join(std::span<const double> policy_raw, std::span<const double> morph_raw);

// One learnable design parameter.
struct MorphParam {
  std::string name;
  double original = 1.0;
  double scale_limit = 0.75;

  friend bool operator==(const MorphParam&, const MorphParam&) = default;
};

struct MorphologySpec {
  std::vector<MorphParam> params;

  std::size_t size() const { return params.size(); }
  std::vector<double> originals() const;
  void validate() const;

  friend bool operator==(const MorphologySpec&, const MorphologySpec&) = default;
};

// physical_j = original_j * (1 + scale_limit_j * clamp(raw_j, -1, 1)).
std::vector<double> decode_morphology(std::span<const double> raw, const MorphologySpec& spec);

// Area (or any positive size measure) of a full physical design.
using AreaFn = std::function<double(std::span<const double>)>;

struct AugmentationSpec {
  bool enabled = false;
  double orig_area = 1.0;
  AreaFn area_of;
};

// task_score * (1 + ln(orig_area / area_of(physical))) when enabled; the
// factor is left unclamped, so it goes negative for designs larger than
// e * orig_area.
double augment_reward(double task_score, std::span<const double> physical,
                      const AugmentationSpec& aug);

// Policy callback: fills `action` from `obs`.
using PolicyFn = std::function<void(std::span<const double> obs, std::span<double> action)>;

struct RolloutResult {
  double task_score = 0.0;
  std::size_t steps = 0;
  bool diverged = false;
};

// Score assigned to a rollout whose state went non-finite.
inline constexpr double kDivergedScore = -1000.0;

// A parameterized environment: the full physical design is chosen before the
// episode and held fixed during it. rollout() must be a pure function of
// (design, policy, seed).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t act_dim() const = 0;
  // Names and default values of every design parameter the environment has.
  virtual std::vector<std::string> design_names() const = 0;
  virtual std::vector<double> default_design() const = 0;
  // Total leg area of a full design, for reward augmentation.
  virtual double leg_area(std::span<const double> design) const = 0;
  // True when the episode outcome does not depend on the seed.
  virtual bool seed_independent() const { return false; }

  virtual RolloutResult rollout(std::span<const double> design, const PolicyFn& policy,
                                std::uint64_t seed) const = 0;
};

// Resolves a MorphologySpec against an environment's design vector: which
// design slot each learnable parameter writes.
class DesignBinding {
 public:
  DesignBinding(const Environment& env, const MorphologySpec& spec);

  // Full design with the learnable slots replaced by `physical`.
  std::vector<double> apply(std::span<const double> physical) const;
  const std::vector<double>& base() const { return base_; }

 private:
  std::vector<double> base_;
  std::vector<std::size_t> slots_;
};

// Builds an AugmentationSpec whose orig_area is the env's leg area at the
// spec's original values.
AugmentationSpec make_leg_area_augmentation(std::shared_ptr<const Environment> env,
                                            const MorphologySpec& spec, bool enabled);

}  // namespace morphgrad
