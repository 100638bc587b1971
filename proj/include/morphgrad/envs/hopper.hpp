#pragma once

#include <array>

#include "morphgrad/env_core.hpp"

namespace morphgrad {

// Constants of the planar one-legged hopper. The torso is a point payload
// held level by a planarizing boom, so the hip motor reacts against it and
// the generalized coordinates are q = (x, y, thigh angle, shin angle) with
// both angles measured from straight down.
struct HopperParams {
  double dt = 0.01;               // control period, s
  std::size_t substeps = 10;      // physics steps per control period
  std::size_t max_steps = 1000;
  double gravity = 9.81;
  double torso_mass = 5.0;        // kg
  double density = 5.0;           // kg / m^2 of segment area
  double torque_limit = 80.0;     // N m at |action| = 1
  double torque_cost = 0.001;     // per unit |action| per step
  double fall_height = 0.1;       // m; torso below this ends the episode
  double fall_penalty = -100.0;
  double joint_damping = 0.5;     // N m s
  double knee_min = 0.0;          // thigh minus shin angle, rad
  double knee_max = 2.4;
  double hip_limit = 0.8;         // |thigh angle|, rad
  double limit_stiffness = 300.0; // N m / rad
  double limit_damping = 5.0;
  double contact_stiffness = 2.0e4;  // N / m
  double contact_damping = 300.0;    // N s / m
  double friction_coefficient = 1.0;
  double friction_damping = 400.0;   // N s / m; regularized Coulomb slope
  double init_velocity_noise = 0.05; // m/s, vertical only
  double terrain_bump_height = 0.0;  // 0 = flat ground
  // Original design: thigh length, shin length, thigh width, shin width (m).
  std::array<double, 4> design{0.7, 0.7, 0.3, 0.3};

  friend bool operator==(const HopperParams&, const HopperParams&) = default;
};

class PlanarHopper final : public Environment {
 public:
  static constexpr std::size_t kObsDim = 8;
  static constexpr std::size_t kActDim = 2;

  explicit PlanarHopper(HopperParams params = {});

  std::string id() const override { return "hopper"; }
  // [torso height, torso vx, torso vy, hip angle, knee angle,
  //  hip rate, knee rate, foot contact]
  std::size_t obs_dim() const override { return kObsDim; }
  std::size_t act_dim() const override { return kActDim; }
  std::vector<std::string> design_names() const override;
  std::vector<double> default_design() const override;
  // Sum of length * width over both segments.
  double leg_area(std::span<const double> design) const override;
  bool seed_independent() const override {
    return params_.init_velocity_noise == 0.0 && params_.terrain_bump_height == 0.0;
  }

  RolloutResult rollout(std::span<const double> design, const PolicyFn& policy,
                        std::uint64_t seed) const override;

  struct State {
    std::array<double, 4> q{};
    std::array<double, 4> qd{};
  };

  // Full trajectory access for physics tests.
  struct Trace {
    RolloutResult result;
    State final_state;
    bool fell = false;
  };
  Trace simulate(std::span<const double> design, const PolicyFn& policy,
                 std::uint64_t seed) const;

  const HopperParams& params() const { return params_; }

 private:
  HopperParams params_;
};

}  // namespace morphgrad
