#pragma once

#include "morphgrad/env_core.hpp"

namespace morphgrad {

// Payload riding on a single springy leg whose foot stays planted. The
// actuator pushes along the leg; anisotropic foot friction turns vertical
// bouncing into forward travel at `ratchet` metres per metre of vertical
// motion. Leg mass and stiffness both depend on the design:
//
//   m = body_mass + density * L * t        k = stiffness_constant * t / L
//
// so under a fixed-frequency drive there is a single resonant leg length.
// Design vector: [leg_length, leg_thickness].
struct SpringMassParams {
  double body_mass = 5.0;            // kg
  double density = 5.0;              // kg / m^2
  double stiffness_constant = 800.0; // N
  double damping = 10.0;             // N s / m
  double actuator_force = 20.0;      // N at |u| = 1
  double drive_frequency = 1.1;      // Hz, the clock the observations carry
  double ratchet = 0.5;
  double gravity = 9.81;
  double dt = 0.01;
  std::size_t steps = 1000;
  double leg_length = 1.0;           // m
  double leg_thickness = 0.5;        // m

  friend bool operator==(const SpringMassParams&, const SpringMassParams&) = default;
};

class SpringMass1D final : public Environment {
 public:
  explicit SpringMass1D(SpringMassParams params = {});

  std::string id() const override { return "springmass"; }
  // [leg compression, vertical velocity, sin(phase), cos(phase)]
  std::size_t obs_dim() const override { return 4; }
  std::size_t act_dim() const override { return 1; }
  std::vector<std::string> design_names() const override;
  std::vector<double> default_design() const override;
  double leg_area(std::span<const double> design) const override;
  bool seed_independent() const override { return true; }

  RolloutResult rollout(std::span<const double> design, const PolicyFn& policy,
                        std::uint64_t seed) const override;

  const SpringMassParams& params() const { return params_; }

  // Open-loop drive in phase with the observation clock: u = sin(phase).
  static void reference_policy(std::span<const double> obs, std::span<double> action);

 private:
  SpringMassParams params_;
};

}  // namespace morphgrad
