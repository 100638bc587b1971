#include "morphgrad/envs/spring_mass.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "morphgrad/errors.hpp"

namespace morphgrad {

SpringMass1D::SpringMass1D(SpringMassParams params) : params_(params) {
  require(params_.dt > 0.0 && params_.steps >= 1, "springmass: dt and steps must be positive");
}

std::vector<std::string> SpringMass1D::design_names() const {
  return {"leg_length", "leg_thickness"};
}

std::vector<double> SpringMass1D::default_design() const {
  return {params_.leg_length, params_.leg_thickness};
}

double SpringMass1D::leg_area(std::span<const double> design) const {
  require(design.size() == 2, "springmass design has 2 entries");
  return design[0] * design[1];
}

void SpringMass1D::reference_policy(std::span<const double> obs, std::span<double> action) {
  action[0] = obs[2];
}

RolloutResult SpringMass1D::rollout(std::span<const double> design, const PolicyFn& policy,
                                    std::uint64_t /*seed*/) const {
  require(design.size() == 2, "springmass design has 2 entries");
  const double length = design[0];
  const double thickness = design[1];
  require(length > 0.0 && thickness > 0.0, "springmass: leg dimensions must be positive");

  const auto& p = params_;
  const double mass = p.body_mass + p.density * length * thickness;
  const double k = p.stiffness_constant * thickness / length;
  const double omega = 2.0 * std::numbers::pi * p.drive_frequency;

  // Start at static equilibrium.
  double height = length - mass * p.gravity / k;
  double velocity = 0.0;
  double distance = 0.0;

  std::array<double, 4> obs{};
  std::array<double, 1> act{};
  RolloutResult result;
  for (std::size_t step = 0; step < p.steps; ++step) {
    const double phase = omega * static_cast<double>(step) * p.dt;
    obs = {length - height, velocity, std::sin(phase), std::cos(phase)};
    act[0] = 0.0;
    policy(obs, act);
    const double u = std::clamp(act[0], -1.0, 1.0);

    const double leg_force = k * (length - height) - p.damping * velocity + p.actuator_force * u;
    velocity += p.dt * (leg_force / mass - p.gravity);
    height += p.dt * velocity;
    distance += p.ratchet * std::abs(velocity) * p.dt;
    result.steps = step + 1;

    if (!std::isfinite(height) || !std::isfinite(velocity)) {
      result.task_score = kDivergedScore;
      result.diverged = true;
      return result;
    }
  }
  result.task_score = distance;
  return result;
}

}  // namespace morphgrad
