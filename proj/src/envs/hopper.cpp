#include "morphgrad/envs/hopper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "morphgrad/errors.hpp"

namespace morphgrad {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Jac = Eigen::Matrix<double, 2, 4>;

struct Body {
  double thigh_len, shin_len;
  double thigh_mass, shin_mass;
  double thigh_inertia, shin_inertia;  // about own centre of mass
};

Body make_body(std::span<const double> design, double density) {
  Body b{};
  b.thigh_len = design[0];
  b.shin_len = design[1];
  const double tw = design[2], sw = design[3];
  b.thigh_mass = density * b.thigh_len * tw;
  b.shin_mass = density * b.shin_len * sw;
  b.thigh_inertia = b.thigh_mass * (b.thigh_len * b.thigh_len + tw * tw) / 12.0;
  b.shin_inertia = b.shin_mass * (b.shin_len * b.shin_len + sw * sw) / 12.0;
  return b;
}

// Smooth bumps, fixed per seed.
struct Terrain {
  double height = 0.0;
  std::array<double, 4> freq{};
  std::array<double, 4> phase{};

  double at(double x) const {
    if (height == 0.0) return 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) h += std::sin(freq[i] * x + phase[i]);
    return height * 0.25 * (h + 4.0) * 0.5 * std::min(1.0, std::max(0.0, x - 0.5));
  }
};

// Point on the leg at distance `along_thigh` / `along_shin`; Jacobian wrt q
// and the velocity-product term (J-dot q-dot).
struct PointKin {
  Eigen::Vector2d pos;
  Jac jac;
  Eigen::Vector2d bias;
};

PointKin leg_point(const std::array<double, 4>& q, const std::array<double, 4>& qd,
                   double along_thigh, double along_shin) {
  const double s1 = std::sin(q[2]), c1 = std::cos(q[2]);
  const double s2 = std::sin(q[3]), c2 = std::cos(q[3]);
  PointKin k;
  k.pos = {q[0] + along_thigh * s1 + along_shin * s2, q[1] - along_thigh * c1 - along_shin * c2};
  k.jac.setZero();
  k.jac(0, 0) = 1.0;
  k.jac(1, 1) = 1.0;
  k.jac(0, 2) = along_thigh * c1;
  k.jac(1, 2) = along_thigh * s1;
  k.jac(0, 3) = along_shin * c2;
  k.jac(1, 3) = along_shin * s2;
  const double w1 = qd[2] * qd[2], w2 = qd[3] * qd[3];
  k.bias = {-along_thigh * s1 * w1 - along_shin * s2 * w2,
            along_thigh * c1 * w1 + along_shin * c2 * w2};
  return k;
}

// Forces split for the velocity update: `force` holds everything explicit,
// `damping` the linear velocity-proportional terms (force = -damping * qd),
// which are integrated implicitly so light segments stay stable.
struct ForceTerms {
  Vec4 force = Vec4::Zero();
  Mat4 damping = Mat4::Zero();
};

// Penalty contact at one leg point. Returns true when the point touches the
// ground.
bool apply_contact(const PointKin& p, const std::array<double, 4>& qd, const HopperParams& hp,
                   const Terrain& terrain, ForceTerms& terms) {
  const double depth = terrain.at(p.pos.x()) - p.pos.y();
  if (depth <= 0.0) return false;
  const Eigen::Vector2d vel = p.jac * Eigen::Map<const Vec4>(qd.data());
  const Vec4 jx = p.jac.row(0).transpose(), jy = p.jac.row(1).transpose();

  const double normal = hp.contact_stiffness * depth - hp.contact_damping * vel.y();
  if (normal <= 0.0) return true;  // separating faster than the spring pushes
  terms.force += jy * (hp.contact_stiffness * depth);
  terms.damping += hp.contact_damping * jy * jy.transpose();

  const double max_friction = hp.friction_coefficient * normal;
  const double viscous = -hp.friction_damping * vel.x();
  if (std::abs(viscous) <= max_friction) {
    terms.damping += hp.friction_damping * jx * jx.transpose();
  } else {
    terms.force += jx * std::copysign(max_friction, viscous);
  }
  return true;
}

// Joint-space spring toward [lo, hi] plus damping while outside it.
void apply_limit(double angle, double lo, double hi, const Vec4& axis, const HopperParams& hp,
                 ForceTerms& terms) {
  double excess = 0.0;
  if (angle < lo) excess = lo - angle;
  if (angle > hi) excess = hi - angle;
  if (excess == 0.0) return;
  terms.force += axis * (hp.limit_stiffness * excess);
  terms.damping += hp.limit_damping * axis * axis.transpose();
}

bool sane_state(const PlanarHopper::State& s) {
  constexpr double kBound = 1.0e6;
  for (std::size_t i = 0; i < 4; ++i)
    if (!std::isfinite(s.q[i]) || !std::isfinite(s.qd[i]) || std::abs(s.q[i]) > kBound ||
        std::abs(s.qd[i]) > kBound)
      return false;
  return true;
}

}  // namespace

PlanarHopper::PlanarHopper(HopperParams params) : params_(params) {
  require(params_.dt > 0.0 && params_.substeps >= 1 && params_.max_steps >= 1,
          "hopper: dt, substeps and max_steps must be positive");
}

std::vector<std::string> PlanarHopper::design_names() const {
  return {"thigh_length", "shin_length", "thigh_width", "shin_width"};
}

std::vector<double> PlanarHopper::default_design() const {
  return {params_.design.begin(), params_.design.end()};
}

double PlanarHopper::leg_area(std::span<const double> design) const {
  require(design.size() == 4, "hopper design has 4 entries");
  return design[0] * design[2] + design[1] * design[3];
}

RolloutResult PlanarHopper::rollout(std::span<const double> design, const PolicyFn& policy,
                                    std::uint64_t seed) const {
  return simulate(design, policy, seed).result;
}

PlanarHopper::Trace PlanarHopper::simulate(std::span<const double> design, const PolicyFn& policy,
                                           std::uint64_t seed) const {
  require(design.size() == 4, "hopper design has 4 entries");
  for (double v : design) require(v > 0.0, "hopper design values must be positive");
  const HopperParams& hp = params_;
  const Body body = make_body(design, hp.density);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Terrain terrain;
  terrain.height = hp.terrain_bump_height;
  if (terrain.height != 0.0) {
    for (std::size_t i = 0; i < terrain.freq.size(); ++i) {
      terrain.freq[i] = 1.0 + 1.5 * (unit(rng) + 1.0);
      terrain.phase[i] = std::numbers::pi * unit(rng);
    }
  }

  // Upright, leg straight down, foot resting on the ground at static load.
  const double total_mass = hp.torso_mass + body.thigh_mass + body.shin_mass;
  State s;
  s.q = {0.0, body.thigh_len + body.shin_len - total_mass * hp.gravity / hp.contact_stiffness,
         0.0, 0.0};
  s.qd = {0.0, hp.init_velocity_noise * unit(rng), 0.0, 0.0};

  const double h = hp.dt / static_cast<double>(hp.substeps);
  std::array<double, kObsDim> obs{};
  std::array<double, kActDim> act{};
  bool foot_contact = true;

  Trace trace;
  RolloutResult& result = trace.result;
  double score = 0.0;
  for (std::size_t step = 0; step < hp.max_steps; ++step) {
    obs = {s.q[1],          s.qd[0],           s.qd[1], s.q[2], s.q[2] - s.q[3],
           s.qd[2],         s.qd[2] - s.qd[3], foot_contact ? 1.0 : 0.0};
    act = {0.0, 0.0};
    policy(obs, act);
    const double a_hip = std::clamp(act[0], -1.0, 1.0);
    const double a_knee = std::clamp(act[1], -1.0, 1.0);
    const double tau_hip = hp.torque_limit * a_hip;
    const double tau_knee = hp.torque_limit * a_knee;
    const double x_before = s.q[0];

    for (std::size_t sub = 0; sub < hp.substeps; ++sub) {
      const PointKin thigh_com = leg_point(s.q, s.qd, 0.5 * body.thigh_len, 0.0);
      const PointKin shin_com = leg_point(s.q, s.qd, body.thigh_len, 0.5 * body.shin_len);
      const PointKin knee = leg_point(s.q, s.qd, body.thigh_len, 0.0);
      const PointKin foot = leg_point(s.q, s.qd, body.thigh_len, body.shin_len);

      Mat4 mass = Mat4::Zero();
      mass(0, 0) += hp.torso_mass;
      mass(1, 1) += hp.torso_mass;
      mass += body.thigh_mass * thigh_com.jac.transpose() * thigh_com.jac;
      mass += body.shin_mass * shin_com.jac.transpose() * shin_com.jac;
      mass(2, 2) += body.thigh_inertia;
      mass(3, 3) += body.shin_inertia;

      ForceTerms terms;
      Vec4& force = terms.force;
      force(1) -= total_mass * hp.gravity;  // every COM Jacobian has identity in (x, y)
      force(2) -= body.thigh_mass * hp.gravity * thigh_com.jac(1, 2);
      force(3) -= body.shin_mass * hp.gravity * shin_com.jac(1, 3);
      force(2) -= body.shin_mass * hp.gravity * shin_com.jac(1, 2);
      force -= body.thigh_mass * thigh_com.jac.transpose() * thigh_com.bias;
      force -= body.shin_mass * shin_com.jac.transpose() * shin_com.bias;

      // Hip acts between the level torso and the thigh; knee between thigh
      // and shin. Knee angle is thigh minus shin.
      const Vec4 hip_axis(0.0, 0.0, 1.0, 0.0);
      const Vec4 knee_axis(0.0, 0.0, 1.0, -1.0);
      force += hip_axis * tau_hip + knee_axis * tau_knee;
      terms.damping += hp.joint_damping * (hip_axis * hip_axis.transpose() +
                                           knee_axis * knee_axis.transpose());
      apply_limit(s.q[2], -hp.hip_limit, hp.hip_limit, hip_axis, hp, terms);
      apply_limit(s.q[2] - s.q[3], hp.knee_min, hp.knee_max, knee_axis, hp, terms);

      foot_contact = apply_contact(foot, s.qd, hp, terrain, terms);
      apply_contact(knee, s.qd, hp, terrain, terms);

      // (M + h D) qd' = M qd + h F
      const Eigen::Map<const Vec4> qd(s.qd.data());
      const Vec4 dv = (mass + h * terms.damping).llt().solve(h * (force - terms.damping * qd));
      for (std::size_t i = 0; i < 4; ++i) {
        s.qd[i] += dv(static_cast<Eigen::Index>(i));
        s.q[i] += h * s.qd[i];
      }
    }

    result.steps = step + 1;
    if (!sane_state(s)) {
      result.task_score = kDivergedScore;
      result.diverged = true;
      trace.final_state = s;
      return trace;
    }
    score += (s.q[0] - x_before) - hp.torque_cost * (std::abs(a_hip) + std::abs(a_knee));
    if (s.q[1] - terrain.at(s.q[0]) < hp.fall_height) {
      score += hp.fall_penalty;
      trace.fell = true;
      break;
    }
  }
  result.task_score = score;
  trace.final_state = s;
  return trace;
}

}  // namespace morphgrad
