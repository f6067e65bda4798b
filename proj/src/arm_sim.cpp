#include "freqneuro/arm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace freqneuro {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

struct Force {
  double x = 0.0;
  double y = 0.0;
};

struct Muscle {
  double stiffness;
  double rest;
};

Muscle muscle(double passive, double rest, double activation, const PhysicsConfig& physics) {
  return {passive + activation * physics.active_stiffness,
          rest * (1.0 - activation * physics.max_contraction)};
}

void apply_spring(const PointMass& a, const PointMass& b, Force& fa, Force& fb, Muscle m,
                  double damping) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len <= 0.0) return;
  const double ux = dx / len;
  const double uy = dy / len;
  const double stretch_rate = (b.vx - a.vx) * ux + (b.vy - a.vy) * uy;
  const double f = m.stiffness * (len - m.rest) + damping * stretch_rate;
  fa.x += f * ux;
  fa.y += f * uy;
  fb.x -= f * ux;
  fb.y -= f * uy;
}

// Shoelace area of (D_c, D_{c+1}, V_{c+1}, V_c); negative for an arm laid
// out counter-clockwise from its base, constant sign while not inverted.
double signed_area(const PointMass* const quad[4]) {
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    const PointMass* a = quad[i];
    const PointMass* b = quad[(i + 1) % 4];
    twice += a->x * b->y - b->x * a->y;
  }
  return 0.5 * twice;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double diagonal_rest(const PhysicsConfig& physics) {
  return std::hypot(physics.segment_length, physics.arm_width);
}

void place_base(ArmState& s, const PhysicsConfig& physics) {
  const double half = 0.5 * physics.arm_width;
  const double nx = -std::sin(s.base_angle);
  const double ny = std::cos(s.base_angle);
  const double w = s.base_angular_velocity;
  s.dorsal[0] = {half * nx, half * ny, -w * half * ny, w * half * nx};
  s.ventral[0] = {-half * nx, -half * ny, w * half * ny, -w * half * nx};
}

double rest_area(const PhysicsConfig& physics) {
  return -physics.segment_length * physics.arm_width;
}

}  // namespace

ArmState init_arm(std::size_t compartments, double initial_angle, const PhysicsConfig& physics) {
  if (compartments < 1) throw std::invalid_argument("arm needs at least one compartment");
  ArmState s;
  s.dorsal.resize(compartments + 1);
  s.ventral.resize(compartments + 1);
  s.base_angle = initial_angle;
  const double ux = std::cos(initial_angle);
  const double uy = std::sin(initial_angle);
  const double half = 0.5 * physics.arm_width;
  for (std::size_t k = 0; k <= compartments; ++k) {
    const double along = static_cast<double>(k) * physics.segment_length;
    s.dorsal[k] = {along * ux - half * uy, along * uy + half * ux, 0.0, 0.0};
    s.ventral[k] = {along * ux + half * uy, along * uy - half * ux, 0.0, 0.0};
  }
  place_base(s, physics);
  return s;
}

std::vector<double> observe(const ArmState& state) {
  const std::size_t p = state.compartments();
  std::vector<double> obs;
  obs.reserve(observation_size(p));
  for (std::size_t c = 1; c <= p; ++c) {
    for (const PointMass* m : {&state.dorsal[c], &state.ventral[c]}) {
      obs.insert(obs.end(), {m->x, m->y, m->vx, m->vy});
    }
  }
  obs.push_back(state.base_angle);
  obs.push_back(state.base_angular_velocity);
  return obs;
}

ArmState step_physics(const ArmState& state, std::span<const double> raw_action,
                      const PhysicsConfig& physics) {
  const std::size_t p = state.compartments();
  if (p < 1) throw std::invalid_argument("arm state has no compartments");
  if (raw_action.size() != raw_action_size(p)) {
    throw std::invalid_argument("expected " + std::to_string(raw_action_size(p)) +
                                " raw actions, got " + std::to_string(raw_action.size()));
  }
  std::vector<double> act(raw_action.size());
  for (std::size_t j = 0; j < act.size(); ++j) {
    act[j] = std::isfinite(raw_action[j]) ? clamp01(raw_action[j]) : 0.0;
  }

  ArmState s = state;
  const double dt = physics.control_dt / static_cast<double>(physics.substeps);
  const double diag = diagonal_rest(physics);
  const double area0 = rest_area(physics);
  const double torque = physics.base_torque * (act[3 * p] - act[3 * p + 1]);
  std::vector<Force> fd(p + 1);
  std::vector<Force> fv(p + 1);

  for (std::size_t sub = 0; sub < physics.substeps; ++sub) {
    std::fill(fd.begin(), fd.end(), Force{});
    std::fill(fv.begin(), fv.end(), Force{});

    for (std::size_t c = 0; c < p; ++c) {
      const double dorsal_a = act[3 * c];
      const double transverse_a = act[3 * c + 1];
      const double ventral_a = act[3 * c + 2];
      const double c_damp = physics.spring_damping;
      apply_spring(s.dorsal[c], s.dorsal[c + 1], fd[c], fd[c + 1],
                   muscle(physics.longitudinal_stiffness, physics.segment_length, dorsal_a, physics),
                   c_damp);
      apply_spring(s.ventral[c], s.ventral[c + 1], fv[c], fv[c + 1],
                   muscle(physics.longitudinal_stiffness, physics.segment_length, ventral_a, physics),
                   c_damp);
      apply_spring(s.dorsal[c + 1], s.ventral[c + 1], fd[c + 1], fv[c + 1],
                   muscle(physics.transverse_stiffness, physics.arm_width, transverse_a, physics),
                   c_damp);
      apply_spring(s.dorsal[c], s.ventral[c + 1], fd[c], fv[c + 1],
                   {physics.diagonal_stiffness, diag}, c_damp);
      apply_spring(s.ventral[c], s.dorsal[c + 1], fv[c], fd[c + 1],
                   {physics.diagonal_stiffness, diag}, c_damp);

      const PointMass* quad[4] = {&s.dorsal[c], &s.dorsal[c + 1], &s.ventral[c + 1],
                                  &s.ventral[c]};
      Force* qf[4] = {&fd[c], &fd[c + 1], &fv[c + 1], &fv[c]};
      const double excess = signed_area(quad) - area0;
      for (int i = 0; i < 4; ++i) {
        const PointMass* next = quad[(i + 1) % 4];
        const PointMass* prev = quad[(i + 3) % 4];
        qf[i]->x -= physics.area_stiffness * excess * 0.5 * (next->y - prev->y);
        qf[i]->y -= physics.area_stiffness * excess * 0.5 * (prev->x - next->x);
      }
    }

    const double inv_mass = 1.0 / physics.node_mass;
    for (std::size_t k = 1; k <= p; ++k) {
      for (auto [m, f] : {std::pair{&s.dorsal[k], &fd[k]}, std::pair{&s.ventral[k], &fv[k]}}) {
        const double ax = (f->x - physics.drag * m->vx) * inv_mass;
        const double ay = (f->y - physics.drag * m->vy) * inv_mass - physics.gravity;
        m->vx += dt * ax;
        m->vy += dt * ay;
        m->x += dt * m->vx;
        m->y += dt * m->vy;
      }
    }
    s.base_angular_velocity +=
        dt * (torque - physics.base_damping * s.base_angular_velocity);
    s.base_angle += dt * s.base_angular_velocity;
    place_base(s, physics);
  }

  for (std::size_t k = 0; k <= p; ++k) {
    for (const PointMass* m : {&s.dorsal[k], &s.ventral[k]}) {
      if (!std::isfinite(m->x) || !std::isfinite(m->y) || !std::isfinite(m->vx) ||
          !std::isfinite(m->vy)) {
        throw std::runtime_error("simulation diverged");
      }
    }
  }
  if (!std::isfinite(s.base_angle) || !std::isfinite(s.base_angular_velocity)) {
    throw std::runtime_error("simulation diverged");
  }
  return s;
}

std::vector<double> meta_to_raw(std::span<const double> meta, std::size_t compartments) {
  if (meta.size() != kMetaActions) {
    throw std::invalid_argument("expected 8 meta-actions, got " + std::to_string(meta.size()));
  }
  std::vector<double> raw(raw_action_size(compartments), 0.0);
  const std::size_t half = compartments / 2;
  for (std::size_t c = 0; c < compartments; ++c) {
    const std::size_t group = c < half ? 0 : 3;
    for (std::size_t m = 0; m < kMusclesPerCompartment; ++m) {
      raw[3 * c + m] = clamp01(meta[group + m]);
    }
  }
  raw[3 * compartments] = clamp01(meta[6]);
  raw[3 * compartments + 1] = clamp01(meta[7]);
  return raw;
}

Vec2 tip_position(const ArmState& state) {
  const auto& d = state.dorsal.back();
  const auto& v = state.ventral.back();
  return {0.5 * (d.x + v.x), 0.5 * (d.y + v.y)};
}

double arm_length(const ArmState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < state.compartments(); ++k) {
    const Vec2 a{0.5 * (state.dorsal[k].x + state.ventral[k].x),
                 0.5 * (state.dorsal[k].y + state.ventral[k].y)};
    const Vec2 b{0.5 * (state.dorsal[k + 1].x + state.ventral[k + 1].x),
                 0.5 * (state.dorsal[k + 1].y + state.ventral[k + 1].y)};
    total += distance(a, b);
  }
  return total;
}

double compartment_area(const ArmState& state, std::size_t compartment) {
  if (compartment >= state.compartments()) throw std::out_of_range("no such compartment");
  const std::size_t c = compartment;
  const PointMass* quad[4] = {&state.dorsal[c], &state.dorsal[c + 1], &state.ventral[c + 1],
                              &state.ventral[c]};
  return std::abs(signed_area(quad));
}

double kinetic_energy(const ArmState& state, const PhysicsConfig& physics) {
  double e = 0.0;
  for (std::size_t k = 1; k <= state.compartments(); ++k) {
    for (const PointMass* m : {&state.dorsal[k], &state.ventral[k]}) {
      e += 0.5 * physics.node_mass * (m->vx * m->vx + m->vy * m->vy);
    }
  }
  return e;
}

double mechanical_energy(const ArmState& state, std::span<const double> raw_action,
                         const PhysicsConfig& physics) {
  const std::size_t p = state.compartments();
  auto spring = [](const PointMass& a, const PointMass& b, Muscle m) {
    const double stretch = std::hypot(b.x - a.x, b.y - a.y) - m.rest;
    return 0.5 * m.stiffness * stretch * stretch;
  };
  double e = kinetic_energy(state, physics);
  const double diag = diagonal_rest(physics);
  for (std::size_t c = 0; c < p; ++c) {
    const double da = clamp01(raw_action[3 * c]);
    const double ta = clamp01(raw_action[3 * c + 1]);
    const double va = clamp01(raw_action[3 * c + 2]);
    e += spring(state.dorsal[c], state.dorsal[c + 1],
                muscle(physics.longitudinal_stiffness, physics.segment_length, da, physics));
    e += spring(state.ventral[c], state.ventral[c + 1],
                muscle(physics.longitudinal_stiffness, physics.segment_length, va, physics));
    e += spring(state.dorsal[c + 1], state.ventral[c + 1],
                muscle(physics.transverse_stiffness, physics.arm_width, ta, physics));
    e += spring(state.dorsal[c], state.ventral[c + 1], {physics.diagonal_stiffness, diag});
    e += spring(state.ventral[c], state.dorsal[c + 1], {physics.diagonal_stiffness, diag});
    const PointMass* quad[4] = {&state.dorsal[c], &state.dorsal[c + 1], &state.ventral[c + 1],
                                &state.ventral[c]};
    const double excess = signed_area(quad) - rest_area(physics);
    e += 0.5 * physics.area_stiffness * excess * excess;
  }
  return e;
}

std::size_t trial_horizon(std::size_t compartments, const PhysicsConfig& physics) {
  return physics.steps_per_compartment * compartments;
}

Vec2 goal_position(std::size_t compartments, const PhysicsConfig& physics) {
  const double length = static_cast<double>(compartments) * physics.segment_length;
  return {physics.goal_x * length, physics.goal_y * length};
}

namespace {

std::vector<TrialSpec> trials_at(std::initializer_list<double> angles, std::size_t p,
                                 const PhysicsConfig& physics) {
  std::vector<TrialSpec> trials;
  for (double a : angles) trials.push_back({a, trial_horizon(p, physics), goal_position(p, physics)});
  return trials;
}

}  // namespace

std::vector<TrialSpec> training_trials(std::size_t compartments, const PhysicsConfig& physics) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  return trials_at({-kHalfPi, 0.0, kHalfPi}, compartments, physics);
}

std::vector<TrialSpec> generalization_trials(std::size_t compartments,
                                             const PhysicsConfig& physics) {
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  return trials_at({-kQuarterPi, kQuarterPi}, compartments, physics);
}

double trial_score(double t, double horizon, double d, double initial_distance) {
  if (!(horizon > 0.0) || !(initial_distance > 0.0)) {
    throw std::invalid_argument("horizon and initial distance must be positive");
  }
  return std::max(1.0 - (t / horizon) * (d / initial_distance), 0.0);
}

TrialOutcome run_trial(const NetworkWeights& weights, ActionMode mode, std::size_t compartments,
                       const TrialSpec& trial, const PhysicsConfig& physics,
                       DistanceMode distance_mode, std::vector<TrajectoryPoint>* trajectory,
                       Activation activation) {
  const std::size_t outputs = mode == ActionMode::kMeta ? kMetaActions : raw_action_size(compartments);
  if (weights.inputs() != observation_size(compartments) || weights.neurons() != outputs) {
    throw std::invalid_argument("network shape does not match a " + std::to_string(compartments) +
                                "-compartment arm");
  }
  if (trial.horizon < 1) throw std::invalid_argument("trial horizon must be >= 1");

  ArmState arm = init_arm(compartments, trial.initial_angle, physics);
  RnnState rnn = reset(weights.neurons());
  TrialOutcome out;
  out.initial_distance = distance(tip_position(arm), trial.goal);
  double closest = out.initial_distance;
  double d = out.initial_distance;

  std::size_t t = 0;
  while (t < trial.horizon) {
    const auto obs = observe(arm);
    auto stepped = step(weights, rnn, obs, activation);
    rnn = std::move(stepped.state);
    arm = mode == ActionMode::kMeta
              ? step_physics(arm, meta_to_raw(stepped.outputs, compartments), physics)
              : step_physics(arm, stepped.outputs, physics);
    ++t;
    d = distance(tip_position(arm), trial.goal);
    closest = std::min(closest, d);
    if (trajectory) trajectory->push_back({t, tip_position(arm), t, d});
    if (d <= physics.touch_radius) {
      out.touched = true;
      break;
    }
  }

  out.t = t;
  if (out.touched) {
    out.d = 0.0;
  } else {
    out.t = trial.horizon;
    out.d = distance_mode == DistanceMode::kFinal ? d : closest;
  }
  if (trajectory && out.touched) trajectory->back().d = 0.0;
  out.score = trial_score(static_cast<double>(out.t), static_cast<double>(trial.horizon), out.d,
                          out.initial_distance);
  return out;
}

double evaluate(const NetworkWeights& weights, ActionMode mode, std::size_t compartments,
                std::span<const TrialSpec> trials, const PhysicsConfig& physics,
                DistanceMode distance_mode, Activation activation) {
  if (trials.empty()) throw std::invalid_argument("at least one trial required");
  double total = 0.0;
  for (const auto& trial : trials) {
    total += run_trial(weights, mode, compartments, trial, physics, distance_mode, nullptr,
                       activation)
                 .score;
  }
  return total / static_cast<double>(trials.size());
}

}  // namespace freqneuro
