#ifndef FREQNEURO_ARM_SIM_HPP_
#define FREQNEURO_ARM_SIM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "freqneuro/encoding.hpp"
#include "freqneuro/rnn.hpp"

namespace freqneuro {

// Constants of the simplified arm: point-mass corners joined by spring
// muscles, a quadratic area penalty per compartment, linear fluid drag,
// gravity and a damped rotating base. Lengths are in compartment lengths,
// time in seconds of simulated time.
struct PhysicsConfig {
  double segment_length = 1.0;
  double arm_width = 1.0;
  double node_mass = 1.0;

  double longitudinal_stiffness = 30.0;
  double transverse_stiffness = 30.0;
  double diagonal_stiffness = 30.0;
  double active_stiffness = 30.0;  // added at full activation
  double max_contraction = 0.3;    // rest-length reduction at full activation
  double spring_damping = 2.0;
  double area_stiffness = 300.0;

  double drag = 1.0;
  double gravity = 0.05;

  double base_torque = 0.5;    // angular acceleration at full activation
  double base_damping = 2.0;

  double control_dt = 1.0;
  std::size_t substeps = 30;

  // Goal in units of the resting arm length, relative to the base.
  double goal_x = 0.6;
  double goal_y = 0.4;
  double touch_radius = 0.25;
  std::size_t steps_per_compartment = 25;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

struct PointMass {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

// Corner pairs 0..p along the arm; pair 0 is attached to the base and moves
// rigidly with it. Compartment c lies between pairs c and c+1.
struct ArmState {
  std::vector<PointMass> dorsal;
  std::vector<PointMass> ventral;
  double base_angle = 0.0;
  double base_angular_velocity = 0.0;

  std::size_t compartments() const { return dorsal.empty() ? 0 : dorsal.size() - 1; }
};

ArmState init_arm(std::size_t compartments, double initial_angle,
                  const PhysicsConfig& physics = {});

// 8p + 2 values: for each compartment its distal dorsal and ventral corner
// (x, y, vx, vy), then base angle and base angular velocity.
std::vector<double> observe(const ArmState& state);

// Advances one control step using `physics.substeps` semi-implicit Euler
// sub-steps. raw_action holds 3p + 2 activations, clamped to [0, 1].
ArmState step_physics(const ArmState& state, std::span<const double> raw_action,
                      const PhysicsConfig& physics = {});

// Meta-actions 0-2 drive dorsal/transverse/ventral muscles of compartments
// [0, p/2), 3-5 those of [p/2, p), 6-7 the two rotation controls.
std::vector<double> meta_to_raw(std::span<const double> meta, std::size_t compartments);

Vec2 tip_position(const ArmState& state);
double arm_length(const ArmState& state);  // along the centerline
double compartment_area(const ArmState& state, std::size_t compartment);
double kinetic_energy(const ArmState& state, const PhysicsConfig& physics = {});
// Kinetic plus elastic energy for the given activations (no gravity term).
double mechanical_energy(const ArmState& state, std::span<const double> raw_action,
                         const PhysicsConfig& physics = {});

struct TrialSpec {
  double initial_angle = 0.0;
  std::size_t horizon = 0;  // T
  Vec2 goal;
};

std::size_t trial_horizon(std::size_t compartments, const PhysicsConfig& physics = {});
Vec2 goal_position(std::size_t compartments, const PhysicsConfig& physics = {});

// Starting angles -pi/2, 0, pi/2.
std::vector<TrialSpec> training_trials(std::size_t compartments,
                                       const PhysicsConfig& physics = {});
// Held-out starting angles -pi/4, pi/4.
std::vector<TrialSpec> generalization_trials(std::size_t compartments,
                                             const PhysicsConfig& physics = {});

// max(1 - (t/T)(d/D), 0)
double trial_score(double t, double horizon, double d, double initial_distance);

// kFinal scores with the tip's final distance. kClosest uses the closest
// approach over the trial, so an arm that never gets closer than where it
// started scores 0.
enum class DistanceMode { kFinal, kClosest };

struct TrajectoryPoint {
  std::size_t step = 0;
  Vec2 tip;
  std::size_t t = 0;
  double d = 0.0;
};

struct TrialOutcome {
  std::size_t t = 0;  // steps used
  double d = 0.0;     // distance entering the score; 0 once touched
  double initial_distance = 0.0;
  bool touched = false;
  double score = 0.0;
};

TrialOutcome run_trial(const NetworkWeights& weights, ActionMode mode, std::size_t compartments,
                       const TrialSpec& trial, const PhysicsConfig& physics = {},
                       DistanceMode distance_mode = DistanceMode::kFinal,
                       std::vector<TrajectoryPoint>* trajectory = nullptr,
                       Activation activation = Activation::kTanh);

// Mean trial score.
double evaluate(const NetworkWeights& weights, ActionMode mode, std::size_t compartments,
                std::span<const TrialSpec> trials, const PhysicsConfig& physics = {},
                DistanceMode distance_mode = DistanceMode::kFinal,
                Activation activation = Activation::kTanh);

}  // namespace freqneuro

#endif  // FREQNEURO_ARM_SIM_HPP_
