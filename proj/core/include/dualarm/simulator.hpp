#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dualarm/error.hpp"
#include "dualarm/geometry.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/trajectory.hpp"

namespace dualarm {

enum class ArmSide { kLeft, kRight };
enum class GripperState { kOpen, kClosed };

const char* to_string(ArmSide side);
const char* to_string(GripperState state);
std::optional<ArmSide> parse_side(std::string_view text);

struct SceneObject {
  int id = 0;
  std::string label;
  Vec3 position = Vec3::Zero();  // robot frame
  std::optional<ArmSide> held_by;
};

struct ActiveMotion {
  Trajectory trajectory;
  double start_time = 0.0;
};

struct ArmState {
  ArmSide side = ArmSide::kLeft;
  JointVector q;
  GripperState gripper = GripperState::kOpen;
  std::optional<ActiveMotion> motion;

  bool idle() const { return !motion.has_value(); }
};

/// Actuator noise: zero-mean Gaussian added to each joint when a trajectory
/// completes. `depth_sigma` perturbs synthesized camera depth readings.
struct NoiseConfig {
  bool enabled = false;
  double joint_sigma = 0.019;  // rad
  double depth_sigma = 0.0;    // m
  std::uint64_t seed = 42;

  std::vector<std::string> violations() const;
};

struct WorldState {
  double time = 0.0;
  ArmState left;
  ArmState right;
  std::vector<SceneObject> objects;
  NoiseConfig noise;
  std::mt19937_64 rng;
  int next_object_id = 1;

  ArmState& arm(ArmSide side) { return side == ArmSide::kLeft ? left : right; }
  const ArmState& arm(ArmSide side) const { return side == ArmSide::kLeft ? left : right; }
  SceneObject* find_object(int id);
  const SceneObject* find_object(int id) const;
};

struct RobotModel {
  ArmModel left = ArmModel::reference(true);
  ArmModel right = ArmModel::reference(false);
  MotionLimits limits = MotionLimits::defaults();
  double dt = kDefaultTrajectoryDt;

  const ArmModel& arm(ArmSide side) const { return side == ArmSide::kLeft ? left : right; }
};

struct PickReport {
  Point3 desired;
  Point3 achieved;
  double error_cm = 0.0;
  ArmSide arm = ArmSide::kRight;
  double elapsed = 0.0;  // s of simulated time
  ElbowBranch branch = ElbowBranch::kUp;
  JointVector q_final;
};

/// Euclidean distance in cm. Throws FrameMismatch for points in different
/// frames.
double position_error(const Point3& desired, const Point3& achieved);

/// Gripper pointing straight down (tool z = -robot z) above `target`, yawed
/// so that joint 5 sits at zero.
HomogeneousTransform gripper_down_pose(const ArmModel& arm, const Vec3& target);

/// Arms at their home pose, grippers open, RNG seeded from `noise.seed`.
WorldState make_world(const RobotModel& model, const NoiseConfig& noise = {});

struct GraspPlan {
  ArmSide side = ArmSide::kRight;
  IKSolution solution;
};

/// Kinematic dual-arm world. Arms follow trajectories exactly; held objects
/// track their gripper.
class Simulator {
 public:
  using StepObserver = std::function<void(const WorldState&)>;

  explicit Simulator(RobotModel model);
  Simulator(RobotModel model, WorldState world);

  const RobotModel& model() const { return model_; }
  const WorldState& world() const { return world_; }
  WorldState& world() { return world_; }

  int add_object(std::string label, const Vec3& position);
  Vec3 gripper_position(ArmSide side) const;

  /// Arm whose mount is nearer the target in y (tie: right), falling back to
  /// the other arm when the nearer one has no in-limit IK solution.
  /// Throws BothUnreachable or NoIKSolution.
  ArmSide select_arm(const Point3& target) const;
  GraspPlan plan_grasp(const Point3& target) const;

  /// Advances time; retires finished motions (adding terminal noise when
  /// enabled) and moves held objects with their grippers.
  void step(double dt);

  /// Plans and runs a joint move to completion. Returns the elapsed time.
  double move_arm(ArmSide side, const JointVector& goal, const StepObserver& observer = {});

  /// Opens the gripper; a held object stays where it is.
  void release(ArmSide side);

  /// Moves a gripper-down grasp onto `target`, closes the gripper on the
  /// object and reports the positional error. Throws BothUnreachable,
  /// NoIKSolution, or InvalidArgument for an unknown or already held object.
  PickReport execute_pick(const Point3& target, int object_id, const StepObserver& observer = {});

 private:
  void sync_held_objects();
  void apply_terminal_noise(ArmState& arm);

  RobotModel model_;
  WorldState world_;
};

struct TrialOutcome {
  Point3 desired;
  std::optional<PickReport> report;
  std::optional<ErrorCode> error;
  std::string message;

  bool ok() const { return report.has_value(); }
};

struct TrialTable {
  std::string name;
  std::vector<TrialOutcome> trials;
  std::optional<double> mean_cm;  // over successful trials
};

/// Arithmetic mean over successful trials.
std::optional<double> mean_error(const TrialTable& table);

/// One pick of a probe object placed at `target`, starting from `initial`'s
/// world and drawing noise from `rng` (advanced in place).
TrialOutcome run_trial(const Simulator& initial, const Point3& target, const NoiseConfig& noise,
                       std::mt19937_64& rng);

/// Independent picks of a probe object placed at each target, every trial
/// starting from `initial`'s world. The RNG is reseeded from `noise.seed`
/// once and carried across trials. Failed trials are recorded, not retried.
TrialTable run_trial_protocol(const Simulator& initial, const std::vector<Point3>& targets,
                              const NoiseConfig& noise, std::string name = {});

}  // namespace dualarm
