#include "dualarm/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace dualarm {

const char* to_string(ArmSide side) { return side == ArmSide::kLeft ? "left" : "right"; }

const char* to_string(GripperState state) { return state == GripperState::kOpen ? "open" : "closed"; }

std::optional<ArmSide> parse_side(std::string_view text) {
  if (text == "left") return ArmSide::kLeft;
  if (text == "right") return ArmSide::kRight;
  return std::nullopt;
}

std::vector<std::string> NoiseConfig::violations() const {
  std::vector<std::string> out;
  if (!(joint_sigma >= 0.0) || !std::isfinite(joint_sigma)) out.push_back("joint_sigma: must be >= 0");
  if (!(depth_sigma >= 0.0) || !std::isfinite(depth_sigma)) out.push_back("depth_sigma: must be >= 0");
  return out;
}

SceneObject* WorldState::find_object(int id) {
  auto it = std::find_if(objects.begin(), objects.end(), [id](const SceneObject& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

const SceneObject* WorldState::find_object(int id) const {
  return const_cast<WorldState*>(this)->find_object(id);
}

double position_error(const Point3& desired, const Point3& achieved) {
  if (desired.frame != achieved.frame) {
    throw Error(ErrorCode::kFrameMismatch, std::string("position_error: ") + to_string(desired.frame) +
                                               " vs " + to_string(achieved.frame) + " frame");
  }
  return 100.0 * (desired.xyz - achieved.xyz).norm();
}

HomogeneousTransform gripper_down_pose(const ArmModel& arm, const Vec3& target) {
  const Vec3 local = arm.mount.inverse().apply(target);
  const double yaw = std::atan2(local.y(), local.x());
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r.col(0) = Vec3(-c, -s, 0.0);
  r.col(1) = Vec3(-s, c, 0.0);
  r.col(2) = Vec3(0.0, 0.0, -1.0);
  return {arm.mount.rotation * r, target};
}

WorldState make_world(const RobotModel& model, const NoiseConfig& noise) {
  WorldState w;
  w.left.side = ArmSide::kLeft;
  w.left.q = model.left.home;
  w.right.side = ArmSide::kRight;
  w.right.q = model.right.home;
  w.noise = noise;
  w.rng.seed(noise.seed);
  return w;
}

Simulator::Simulator(RobotModel model) : model_(std::move(model)), world_(make_world(model_)) {}

Simulator::Simulator(RobotModel model, WorldState world) : model_(std::move(model)), world_(std::move(world)) {
  sync_held_objects();
}

int Simulator::add_object(std::string label, const Vec3& position) {
  SceneObject obj;
  obj.id = world_.next_object_id++;
  obj.label = std::move(label);
  obj.position = position;
  world_.objects.push_back(std::move(obj));
  return world_.objects.back().id;
}

Vec3 Simulator::gripper_position(ArmSide side) const {
  return forward_kinematics(model_.arm(side), world_.arm(side).q).translation;
}

GraspPlan Simulator::plan_grasp(const Point3& target) const {
  if (target.frame != Frame::kRobot) throw Error(ErrorCode::kFrameMismatch, "grasp target must be in the robot frame");

  const double dl = std::abs(target.xyz.y() - model_.left.mount.translation.y());
  const double dr = std::abs(target.xyz.y() - model_.right.mount.translation.y());
  const ArmSide preferred = dl < dr ? ArmSide::kLeft : ArmSide::kRight;
  const ArmSide other = preferred == ArmSide::kLeft ? ArmSide::kRight : ArmSide::kLeft;

  bool geometric = false;
  for (ArmSide side : {preferred, other}) {
    const ArmModel& arm = model_.arm(side);
    IKSolutionSet set;
    try {
      set = inverse_kinematics(arm, gripper_down_pose(arm, target.xyz));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnreachable || e.code() == ErrorCode::kSingular) continue;
      throw;
    }
    geometric = true;
    const JointVector& current = world_.arm(side).q;
    const IKSolution* best = nullptr;
    for (const auto& sol : set.solutions) {
      if (!sol.valid) continue;
      if (!best || joint_distance(sol.q, current) < joint_distance(best->q, current)) best = &sol;
    }
    if (best) return {side, *best};
  }
  if (geometric) throw Error(ErrorCode::kNoIKSolution, "target solvable only outside joint limits");
  throw Error(ErrorCode::kBothUnreachable, "target outside both arms' workspaces");
}

ArmSide Simulator::select_arm(const Point3& target) const { return plan_grasp(target).side; }

void Simulator::apply_terminal_noise(ArmState& arm) {
  const NoiseConfig& noise = world_.noise;
  if (!noise.enabled || noise.joint_sigma <= 0.0) return;
  const ArmModel& model = model_.arm(arm.side);
  for (std::size_t i = 0; i < kJointCount; ++i) {
    std::normal_distribution<double> gauss(0.0, noise.joint_sigma);
    arm.q[i] = std::clamp(arm.q[i] + gauss(world_.rng), model.joint_limits[i].min, model.joint_limits[i].max);
  }
}

void Simulator::step(double dt) {
  world_.time += dt;
  for (ArmSide side : {ArmSide::kLeft, ArmSide::kRight}) {
    ArmState& arm = world_.arm(side);
    if (!arm.motion) continue;
    const double local = world_.time - arm.motion->start_time;
    if (local >= arm.motion->trajectory.duration()) {
      arm.q = arm.motion->trajectory.goal();
      arm.motion.reset();
      apply_terminal_noise(arm);
    } else {
      arm.q = arm.motion->trajectory.position_at(local);
    }
  }
  sync_held_objects();
}

void Simulator::sync_held_objects() {
  for (auto& obj : world_.objects) {
    if (obj.held_by) obj.position = gripper_position(*obj.held_by);
  }
}

double Simulator::move_arm(ArmSide side, const JointVector& goal, const StepObserver& observer) {
  ArmState& arm = world_.arm(side);
  const double start = world_.time;
  arm.motion = ActiveMotion{plan_joint_trajectory(arm.q, goal, model_.limits, model_.dt), start};
  if (observer) observer(world_);
  while (world_.arm(side).motion) {
    step(model_.dt);
    if (observer) observer(world_);
  }
  return world_.time - start;
}

void Simulator::release(ArmSide side) {
  world_.arm(side).gripper = GripperState::kOpen;
  for (auto& obj : world_.objects) {
    if (obj.held_by == side) obj.held_by.reset();
  }
}

PickReport Simulator::execute_pick(const Point3& target, int object_id, const StepObserver& observer) {
  const SceneObject* obj = world_.find_object(object_id);
  if (!obj) throw Error(ErrorCode::kInvalidArgument, "no scene object with id " + std::to_string(object_id));
  if (obj->held_by) throw Error(ErrorCode::kInvalidArgument, "object " + std::to_string(object_id) + " is already held");

  const GraspPlan plan = plan_grasp(target);
  release(plan.side);
  const double elapsed = move_arm(plan.side, plan.solution.q, observer);

  ArmState& arm = world_.arm(plan.side);
  arm.gripper = GripperState::kClosed;
  world_.find_object(object_id)->held_by = plan.side;
  sync_held_objects();
  if (observer) observer(world_);

  PickReport report;
  report.desired = target;
  report.achieved = Point3::robot(gripper_position(plan.side));
  report.error_cm = position_error(report.desired, report.achieved);
  report.arm = plan.side;
  report.elapsed = elapsed;
  report.branch = plan.solution.branch;
  report.q_final = arm.q;
  return report;
}

TrialOutcome run_trial(const Simulator& initial, const Point3& target, const NoiseConfig& noise,
                       std::mt19937_64& rng) {
  Simulator trial = initial;
  trial.world().noise = noise;
  trial.world().rng = rng;
  TrialOutcome outcome;
  outcome.desired = target;
  try {
    const int id = trial.add_object("target", target.xyz);
    outcome.report = trial.execute_pick(target, id);
  } catch (const Error& e) {
    outcome.error = e.code();
    outcome.message = e.what();
  }
  rng = trial.world().rng;
  return outcome;
}

TrialTable run_trial_protocol(const Simulator& initial, const std::vector<Point3>& targets,
                              const NoiseConfig& noise, std::string name) {
  TrialTable table;
  table.name = std::move(name);
  std::mt19937_64 rng(noise.seed);
  for (const Point3& target : targets) table.trials.push_back(run_trial(initial, target, noise, rng));
  table.mean_cm = mean_error(table);
  return table;
}

std::optional<double> mean_error(const TrialTable& table) {
  double sum = 0.0;
  int ok = 0;
  for (const auto& t : table.trials) {
    if (!t.report) continue;
    sum += t.report->error_cm;
    ++ok;
  }
  if (ok == 0) return std::nullopt;
  return sum / ok;
}

}  // namespace dualarm
