#include <benchmark/benchmark.h>

#include <random>

#include "dualarm/config.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/pipeline.hpp"
#include "dualarm/trajectory.hpp"

using namespace dualarm;

namespace {

JointVector sample(const ArmModel& arm, std::mt19937_64& rng) {
  JointVector q;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    q[i] = std::uniform_real_distribution<double>(arm.joint_limits[i].min, arm.joint_limits[i].max)(rng);
  }
  return q;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const ArmModel arm = ArmModel::reference(true);
  std::mt19937_64 rng(1);
  const JointVector q = sample(arm, rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(arm, q));
}
BENCHMARK(BM_ForwardKinematics);

void BM_InverseKinematics(benchmark::State& state) {
  const ArmModel arm = ArmModel::reference(true);
  std::mt19937_64 rng(2);
  std::vector<HomogeneousTransform> targets;
  for (int i = 0; i < 64; ++i) targets.push_back(forward_kinematics(arm, sample(arm, rng)));
  std::size_t k = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(inverse_kinematics(arm, targets[k++ % targets.size()]));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(BM_InverseKinematics);

void BM_PlanTrajectory(benchmark::State& state) {
  const ArmModel arm = ArmModel::reference(true);
  const MotionLimits limits = MotionLimits::defaults();
  std::mt19937_64 rng(3);
  const JointVector a = sample(arm, rng), b = sample(arm, rng);
  for (auto _ : state) benchmark::DoNotOptimize(plan_joint_trajectory(a, b, limits));
}
BENCHMARK(BM_PlanTrajectory);

void BM_MatchCommand(benchmark::State& state) {
  const CommandLexicon lex = CommandLexicon::default_english();
  const TfIdfIndex index = build_index(lex);
  for (auto _ : state) benchmark::DoNotOptimize(match_command(index, lex, "please pick up the white cylinder"));
}
BENCHMARK(BM_MatchCommand);

void BM_PickUtterance(benchmark::State& state) {
  SystemConfig cfg = load_config(default_config_path());
  cfg.noise.enabled = false;
  const Point3 cam = robot_to_camera(cfg.extrinsics, Point3::robot(0.40, 0.15, -0.10));
  const PixelCoord px = project(cfg.intrinsics, cam);
  const Detection det{"box", px.u, px.v, 40, 30, cam.xyz.z(), 0.9};
  for (auto _ : state) {
    state.PauseTiming();
    Pipeline p(cfg);
    p.ingest_detections(std::vector<Detection>{det});
    state.ResumeTiming();
    benchmark::DoNotOptimize(p.handle_utterance("pick up the box"));
  }
}
BENCHMARK(BM_PickUtterance)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
