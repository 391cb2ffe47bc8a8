// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dualarm/config.hpp"
#include "dualarm/error.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/perception.hpp"
#include "dualarm/scenario.hpp"
#include "dualarm/trajectory.hpp"
#include "oracles.hpp"

using namespace dualarm;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = DUALARM_SOURCE_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

JointVector random_in_limits(const ArmModel& arm, std::mt19937_64& rng) {
  JointVector q;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    std::uniform_real_distribution<double> u(arm.joint_limits[i].min, arm.joint_limits[i].max);
    q[i] = u(rng);
  }
  return q;
}

Verdict kinematics_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1000);
  int worst_recovered = 1000;
  int wrong = 0;
  std::string flagged_codes;
  for (bool left : {true, false}) {
    const ArmModel arm = ArmModel::reference(left);
    int recovered = 0;
    for (int n = 0; n < 1000; ++n) {
      const JointVector q = random_in_limits(arm, rng);
      const HomogeneousTransform target = forward_kinematics(arm, q);
      try {
        bool ok = false;
        for (const auto& s : inverse_kinematics(arm, target).solutions) {
          const HomogeneousTransform got = forward_kinematics(arm, s.q);
          ok |= (got.translation - target.translation).norm() < 1e-6 &&
                rotation_distance(got.rotation, target.rotation) < 1e-6;
        }
        if (ok) ++recovered;
        else ++wrong;
      } catch (const Error& e) {
        // Flagged rather than wrong.
        if (e.code() != ErrorCode::kSingular && e.code() != ErrorCode::kUnreachable) ++wrong;
        flagged_codes += std::string(to_string(e.code())) + " ";
      }
    }
    worst_recovered = std::min(worst_recovered, recovered);
  }
  const double secs = seconds_since(t0);
  return {worst_recovered >= 999 && wrong == 0 && secs < 5.0,
          fmt("min recovered %d/1000 per arm, wrong %d, flagged [%s], %.2f s", worst_recovered, wrong,
              flagged_codes.c_str(), secs)};
}

Verdict closed_form_agreement() {
  std::mt19937_64 rng(77);
  const ArmModel arm = ArmModel::reference(true);
  const oracle::ArmParams params{.mount_y = 0.0};
  ArmModel unmounted = arm;
  unmounted.mount = HomogeneousTransform::identity();
  double worst = 0.0, printed_gap = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const JointVector q = random_in_limits(arm, rng);
    const HomogeneousTransform t = forward_kinematics(unmounted, q);
    const oracle::ClosedForm f = oracle::closed_form(params, q.theta);
    const double entries[][2] = {
        {t.translation.x(), f.px}, {t.translation.y(), f.py}, {t.translation.z(), f.pz},
        {t.rotation(0, 2), f.kx},  {t.rotation(1, 2), f.ky},  {t.rotation(2, 2), f.kz},
        {t.rotation(1, 0), f.iy},  {t.rotation(2, 0), f.iz},  {t.rotation(0, 1), f.jx},
        {t.rotation(2, 1), f.jz},  {t.rotation(0, 0), f.ix},  {t.rotation(1, 1), f.jy},
    };
    for (const auto& e : entries) worst = std::max(worst, std::abs(e[0] - e[1]));
    printed_gap = std::max({printed_gap, std::abs(t.rotation(0, 0) - f.ix_printed),
                            std::abs(t.rotation(1, 1) - f.jy_printed)});
  }
  return {worst < 1e-9,
          fmt("max |diff| %.2e over 12 entries (i_x, j_y in corrected form; printed forms differ by up to %.2f)",
              worst, printed_gap)};
}

Verdict perception_round_trip() {
  std::mt19937_64 rng(10000);
  const SystemConfig cfg = load_config(default_config_path());
  std::uniform_real_distribution<double> xy(-2.0, 2.0), z(0.05, 5.0);
  double worst_rt = 0.0, worst_iso = 0.0;
  Point3 prev = Point3::camera(0.1, 0.2, 1.0);
  for (int n = 0; n < 10000; ++n) {
    const Point3 p = Point3::camera(xy(rng), xy(rng), z(rng));
    const Point3 back = back_project(cfg.intrinsics, project(cfg.intrinsics, p), p.xyz.z());
    worst_rt = std::max(worst_rt, (back.xyz - p.xyz).norm());
    const Point3 r = camera_to_robot(cfg.extrinsics, p);
    const Point3 rprev = camera_to_robot(cfg.extrinsics, prev);
    worst_iso = std::max(worst_iso, std::abs((r.xyz - rprev.xyz).norm() - (p.xyz - prev.xyz).norm()));
    worst_iso = std::max(worst_iso, (robot_to_camera(cfg.extrinsics, r).xyz - p.xyz).norm());
    prev = p;
  }
  return {worst_rt < 1e-9 && worst_iso < 1e-9,
          fmt("project/back_project %.2e, isometry %.2e over 10000 points", worst_rt, worst_iso)};
}

Verdict matcher_correctness() {
  const CommandLexicon lex = CommandLexicon::default_english();
  const TfIdfIndex index = build_index(lex);
  bool self_ok = true;
  for (std::size_t i = 0; i < lex.size(); ++i) {
    const MatchResult r = match_command(index, lex, lex.entries()[i].template_text);
    self_ok &= r.accepted && r.entry_index == i && r.score == 1.0;
  }

  std::mt19937_64 rng(100);
  const std::vector<std::string> pool = {"pick", "up", "the", "box", "red", "blue", "cube", "white",
                                         "object", "cylinder", "place", "left", "small"};
  std::uniform_int_distribution<int> n_entries(1, 6), n_words(1, 7), word(0, static_cast<int>(pool.size()) - 1);
  auto sentence = [&](bool allow_oov) {
    std::string s;
    for (int k = n_words(rng); k > 0; --k) s += (allow_oov && word(rng) == 0 ? "zzz" : pool[word(rng)]) + " ";
    return s;
  };
  int mismatches = 0;
  for (int l = 0; l < 100; ++l) {
    std::vector<std::string> docs;
    std::set<std::vector<std::string>> seen;
    for (int n = n_entries(rng); static_cast<int>(docs.size()) < n;) {
      const std::string s = sentence(false);
      if (seen.insert(oracle::words(s)).second) docs.push_back(s);
    }
    std::vector<CommandEntry> entries;
    for (const auto& d : docs) entries.push_back({d, ActionKind::kPickUp, "box"});
    const CommandLexicon random_lex(entries);
    const TfIdfIndex random_index = build_index(random_lex);
    for (int k = 0; k < 10; ++k) {
      const std::string query = k == 0 ? docs.back() : sentence(true);
      const MatchResult r = match_command(random_index, random_lex, query);
      const auto expected = oracle::tfidf_scores(docs, query);
      bool same = r.entry_index == oracle::best_index(expected);
      for (std::size_t i = 0; i < expected.size(); ++i) same &= std::abs(r.scores[i] - expected[i]) < 1e-12;
      mismatches += same ? 0 : 1;
    }
  }
  return {self_ok && mismatches == 0,
          fmt("table commands self-match at 1.0: %s; oracle mismatches %d/1000 queries over 100 lexicons",
              self_ok ? "yes" : "no", mismatches)};
}

Verdict ideal_end_to_end() {
  const ScenarioResult r = run_scenario(kSource / "scenarios" / "ideal_trials.json");
  bool ok = r.suites.size() == 2;
  std::string detail;
  for (const auto& s : r.suites) {
    std::size_t failed = 0;
    for (const auto& t : s.trials) failed += t.ok() ? 0 : 1;
    ok &= s.trials.size() == 10 && failed == 0 && s.mean_cm && *s.mean_cm < 1e-4;
    detail += fmt("%s mean %.2e cm (%zu failed) ", s.name.c_str(), s.mean_cm.value_or(-1.0), failed);
  }
  return {ok, detail};
}

Verdict noise_envelope() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult r = run_scenario(kSource / "scenarios" / "system_trials.json");
  const double secs = seconds_since(t0);
  bool ok = secs < 10.0;
  std::string detail;
  int arms = 0;
  for (const auto& s : r.suites) {
    if (s.name != "left" && s.name != "right") continue;
    ++arms;
    double lo = 1e9, hi = 0.0;
    for (const auto& t : s.trials) {
      if (!t.ok()) {
        ok = false;
        continue;
      }
      lo = std::min(lo, t.report->error_cm);
      hi = std::max(hi, t.report->error_cm);
    }
    ok &= s.trials.size() == 10 && s.mean_cm && *s.mean_cm >= 0.8 && *s.mean_cm <= 1.8 && lo >= 0.2 && hi <= 4.0;
    detail += fmt("%s mean %.3f cm, range [%.2f, %.2f]; ", s.name.c_str(), s.mean_cm.value_or(-1.0), lo, hi);
  }
  ok &= arms == 2;
  return {ok, detail + fmt("sigma %.3f rad, seed %llu, %.2f s", r.noise.joint_sigma,
                           static_cast<unsigned long long>(r.noise.seed), secs)};
}

Verdict trajectory_limits() {
  std::mt19937_64 rng(1001);
  const ArmModel arm = ArmModel::reference(true);
  const MotionLimits limits = MotionLimits::defaults();
  double worst_acc = 0.0, worst_vel_excess = -1e9, worst_end = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const JointVector a = random_in_limits(arm, rng), b = random_in_limits(arm, rng);
    const Trajectory traj = plan_joint_trajectory(a, b, limits);
    const auto& pts = traj.points();
    worst_end = std::max(worst_end, joint_distance(pts.front().q, a) + joint_distance(pts.back().q, b));
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double h1 = pts[k + 1].t - pts[k].t;
      for (std::size_t j = 0; j < kJointCount; ++j) {
        const double v1 = (pts[k + 1].q[j] - pts[k].q[j]) / h1;
        worst_vel_excess = std::max({worst_vel_excess, std::abs(v1) - limits.vel_max[j],
                                     std::abs(pts[k].qdot[j]) - limits.vel_max[j]});
        if (k + 2 < pts.size()) {
          const double h2 = pts[k + 2].t - pts[k + 1].t;
          const double v2 = (pts[k + 2].q[j] - pts[k + 1].q[j]) / h2;
          worst_acc = std::max(worst_acc, std::abs(v2 - v1) / (0.5 * (h1 + h2)));
        }
      }
    }
  }
  return {worst_acc <= 0.1 + 1e-6 && worst_vel_excess <= 0.0 && worst_end == 0.0,
          fmt("max |fd accel| %.9f rad/s^2, max velocity excess %.2e rad/s, endpoint error %.1e", worst_acc,
              worst_vel_excess, worst_end)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / ("dualarm_acceptance_" + std::to_string(::getpid()));
  bool same = true;
  std::string detail;
  for (const char* name : {"system_trials.json", "voice_commands.json"}) {
    for (const char* run : {"a", "b"}) {
      write_scenario_reports(run_scenario(kSource / "scenarios" / name), base / run / name);
    }
    for (const char* file : {"report.json", "trials.csv"}) {
      const std::string a = slurp(base / "a" / name / file), b = slurp(base / "b" / name / file);
      same &= !a.empty() && a == b;
      detail += fmt("%s/%s %zu bytes; ", name, file, a.size());
    }
  }
  fs::remove_all(base);
  return {same, detail + (same ? "identical" : "DIFFER")};
}

Verdict headless() {
#ifdef DUALARM_SECONDARY_IN_BUILD
  return {false, "operator console target present in this build"};
#else
  return {true, "suite ran without the operator console built or any display"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"kinematics round trip", kinematics_round_trip},
      {"closed-form FK agreement", closed_form_agreement},
      {"perception round trip", perception_round_trip},
      {"matcher correctness", matcher_correctness},
      {"ideal end-to-end", ideal_end_to_end},
      {"calibrated-noise envelope", noise_envelope},
      {"trajectory limits", trajectory_limits},
      {"determinism", determinism},
      {"headless", headless},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s  %-26s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
