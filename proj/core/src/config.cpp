#include "dualarm/config.hpp"

#include <fstream>
#include <sstream>

#include "dualarm/arm_description.hpp"
#include "dualarm/error.hpp"
#include "dualarm/json_codec.hpp"

#ifndef DUALARM_SOURCE_DIR
#define DUALARM_SOURCE_DIR "."
#endif

namespace dualarm {
namespace {

Json read_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, path.string() + ": cannot open " + what);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  std::filesystem::path p(ref);
  return p.is_absolute() ? p : base / p;
}

template <std::size_t N>
std::array<double, N> fixed_array(const Json& j, const std::string& key, const std::string& where,
                                  const std::array<double, N>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = required_field<std::vector<double>>(j, key, where);
  if (v.size() != N) throw_parse_error(where + "." + key, "expected " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

void prefixed(std::vector<std::string>& out, const std::string& prefix, const std::vector<std::string>& items) {
  for (const auto& s : items) out.push_back(prefix + s);
}

}  // namespace

CommandLexicon load_lexicon(const std::filesystem::path& path) {
  const Json j = read_json_file(path, "lexicon");
  const auto format = required_field<std::string>(j, "format", path.string());
  if (format != kLexiconFormat) throw_parse_error(path.string() + ".format", "unsupported '" + format + "'");
  return lexicon_from_json(j, path.string());
}

SystemConfig load_config(const std::filesystem::path& path) {
  const Json j = read_json_file(path, "config");
  const std::string where = "config";
  const auto format = required_field<std::string>(j, "format", where);
  if (format != kConfigFormat) throw_parse_error(where + ".format", "unsupported '" + format + "'");

  SystemConfig cfg;
  cfg.source = path;
  const auto base = path.parent_path();

  const Json arms = required_field<Json>(j, "arms", where);
  cfg.left_arm_path = resolve(base, required_field<std::string>(arms, "left", where + ".arms"));
  cfg.right_arm_path = resolve(base, required_field<std::string>(arms, "right", where + ".arms"));
  cfg.lexicon_path = resolve(base, required_field<std::string>(j, "lexicon", where));

  std::vector<std::string> problems;

  // Arm and lexicon files: parse errors are fatal, validation errors collected.
  auto load_arm = [&](const std::filesystem::path& p, const char* field, ArmModel& out) {
    try {
      out = load_arm_description(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kValidationError) throw;
      problems.push_back(std::string("arms.") + field + ": " + e.what());
    }
  };
  load_arm(cfg.left_arm_path, "left", cfg.robot.left);
  load_arm(cfg.right_arm_path, "right", cfg.robot.right);
  try {
    cfg.lexicon = load_lexicon(cfg.lexicon_path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    problems.push_back(std::string("lexicon: ") + e.what());
  }

  const Json camera = required_field<Json>(j, "camera", where);
  const Json intr = required_field<Json>(camera, "intrinsics", where + ".camera");
  const std::string iw = where + ".camera.intrinsics";
  cfg.intrinsics.f = required_field<double>(intr, "f", iw);
  cfg.intrinsics.cx = required_field<double>(intr, "cx", iw);
  cfg.intrinsics.cy = required_field<double>(intr, "cy", iw);
  cfg.intrinsics.width = required_field<int>(intr, "width", iw);
  cfg.intrinsics.height = required_field<int>(intr, "height", iw);
  prefixed(problems, "camera.intrinsics.", cfg.intrinsics.violations());

  const Json extr = required_field<Json>(camera, "extrinsics", where + ".camera");
  const std::string ew = where + ".camera.extrinsics";
  cfg.extrinsics = extrinsics_from_json(extr, ew);
  prefixed(problems, "camera.extrinsics.", cfg.extrinsics.violations());

  const Json motion = optional_field<Json>(j, "motion", where, Json::object());
  const auto defaults = MotionLimits::defaults();
  cfg.robot.limits.vel_max = fixed_array<kJointCount>(motion, "vel_max", where + ".motion", defaults.vel_max);
  cfg.robot.limits.acc_max = fixed_array<kJointCount>(motion, "acc_max", where + ".motion", defaults.acc_max);
  cfg.robot.dt = optional_field<double>(motion, "dt", where + ".motion", kDefaultTrajectoryDt);
  prefixed(problems, "motion.", cfg.robot.limits.violations());
  if (!(cfg.robot.dt > 0.0)) problems.push_back("motion.dt: must be > 0");

  const Json noise = optional_field<Json>(j, "noise", where, Json::object());
  const std::string nw = where + ".noise";
  cfg.noise.enabled = optional_field<bool>(noise, "enabled", nw, cfg.noise.enabled);
  cfg.noise.joint_sigma = optional_field<double>(noise, "joint_sigma", nw, cfg.noise.joint_sigma);
  cfg.noise.depth_sigma = optional_field<double>(noise, "depth_sigma", nw, cfg.noise.depth_sigma);
  cfg.noise.seed = optional_field<std::uint64_t>(noise, "seed", nw, cfg.noise.seed);
  prefixed(problems, "noise.", cfg.noise.violations());

  const Json matching = optional_field<Json>(j, "matching", where, Json::object());
  cfg.match_threshold = optional_field<double>(matching, "threshold", where + ".matching", kDefaultMatchThreshold);
  if (!(cfg.match_threshold >= 0.0 && cfg.match_threshold <= 1.0))
    problems.push_back("matching.threshold: must lie in [0, 1]");

  const Json service = optional_field<Json>(j, "service", where, Json::object());
  const std::string sw = where + ".service";
  cfg.service.port = optional_field<int>(service, "port", sw, cfg.service.port);
  cfg.service.stream_hz = optional_field<double>(service, "stream_hz", sw, cfg.service.stream_hz);
  cfg.service.time_scale = optional_field<double>(service, "time_scale", sw, cfg.service.time_scale);
  cfg.service.history_tail = optional_field<std::size_t>(service, "history_tail", sw, cfg.service.history_tail);
  if (cfg.service.port < 0 || cfg.service.port > 65535) problems.push_back("service.port: must lie in [0, 65535]");
  if (!(cfg.service.stream_hz > 0.0)) problems.push_back("service.stream_hz: must be > 0");
  if (!(cfg.service.time_scale >= 0.0)) problems.push_back("service.time_scale: must be >= 0");

  if ((cfg.robot.left.mount.translation - cfg.robot.right.mount.translation).norm() < 1e-9) {
    problems.push_back("arms: left and right mounts coincide");
  }

  if (!problems.empty()) {
    std::ostringstream os;
    os << path.string() << ": " << problems.size() << " violation(s):";
    for (const auto& p : problems) os << "\n  " << p;
    throw Error(ErrorCode::kValidationError, os.str());
  }
  return cfg;
}

std::filesystem::path default_config_path() {
  return std::filesystem::path(DUALARM_SOURCE_DIR) / "config" / "default.json";
}

}  // namespace dualarm
