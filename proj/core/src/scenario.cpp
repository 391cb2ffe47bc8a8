#include "dualarm/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "dualarm/error.hpp"

namespace dualarm {
namespace {

constexpr std::uint64_t kDepthStreamSalt = 0x9E3779B97F4A7C15ull;

struct ScriptStep {
  double t = 0.0;
  std::optional<std::string> utterance;
  std::optional<Json> detections;
};

NoiseConfig merge_noise(NoiseConfig base, const Json& j, const std::string& where) {
  base.enabled = optional_field<bool>(j, "enabled", where, base.enabled);
  base.joint_sigma = optional_field<double>(j, "joint_sigma", where, base.joint_sigma);
  base.depth_sigma = optional_field<double>(j, "depth_sigma", where, base.depth_sigma);
  base.seed = optional_field<std::uint64_t>(j, "seed", where, base.seed);
  if (const auto v = base.violations(); !v.empty()) {
    throw Error(ErrorCode::kValidationError, where + "." + v.front());
  }
  return base;
}

SuiteMode parse_mode(const std::string& s, const std::string& where) {
  if (s == "direct") return SuiteMode::kDirect;
  if (s == "camera") return SuiteMode::kCamera;
  if (s == "command") return SuiteMode::kCommand;
  throw_parse_error(where, "unknown mode '" + s + "'");
}

std::vector<Point3> read_targets(const Json& suite, const std::string& where) {
  const auto list = required_field<Json>(suite, "targets", where);
  if (!list.is_array()) throw_parse_error(where + ".targets", "expected an array");
  std::vector<Point3> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(Point3::robot(vec3_from_json(list[i], where + ".targets[" + std::to_string(i) + "]")));
  }
  return out;
}

TrialOutcome camera_trial(const Simulator& initial, const SystemConfig& cfg, const Point3& truth,
                          const NoiseConfig& noise, std::mt19937_64& rng, std::mt19937_64& depth_rng) {
  TrialOutcome outcome;
  outcome.desired = truth;
  try {
    const Point3 cam = robot_to_camera(cfg.extrinsics, truth);
    const PixelCoord px = project(cfg.intrinsics, cam);
    Detection det;
    det.label = "target";
    det.u = px.u;
    det.v = px.v;
    det.depth = cam.xyz.z();
    if (noise.enabled && noise.depth_sigma > 0.0) {
      std::normal_distribution<double> gauss(0.0, noise.depth_sigma);
      det.depth += gauss(depth_rng);
    }
    if (auto problem = detection_problem(det, cfg.intrinsics)) {
      throw Error(det.depth > 0.0 ? ErrorCode::kInvalidArgument : ErrorCode::kNonPositiveDepth, *problem);
    }
    const Point3 perceived = detection_to_grasp_target(cfg.intrinsics, cfg.extrinsics, det);
    outcome = run_trial(initial, perceived, noise, rng);
    outcome.desired = truth;
    if (outcome.report) {
      outcome.report->desired = truth;
      outcome.report->error_cm = position_error(truth, outcome.report->achieved);
    }
  } catch (const Error& e) {
    outcome.error = e.code();
    outcome.message = e.what();
  }
  return outcome;
}

TrialTable command_suite(const Pipeline& initial, const Json& suite, const std::string& where,
                         const NoiseConfig& noise, std::string name) {
  const auto utterances = required_field<std::vector<std::string>>(suite, "utterances", where);
  const Json detections = optional_field<Json>(suite, "detections", where, Json::array());
  TrialTable table;
  table.name = std::move(name);
  std::mt19937_64 rng(noise.seed);
  for (const auto& u : utterances) {
    Pipeline trial = initial;
    trial.simulator().world().noise = noise;
    trial.simulator().world().rng = rng;
    trial.ingest_detections(detections);
    const CommandRecord rec = trial.handle_utterance(u);
    TrialOutcome outcome;
    if (rec.grasp_target) outcome.desired = *rec.grasp_target;
    if (rec.report) {
      outcome.report = rec.report;
    } else if (rec.error) {
      outcome.error = rec.error->code;
      outcome.message = rec.error->message;
    } else {
      outcome.error = ErrorCode::kInvalidArgument;
      outcome.message = "utterance did not produce a pick";
    }
    rng = trial.simulator().world().rng;
    table.trials.push_back(std::move(outcome));
  }
  table.mean_cm = mean_error(table);
  return table;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

ScenarioResult run_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, path.string() + ": cannot open scenario");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  const std::string where = path.filename().string();
  const auto format = required_field<std::string>(j, "format", where);
  if (format != kScenarioFormat) throw_parse_error(where + ".format", "unsupported '" + format + "'");

  const auto config_ref = std::filesystem::path(required_field<std::string>(j, "config", where));
  SystemConfig cfg = load_config(config_ref.is_absolute() ? config_ref : path.parent_path() / config_ref);
  cfg.noise = merge_noise(cfg.noise, optional_field<Json>(j, "noise", where, Json::object()), where + ".noise");
  if (overrides.noise_enabled) cfg.noise.enabled = *overrides.noise_enabled;
  if (overrides.seed) cfg.noise.seed = *overrides.seed;
  if (j.contains("camera")) {
    cfg.extrinsics = extrinsics_from_json(j["camera"], where + ".camera");
    if (const auto v = cfg.extrinsics.violations(); !v.empty()) {
      throw Error(ErrorCode::kValidationError, where + ".camera." + v.front());
    }
  }

  ScenarioResult result;
  result.name = optional_field<std::string>(j, "name", where, path.stem().string());
  result.noise = cfg.noise;

  Pipeline pipeline(cfg);
  const Json objects = optional_field<Json>(j, "objects", where, Json::array());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string at = where + ".objects[" + std::to_string(i) + "]";
    pipeline.simulator().add_object(required_field<std::string>(objects[i], "label", at),
                                    vec3_from_json(required_field<Json>(objects[i], "position", at), at + ".position"));
  }
  const Pipeline initial = pipeline;

  // Timed script, stable-sorted by time.
  std::vector<ScriptStep> script;
  const Json steps = optional_field<Json>(j, "script", where, Json::array());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string at = where + ".script[" + std::to_string(i) + "]";
    ScriptStep s;
    s.t = optional_field<double>(steps[i], "t", at, 0.0);
    if (steps[i].contains("utterance")) s.utterance = required_field<std::string>(steps[i], "utterance", at);
    if (steps[i].contains("detections")) s.detections = steps[i]["detections"];
    if (!s.utterance && !s.detections) throw_parse_error(at, "needs 'utterance' or 'detections'");
    script.push_back(std::move(s));
  }
  std::stable_sort(script.begin(), script.end(), [](const ScriptStep& a, const ScriptStep& b) { return a.t < b.t; });
  for (const auto& s : script) {
    pipeline.advance_to(s.t);
    if (s.detections) pipeline.ingest_detections(*s.detections);
    if (s.utterance) result.records.push_back(pipeline.handle_utterance(*s.utterance));
  }
  result.final_state = pipeline.snapshot(0);

  const Json suites = optional_field<Json>(j, "suites", where, Json::array());
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const std::string at = where + ".suites[" + std::to_string(i) + "]";
    const Json& suite = suites[i];
    const std::string name = optional_field<std::string>(suite, "name", at, "suite " + std::to_string(i + 1));
    const SuiteMode mode = parse_mode(optional_field<std::string>(suite, "mode", at, "direct"), at + ".mode");

    NoiseConfig noise = cfg.noise;
    noise.seed += i;
    noise = merge_noise(noise, optional_field<Json>(suite, "noise", at, Json::object()), at + ".noise");
    noise.seed = optional_field<std::uint64_t>(suite, "seed", at, noise.seed);

    const Simulator& sim = initial.simulator();
    switch (mode) {
      case SuiteMode::kDirect:
        result.suites.push_back(run_trial_protocol(sim, read_targets(suite, at), noise, name));
        break;
      case SuiteMode::kCamera: {
        TrialTable table;
        table.name = name;
        std::mt19937_64 rng(noise.seed);
        std::mt19937_64 depth_rng(noise.seed ^ kDepthStreamSalt);
        for (const auto& target : read_targets(suite, at)) {
          table.trials.push_back(camera_trial(sim, cfg, target, noise, rng, depth_rng));
        }
        table.mean_cm = mean_error(table);
        result.suites.push_back(std::move(table));
        break;
      }
      case SuiteMode::kCommand:
        result.suites.push_back(command_suite(initial, suite, at, noise, name));
        break;
    }
  }
  return result;
}

std::string format_trial_table(const std::vector<TrialTable>& suites) {
  std::size_t columns = 0;
  for (const auto& s : suites) columns = std::max(columns, s.trials.size());
  std::string out = "suite";
  for (std::size_t i = 1; i <= columns; ++i) out += "," + std::to_string(i);
  out += ",mean\n";
  for (const auto& s : suites) {
    out += s.name;
    for (std::size_t i = 0; i < columns; ++i) {
      out += ",";
      if (i >= s.trials.size()) continue;
      const auto& t = s.trials[i];
      out += t.report ? format_number(t.report->error_cm) : std::string(to_string(*t.error));
    }
    out += "," + (s.mean_cm ? format_number(*s.mean_cm) : std::string("-")) + "\n";
  }
  return out;
}

Json scenario_report(const ScenarioResult& result) {
  Json suites = Json::array();
  for (const auto& s : result.suites) suites.push_back(to_json(s));
  Json records = Json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  return {{"format", kReportFormat},
          {"scenario", result.name},
          {"noise", to_json(result.noise)},
          {"suites", suites},
          {"records", records},
          {"final_state", result.final_state}};
}

void write_scenario_reports(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "trials.csv", std::ios::binary);
  csv << format_trial_table(result.suites);
  std::ofstream json(out_dir / "report.json", std::ios::binary);
  json << scenario_report(result).dump(2) << "\n";
  if (!csv || !json) throw Error(ErrorCode::kInvalidArgument, "cannot write reports to " + out_dir.string());
}

}  // namespace dualarm
