// dualarm: batch scenarios, IK and matcher probes, and the network service.
//
// Exit codes:
//   0  success
//   1  I/O or runtime failure
//   2  usage, parse or validation error
//   3  IK target unreachable
//   4  IK target singular (on the shoulder axis)
//   5  utterance not matched (best score below threshold)
//   6  IK solutions exist but all violate joint limits

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualarm/config.hpp"
#include "dualarm/error.hpp"
#include "dualarm/json_codec.hpp"
#include "dualarm/scenario.hpp"
#include "dualarm/service.hpp"

namespace {

using namespace dualarm;

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kUnreachable = 3, kSingular = 4, kNoMatch = 5, kOutOfLimits = 6 };

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreachable: return kUnreachable;
    case ErrorCode::kSingular: return kSingular;
    case ErrorCode::kNoMatch: return kNoMatch;
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
    case ErrorCode::kEmptyLexicon:
    case ErrorCode::kInvalidArgument: return kUsage;
    default: return kRuntime;
  }
}

void print(const Json& j) { std::cout << j.dump(2) << std::endl; }

int fail(ErrorCode code, const std::string& message) {
  std::cerr << Json{{"error", {{"code", to_string(code)}, {"message", message}}}}.dump(2) << std::endl;
  return exit_for(code);
}

SystemConfig config_or_default(const std::string& path) {
  return load_config(path.empty() ? default_config_path() : std::filesystem::path(path));
}

int cmd_run(const std::string& scenario, const std::string& out, std::optional<std::uint64_t> seed,
            const std::string& noise) {
  ScenarioOverrides overrides;
  overrides.seed = seed;
  if (noise == "on") overrides.noise_enabled = true;
  if (noise == "off") overrides.noise_enabled = false;
  const ScenarioResult result = run_scenario(scenario, overrides);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path("reports") / result.name : std::filesystem::path(out);
  try {
    write_scenario_reports(result, dir);
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"code", "IOError"}, {"message", e.what()}}}}.dump(2) << std::endl;
    return kRuntime;
  }
  Json suites = Json::array();
  for (const auto& s : result.suites) {
    std::size_t failed = 0;
    for (const auto& t : s.trials) failed += t.ok() ? 0 : 1;
    suites.push_back({{"name", s.name},
                      {"trials", s.trials.size()},
                      {"failed", failed},
                      {"mean_cm", s.mean_cm ? Json(*s.mean_cm) : Json(nullptr)}});
  }
  print({{"scenario", result.name},
         {"noise", to_json(result.noise)},
         {"suites", suites},
         {"records", result.records.size()},
         {"trial_table", (dir / "trials.csv").string()},
         {"report", (dir / "report.json").string()}});
  return kOk;
}

int cmd_serve(const std::string& config_path, std::optional<int> port, const std::string& address,
              std::optional<double> time_scale) {
  SystemConfig cfg = config_or_default(config_path);
  if (time_scale) {
    if (*time_scale < 0.0) return fail(ErrorCode::kInvalidArgument, "--time-scale must be >= 0");
    cfg.service.time_scale = *time_scale;
  }
  const int requested = port.value_or(cfg.service.port);
  if (requested < 0 || requested > 65535) return fail(ErrorCode::kInvalidArgument, "--port must lie in [0, 65535]");
  Service service(cfg);
  service.stop_on_signals();
  const unsigned short bound = service.start(address, static_cast<unsigned short>(requested));
  print({{"listening", {{"address", address}, {"port", bound}}}, {"config", cfg.source.string()}});
  service.wait();
  service.stop();
  return kOk;
}

int cmd_solve_ik(const std::vector<double>& pose, const std::string& arm_name, const std::string& config_path) {
  const SystemConfig cfg = config_or_default(config_path);
  const auto side = parse_side(arm_name);
  if (!side) return fail(ErrorCode::kInvalidArgument, "--arm must be 'left' or 'right'");
  const ArmModel& arm = cfg.robot.arm(*side);
  const HomogeneousTransform target{rotation_from_rpy(pose[3], pose[4], pose[5]), Vec3(pose[0], pose[1], pose[2])};
  const IKSolutionSet set = inverse_kinematics(arm, target);
  Json out = to_json(set);
  out["arm"] = to_string(*side);
  out["target"] = {{"position", to_json(target.translation)}, {"rpy", {pose[3], pose[4], pose[5]}}};
  print(out);
  return set.any_valid() ? kOk : kOutOfLimits;
}

int cmd_match(const std::string& utterance, const std::string& config_path, std::optional<double> threshold) {
  const SystemConfig cfg = config_or_default(config_path);
  const double t = threshold.value_or(cfg.match_threshold);
  const TfIdfIndex index = build_index(cfg.lexicon);
  const MatchResult result = match_command(index, cfg.lexicon, utterance, t);
  Json out = to_json(result);
  out["threshold"] = t;
  print(out);
  return result.accepted ? kOk : kNoMatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-arm manipulator control stack"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DUALARM_CLI_VERSION));

  std::string scenario, out, noise = "config";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario and write trials.csv and report.json");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Report directory (default: reports/<scenario name>)");
  run->add_option("--seed", seed, "Override the noise seed");
  run->add_option("--noise", noise, "Force actuator noise on or off")->check(CLI::IsMember({"on", "off", "config"}));

  std::string config_path, address = "127.0.0.1";
  std::optional<int> port;
  std::optional<double> time_scale;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/WebSocket interface");
  serve->add_option("--config", config_path, "System config (default: shipped config/default.json)");
  serve->add_option("--port", port, "TCP port; 0 picks a free one (default: from config)");
  serve->add_option("--address", address, "Bind address");
  serve->add_option("--time-scale", time_scale, "Simulated seconds per wall second; 0 = unpaced");

  std::vector<double> pose;
  std::string arm = "left";
  auto* ik = app.add_subcommand("solve-ik", "Closed-form IK for a robot-frame pose");
  ik->add_option("--pose", pose, "x y z roll pitch yaw (m, rad)")->required()->expected(6);
  ik->add_option("--arm", arm, "left or right")->check(CLI::IsMember({"left", "right"}));
  ik->add_option("--config", config_path, "System config");

  std::string utterance;
  std::optional<double> threshold;
  auto* match = app.add_subcommand("match", "Match an utterance against the lexicon");
  match->add_option("utterance", utterance, "Text to match")->required();
  match->add_option("--config", config_path, "System config");
  match->add_option("--threshold", threshold, "Acceptance threshold")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out, seed, noise);
    if (*serve) return cmd_serve(config_path, port, address, time_scale);
    if (*ik) return cmd_solve_ik(pose, arm, config_path);
    if (*match) return cmd_match(utterance, config_path, threshold);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"code", "IOError"}, {"message", e.what()}}}}.dump(2) << std::endl;
    return kRuntime;
  }
  return kUsage;
}
