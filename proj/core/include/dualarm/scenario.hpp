#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dualarm/pipeline.hpp"

namespace dualarm {

inline constexpr std::string_view kScenarioFormat = "dualarm-scenario/1";
inline constexpr std::string_view kReportFormat = "dualarm-report/1";

/// How a suite turns its entries into picks.
enum class SuiteMode {
  kDirect,   // robot-frame targets handed straight to the arm
  kCamera,   // targets observed through the camera (projected, depth-noised, back-projected)
  kCommand,  // utterances run through the full pipeline against the suite's detections
};

struct ScenarioOverrides {
  std::optional<bool> noise_enabled;
  std::optional<std::uint64_t> seed;
};

struct ScenarioResult {
  std::string name;
  NoiseConfig noise;
  std::vector<TrialTable> suites;
  std::vector<CommandRecord> records;  // from the timed script
  Json final_state;
};

/// Deterministic batch run. Throws ParseError / ValidationError for a bad
/// scenario or config; per-trial failures are recorded in the tables.
ScenarioResult run_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Delimited trial table: `suite,1,...,N,mean`, one row per suite, failed
/// trials shown by error name.
std::string format_trial_table(const std::vector<TrialTable>& suites);

Json scenario_report(const ScenarioResult& result);

/// Writes `trials.csv` and `report.json` into `out_dir` (created if needed).
void write_scenario_reports(const ScenarioResult& result, const std::filesystem::path& out_dir);

}  // namespace dualarm
