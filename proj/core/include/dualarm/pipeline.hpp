#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualarm/config.hpp"
#include "dualarm/json_codec.hpp"

namespace dualarm {

struct ErrorInfo {
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

/// Outcome of a non-pick command (release, home).
struct ActionReport {
  ActionKind action = ActionKind::kHome;
  std::vector<ArmSide> arms;
  double elapsed = 0.0;
};

/// One processed utterance. Exactly one of `report`, `action` or `error` is
/// set once the record is complete.
struct CommandRecord {
  std::uint64_t id = 0;
  std::string utterance;
  std::optional<MatchResult> match;
  std::optional<Detection> detection;
  std::optional<Point3> grasp_target;
  std::optional<PickReport> report;
  std::optional<ActionReport> action;
  std::optional<ErrorInfo> error;
  double issued_at = 0.0;     // simulated time
  double completed_at = 0.0;  // simulated time
};

struct Rejection {
  std::size_t index = 0;
  std::string reason;
};

struct IngestResult {
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
};

Json to_json(const CommandRecord& record);
Json to_json(const IngestResult& result);

/// utterance -> match -> detection lookup -> grasp target -> IK ->
/// trajectory -> simulation -> report. Single-threaded; the service wraps
/// it in a serialized executor.
class Pipeline {
 public:
  explicit Pipeline(SystemConfig config);

  /// Never throws for pipeline failures: NoMatch, NoDetection,
  /// BothUnreachable and NoIKSolution land in the record's `error`.
  CommandRecord handle_utterance(std::string_view utterance, const Simulator::StepObserver& observer = {});

  /// Replaces the detection set; invalid records are rejected one by one.
  IngestResult ingest_detections(const std::vector<Detection>& detections);
  /// Same, from a JSON payload. Throws ParseError when the payload itself
  /// is malformed.
  IngestResult ingest_detections(const Json& payload);

  /// Hot reload: rebuilds the TF-IDF index for a new lexicon.
  void replace_lexicon(CommandLexicon lexicon);

  /// Idles the world until simulated time `t` (no-op if already past).
  void advance_to(double t);

  const SystemConfig& config() const { return config_; }
  const CommandLexicon& lexicon() const { return config_.lexicon; }
  const TfIdfIndex& index() const { return index_; }
  const std::vector<Detection>& detections() const { return detections_; }
  const std::vector<CommandRecord>& history() const { return history_; }
  const Simulator& simulator() const { return sim_; }
  Simulator& simulator() { return sim_; }

  MatchResult match(std::string_view utterance) const;

  Json snapshot(std::size_t history_tail) const;

 private:
  void run_pick(CommandRecord& rec, const Simulator::StepObserver& observer);
  void run_release(CommandRecord& rec);
  void run_home(CommandRecord& rec, const Simulator::StepObserver& observer);

  SystemConfig config_;
  TfIdfIndex index_;
  Simulator sim_;
  std::vector<Detection> detections_;
  std::vector<CommandRecord> history_;
  std::uint64_t next_id_ = 1;
};

}  // namespace dualarm
