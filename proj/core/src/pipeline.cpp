#include "dualarm/pipeline.hpp"

#include <algorithm>
#include <limits>

#include "dualarm/error.hpp"

namespace dualarm {

Json to_json(const CommandRecord& r) {
  Json out = {{"id", r.id}, {"utterance", r.utterance}, {"issued_at", r.issued_at},
              {"completed_at", r.completed_at}};
  out["match"] = r.match ? to_json(*r.match) : Json(nullptr);
  out["detection"] = r.detection ? to_json(*r.detection) : Json(nullptr);
  out["grasp_target"] = r.grasp_target ? to_json(r.grasp_target->xyz) : Json(nullptr);
  if (r.report) {
    out["outcome"] = {{"kind", "pick"}, {"report", to_json(*r.report)}};
  } else if (r.action) {
    Json arms = Json::array();
    for (ArmSide s : r.action->arms) arms.push_back(to_string(s));
    out["outcome"] = {{"kind", to_string(r.action->action)}, {"arms", arms}, {"elapsed_s", r.action->elapsed}};
  } else if (r.error) {
    out["outcome"] = {{"kind", "error"}, {"code", to_string(r.error->code)}, {"message", r.error->message}};
  } else {
    out["outcome"] = nullptr;
  }
  return out;
}

Json to_json(const IngestResult& result) {
  Json rejected = Json::array();
  for (const auto& r : result.rejected) rejected.push_back({{"index", r.index}, {"reason", r.reason}});
  return {{"accepted", result.accepted}, {"rejected", rejected}};
}

Pipeline::Pipeline(SystemConfig config)
    : config_(std::move(config)),
      index_(build_index(config_.lexicon)),
      sim_(config_.robot, make_world(config_.robot, config_.noise)) {}

MatchResult Pipeline::match(std::string_view utterance) const {
  return match_command(index_, config_.lexicon, utterance, config_.match_threshold);
}

CommandRecord Pipeline::handle_utterance(std::string_view utterance, const Simulator::StepObserver& observer) {
  CommandRecord rec;
  rec.id = next_id_++;
  rec.utterance = std::string(utterance);
  rec.issued_at = sim_.world().time;
  try {
    rec.match = match(utterance);
    if (!rec.match->accepted) {
      throw Error(ErrorCode::kNoMatch, "best score " + std::to_string(rec.match->score) + " below threshold " +
                                           std::to_string(config_.match_threshold));
    }
    switch (rec.match->entry.action) {
      case ActionKind::kPickUp: run_pick(rec, observer); break;
      case ActionKind::kRelease: run_release(rec); break;
      case ActionKind::kHome: run_home(rec, observer); break;
    }
  } catch (const Error& e) {
    rec.error = ErrorInfo{e.code(), e.what()};
  } catch (const std::exception& e) {
    rec.error = ErrorInfo{ErrorCode::kInvalidArgument, e.what()};
  }
  rec.completed_at = sim_.world().time;
  history_.push_back(rec);
  return rec;
}

void Pipeline::run_pick(CommandRecord& rec, const Simulator::StepObserver& observer) {
  const std::string& label = rec.match->entry.object_label;
  const Detection* best = nullptr;
  for (const auto& d : detections_) {
    if (d.label == label && (!best || d.confidence > best->confidence)) best = &d;
  }
  if (!best) throw Error(ErrorCode::kNoDetection, "no detection for '" + label + "'");
  rec.detection = *best;
  rec.grasp_target = detection_to_grasp_target(config_.intrinsics, config_.extrinsics, *best);

  // Pick the nearest free scene object of that class, or materialize one at
  // the perceived location.
  WorldState& world = sim_.world();
  int object_id = -1;
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& obj : world.objects) {
    if (obj.label != label || obj.held_by) continue;
    const double dist = (obj.position - rec.grasp_target->xyz).norm();
    if (dist < nearest) {
      nearest = dist;
      object_id = obj.id;
    }
  }
  if (object_id < 0) object_id = sim_.add_object(label, rec.grasp_target->xyz);
  rec.report = sim_.execute_pick(*rec.grasp_target, object_id, observer);
}

void Pipeline::run_release(CommandRecord& rec) {
  const std::string& label = rec.match->entry.object_label;
  ActionReport report{ActionKind::kRelease, {}, 0.0};
  for (ArmSide side : {ArmSide::kLeft, ArmSide::kRight}) {
    const auto& objs = sim_.world().objects;
    const bool holds = std::any_of(objs.begin(), objs.end(), [&](const SceneObject& o) {
      return o.held_by == side && (label.empty() || o.label == label);
    });
    if (holds) {
      sim_.release(side);
      report.arms.push_back(side);
    }
  }
  if (report.arms.empty()) throw Error(ErrorCode::kInvalidArgument, "no arm is holding '" + label + "'");
  rec.action = report;
}

void Pipeline::run_home(CommandRecord& rec, const Simulator::StepObserver& observer) {
  ActionReport report{ActionKind::kHome, {}, 0.0};
  for (ArmSide side : {ArmSide::kLeft, ArmSide::kRight}) {
    report.elapsed += sim_.move_arm(side, config_.robot.arm(side).home, observer);
    report.arms.push_back(side);
  }
  rec.action = report;
}

IngestResult Pipeline::ingest_detections(const std::vector<Detection>& detections) {
  IngestResult result;
  detections_.clear();
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (auto problem = detection_problem(detections[i], config_.intrinsics)) {
      result.rejected.push_back({i, *problem});
      continue;
    }
    detections_.push_back(detections[i]);
  }
  result.accepted = detections_.size();
  return result;
}

IngestResult Pipeline::ingest_detections(const Json& payload) {
  const auto records = detection_records(payload);
  std::vector<Detection> parsed;
  std::vector<Rejection> malformed;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      parsed.push_back(detection_from_json(records[i], "detections[" + std::to_string(i) + "]"));
      origin.push_back(i);
    } catch (const Error& e) {
      malformed.push_back({i, std::string("ParseError: ") + e.what()});
    }
  }
  IngestResult result = ingest_detections(parsed);
  for (auto& r : result.rejected) r.index = origin[r.index];
  result.rejected.insert(result.rejected.end(), malformed.begin(), malformed.end());
  std::sort(result.rejected.begin(), result.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.index < b.index; });
  return result;
}

void Pipeline::replace_lexicon(CommandLexicon lexicon) {
  TfIdfIndex fresh = build_index(lexicon);
  config_.lexicon = std::move(lexicon);
  index_ = std::move(fresh);
}

void Pipeline::advance_to(double t) {
  while (sim_.world().time + 1e-12 < t) {
    sim_.step(std::min(config_.robot.dt, t - sim_.world().time));
  }
}

Json Pipeline::snapshot(std::size_t history_tail) const {
  Json out = world_to_json(config_.robot, sim_.world());
  Json dets = Json::array();
  for (const auto& d : detections_) dets.push_back(to_json(d));
  out["detections"] = dets;
  Json tail = Json::array();
  const std::size_t n = history_.size();
  for (std::size_t i = n > history_tail ? n - history_tail : 0; i < n; ++i) tail.push_back(to_json(history_[i]));
  out["history"] = tail;
  return out;
}

}  // namespace dualarm
