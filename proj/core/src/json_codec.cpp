#include "dualarm/json_codec.hpp"

#include "dualarm/error.hpp"

namespace dualarm {

void throw_parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const Point3& p) { return {{"xyz", to_json(p.xyz)}, {"frame", to_string(p.frame)}}; }

Json to_json(const JointVector& q) {
  Json out = Json::array();
  for (double t : q.theta) out.push_back(t);
  return out;
}

Json to_json(const IKSolutionSet& set) {
  Json sols = Json::array();
  for (const auto& s : set.solutions) {
    sols.push_back({{"q", to_json(s.q)},
                    {"branch", to_string(s.branch)},
                    {"position_residual", s.position_residual},
                    {"orientation_residual", s.orientation_residual},
                    {"valid", s.valid}});
  }
  return {{"solutions", sols}};
}

Json to_json(const Detection& det) {
  return {{"label", det.label}, {"u", det.u},       {"v", det.v},
          {"w", det.width},     {"h", det.height},  {"depth_m", det.depth},
          {"confidence", det.confidence}};
}

Json to_json(const MatchResult& match) {
  return {{"entry_index", match.entry_index},
          {"template", match.entry.template_text},
          {"action", to_string(match.entry.action)},
          {"object_label", match.entry.object_label},
          {"score", match.score},
          {"accepted", match.accepted},
          {"scores", match.scores}};
}

Json to_json(const PickReport& r) {
  return {{"desired", to_json(r.desired.xyz)},
          {"achieved", to_json(r.achieved.xyz)},
          {"error_cm", r.error_cm},
          {"arm", to_string(r.arm)},
          {"elapsed_s", r.elapsed},
          {"branch", to_string(r.branch)},
          {"q_final", to_json(r.q_final)}};
}

Json to_json(const TrialTable& table) {
  Json trials = Json::array();
  for (std::size_t i = 0; i < table.trials.size(); ++i) {
    const auto& t = table.trials[i];
    Json row = {{"trial", i + 1}, {"desired", to_json(t.desired.xyz)}};
    if (t.report) {
      row["report"] = to_json(*t.report);
    } else {
      row["error"] = {{"code", to_string(*t.error)}, {"message", t.message}};
    }
    trials.push_back(std::move(row));
  }
  Json out = {{"name", table.name}, {"trials", trials}};
  out["mean_cm"] = table.mean_cm ? Json(*table.mean_cm) : Json(nullptr);
  return out;
}

Json to_json(const NoiseConfig& noise) {
  return {{"enabled", noise.enabled},
          {"joint_sigma", noise.joint_sigma},
          {"depth_sigma", noise.depth_sigma},
          {"seed", noise.seed}};
}

Json world_to_json(const RobotModel& model, const WorldState& world) {
  Json arms = Json::object();
  for (ArmSide side : {ArmSide::kLeft, ArmSide::kRight}) {
    const ArmState& arm = world.arm(side);
    Json points = Json::array();
    for (const Vec3& p : link_points(model.arm(side), arm.q)) points.push_back(to_json(p));
    arms[to_string(side)] = {{"q", to_json(arm.q)},
                             {"gripper", to_string(arm.gripper)},
                             {"moving", !arm.idle()},
                             {"link_points", points}};
  }
  Json objects = Json::array();
  for (const auto& obj : world.objects) {
    objects.push_back({{"id", obj.id},
                       {"label", obj.label},
                       {"position", to_json(obj.position)},
                       {"held_by", obj.held_by ? Json(to_string(*obj.held_by)) : Json(nullptr)}});
  }
  return {{"time", world.time}, {"arms", arms}, {"objects", objects}};
}

Vec3 vec3_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw_parse_error(where, "expected [x, y, z]");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw_parse_error(where, "expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

CameraExtrinsics extrinsics_from_json(const Json& j, const std::string& where) {
  const auto rot = required_field<std::vector<double>>(j, "rotation", where);
  if (rot.size() != 9) throw_parse_error(where + ".rotation", "expected 9 numbers (row-major)");
  CameraExtrinsics extr;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) extr.rotation(r, c) = rot[3 * r + c];
  extr.translation = vec3_from_json(required_field<Json>(j, "translation", where), where + ".translation");
  return extr;
}

Detection detection_from_json(const Json& j, const std::string& where) {
  Detection d;
  d.label = required_field<std::string>(j, "label", where);
  d.u = required_field<double>(j, "u", where);
  d.v = required_field<double>(j, "v", where);
  d.width = optional_field<double>(j, "w", where, 0.0);
  d.height = optional_field<double>(j, "h", where, 0.0);
  d.depth = required_field<double>(j, "depth_m", where);
  d.confidence = optional_field<double>(j, "confidence", where, 1.0);
  return d;
}

std::vector<Json> detection_records(const Json& payload) {
  const Json* list = &payload;
  if (payload.is_object()) {
    auto it = payload.find("detections");
    if (it == payload.end()) throw_parse_error("detections", "missing");
    list = &*it;
  }
  if (!list->is_array()) throw_parse_error("detections", "expected an array of records");
  return std::vector<Json>(list->begin(), list->end());
}

CommandLexicon lexicon_from_json(const Json& j, const std::string& where) {
  const auto entries = required_field<Json>(j, "entries", where);
  if (!entries.is_array()) throw_parse_error(where + ".entries", "expected an array");
  std::vector<CommandEntry> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = where + ".entries[" + std::to_string(i) + "]";
    CommandEntry e;
    e.template_text = required_field<std::string>(entries[i], "template", at);
    const auto action = optional_field<std::string>(entries[i], "action", at, "pick_up");
    const auto kind = parse_action(action);
    if (!kind) throw_parse_error(at + ".action", "unknown action '" + action + "'");
    e.action = *kind;
    e.object_label = optional_field<std::string>(entries[i], "object_label", at, "");
    out.push_back(std::move(e));
  }
  const auto classes = optional_field<std::vector<std::string>>(j, "classes", where, {});
  return CommandLexicon(std::move(out), classes);
}

}  // namespace dualarm
