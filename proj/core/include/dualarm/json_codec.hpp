#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualarm/command_matching.hpp"
#include "dualarm/kinematics.hpp"
#include "dualarm/perception.hpp"
#include "dualarm/simulator.hpp"

// JSON shapes shared by report files, CLI output and the service. Field
// names are documented in docs/formats.md.

namespace dualarm {

using Json = nlohmann::json;

Json to_json(const Vec3& v);
Json to_json(const Point3& p);
Json to_json(const JointVector& q);
Json to_json(const IKSolutionSet& set);
Json to_json(const Detection& det);
Json to_json(const MatchResult& match);
Json to_json(const PickReport& report);
Json to_json(const TrialTable& table);
Json to_json(const NoiseConfig& noise);

/// Scene snapshot: time, both arms (joints, gripper, per-link points),
/// and objects.
Json world_to_json(const RobotModel& model, const WorldState& world);

/// Throws ParseError naming `where` on a missing or mistyped field.
Detection detection_from_json(const Json& j, const std::string& where);

/// Accepts a bare array or {"detections": [...]}. Throws ParseError.
std::vector<Json> detection_records(const Json& payload);

Vec3 vec3_from_json(const Json& j, const std::string& where);

/// {rotation: 9 numbers row-major, translation: [x, y, z]}. Not validated.
CameraExtrinsics extrinsics_from_json(const Json& j, const std::string& where);

CommandLexicon lexicon_from_json(const Json& j, const std::string& where);

[[noreturn]] void throw_parse_error(const std::string& where, const std::string& what);

/// Reads a field; throws ParseError("where.key: ...") if missing or of the
/// wrong type.
template <typename T>
T required_field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw_parse_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw_parse_error(where + "." + key, "missing");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_parse_error(where + "." + key, "wrong type (" + std::string(it->type_name()) + ")");
  }
}

template <typename T>
T optional_field(const Json& j, const std::string& key, const std::string& where, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return required_field<T>(j, key, where);
}

}  // namespace dualarm
