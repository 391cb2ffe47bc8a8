#pragma once

#include <cstddef>
#include <filesystem>

#include "dualarm/command_matching.hpp"
#include "dualarm/perception.hpp"
#include "dualarm/simulator.hpp"

namespace dualarm {

inline constexpr std::string_view kConfigFormat = "dualarm-config/1";
inline constexpr std::string_view kLexiconFormat = "dualarm-lexicon/1";

struct ServiceOptions {
  int port = 8080;
  double stream_hz = 20.0;
  /// Simulated seconds per wall-clock second while serving; 0 runs motions
  /// as fast as possible.
  double time_scale = 1.0;
  std::size_t history_tail = 20;
};

struct SystemConfig {
  std::filesystem::path source;
  std::filesystem::path left_arm_path;
  std::filesystem::path right_arm_path;
  std::filesystem::path lexicon_path;

  RobotModel robot;
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
  CommandLexicon lexicon = CommandLexicon::default_english();
  NoiseConfig noise;
  double match_threshold = kDefaultMatchThreshold;
  ServiceOptions service;
};

/// Loads and validates a system config; referenced files are resolved
/// relative to the config file. Throws ParseError (unreadable files,
/// syntax, missing or mistyped fields; message carries the path) or
/// ValidationError listing every violated invariant by field path.
SystemConfig load_config(const std::filesystem::path& path);

/// Throws ParseError or ValidationError (see lexicon_from_json).
CommandLexicon load_lexicon(const std::filesystem::path& path);

/// The config directory shipped with the sources, when it exists.
std::filesystem::path default_config_path();

}  // namespace dualarm
