#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dualarm/kinematics.hpp"

namespace dualarm {

inline constexpr std::string_view kArmFormat = "dualarm-arm/1";

// Arm description files are line-oriented `key = value` text; see
// docs/formats.md for the grammar. Angles accept decimal radians or the
// forms `pi`, `-pi/2`, `3*pi/4`.

/// Throws ParseError ("source:line: reason") on syntax problems and
/// ValidationError when the parsed arm breaks an ArmModel invariant.
ArmModel parse_arm_description(std::string_view text, const std::string& source = "<string>");

ArmModel load_arm_description(const std::filesystem::path& path);

/// Inverse of parse_arm_description (full double precision).
std::string format_arm_description(const ArmModel& arm);

}  // namespace dualarm
