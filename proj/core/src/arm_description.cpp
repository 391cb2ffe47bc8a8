#include "dualarm/arm_description.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "dualarm/error.hpp"

namespace dualarm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// Decimal, or [-][k*]pi[/m].
std::optional<double> parse_scalar(std::string_view s) {
  if (auto v = parse_double(s)) return v;
  double sign = 1.0;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    sign = s.front() == '-' ? -1.0 : 1.0;
    s.remove_prefix(1);
  }
  const auto pi_at = s.find("pi");
  if (pi_at == std::string_view::npos) return std::nullopt;
  double coeff = 1.0;
  if (pi_at > 0) {
    if (s[pi_at - 1] != '*') return std::nullopt;
    auto c = parse_double(s.substr(0, pi_at - 1));
    if (!c) return std::nullopt;
    coeff = *c;
  }
  std::string_view rest = s.substr(pi_at + 2);
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return std::nullopt;
    auto dv = parse_double(rest.substr(1));
    if (!dv || *dv == 0.0) return std::nullopt;
    divisor = *dv;
  }
  return sign * coeff * kPi / divisor;
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ':' << line << ": " << msg;
    throw Error(ErrorCode::kParseError, os.str());
  }

  std::vector<double> numbers(int line, std::string_view key, std::string_view value,
                              std::size_t expected) const {
    std::vector<double> out;
    std::istringstream is{std::string(value)};
    std::string tok;
    while (is >> tok) {
      auto v = parse_scalar(tok);
      if (!v) fail(line, "'" + std::string(key) + "': bad number '" + tok + "'");
      out.push_back(*v);
    }
    if (out.size() != expected) {
      fail(line, "'" + std::string(key) + "': expected " + std::to_string(expected) +
                     " values, got " + std::to_string(out.size()));
    }
    return out;
  }

 private:
  std::string source_;
};

std::optional<std::size_t> indexed_key(std::string_view key, std::string_view prefix) {
  if (key.substr(0, prefix.size()) != prefix || key.size() != prefix.size() + 1) return std::nullopt;
  const char c = key.back();
  if (c < '1' || c > '0' + static_cast<int>(kJointCount)) return std::nullopt;
  return static_cast<std::size_t>(c - '1');
}

}  // namespace

ArmModel parse_arm_description(std::string_view text, const std::string& source) {
  Parser parser(source);
  ArmModel arm;
  std::map<std::string, int> seen;
  Vec3 rpy = Vec3::Zero();
  bool have_home = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parser.fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) parser.fail(line_no, "empty key");
    if (seen.count(key)) {
      parser.fail(line_no, "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    }
    if (seen.empty() && key != "format") parser.fail(line_no, "first key must be 'format'");
    seen[key] = line_no;

    if (key == "format") {
      if (value != kArmFormat) {
        parser.fail(line_no, "unsupported format '" + std::string(value) + "', expected " + std::string(kArmFormat));
      }
    } else if (key == "name") {
      arm.name = std::string(value);
    } else if (auto i = indexed_key(key, "dh.")) {
      const auto v = parser.numbers(line_no, key, value, 4);
      arm.rows[*i] = {v[0], v[1], v[2], v[3]};
    } else if (auto li = indexed_key(key, "limit.")) {
      const auto v = parser.numbers(line_no, key, value, 2);
      arm.joint_limits[*li] = {v[0], v[1]};
    } else if (key == "tool_offset") {
      arm.tool_offset = parser.numbers(line_no, key, value, 1)[0];
    } else if (key == "home") {
      const auto v = parser.numbers(line_no, key, value, kJointCount);
      for (std::size_t k = 0; k < kJointCount; ++k) arm.home[k] = v[k];
      have_home = true;
    } else if (key == "mount.translation") {
      const auto v = parser.numbers(line_no, key, value, 3);
      arm.mount.translation = Vec3(v[0], v[1], v[2]);
    } else if (key == "mount.rpy") {
      const auto v = parser.numbers(line_no, key, value, 3);
      rpy = Vec3(v[0], v[1], v[2]);
    } else {
      parser.fail(line_no, "unknown key '" + key + "'");
    }
  }

  std::vector<std::string> missing;
  for (const char* required : {"format", "dh.1", "dh.2", "dh.3", "dh.4", "dh.5", "tool_offset",
                               "limit.1", "limit.2", "limit.3", "limit.4", "limit.5",
                               "mount.translation"}) {
    if (!seen.count(required)) missing.emplace_back(required);
  }
  if (!missing.empty()) {
    std::string msg = "missing required key(s):";
    for (const auto& m : missing) msg += " " + m;
    parser.fail(line_no, msg);
  }

  arm.mount.rotation = rotation_from_rpy(rpy.x(), rpy.y(), rpy.z());
  if (!have_home) {
    for (std::size_t k = 0; k < kJointCount; ++k) {
      arm.home[k] = 0.5 * (arm.joint_limits[k].min + arm.joint_limits[k].max);
    }
  }
  arm.validate();
  return arm;
}

ArmModel load_arm_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, path.string() + ": cannot open arm description");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_arm_description(buf.str(), path.string());
}

std::string format_arm_description(const ArmModel& arm) {
  std::ostringstream os;
  os.precision(17);
  os << "format = " << kArmFormat << "\n";
  if (!arm.name.empty()) os << "name = " << arm.name << "\n";
  os << "# a alpha d theta_offset\n";
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const auto& r = arm.rows[i];
    os << "dh." << i + 1 << " = " << r.a << ' ' << r.alpha << ' ' << r.d << ' ' << r.theta_offset << "\n";
  }
  os << "tool_offset = " << arm.tool_offset << "\n";
  for (std::size_t i = 0; i < kJointCount; ++i) {
    os << "limit." << i + 1 << " = " << arm.joint_limits[i].min << ' ' << arm.joint_limits[i].max << "\n";
  }
  os << "home =";
  for (std::size_t i = 0; i < kJointCount; ++i) os << ' ' << arm.home[i];
  os << "\n";
  const Vec3& t = arm.mount.translation;
  os << "mount.translation = " << t.x() << ' ' << t.y() << ' ' << t.z() << "\n";
  // Rz * Ry * Rx decomposition.
  const Mat3& r = arm.mount.rotation;
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  os << "mount.rpy = " << roll << ' ' << pitch << ' ' << yaw << "\n";
  return os.str();
}

}  // namespace dualarm
