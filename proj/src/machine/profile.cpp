#include "wirebend/machine/profile.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wirebend/errors.hpp"
#include "wirebend/json_io.hpp"

namespace wirebend {

double MachineProfile::feed_resolution() const {
  return std::numbers::pi * feed.wheel_diameter / (feed.steps_per_rev * feed.microstep);
}

double MachineProfile::bend_resolution() const {
  return kFullStepDeg / (bend.gearbox_ratio * bend.external_ratio * bend.microstep);
}

double MachineProfile::rotate_resolution() const {
  return kFullStepDeg / (rotate.microstep * rotate.transmission_ratio);
}

void MachineProfile::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive");
  };
  positive(feed.wheel_diameter, "feed.wheel_diameter");
  positive(feed.steps_per_rev, "feed.steps_per_rev");
  positive(feed.microstep, "feed.microstep");
  positive(bend.gearbox_ratio, "bend.gearbox_ratio");
  positive(bend.external_ratio, "bend.external_ratio");
  positive(bend.microstep, "bend.microstep");
  positive(bend.max_bend, "bend.max_bend");
  positive(bend.hard_stop, "bend.hard_stop");
  positive(rotate.microstep, "rotate.microstep");
  positive(rotate.transmission_ratio, "rotate.transmission_ratio");
  positive(rotate.max_cumulative, "rotate.max_cumulative");
  positive(speeds.feed, "speeds.feed");
  positive(speeds.bend, "speeds.bend");
  positive(speeds.rotate, "speeds.rotate");
  positive(limits.stock_length, "limits.stock_length");
  if (overheads.homing < 0.0 || overheads.peg_retract < 0.0) throw InvalidInput("overheads must be non-negative");
  if (limits.min_feed < 0.0 || limits.tail_reserve < 0.0 || limits.min_edge < 0.0) {
    throw InvalidInput("limits must be non-negative");
  }
  if (available_bend_torque < 0.0) throw InvalidInput("available_bend_torque must be non-negative");
  compensation.validate();
}

std::string profile_to_json(const MachineProfile& profile, int indent) {
  return nlohmann::json(profile).dump(indent);
}

MachineProfile profile_from_json(std::string_view text) {
  MachineProfile profile;
  try {
    profile = nlohmann::json::parse(text).get<MachineProfile>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad machine profile: ") + e.what());
  }
  profile.validate();
  return profile;
}

MachineProfile load_profile(const std::string& path) {
  std::string source = path;
  if (source.empty()) {
    if (const char* env = std::getenv("WIREBEND_PROFILE"); env && *env) source = env;
  }
  if (source.empty()) return MachineProfile{};
  std::ifstream in(source);
  if (!in) throw InvalidInput("cannot open profile '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return profile_from_json(buf.str());
}

}  // namespace wirebend
