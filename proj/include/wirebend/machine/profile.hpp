#pragma once

#include <string>
#include <string_view>

#include "wirebend/errormodel.hpp"

namespace wirebend {

struct FeedAxis {
  double wheel_diameter = 37.3;  // mm
  int steps_per_rev = 200;
  int microstep = 32;
};

struct BendAxis {
  double gearbox_ratio = 26.85;
  double external_ratio = 4.0;
  int microstep = 1;
  double max_bend = 155.0;   // deg, design/command limit
  double hard_stop = 165.0;  // deg, mechanical end of travel
};

struct RotateAxis {
  int microstep = 32;
  double transmission_ratio = 2.5568;
  double max_cumulative = 360.0;  // deg of unreversed rotation before the cabling wraps
};

struct MachineSpeeds {
  double feed = 110.2;    // mm/s
  double bend = 15.1;     // deg/s
  double rotate = 131.3;  // deg/s
};

/// Fixed time costs added by the fabrication-time estimate, seconds.
struct TimeOverheads {
  double homing = 10.0;
  double peg_retract = 1.0;  // per change of bend direction
};

struct MachineLimits {
  double min_feed = 25.0;       // mm
  double tail_reserve = 400.0;  // mm of stock held by the tail rail
  double min_edge = 20.4;       // mm, design-time edge check
  double stock_length = 1000.0; // mm
};

struct MaterialCost {
  double dollars_per_foot = 0.6;
  double dollars_per_mm() const { return dollars_per_foot / 304.8; }
};

struct MachineProfile {
  std::string name = "default";
  FeedAxis feed;
  BendAxis bend;
  RotateAxis rotate;
  MachineSpeeds speeds;
  TimeOverheads overheads;
  MachineLimits limits;
  double available_bend_torque = 37.9;  // N*m at the bending peg
  double safety_factor = 1.14;          // minimum torque margin considered reliable
  MaterialCost cost;
  CompensationParams compensation;

  /// mm per feed step.
  double feed_resolution() const;
  /// deg per bend-axis step.
  double bend_resolution() const;
  /// deg per rotate-axis step.
  double rotate_resolution() const;

  /// Throws InvalidInput on non-positive ratios, speeds or resolutions.
  void validate() const;
};

inline constexpr double kFullStepDeg = 1.8;

/// Serialises every field; the inverse accepts partial documents (missing keys keep defaults).
std::string profile_to_json(const MachineProfile& profile, int indent = 2);
MachineProfile profile_from_json(std::string_view text);

/// Profile named by `path`, else $WIREBEND_PROFILE, else the built-in default.
MachineProfile load_profile(const std::string& path = {});

}  // namespace wirebend
