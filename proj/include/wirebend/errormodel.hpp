#pragma once

#include <functional>

#include "wirebend/instructions.hpp"

namespace wirebend {

/// Bending-head geometry and material constants used by the compensation pass.
/// Lengths in mm, springback in degrees.
struct CompensationParams {
  double peg_arc_radius = 20.4;      // radius of the arc traced by the bending peg centre
  double bend_rod_radius = 3.175;    // bending peg radius
  double nozzle_rod_radius = 1.5;    // nozzle rod radius
  double setback_distance = 12.0;    // nozzle exit to bending centre
  double springback = 10.23;         // constant elastic recovery, degrees
  double k_factor = 0.3;             // neutral-axis offset as a fraction of diameter
  double wire_diameter = 3.0;
  double inner_bend_radius = 1.5;    // radius the wire wraps at the nozzle rod

  double wire_radius() const { return wire_diameter / 2.0; }
  double neutral_offset() const { return k_factor * wire_diameter; }
  double neutral_radius() const { return inner_bend_radius + neutral_offset(); }

  /// Throws InvalidInput unless lengths > 0 (R >= 0; R = 0 disables setback), 0 < K < 1
  /// and springback >= 0.
  void validate() const;

  bool operator==(const CompensationParams&) const = default;
};

/// Setback map: peg angle to command for a desired wire angle. Odd in theta;
/// exact limits at 0, +-90 and +-180. Throws DomainError when the asin argument
/// leaves [-1, 1] and InvalidInput when |theta| > 180.
double setback_commanded(double theta_deg, const CompensationParams& p);

/// theta + sgn(theta) * S.
double springback_target(double theta_deg, const CompensationParams& p);

/// setback_commanded(springback_target(theta)).
double combined_commanded(double theta_deg, const CompensationParams& p);

/// Inverts combined_commanded by bracketing and bisection over design angles of the same
/// sign; the root nearest commanded - S wins. Throws DomainError if none exists.
double design_angle_for_command(double commanded_deg, const CompensationParams& p);

/// Length terms of the feed correction. Both take the unsigned bend angle in degrees.
struct FeedCompensationModel {
  std::function<double(double, const CompensationParams&)> lost_length;
  std::function<double(double, const CompensationParams&)> arc_length;

  /// Outside setback tan(theta/2)(r_bend + d) and neutral-axis arc theta (r_bend + K d).
  static FeedCompensationModel bend_deduction();
};

/// Strain/bend-deduction feed correction. Each run of feeds between bends is adjusted by
/// -lost(previous) - lost(next) + arc(next) - 2(r_wire - c); the change lands on the feed
/// touching the next bend (or the previous one for the trailing run). Bend-free runs pass
/// through. Throws LimitError if an adjusted feed drops to zero or below `min_feed`.
InstructionProgram adjust_feeds(const InstructionProgram& program, const CompensationParams& p,
                                double min_feed = 0.0,
                                const FeedCompensationModel& model = FeedCompensationModel::bend_deduction());

/// Full compensation: adjusted feeds, bends replaced by combined_commanded, rotates kept.
/// Rejects programs already marked corrected.
InstructionProgram apply_corrections(const InstructionProgram& program, const CompensationParams& p,
                                     double min_feed = 0.0,
                                     const FeedCompensationModel& model = FeedCompensationModel::bend_deduction());

/// Recovers the design program from a corrected one. Requires the corrected flag.
InstructionProgram invert_corrections(const InstructionProgram& program, const CompensationParams& p,
                                      const FeedCompensationModel& model = FeedCompensationModel::bend_deduction());

}  // namespace wirebend
