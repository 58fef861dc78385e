#pragma once

#include <cstdint>
#include <vector>

#include "wirebend/instructions.hpp"
#include "wirebend/machine/profile.hpp"

namespace wirebend {

enum class MotorOp { Feed, Bend, Rotate, Retract, Home };

/// One low-level machine command. `value` is a signed step count for axis moves and
/// 1/0 for Retract. `source` is the instruction that produced it.
struct MotorCommand {
  MotorOp op = MotorOp::Feed;
  std::int64_t value = 0;
  std::size_t source = 0;

  bool operator==(const MotorCommand&) const = default;
};

struct AxisSteps {
  std::int64_t feed = 0;
  std::int64_t bend_swept = 0;  // signed sum of outward sweeps
  std::int64_t rotate = 0;

  bool operator==(const AxisSteps&) const = default;
};

/// Converts magnitudes to whole steps per axis, carrying each rounding residual into the
/// next move on that axis so quantization error never accumulates beyond half a step.
/// Also tracks which side of the wire the bending peg sits on.
class StepQuantizer {
 public:
  explicit StepQuantizer(const MachineProfile& profile);

  /// Appends the commands for one instruction. Throws LimitError for feeds <= 0, bends
  /// beyond the hard stop, or rotation beyond the cumulative cabling limit.
  void append(const Instruction& ins, std::size_t source, std::vector<MotorCommand>& out);

  const AxisSteps& totals() const { return totals_; }
  double feed_residual() const { return feed_residual_; }
  double bend_residual() const { return bend_residual_; }
  double rotate_residual() const { return rotate_residual_; }

 private:
  MachineProfile profile_;
  double feed_residual_ = 0.0;
  double bend_residual_ = 0.0;
  double rotate_residual_ = 0.0;
  int peg_side_ = 1;
  AxisSteps totals_;
};

struct StepPlan {
  std::vector<MotorCommand> commands;
  AxisSteps totals;
};

/// Feed d -> round(d / feed_res) steps; Bend theta -> sweep of round(theta / bend_res) and an
/// equal return, wrapped in RETRACT 1 / RETRACT 0 when the bend direction changes; Rotate phi
/// -> round(phi / rotate_res) steps. Zero-step moves are dropped.
StepPlan to_steps(const InstructionProgram& p, const MachineProfile& profile);

/// Physical magnitudes implied by whole-step totals.
struct AxisTravel {
  double feed_mm = 0.0;
  double bend_deg = 0.0;
  double rotate_deg = 0.0;
};
AxisTravel steps_to_travel(const AxisSteps& steps, const MachineProfile& profile);

}  // namespace wirebend
