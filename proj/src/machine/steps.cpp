#include "wirebend/machine/steps.hpp"

#include <cmath>

#include "wirebend/errors.hpp"

namespace wirebend {

namespace {

std::int64_t quantize(double target_steps, double& residual) {
  const double wanted = target_steps + residual;
  const auto steps = static_cast<std::int64_t>(std::llround(wanted));
  residual = wanted - static_cast<double>(steps);
  return steps;
}

}  // namespace

StepQuantizer::StepQuantizer(const MachineProfile& profile) : profile_(profile) {}

void StepQuantizer::append(const Instruction& ins, std::size_t source, std::vector<MotorCommand>& out) {
  const auto where = "instruction " + std::to_string(source) + ": ";
  switch (ins.kind) {
    case InstructionKind::Feed: {
      if (!(ins.magnitude > 0.0)) throw LimitError(where + "feed must be positive");
      const auto steps = quantize(ins.magnitude / profile_.feed_resolution(), feed_residual_);
      if (steps != 0) out.push_back({MotorOp::Feed, steps, source});
      totals_.feed += steps;
      break;
    }
    case InstructionKind::Bend: {
      if (std::abs(ins.magnitude) > profile_.bend.hard_stop) {
        throw LimitError(where + "bend beyond the " + std::to_string(profile_.bend.hard_stop) + " deg hard stop");
      }
      const auto steps = quantize(ins.magnitude / profile_.bend_resolution(), bend_residual_);
      if (steps == 0) break;
      const int side = steps > 0 ? 1 : -1;
      if (side != peg_side_) {
        out.push_back({MotorOp::Retract, 1, source});
        out.push_back({MotorOp::Retract, 0, source});
        peg_side_ = side;
      }
      out.push_back({MotorOp::Bend, steps, source});
      out.push_back({MotorOp::Bend, -steps, source});
      totals_.bend_swept += steps;
      break;
    }
    case InstructionKind::Rotate: {
      double residual = rotate_residual_;
      const auto steps = quantize(ins.magnitude / profile_.rotate_resolution(), residual);
      const double travel = static_cast<double>(totals_.rotate + steps) * profile_.rotate_resolution();
      if (std::abs(travel) > profile_.rotate.max_cumulative + profile_.rotate_resolution()) {
        throw LimitError(where + "cumulative rotation exceeds the cabling limit");
      }
      rotate_residual_ = residual;
      if (steps != 0) out.push_back({MotorOp::Rotate, steps, source});
      totals_.rotate += steps;
      break;
    }
  }
}

StepPlan to_steps(const InstructionProgram& p, const MachineProfile& profile) {
  StepQuantizer q(profile);
  StepPlan plan;
  for (std::size_t i = 0; i < p.size(); ++i) q.append(p[i], i, plan.commands);
  plan.totals = q.totals();
  return plan;
}

AxisTravel steps_to_travel(const AxisSteps& steps, const MachineProfile& profile) {
  return {static_cast<double>(steps.feed) * profile.feed_resolution(),
          static_cast<double>(steps.bend_swept) * profile.bend_resolution(),
          static_cast<double>(steps.rotate) * profile.rotate_resolution()};
}

}  // namespace wirebend
