#include "wirebend/errormodel.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "wirebend/errors.hpp"

namespace wirebend {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::string fmt_deg(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool is_bend(const Instruction& ins) { return ins.kind == InstructionKind::Bend; }
bool is_feed(const Instruction& ins) { return ins.kind == InstructionKind::Feed; }

/// A maximal run of feeds (rotates may interleave) with its bounding bends.
struct FeedRun {
  std::vector<std::size_t> feeds;
  std::optional<std::size_t> previous_bend;
  std::optional<std::size_t> next_bend;
};

std::vector<FeedRun> feed_runs(const InstructionProgram& program) {
  std::vector<FeedRun> runs;
  std::optional<std::size_t> last_bend;
  FeedRun current;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const auto& ins = program[i];
    if (is_feed(ins)) {
      current.feeds.push_back(i);
    } else if (is_bend(ins)) {
      if (!current.feeds.empty()) {
        current.previous_bend = last_bend;
        current.next_bend = i;
        runs.push_back(std::move(current));
        current = {};
      }
      last_bend = i;
    }
  }
  if (!current.feeds.empty()) {
    current.previous_bend = last_bend;
    runs.push_back(std::move(current));
  }
  return runs;
}

/// Signed length change for one feed run, given unsigned design bend angles (0 = absent).
double run_adjustment(double previous_deg, double next_deg, const CompensationParams& p,
                      const FeedCompensationModel& model) {
  if (previous_deg == 0.0 && next_deg == 0.0) return 0.0;
  double delta = -2.0 * (p.wire_radius() - p.neutral_offset());
  if (previous_deg != 0.0) delta -= model.lost_length(previous_deg, p);
  if (next_deg != 0.0) delta += model.arc_length(next_deg, p) - model.lost_length(next_deg, p);
  return delta;
}

std::size_t adjusted_slot(const FeedRun& run) {
  return run.next_bend ? run.feeds.back() : run.feeds.front();
}

}  // namespace

void CompensationParams::validate() const {
  const double lengths[] = {bend_rod_radius, nozzle_rod_radius, setback_distance, wire_diameter, inner_bend_radius};
  for (double v : lengths) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("compensation lengths must be positive");
  }
  if (!(peg_arc_radius >= 0.0) || !std::isfinite(peg_arc_radius)) {
    throw InvalidInput("peg arc radius must be non-negative");
  }
  if (!(k_factor > 0.0 && k_factor < 1.0)) throw InvalidInput("K-factor must lie in (0, 1)");
  if (!(springback >= 0.0) || !std::isfinite(springback)) throw InvalidInput("springback must be non-negative");
}

double setback_commanded(double theta_deg, const CompensationParams& p) {
  if (!(std::abs(theta_deg) <= 180.0)) {
    throw InvalidInput("setback angle " + fmt_deg(theta_deg) + " outside [-180, 180]");
  }
  if (theta_deg == 0.0) return 0.0;
  const double mag = std::abs(theta_deg);
  // Both singular points send the asin argument to zero, as does R = 0 (setback disabled).
  if (mag == 90.0 || mag == 180.0 || p.peg_arc_radius == 0.0) return theta_deg;
  const double a = deg_to_rad(mag);
  const double s = std::sin(a);
  const double denom = p.setback_distance - p.bend_rod_radius / s - p.nozzle_rod_radius * std::tan(a);
  const double arg = p.peg_arc_radius * s / denom;
  if (!(std::abs(arg) <= 1.0)) {
    throw DomainError("setback model undefined at " + fmt_deg(theta_deg) + " deg: asin argument " + fmt_deg(arg) +
                      " outside [-1, 1]");
  }
  return sgn(theta_deg) * (mag + rad_to_deg(std::asin(arg)));
}

double springback_target(double theta_deg, const CompensationParams& p) {
  return theta_deg + sgn(theta_deg) * p.springback;
}

double combined_commanded(double theta_deg, const CompensationParams& p) {
  const double target = springback_target(theta_deg, p);
  if (std::abs(target) > 180.0) {
    throw DomainError("springback target " + fmt_deg(target) + " deg exceeds 180 for design angle " +
                      fmt_deg(theta_deg));
  }
  return setback_commanded(target, p);
}

double design_angle_for_command(double commanded_deg, const CompensationParams& p) {
  if (commanded_deg == 0.0) return 0.0;
  const double sign = sgn(commanded_deg);
  const double target = std::abs(commanded_deg);
  auto residual = [&](double x) -> std::optional<double> {
    try {
      return combined_commanded(x, p) - target;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };

  constexpr int kSamples = 3600;
  const double guess = target - p.springback;
  std::optional<double> best;
  std::optional<double> prev_r = residual(0.0);
  double prev_x = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    const double x = 180.0 * k / kSamples;
    const auto r = residual(x);
    if (prev_r && r && (*prev_r == 0.0 || (*prev_r < 0.0) != (*r < 0.0))) {
      double lo = prev_x;
      double hi = x;
      double r_lo = *prev_r;
      bool ok = true;
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto rm = residual(mid);
        if (!rm) {
          ok = false;
          break;
        }
        if ((*rm < 0.0) == (r_lo < 0.0)) {
          lo = mid;
          r_lo = *rm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      // Reject brackets straddling a pole of the setback term.
      const auto check = residual(root);
      if (ok && check && std::abs(*check) < 1e-7 && (!best || std::abs(root - guess) < std::abs(*best - guess))) {
        best = root;
      }
    }
    prev_x = x;
    prev_r = r;
  }
  if (!best) {
    throw DomainError("no design angle produces command " + fmt_deg(commanded_deg) + " deg");
  }
  return sign * *best;
}

FeedCompensationModel FeedCompensationModel::bend_deduction() {
  return {
      [](double theta_deg, const CompensationParams& p) {
        return std::tan(deg_to_rad(theta_deg) / 2.0) * (p.inner_bend_radius + p.wire_diameter);
      },
      [](double theta_deg, const CompensationParams& p) { return deg_to_rad(theta_deg) * p.neutral_radius(); },
  };
}

InstructionProgram adjust_feeds(const InstructionProgram& program, const CompensationParams& p, double min_feed,
                                const FeedCompensationModel& model) {
  if (program.error_corrected) throw InvalidInput("program is already error-corrected");
  InstructionProgram out = program;
  for (const auto& run : feed_runs(program)) {
    const double prev = run.previous_bend ? std::abs(program[*run.previous_bend].magnitude) : 0.0;
    const double next = run.next_bend ? std::abs(program[*run.next_bend].magnitude) : 0.0;
    const double delta = run_adjustment(prev, next, p, model);
    if (delta == 0.0) continue;
    const std::size_t slot = adjusted_slot(run);
    const double adjusted = program[slot].magnitude + delta;
    if (!(adjusted > 0.0) || adjusted < min_feed) {
      throw LimitError("instruction " + std::to_string(slot) + ": feed " + fmt_deg(program[slot].magnitude) +
                       " mm adjusts to " + fmt_deg(adjusted) + " mm, below the minimum feed " + fmt_deg(min_feed) +
                       " mm");
    }
    out.instructions[slot].magnitude = adjusted;
  }
  return out;
}

InstructionProgram apply_corrections(const InstructionProgram& program, const CompensationParams& p, double min_feed,
                                     const FeedCompensationModel& model) {
  if (program.error_corrected) throw InvalidInput("program is already error-corrected");
  InstructionProgram out = adjust_feeds(program, p, min_feed, model);
  for (auto& ins : out.instructions) {
    if (is_bend(ins)) ins.magnitude = combined_commanded(ins.magnitude, p);
  }
  out.error_corrected = true;
  return out;
}

InstructionProgram invert_corrections(const InstructionProgram& program, const CompensationParams& p,
                                      const FeedCompensationModel& model) {
  if (!program.error_corrected) throw InvalidInput("program is not error-corrected");
  InstructionProgram out = program;
  for (auto& ins : out.instructions) {
    if (is_bend(ins)) ins.magnitude = design_angle_for_command(ins.magnitude, p);
  }
  // Feed adjustments depend only on design angles, which are now known.
  for (const auto& run : feed_runs(out)) {
    const double prev = run.previous_bend ? std::abs(out[*run.previous_bend].magnitude) : 0.0;
    const double next = run.next_bend ? std::abs(out[*run.next_bend].magnitude) : 0.0;
    const double delta = run_adjustment(prev, next, p, model);
    out.instructions[adjusted_slot(run)].magnitude -= delta;
  }
  out.error_corrected = false;
  return out;
}

}  // namespace wirebend
