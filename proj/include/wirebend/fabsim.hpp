#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wirebend/errormodel.hpp"
#include "wirebend/geometry.hpp"
#include "wirebend/instructions.hpp"
#include "wirebend/machine/profile.hpp"

namespace wirebend {

struct WirePolyline {
  std::vector<Vec3> points;
  std::vector<std::size_t> segment_source;  // instruction index that produced each segment

  std::size_t segment_count() const { return points.empty() ? 0 : points.size() - 1; }
  double length() const;
};

/// Turtle frame of the wire end. heading and plane_normal stay orthonormal.
struct SimState {
  Vec3 position{0, 0, 0};
  Vec3 heading{1, 0, 0};
  Vec3 plane_normal{0, 0, 1};
  WirePolyline emitted;
  double elapsed = 0.0;  // seconds, only advanced by the timed player

  SimState() { emitted.points.push_back(position); }

  /// Applies one instruction: Feed moves along heading and emits a point, Rotate spins
  /// plane_normal about heading, Bend turns heading about plane_normal (right-hand rule).
  /// `source` tags the emitted segment.
  void apply(const Instruction& ins, std::size_t source);
};

struct SimulateOptions {
  /// Corrected programs are mapped back to design values with these parameters before
  /// simulation so the polyline shows intended geometry. Ignored for uncorrected programs.
  std::optional<CompensationParams> compensation;
};

/// Forward kinematics from the origin, heading +X, bend plane normal +Z.
/// Throws InvalidInput for a corrected program without compensation parameters.
WirePolyline simulate(const InstructionProgram& p, const SimulateOptions& options = {});

enum class EventKind { Home, Feed, Bend, Rotate, Retract };

const char* to_string(EventKind k);

struct TimelineEvent {
  std::optional<std::size_t> instruction;  // empty for the homing event
  double start = 0.0;
  double end = 0.0;
  EventKind kind = EventKind::Feed;
};

struct Timeline {
  std::vector<TimelineEvent> events;
  double total_time = 0.0;
};

/// Duration = magnitude / axis speed; a bend sweeps out and back (2x); a peg retract
/// overhead precedes any bend whose direction differs from the previous one (the peg starts
/// on the positive side); homing is prepended. Zero-length events are omitted.
Timeline timeline(const InstructionProgram& p, const MachineProfile& profile);

/// Steps a program through time for animation. Instructions are applied fractionally:
/// a bend follows its outward sweep and holds during the return.
class FabricationPlayer {
 public:
  FabricationPlayer(InstructionProgram program, const MachineProfile& profile);

  const Timeline& schedule() const { return timeline_; }
  double total_time() const { return timeline_.total_time; }

  /// State at absolute time t (clamped to [0, total]).
  SimState state_at(double t) const;

  /// Moves the playhead by dt seconds, scaled per event kind by `speed` multipliers.
  const SimState& advance(double dt);
  double position() const { return playhead_; }
  double progress() const;
  void reset();

  struct SpeedMultipliers {
    double feed = 1.0;
    double bend = 1.0;
    double rotate = 1.0;
    double other = 1.0;
  } speed;

 private:
  InstructionProgram program_;
  Timeline timeline_;
  double playhead_ = 0.0;
  SimState current_;
};

using SegmentPair = std::pair<std::size_t, std::size_t>;

/// Non-adjacent segment pairs closer than `wire_diameter`, sorted (i < j). Uses a
/// sweep along x over padded bounding boxes.
std::vector<SegmentPair> self_intersections(const WirePolyline& w, double wire_diameter);

enum class ProjectionView { Top, Front, Side, Isometric };

/// Orthographic projection of the polyline as a standalone SVG document.
std::string polyline_to_svg(const WirePolyline& w, ProjectionView view = ProjectionView::Isometric,
                            const std::vector<SegmentPair>& highlight = {});

}  // namespace wirebend
