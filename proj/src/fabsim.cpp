#include "wirebend/fabsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wirebend/errors.hpp"

namespace wirebend {

double WirePolyline::length() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) sum += distance(points[i - 1], points[i]);
  return sum;
}

void SimState::apply(const Instruction& ins, std::size_t source) {
  switch (ins.kind) {
    case InstructionKind::Feed:
      position += heading * ins.magnitude;
      emitted.points.push_back(position);
      emitted.segment_source.push_back(source);
      break;
    case InstructionKind::Rotate:
      plane_normal = rotate_about(plane_normal, heading, deg_to_rad(ins.magnitude));
      break;
    case InstructionKind::Bend:
      heading = rotate_about(heading, plane_normal, deg_to_rad(ins.magnitude));
      break;
  }
  // Re-orthonormalise so round-off cannot accumulate over long programs.
  heading = normalized(heading);
  plane_normal = normalized(plane_normal - heading * dot(plane_normal, heading));
  if (!std::isfinite(heading.x) || !std::isfinite(plane_normal.x)) {
    throw InvalidInput("simulation frame became degenerate at instruction " + std::to_string(source));
  }
}

WirePolyline simulate(const InstructionProgram& p, const SimulateOptions& options) {
  const InstructionProgram* program = &p;
  InstructionProgram design;
  if (p.error_corrected) {
    if (!options.compensation) {
      throw InvalidInput("corrected program needs compensation parameters to simulate design geometry");
    }
    design = invert_corrections(p, *options.compensation);
    program = &design;
  }
  SimState state;
  for (std::size_t i = 0; i < program->size(); ++i) state.apply((*program)[i], i);
  return std::move(state.emitted);
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Home:
      return "home";
    case EventKind::Feed:
      return "feed";
    case EventKind::Bend:
      return "bend";
    case EventKind::Rotate:
      return "rotate";
    case EventKind::Retract:
      return "retract";
  }
  return "unknown";
}

Timeline timeline(const InstructionProgram& p, const MachineProfile& profile) {
  Timeline t;
  double clock = 0.0;
  auto push = [&](std::optional<std::size_t> index, EventKind kind, double duration) {
    if (duration <= 0.0) return;
    t.events.push_back({index, clock, clock + duration, kind});
    clock += duration;
  };
  push(std::nullopt, EventKind::Home, profile.overheads.homing);
  double peg_side = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& ins = p[i];
    switch (ins.kind) {
      case InstructionKind::Feed:
        push(i, EventKind::Feed, ins.magnitude / profile.speeds.feed);
        break;
      case InstructionKind::Rotate:
        push(i, EventKind::Rotate, std::abs(ins.magnitude) / profile.speeds.rotate);
        break;
      case InstructionKind::Bend:
        if (ins.magnitude != 0.0) {
          const double side = ins.magnitude > 0.0 ? 1.0 : -1.0;
          if (side != peg_side) {
            push(i, EventKind::Retract, profile.overheads.peg_retract);
            peg_side = side;
          }
        }
        push(i, EventKind::Bend, 2.0 * std::abs(ins.magnitude) / profile.speeds.bend);
        break;
    }
  }
  t.total_time = clock;
  return t;
}

FabricationPlayer::FabricationPlayer(InstructionProgram program, const MachineProfile& profile)
    : program_(std::move(program)), timeline_(timeline(program_, profile)) {}

SimState FabricationPlayer::state_at(double t) const {
  SimState s;
  t = std::clamp(t, 0.0, timeline_.total_time);
  s.elapsed = t;
  for (const auto& ev : timeline_.events) {
    if (!ev.instruction || ev.kind == EventKind::Retract) continue;
    const auto& ins = program_[*ev.instruction];
    if (t >= ev.end) {
      s.apply(ins, *ev.instruction);
      continue;
    }
    if (t > ev.start) {
      double frac = (t - ev.start) / (ev.end - ev.start);
      if (ev.kind == EventKind::Bend) frac = std::min(1.0, 2.0 * frac);
      s.apply({ins.kind, ins.magnitude * frac}, *ev.instruction);
    }
    break;
  }
  return s;
}

const SimState& FabricationPlayer::advance(double dt) {
  while (dt > 0.0 && playhead_ < timeline_.total_time) {
    const auto it = std::find_if(timeline_.events.begin(), timeline_.events.end(),
                                 [&](const TimelineEvent& ev) { return playhead_ < ev.end; });
    if (it == timeline_.events.end()) break;
    double mult = speed.other;
    if (it->kind == EventKind::Feed) mult = speed.feed;
    if (it->kind == EventKind::Bend) mult = speed.bend;
    if (it->kind == EventKind::Rotate) mult = speed.rotate;
    if (mult <= 0.0) break;
    const double wall_needed = (it->end - playhead_) / mult;
    if (dt >= wall_needed) {
      playhead_ = it->end;
      dt -= wall_needed;
    } else {
      playhead_ += dt * mult;
      dt = 0.0;
    }
  }
  current_ = state_at(playhead_);
  return current_;
}

double FabricationPlayer::progress() const {
  return timeline_.total_time > 0.0 ? playhead_ / timeline_.total_time : 1.0;
}

void FabricationPlayer::reset() {
  playhead_ = 0.0;
  current_ = SimState{};
}

std::vector<SegmentPair> self_intersections(const WirePolyline& w, double wire_diameter) {
  const std::size_t n = w.segment_count();
  struct Box {
    double lo;
    double hi;
    std::size_t seg;
  };
  std::vector<Box> boxes;
  boxes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = w.points[i];
    const auto& b = w.points[i + 1];
    boxes.push_back({std::min(a.x, b.x) - wire_diameter, std::max(a.x, b.x) + wire_diameter, i});
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& l, const Box& r) { return l.lo < r.lo; });

  std::vector<SegmentPair> hits;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    for (std::size_t m = k + 1; m < boxes.size() && boxes[m].lo <= boxes[k].hi; ++m) {
      const auto i = std::min(boxes[k].seg, boxes[m].seg);
      const auto j = std::max(boxes[k].seg, boxes[m].seg);
      if (j - i < 2) continue;
      const double d = segment_distance(w.points[i], w.points[i + 1], w.points[j], w.points[j + 1]);
      if (d < wire_diameter) hits.emplace_back(i, j);
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::string polyline_to_svg(const WirePolyline& w, ProjectionView view, const std::vector<SegmentPair>& highlight) {
  auto project = [view](const Vec3& p) -> std::pair<double, double> {
    switch (view) {
      case ProjectionView::Top:
        return {p.x, -p.y};
      case ProjectionView::Front:
        return {p.x, -p.z};
      case ProjectionView::Side:
        return {p.y, -p.z};
      case ProjectionView::Isometric:
        break;
    }
    const double c = std::cos(deg_to_rad(30.0));
    return {(p.x - p.y) * c, (p.x + p.y) * 0.5 - p.z};
  };

  std::vector<std::pair<double, double>> pts;
  pts.reserve(w.points.size());
  for (const auto& p : w.points) pts.push_back(project(p));
  double minx = std::numeric_limits<double>::max(), miny = minx;
  double maxx = std::numeric_limits<double>::lowest(), maxy = maxx;
  for (const auto& [x, y] : pts) {
    minx = std::min(minx, x);
    maxx = std::max(maxx, x);
    miny = std::min(miny, y);
    maxy = std::max(maxy, y);
  }
  if (pts.empty()) minx = miny = maxx = maxy = 0.0;
  constexpr double kSize = 480.0;
  constexpr double kMargin = 10.0;
  const double span = std::max({maxx - minx, maxy - miny, 1e-9});
  const double scale = (kSize - 2 * kMargin) / span;

  std::vector<bool> hot(w.segment_count(), false);
  for (const auto& [i, j] : highlight) {
    if (i < hot.size()) hot[i] = true;
    if (j < hot.size()) hot[j] = true;
  }

  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                kSize, kSize, kSize, kSize);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  kMargin + (pts[i].first - minx) * scale, kMargin + (pts[i].second - miny) * scale,
                  kMargin + (pts[i + 1].first - minx) * scale, kMargin + (pts[i + 1].second - miny) * scale,
                  hot[i] ? "red" : "black");
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace wirebend
