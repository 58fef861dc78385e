#include "wirebend/instructions.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

#include "wirebend/errors.hpp"

namespace wirebend {

namespace {

constexpr std::string_view kCorrectedMarker = "# error-corrected";

void append_magnitude(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  // Avoid "-0.0000" so emitted text is canonical.
  if (std::string_view(buf) == "-0.0000") {
    out += "0.0000";
  } else {
    out += buf;
  }
}

Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 probe = std::abs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalized(cross(v, probe));
}

}  // namespace

char command_letter(InstructionKind kind) {
  switch (kind) {
    case InstructionKind::Feed:
      return 'F';
    case InstructionKind::Bend:
      return 'B';
    case InstructionKind::Rotate:
      return 'R';
  }
  return '?';
}

void validate_program(const InstructionProgram& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& ins = p[i];
    const auto where = "instruction " + std::to_string(i) + ": ";
    if (!std::isfinite(ins.magnitude)) throw InvalidInput(where + "non-finite magnitude");
    switch (ins.kind) {
      case InstructionKind::Feed:
        if (ins.magnitude <= 0.0) throw InvalidInput(where + "feed must be positive");
        break;
      case InstructionKind::Bend:
        if (std::abs(ins.magnitude) > kMaxBendMagnitude) throw InvalidInput(where + "bend outside [-180, 180]");
        break;
      case InstructionKind::Rotate:
        if (std::abs(ins.magnitude) > kMaxRotateMagnitude) throw InvalidInput(where + "rotate outside [-360, 360]");
        break;
    }
  }
  if (!p.empty() && p[0].kind != InstructionKind::Feed) {
    throw InvalidInput("program must start with a feed");
  }
}

std::vector<double> polyline_bend_angles(std::span<const Vec3> points) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double deg = rad_to_deg(angle_between(points[i] - points[i - 1], points[i + 1] - points[i]));
    out.push_back(deg < kCollinearEpsilonDeg ? 0.0 : deg);
  }
  return out;
}

InstructionProgram compile_points(std::span<const Vec3> points) {
  if (points.size() < 2) throw InvalidInput("path needs at least two vertices");
  std::vector<Vec3> dirs;
  dirs.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec3 d = points[i + 1] - points[i];
    if (norm(d) == 0.0) {
      throw InvalidInput("zero-length edge between path positions " + std::to_string(i) + " and " +
                         std::to_string(i + 1));
    }
    dirs.push_back(d);
  }

  const auto bends = polyline_bend_angles(points);
  InstructionProgram prog;
  double pending_feed = norm(dirs[0]);
  Vec3 heading = normalized(dirs[0]);
  std::optional<Vec3> plane_normal;

  for (std::size_t i = 1; i < dirs.size(); ++i) {
    const Vec3& in = dirs[i - 1];
    const Vec3& out = dirs[i];
    const double bend_deg = bends[i - 1];
    if (bend_deg == 0.0) {
      pending_feed += norm(out);
      continue;
    }
    prog.instructions.push_back(Instruction::feed(pending_feed));

    const Vec3 n = cross(in, out);
    const bool defined = norm(n) > kDegenerateNormalEpsilon * norm(in) * norm(out);
    if (!plane_normal) {
      plane_normal = defined ? normalized(n) : any_perpendicular(heading);
    } else if (defined) {
      const Vec3 target = normalized(n);
      const double rot = rad_to_deg(signed_angle_about(*plane_normal, target, heading));
      if (std::abs(rot) >= kCollinearEpsilonDeg) prog.instructions.push_back(Instruction::rotate(rot));
      plane_normal = target;
    }
    // An undefined normal (reversal) keeps the current bend plane: rotation zero.
    prog.instructions.push_back(Instruction::bend(bend_deg));
    heading = normalized(out);
    pending_feed = norm(out);
  }
  prog.instructions.push_back(Instruction::feed(pending_feed));
  return prog;
}

InstructionProgram compile_path(const WireframeGraph& g, std::span<const VertexIndex> path) {
  if (path.size() < 2) throw InvalidInput("path needs at least two vertices");
  std::vector<Vec3> pts;
  pts.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= g.vertex_count()) throw InvalidInput("path references missing vertex " + std::to_string(path[i]));
    if (i > 0 && !g.has_edge(path[i - 1], path[i])) {
      throw InvalidInput("path step " + std::to_string(path[i - 1]) + " -> " + std::to_string(path[i]) +
                         " is not an edge");
    }
    pts.push_back(g.vertex(path[i]));
  }
  auto prog = compile_points(pts);
  prog.source_hash = g.content_hash();
  return prog;
}

std::string emit_text(const InstructionProgram& p) {
  std::string out;
  out.reserve(p.size() * 12 + kCorrectedMarker.size() + 1);
  if (p.error_corrected) {
    out += kCorrectedMarker;
    out += '\n';
  }
  for (const auto& ins : p.instructions) {
    out += command_letter(ins.kind);
    out += ' ';
    append_magnitude(out, ins.magnitude);
    out += '\n';
  }
  return out;
}

InstructionProgram parse_text(std::string_view text) {
  InstructionProgram prog;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    line = line.substr(first);
    if (line.front() == '#') {
      if (line.substr(0, kCorrectedMarker.size()) == kCorrectedMarker) prog.error_corrected = true;
      continue;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    InstructionKind kind;
    switch (line.front()) {
      case 'F':
        kind = InstructionKind::Feed;
        break;
      case 'B':
        kind = InstructionKind::Bend;
        break;
      case 'R':
        kind = InstructionKind::Rotate;
        break;
      default:
        throw ParseError(where + "unknown command '" + std::string(1, line.front()) + "'");
    }
    auto arg = line.substr(1);
    if (arg.empty() || (arg.front() != ' ' && arg.front() != '\t')) {
      throw ParseError(where + "expected a space after the command letter");
    }
    const auto a0 = arg.find_first_not_of(" \t");
    const auto a1 = arg.find_last_not_of(" \t");
    if (a0 == std::string_view::npos) throw ParseError(where + "missing magnitude");
    arg = arg.substr(a0, a1 - a0 + 1);
    double value = 0.0;
    const char* begin = arg.data();
    if (arg.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, arg.data() + arg.size(), value);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || !std::isfinite(value)) {
      throw ParseError(where + "non-numeric magnitude '" + std::string(arg) + "'");
    }
    const bool in_range = kind == InstructionKind::Feed    ? value > 0.0
                          : kind == InstructionKind::Bend ? std::abs(value) <= kMaxBendMagnitude
                                                          : std::abs(value) <= kMaxRotateMagnitude;
    if (!in_range) throw ParseError(where + "magnitude " + std::string(arg) + " out of range");
    prog.instructions.push_back({kind, value});
  }
  return prog;
}

double total_feed(const InstructionProgram& p) {
  double sum = 0.0;
  for (const auto& ins : p.instructions) {
    if (ins.kind == InstructionKind::Feed) sum += ins.magnitude;
  }
  return sum;
}

}  // namespace wirebend
