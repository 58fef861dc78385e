#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wirebend/geometry.hpp"
#include "wirebend/graph.hpp"

namespace wirebend {

enum class InstructionKind { Feed, Bend, Rotate };

char command_letter(InstructionKind kind);

/// Feed magnitudes are millimetres; Bend and Rotate are signed degrees.
struct Instruction {
  InstructionKind kind = InstructionKind::Feed;
  double magnitude = 0.0;

  static Instruction feed(double mm) { return {InstructionKind::Feed, mm}; }
  static Instruction bend(double deg) { return {InstructionKind::Bend, deg}; }
  static Instruction rotate(double deg) { return {InstructionKind::Rotate, deg}; }

  bool operator==(const Instruction&) const = default;
};

struct InstructionProgram {
  std::vector<Instruction> instructions;
  std::string source_hash;  // content hash of the graph it was compiled from, if any
  bool error_corrected = false;

  bool empty() const { return instructions.empty(); }
  std::size_t size() const { return instructions.size(); }
  const Instruction& operator[](std::size_t i) const { return instructions[i]; }

  bool operator==(const InstructionProgram&) const = default;
};

inline constexpr double kMaxBendMagnitude = 180.0;
inline constexpr double kMaxRotateMagnitude = 360.0;

/// Bends below this (degrees) count as straight continuation and are dropped.
inline constexpr double kCollinearEpsilonDeg = 1e-6;
/// Relative cross-product magnitude below which a bend-plane normal is undefined.
inline constexpr double kDegenerateNormalEpsilon = 1e-9;

/// Checks the per-instruction magnitude ranges and that a non-empty program starts with a Feed.
/// Throws InvalidInput.
void validate_program(const InstructionProgram& p);

/// Direction change at each interior point of a polyline, degrees in [0, 180];
/// element k belongs to points[k + 1]. Collinear continuations report 0.
std::vector<double> polyline_bend_angles(std::span<const Vec3> points);

/// Compiles a vertex polyline into F/R/B commands. Collinear vertices merge their feeds;
/// each bend after the first is preceded by a Rotate that carries the bend-plane change
/// (omitted when zero). Bend angles are unsigned.
InstructionProgram compile_points(std::span<const Vec3> points);

/// Compiles a traversal of `g`. Every consecutive pair in `path` must be an edge of `g`.
InstructionProgram compile_path(const WireframeGraph& g, std::span<const VertexIndex> path);

/// One command per line: letter, space, magnitude with four decimals, LF.
/// Corrected programs carry a leading "# error-corrected" comment line.
std::string emit_text(const InstructionProgram& p);

/// Inverse of emit_text. Blank lines and '#' comments are skipped. Throws ParseError.
InstructionProgram parse_text(std::string_view text);

/// Sum of all Feed magnitudes, mm.
double total_feed(const InstructionProgram& p);

}  // namespace wirebend
