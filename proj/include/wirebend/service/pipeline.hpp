#pragma once

// The operations behind both the CLI and the HTTP API, so the two cannot drift apart.

#include <optional>
#include <string>
#include <vector>

#include "wirebend/fabcheck.hpp"
#include "wirebend/fabsim.hpp"
#include "wirebend/graph.hpp"
#include "wirebend/instructions.hpp"
#include "wirebend/json_io.hpp"
#include "wirebend/machine/profile.hpp"

namespace wirebend {

struct GraphInput {
  WireframeGraph graph;
  std::vector<std::string> warnings;
};

/// Reads a graph from a file path; the format follows the extension (.obj or JSON).
GraphInput read_graph_file(const std::string& path);

/// Accepts the graph as the body itself, under "graph", or as OBJ text under "obj".
GraphInput graph_from_request(const json& body);

struct CompileOptions {
  bool correct = true;
  /// Explicit traversal; the traced Euler path otherwise.
  std::optional<std::vector<VertexIndex>> path;
};

/// Reads {"options": {"correct": bool, "path": [..]}} with "no_correct": true as a shorthand.
CompileOptions compile_options_from_json(const json& body);

struct CompileResult {
  InstructionProgram program;
  std::string text;  // emit_text(program)
  std::vector<VertexIndex> path;
  std::vector<std::string> warnings;
};

/// Traces the graph, compiles it and (by default) applies the error model with the
/// profile's compensation constants and minimum feed. Throws InvalidInput when no Euler
/// path exists and LimitError / DomainError from the correction pass.
CompileResult compile_graph(const GraphInput& input, const MachineProfile& profile, const CompileOptions& options = {});

struct SimulationResult {
  WirePolyline polyline;
  Timeline timeline;
  std::vector<SegmentPair> intersections;
  ProgramDiagnostics diagnostics;
};

/// Polyline (design geometry for corrected programs), machine timeline, self-intersections
/// at the profile's wire diameter and the program limit checks.
SimulationResult simulate_program(const InstructionProgram& program, const MachineProfile& profile);

struct Estimate {
  double seconds = 0.0;
  double material_mm = 0.0;
  double cost = 0.0;  // dollars
};

Estimate estimate(const InstructionProgram& program, const MachineProfile& profile);

void to_json(json& j, const CompileResult& r);
void to_json(json& j, const SimulationResult& r);
void to_json(json& j, const Estimate& e);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace wirebend
