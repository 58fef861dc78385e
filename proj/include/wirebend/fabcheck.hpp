#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wirebend/graph.hpp"
#include "wirebend/instructions.hpp"
#include "wirebend/machine/profile.hpp"

namespace wirebend {

/// Limits compare with this slack so a value built to sit exactly on a limit passes
/// despite floating-point round-off in its geometry.
inline constexpr double kLimitTolerance = 1e-9;

enum class VertexCheck { Eulericity, BendAngle };
enum class ProgramCheck { MinFeed, StockLength, BendRange, RotateCumulative };

const char* to_string(VertexCheck c);
const char* to_string(ProgramCheck c);

struct VertexFinding {
  VertexIndex vertex = 0;
  VertexCheck check = VertexCheck::Eulericity;
  bool pass = true;
  std::string detail;
  double measured = 0.0;  // degree for eulericity, degrees of bend for bend_angle
};

struct EdgeFinding {
  VertexIndex a = 0;
  VertexIndex b = 0;
  EdgeId edge = 0;
  bool pass = true;
  double length = 0.0;  // mm
};

struct Diagnostics {
  EulerStatus euler;
  bool euler_pass = false;
  std::vector<VertexIndex> path;  // traced Euler path when one exists
  std::vector<VertexFinding> vertex_findings;
  std::vector<EdgeFinding> edge_findings;
  std::vector<std::string> warnings;
  bool overall_fabricable = false;

  std::size_t failure_count(VertexCheck check) const;
  std::size_t edge_failure_count() const;
};

/// Design-level checks: Euler trail or circuit, bend angle at every traced vertex
/// (|bend| <= bend.max_bend) and edge length (>= limits.min_edge). Never throws on
/// a valid graph; every problem is a finding.
Diagnostics check_all(const WireframeGraph& g, const MachineProfile& limits);

struct ProgramFinding {
  std::size_t instruction = 0;
  ProgramCheck check = ProgramCheck::MinFeed;
  bool pass = true;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct ProgramDiagnostics {
  std::vector<ProgramFinding> findings;
  double total_feed = 0.0;           // mm
  double feed_budget = 0.0;          // stock_length - tail_reserve, mm
  double peak_cumulative_rotation = 0.0;  // signed running sum with the largest magnitude
  bool fabricable = true;

  std::size_t failure_count(ProgramCheck check) const;
};

/// Machine operating intervals: each feed >= min_feed, cumulative feed within the stock
/// budget, |bend| <= max_bend (hard_stop for corrected programs), running rotation sum
/// within +-max_cumulative.
ProgramDiagnostics check_program(const InstructionProgram& p, const MachineProfile& limits);

}  // namespace wirebend
