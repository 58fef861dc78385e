#include "wirebend/fabcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace wirebend {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

/// Component label per vertex (union-find root); isolated vertices keep their own label.
std::vector<VertexIndex> component_labels(const WireframeGraph& g) {
  std::vector<VertexIndex> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), VertexIndex{0});
  auto find = [&](VertexIndex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : g.edges()) parent[find(e.a)] = find(e.b);
  std::vector<VertexIndex> label(g.vertex_count());
  for (VertexIndex v = 0; v < label.size(); ++v) label[v] = find(v);
  return label;
}

void add_euler_findings(const WireframeGraph& g, Diagnostics& d) {
  const auto deg = g.degrees();
  const bool parity_ok = d.euler.odd_vertices.size() <= 2;

  // With several components, everything outside the one holding most edges is flagged.
  std::vector<bool> off_main(g.vertex_count(), false);
  if (!d.euler.connected && g.edge_count() > 0) {
    const auto label = component_labels(g);
    std::map<VertexIndex, std::size_t> edges_per_component;
    for (const auto& e : g.edges()) ++edges_per_component[label[e.a]];
    const auto main = std::max_element(edges_per_component.begin(), edges_per_component.end(),
                                       [](const auto& l, const auto& r) { return l.second < r.second; })
                          ->first;
    for (VertexIndex v = 0; v < off_main.size(); ++v) off_main[v] = deg[v] > 0 && label[v] != main;
  }

  for (VertexIndex v = 0; v < deg.size(); ++v) {
    if (deg[v] == 0) continue;
    VertexFinding f{v, VertexCheck::Eulericity, true, "", static_cast<double>(deg[v])};
    const bool odd = deg[v] % 2 == 1;
    if (odd && !parity_ok) {
      f.pass = false;
      f.detail = "odd degree " + std::to_string(deg[v]) + "; " + std::to_string(d.euler.odd_vertices.size()) +
                 " odd vertices, an Euler path allows 0 or 2";
    } else if (off_main[v]) {
      f.pass = false;
      f.detail = "not connected to the main wireframe";
    } else {
      f.detail = odd ? "odd degree, path endpoint" : "even degree";
    }
    d.vertex_findings.push_back(std::move(f));
  }
}

void add_bend_findings(const WireframeGraph& g, const MachineProfile& limits, Diagnostics& d) {
  std::vector<Vec3> pts;
  pts.reserve(d.path.size());
  for (auto v : d.path) pts.push_back(g.vertex(v));
  const auto bends = polyline_bend_angles(pts);

  std::vector<std::optional<double>> worst(g.vertex_count());
  for (std::size_t k = 0; k < bends.size(); ++k) {
    auto& w = worst[d.path[k + 1]];
    w = std::max(w.value_or(0.0), bends[k]);
  }
  const auto deg = g.degrees();
  for (VertexIndex v = 0; v < deg.size(); ++v) {
    if (deg[v] < 2) continue;
    VertexFinding f{v, VertexCheck::BendAngle, true, "", worst[v].value_or(0.0)};
    f.pass = f.measured <= limits.bend.max_bend + kLimitTolerance;
    if (!worst[v]) {
      f.detail = "path endpoint, no bend";
    } else {
      f.detail = fmt("bend %.4f deg", f.measured) + fmt(" (interior angle %.4f deg)", 180.0 - f.measured) +
                 (f.pass ? "" : fmt(" exceeds limit %.4f deg", limits.bend.max_bend));
    }
    d.vertex_findings.push_back(std::move(f));
  }
}

}  // namespace

const char* to_string(VertexCheck c) {
  return c == VertexCheck::Eulericity ? "eulericity" : "bend_angle";
}

const char* to_string(ProgramCheck c) {
  switch (c) {
    case ProgramCheck::MinFeed:
      return "min_feed";
    case ProgramCheck::StockLength:
      return "stock_length";
    case ProgramCheck::BendRange:
      return "bend_range";
    case ProgramCheck::RotateCumulative:
      return "rotate_cumulative";
  }
  return "unknown";
}

std::size_t Diagnostics::failure_count(VertexCheck check) const {
  return static_cast<std::size_t>(std::count_if(vertex_findings.begin(), vertex_findings.end(),
                                                [&](const VertexFinding& f) { return f.check == check && !f.pass; }));
}

std::size_t Diagnostics::edge_failure_count() const {
  return static_cast<std::size_t>(
      std::count_if(edge_findings.begin(), edge_findings.end(), [](const EdgeFinding& f) { return !f.pass; }));
}

std::size_t ProgramDiagnostics::failure_count(ProgramCheck check) const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                [&](const ProgramFinding& f) { return f.check == check && !f.pass; }));
}

Diagnostics check_all(const WireframeGraph& g, const MachineProfile& limits) {
  Diagnostics d;
  d.euler = euler_status(g);
  d.euler_pass = d.euler.classification != EulerClass::None;
  const auto deg = g.degrees();
  for (VertexIndex v = 0; v < deg.size(); ++v) {
    if (deg[v] == 0) d.warnings.push_back("vertex " + std::to_string(v) + " is isolated");
  }
  if (g.edge_count() == 0) d.warnings.push_back("graph has no edges");

  add_euler_findings(g, d);
  if (d.euler_pass) {
    d.path = euler_path(g);
    add_bend_findings(g, limits, d);
  }

  for (const auto& e : g.edges()) {
    const double len = distance(g.vertex(e.a), g.vertex(e.b));
    d.edge_findings.push_back({e.a, e.b, e.id, len >= limits.limits.min_edge - kLimitTolerance, len});
  }

  d.overall_fabricable =
      d.euler_pass && std::none_of(d.vertex_findings.begin(), d.vertex_findings.end(),
                                   [](const VertexFinding& f) { return !f.pass; }) &&
      std::none_of(d.edge_findings.begin(), d.edge_findings.end(), [](const EdgeFinding& f) { return !f.pass; });
  return d;
}

ProgramDiagnostics check_program(const InstructionProgram& p, const MachineProfile& limits) {
  ProgramDiagnostics d;
  d.feed_budget = limits.limits.stock_length - limits.limits.tail_reserve;
  const double bend_limit = p.error_corrected ? limits.bend.hard_stop : limits.bend.max_bend;
  double rotation = 0.0;
  bool stock_reported = false;

  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& ins = p[i];
    switch (ins.kind) {
      case InstructionKind::Feed: {
        ProgramFinding f{i, ProgramCheck::MinFeed, ins.magnitude >= limits.limits.min_feed - kLimitTolerance,
                         ins.magnitude, limits.limits.min_feed, ""};
        if (!f.pass) f.detail = fmt("feed %.4f mm", ins.magnitude) + fmt(" below minimum %.4f mm", f.limit);
        d.findings.push_back(std::move(f));
        d.total_feed += ins.magnitude;
        if (!stock_reported && d.total_feed > d.feed_budget + kLimitTolerance) {
          stock_reported = true;
          d.findings.push_back({i, ProgramCheck::StockLength, false, d.total_feed, d.feed_budget,
                                fmt("cumulative feed %.4f mm", d.total_feed) +
                                    fmt(" exceeds stock budget %.4f mm", d.feed_budget)});
        }
        break;
      }
      case InstructionKind::Bend: {
        const double mag = std::abs(ins.magnitude);
        ProgramFinding f{i, ProgramCheck::BendRange, mag <= bend_limit + kLimitTolerance, ins.magnitude, bend_limit,
                         ""};
        if (!f.pass) f.detail = fmt("bend %.4f deg", ins.magnitude) + fmt(" outside +-%.4f deg", bend_limit);
        d.findings.push_back(std::move(f));
        break;
      }
      case InstructionKind::Rotate: {
        rotation += ins.magnitude;
        if (std::abs(rotation) > std::abs(d.peak_cumulative_rotation)) d.peak_cumulative_rotation = rotation;
        const double cap = limits.rotate.max_cumulative;
        ProgramFinding f{i, ProgramCheck::RotateCumulative, std::abs(rotation) <= cap + kLimitTolerance, rotation, cap,
                         ""};
        if (!f.pass) f.detail = fmt("cumulative rotation %.4f deg", rotation) + fmt(" beyond +-%.4f deg", cap);
        d.findings.push_back(std::move(f));
        break;
      }
    }
  }
  if (!stock_reported) {
    d.findings.push_back({p.empty() ? 0 : p.size() - 1, ProgramCheck::StockLength, true, d.total_feed, d.feed_budget,
                          ""});
  }
  d.fabricable =
      std::none_of(d.findings.begin(), d.findings.end(), [](const ProgramFinding& f) { return !f.pass; });
  return d;
}

}  // namespace wirebend
