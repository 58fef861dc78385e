#pragma once

// Independent reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "wirebend/geometry.hpp"
#include "wirebend/graph.hpp"
#include "wirebend/instructions.hpp"

namespace oracle {

using wirebend::Vec3;
using wirebend::VertexIndex;
using wirebend::WireframeGraph;

/// Exhaustive search for edge-exhausting walks, from every start vertex.
struct WalkSearch {
  bool open_walk = false;    // some walk uses every edge once and ends elsewhere
  bool closed_walk = false;  // some walk uses every edge once and returns to its start
};

inline WalkSearch search_walks(const WireframeGraph& g) {
  WalkSearch out;
  const auto& edges = g.edges();
  if (edges.empty()) return out;
  std::vector<bool> used(edges.size(), false);
  std::function<void(VertexIndex, VertexIndex, std::size_t)> dfs = [&](VertexIndex start, VertexIndex at,
                                                                        std::size_t depth) {
    if (out.open_walk && out.closed_walk) return;
    if (depth == edges.size()) {
      (at == start ? out.closed_walk : out.open_walk) = true;
      return;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (used[e]) continue;
      VertexIndex next;
      if (edges[e].a == at) {
        next = edges[e].b;
      } else if (edges[e].b == at) {
        next = edges[e].a;
      } else {
        continue;
      }
      used[e] = true;
      dfs(start, next, depth + 1);
      used[e] = false;
    }
  };
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) dfs(v, v, 0);
  return out;
}

/// True when `path` walks every edge of g exactly once.
inline bool uses_every_edge_once(const WireframeGraph& g, const std::vector<VertexIndex>& path) {
  if (g.edge_count() == 0) return path.size() <= 1;
  if (path.size() != g.edge_count() + 1) return false;
  std::multiset<std::pair<VertexIndex, VertexIndex>> walked;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    walked.insert({std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1])});
  }
  std::multiset<std::pair<VertexIndex, VertexIndex>> expected;
  for (const auto& e : g.edges()) expected.insert({e.a, e.b});
  return walked == expected;
}

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = wirebend::dot(ab, ab);
  double t = len2 > 0 ? wirebend::dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return wirebend::norm(p - (a + ab * t));
}

/// Segment distance by ternary search over the first segment's parameter; the
/// point-to-segment distance is convex along it.
inline double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  double lo = 0.0, hi = 1.0;
  auto f = [&](double s) { return point_segment_distance(p0 + (p1 - p0) * s, q0, q1); };
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min({f(0.0), f(1.0), f((lo + hi) / 2.0)});
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v{n(rng), n(rng), n(rng)};
    const double len = wirebend::norm(v);
    if (len > 1e-6) return v / len;
  }
}

/// Random program: leading feed, then mixed F/B/R with magnitudes inside the format ranges.
inline wirebend::InstructionProgram random_program(std::mt19937_64& rng, std::size_t max_len = 30) {
  using wirebend::Instruction;
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> feed(0.0001, 500.0);
  std::uniform_real_distribution<double> bend(-180.0, 180.0);
  std::uniform_real_distribution<double> rot(-360.0, 360.0);
  auto q = [](double v) { return std::round(v * 1e4) / 1e4; };
  wirebend::InstructionProgram p;
  const auto n = len(rng);
  p.instructions.push_back(Instruction::feed(q(feed(rng))));
  while (p.size() < n) {
    switch (kind(rng)) {
      case 0:
        p.instructions.push_back(Instruction::feed(q(feed(rng))));
        break;
      case 1:
        p.instructions.push_back(Instruction::bend(q(bend(rng))));
        break;
      default:
        p.instructions.push_back(Instruction::rotate(q(rot(rng))));
        break;
    }
  }
  return p;
}

/// Random open polyline: each step turns by at most `max_bend` degrees and has length in
/// [min_len, max_len]. Consecutive directions never reverse.
inline std::vector<Vec3> random_polyline(std::mt19937_64& rng, std::size_t vertices, double min_len, double max_len,
                                         double max_bend) {
  std::uniform_real_distribution<double> length(min_len, max_len);
  std::uniform_real_distribution<double> turn(0.5, max_bend);
  std::vector<Vec3> pts{random_unit(rng) * 10.0};
  Vec3 dir = random_unit(rng);
  for (std::size_t i = 1; i < vertices; ++i) {
    if (i > 1) {
      Vec3 axis = wirebend::cross(dir, random_unit(rng));
      axis = axis / wirebend::norm(axis);
      dir = wirebend::rotate_about(dir, axis, wirebend::deg_to_rad(turn(rng)));
    }
    pts.push_back(pts.back() + dir * length(rng));
  }
  return pts;
}

}  // namespace oracle
