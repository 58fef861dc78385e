#include "wirebend/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "wirebend/errors.hpp"

namespace wirebend {

namespace {

using nlohmann::json;

std::pair<VertexIndex, VertexIndex> ordered(VertexIndex i, VertexIndex j) {
  return i < j ? std::pair{i, j} : std::pair{j, i};
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  // from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto* begin = tok.data();
  if (!tok.empty() && tok.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

long parse_obj_index(std::string_view tok, std::size_t line_no) {
  // `l` records may carry texture indices as "i/t"; only the vertex part matters.
  tok = tok.substr(0, tok.find('/'));
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || v == 0) {
    throw ParseError("line " + std::to_string(line_no) + ": bad vertex index '" + std::string(tok) + "'");
  }
  return v;
}

WireframeGraph parse_json_graph(std::string_view doc) {
  json j;
  try {
    j = json::parse(doc);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON graph: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges") || !j["vertices"].is_array() ||
      !j["edges"].is_array()) {
    throw ParseError("graph document needs 'vertices' and 'edges' arrays");
  }
  WireframeGraph g;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      throw ParseError("vertex must be [x, y, z]");
    }
    g.add_vertex({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
  }
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw ParseError("edge must be [i, j] with integer indices");
    }
    const auto i = e[0].get<long long>();
    const auto k = e[1].get<long long>();
    if (i < 0 || k < 0) throw InvalidInput("edge index out of range");
    g.add_edge(static_cast<VertexIndex>(i), static_cast<VertexIndex>(k));
  }
  return g;
}

WireframeGraph parse_obj_graph(std::string_view doc, std::vector<std::string>* warnings) {
  WireframeGraph g;
  std::vector<std::pair<long, long>> pending;
  std::vector<std::size_t> pending_lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    const auto nl = doc.find('\n', pos);
    const auto raw = doc.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? doc.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto toks = split_ws(line);
    if (toks[0] == "v") {
      if (toks.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": 'v' needs x y z");
      g.add_vertex({parse_double(toks[1], line_no), parse_double(toks[2], line_no), parse_double(toks[3], line_no)});
    } else if (toks[0] == "l") {
      if (toks.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": 'l' needs two indices");
      for (std::size_t t = 1; t + 1 < toks.size(); ++t) {
        pending.emplace_back(parse_obj_index(toks[t], line_no), parse_obj_index(toks[t + 1], line_no));
        pending_lines.push_back(line_no);
      }
    } else if (warnings) {
      warnings->push_back("line " + std::to_string(line_no) + ": ignored OBJ record '" + std::string(toks[0]) + "'");
    }
  }
  // OBJ allows forward references, so edges resolve after all vertices are known.
  const auto n = static_cast<long>(g.vertex_count());
  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto resolve = [&](long idx) -> VertexIndex {
      const long zero_based = idx > 0 ? idx - 1 : n + idx;
      if (zero_based < 0 || zero_based >= n) {
        throw InvalidInput("line " + std::to_string(pending_lines[k]) + ": vertex index " + std::to_string(idx) +
                           " out of range");
      }
      return static_cast<VertexIndex>(zero_based);
    };
    g.add_edge(resolve(pending[k].first), resolve(pending[k].second));
  }
  return g;
}

}  // namespace

VertexIndex WireframeGraph::add_vertex(const Vec3& p) {
  vertices_.push_back(p);
  return vertices_.size() - 1;
}

bool WireframeGraph::add_edge(VertexIndex i, VertexIndex j) {
  if (i >= vertices_.size() || j >= vertices_.size()) {
    throw InvalidInput("edge (" + std::to_string(i) + ", " + std::to_string(j) + ") references a missing vertex");
  }
  if (i == j) throw InvalidInput("self-loop at vertex " + std::to_string(i));
  if (has_edge(i, j)) return false;
  const auto [a, b] = ordered(i, j);
  edges_.push_back({a, b, edges_.size()});
  return true;
}

bool WireframeGraph::remove_edge(VertexIndex i, VertexIndex j) {
  const auto [a, b] = ordered(i, j);
  const auto it = std::find_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.a == a && e.b == b; });
  if (it == edges_.end()) return false;
  edges_.erase(it);
  for (std::size_t k = 0; k < edges_.size(); ++k) edges_[k].id = k;
  return true;
}

bool WireframeGraph::has_edge(VertexIndex i, VertexIndex j) const {
  const auto [a, b] = ordered(i, j);
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.a == a && e.b == b; });
}

std::vector<std::size_t> WireframeGraph::degrees() const {
  std::vector<std::size_t> deg(vertices_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

std::string WireframeGraph::content_hash() const {
  const auto text = graph_to_json(*this);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

WireframeGraph ingest_graph(std::string_view document, GraphFormat format, std::vector<std::string>* warnings) {
  if (format == GraphFormat::Auto) {
    const auto body = trim(document);
    format = (!body.empty() && body.front() == '{') ? GraphFormat::Json : GraphFormat::Obj;
  }
  WireframeGraph g = format == GraphFormat::Json ? parse_json_graph(document) : parse_obj_graph(document, warnings);
  if (warnings) {
    const auto deg = g.degrees();
    for (VertexIndex v = 0; v < deg.size(); ++v) {
      if (deg[v] == 0) warnings->push_back("vertex " + std::to_string(v) + " is isolated");
    }
  }
  return g;
}

std::string graph_to_json(const WireframeGraph& g) {
  json j;
  j["vertices"] = json::array();
  for (const auto& v : g.vertices()) j["vertices"].push_back({v.x, v.y, v.z});
  j["edges"] = json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({e.a, e.b});
  return j.dump();
}

const char* to_string(EulerClass c) {
  switch (c) {
    case EulerClass::Circuit:
      return "circuit";
    case EulerClass::Trail:
      return "trail";
    case EulerClass::None:
      return "none";
  }
  return "none";
}

EulerStatus euler_status(const WireframeGraph& g) {
  EulerStatus status;
  const auto deg = g.degrees();
  for (VertexIndex v = 0; v < deg.size(); ++v) {
    if (deg[v] % 2 == 1) status.odd_vertices.push_back(v);
  }
  if (g.edge_count() == 0) return status;

  // Union-find over non-isolated vertices.
  std::vector<VertexIndex> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), VertexIndex{0});
  auto find = [&](VertexIndex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : g.edges()) parent[find(e.a)] = find(e.b);
  VertexIndex root = g.vertex_count();
  status.connected = true;
  for (VertexIndex v = 0; v < deg.size(); ++v) {
    if (deg[v] == 0) continue;
    if (root == g.vertex_count()) {
      root = find(v);
    } else if (find(v) != root) {
      status.connected = false;
      break;
    }
  }
  if (status.connected && status.odd_vertices.empty()) {
    status.classification = EulerClass::Circuit;
  } else if (status.connected && status.odd_vertices.size() == 2) {
    status.classification = EulerClass::Trail;
  }
  return status;
}

std::vector<VertexIndex> euler_path(const WireframeGraph& g) {
  const auto status = euler_status(g);
  if (status.classification == EulerClass::None) {
    throw InvalidInput(status.connected ? "graph has " + std::to_string(status.odd_vertices.size()) +
                                              " odd-degree vertices; an Euler path needs 0 or 2"
                                        : "graph is not an Euler graph: edges are not connected");
  }

  struct Arc {
    VertexIndex to;
    EdgeId edge;
  };
  std::vector<std::vector<Arc>> adj(g.vertex_count());
  for (const auto& e : g.edges()) {
    adj[e.a].push_back({e.b, e.id});
    adj[e.b].push_back({e.a, e.id});
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [](const Arc& l, const Arc& r) { return l.to < r.to; });
  }

  VertexIndex start = 0;
  if (status.classification == EulerClass::Trail) {
    start = status.odd_vertices.front();
  } else {
    while (adj[start].empty()) ++start;
  }

  std::vector<bool> used(g.edge_count(), false);
  std::vector<std::size_t> cursor(g.vertex_count(), 0);
  std::vector<VertexIndex> stack{start};
  std::vector<VertexIndex> out;
  out.reserve(g.edge_count() + 1);
  while (!stack.empty()) {
    const VertexIndex v = stack.back();
    auto& c = cursor[v];
    while (c < adj[v].size() && used[adj[v][c].edge]) ++c;
    if (c == adj[v].size()) {
      out.push_back(v);
      stack.pop_back();
    } else {
      used[adj[v][c].edge] = true;
      stack.push_back(adj[v][c].to);
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace wirebend
