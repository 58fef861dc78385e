#include "wirebend/json_io.hpp"

#include <cmath>

#include "wirebend/errors.hpp"

namespace wirebend {

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }

void to_json(json& j, const EulerStatus& s) {
  j = json{{"classification", to_string(s.classification)}, {"odd_vertices", s.odd_vertices},
           {"connected", s.connected}};
}

void to_json(json& j, const Diagnostics& d) {
  json vertices = json::array();
  for (const auto& f : d.vertex_findings) {
    vertices.push_back({{"vertex", f.vertex},
                        {"check", to_string(f.check)},
                        {"status", f.pass ? "pass" : "fail"},
                        {"detail", f.detail},
                        {"measured", f.measured}});
  }
  json edges = json::array();
  for (const auto& f : d.edge_findings) {
    edges.push_back({{"edge", json::array({f.a, f.b})},
                     {"edge_id", f.edge},
                     {"check", "min_length"},
                     {"status", f.pass ? "pass" : "fail"},
                     {"measured", f.length}});
  }
  j = json{{"euler", json{{"status", d.euler}, {"pass", d.euler_pass}}},
           {"path", d.path},
           {"vertex_findings", vertices},
           {"edge_findings", edges},
           {"warnings", d.warnings},
           {"overall_fabricable", d.overall_fabricable}};
}

void to_json(json& j, const ProgramDiagnostics& d) {
  json findings = json::array();
  for (const auto& f : d.findings) {
    findings.push_back({{"instruction", f.instruction},
                        {"check", to_string(f.check)},
                        {"status", f.pass ? "pass" : "fail"},
                        {"measured", f.measured},
                        {"limit", f.limit},
                        {"detail", f.detail}});
  }
  j = json{{"findings", findings},
           {"total_feed", d.total_feed},
           {"feed_budget", d.feed_budget},
           {"peak_cumulative_rotation", d.peak_cumulative_rotation},
           {"fabricable", d.fabricable}};
}

void to_json(json& j, const InstructionProgram& p) {
  json list = json::array();
  for (const auto& ins : p.instructions) {
    list.push_back({{"kind", std::string(1, command_letter(ins.kind))}, {"magnitude", ins.magnitude}});
  }
  j = json{{"instructions", list}, {"error_corrected", p.error_corrected}, {"source_hash", p.source_hash}};
}

void to_json(json& j, const WirePolyline& w) {
  json points = json::array();
  for (const auto& p : w.points) points.push_back(p);
  j = json{{"points", points}, {"segment_source", w.segment_source}, {"length", w.length()}};
}

void to_json(json& j, const Timeline& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    events.push_back({{"instruction", e.instruction ? json(*e.instruction) : json(nullptr)},
                      {"kind", to_string(e.kind)},
                      {"start", e.start},
                      {"end", e.end}});
  }
  j = json{{"events", events}, {"total_time", t.total_time}};
}

void to_json(json& j, const TorqueFeasibility& f) {
  j = json{{"required", f.required},
           {"available", f.available},
           {"margin", std::isfinite(f.margin) ? json(f.margin) : json(nullptr)},
           {"fabricable", f.fabricable}};
}

void to_json(json& j, const RunReport& r) {
  j = json{{"status", to_string(r.status)},
           {"commands_total", r.commands_total},
           {"commands_acknowledged", r.commands_acknowledged},
           {"steps", r.steps},
           {"error", r.error},
           {"seconds", r.seconds}};
}

Instruction instruction_from_json(const json& item) {
  if (!item.is_object() || !item.contains("kind") || !item.contains("magnitude") || !item["kind"].is_string() ||
      !item["magnitude"].is_number()) {
    throw ParseError("instruction needs 'kind' (F, B or R) and numeric 'magnitude'");
  }
  const auto kind = item["kind"].get<std::string>();
  const double m = item["magnitude"].get<double>();
  Instruction ins;
  if (kind == "F") {
    ins = Instruction::feed(m);
  } else if (kind == "B") {
    ins = Instruction::bend(m);
  } else if (kind == "R") {
    ins = Instruction::rotate(m);
  } else {
    throw ParseError("unknown instruction kind '" + kind + "'");
  }
  InstructionProgram single;
  if (ins.kind != InstructionKind::Feed) single.instructions.push_back(Instruction::feed(1.0));
  single.instructions.push_back(ins);
  try {
    validate_program(single);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return ins;
}

InstructionProgram program_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("program must be a JSON object");
  if (j.contains("text")) {
    if (!j["text"].is_string()) throw ParseError("'text' must be a string");
    return parse_text(j["text"].get<std::string>());
  }
  if (!j.contains("instructions") || !j["instructions"].is_array()) {
    throw ParseError("program needs an 'instructions' array or a 'text' field");
  }
  InstructionProgram p;
  for (const auto& item : j["instructions"]) p.instructions.push_back(instruction_from_json(item));
  p.error_corrected = j.value("error_corrected", false);
  p.source_hash = j.value("source_hash", std::string{});
  try {
    validate_program(p);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return p;
}

json error_json(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  return json{{"error", json{{"kind", err ? err->kind() : "internal"}, {"message", e.what()}}}};
}

}  // namespace wirebend
