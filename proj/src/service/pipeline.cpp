#include "wirebend/service/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "wirebend/errormodel.hpp"
#include "wirebend/errors.hpp"

namespace wirebend {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

GraphInput read_graph_file(const std::string& path) {
  const auto text = read_file(path);
  const bool obj = path.size() >= 4 && (path.ends_with(".obj") || path.ends_with(".OBJ"));
  GraphInput in;
  in.graph = ingest_graph(text, obj ? GraphFormat::Obj : GraphFormat::Auto, &in.warnings);
  return in;
}

GraphInput graph_from_request(const json& body) {
  if (!body.is_object()) throw ParseError("request body must be a JSON object");
  GraphInput in;
  if (body.contains("obj")) {
    if (!body["obj"].is_string()) throw ParseError("'obj' must be a string");
    in.graph = ingest_graph(body["obj"].get<std::string>(), GraphFormat::Obj, &in.warnings);
  } else if (body.contains("graph")) {
    in.graph = ingest_graph(body["graph"].dump(), GraphFormat::Json, &in.warnings);
  } else {
    in.graph = ingest_graph(body.dump(), GraphFormat::Json, &in.warnings);
  }
  return in;
}

CompileOptions compile_options_from_json(const json& body) {
  CompileOptions o;
  if (!body.is_object()) return o;
  if (body.contains("no_correct")) {
    if (!body["no_correct"].is_boolean()) throw ParseError("'no_correct' must be a boolean");
    o.correct = !body["no_correct"].get<bool>();
  }
  if (!body.contains("options")) return o;
  const auto& opts = body["options"];
  if (!opts.is_object()) throw ParseError("'options' must be an object");
  if (opts.contains("correct")) {
    if (!opts["correct"].is_boolean()) throw ParseError("'options.correct' must be a boolean");
    o.correct = opts["correct"].get<bool>();
  }
  if (opts.contains("path")) {
    try {
      o.path = opts["path"].get<std::vector<VertexIndex>>();
    } catch (const json::exception&) {
      throw ParseError("'options.path' must be an array of vertex indices");
    }
  }
  return o;
}

CompileResult compile_graph(const GraphInput& input, const MachineProfile& profile, const CompileOptions& options) {
  CompileResult r;
  r.warnings = input.warnings;
  r.path = options.path ? *options.path : euler_path(input.graph);
  r.program = compile_path(input.graph, r.path);
  if (options.correct) {
    r.program = apply_corrections(r.program, profile.compensation, profile.limits.min_feed);
  }
  r.text = emit_text(r.program);
  return r;
}

SimulationResult simulate_program(const InstructionProgram& program, const MachineProfile& profile) {
  SimulationResult r;
  SimulateOptions opts;
  if (program.error_corrected) opts.compensation = profile.compensation;
  r.polyline = simulate(program, opts);
  r.timeline = timeline(program, profile);
  r.intersections = self_intersections(r.polyline, profile.compensation.wire_diameter);
  r.diagnostics = check_program(program, profile);
  return r;
}

Estimate estimate(const InstructionProgram& program, const MachineProfile& profile) {
  Estimate e;
  e.seconds = timeline(program, profile).total_time;
  e.material_mm = total_feed(program);
  e.cost = e.material_mm * profile.cost.dollars_per_mm();
  return e;
}

void to_json(json& j, const CompileResult& r) {
  j = json{{"text", r.text}, {"program", r.program}, {"path", r.path}, {"warnings", r.warnings}};
}

void to_json(json& j, const SimulationResult& r) {
  json pairs = json::array();
  for (const auto& [a, b] : r.intersections) pairs.push_back(json::array({a, b}));
  j = json{{"polyline", r.polyline},
           {"timeline", r.timeline},
           {"intersections", pairs},
           {"diagnostics", r.diagnostics}};
}

void to_json(json& j, const Estimate& e) {
  j = json{{"seconds", e.seconds}, {"material_mm", e.material_mm}, {"cost", e.cost}};
}

}  // namespace wirebend
