#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wirebend/machine/controller.hpp"
#include "wirebend/machine/emulator.hpp"
#include "wirebend/machine/material.hpp"
#include "wirebend/service/http.hpp"
#include "wirebend/service/pipeline.hpp"

namespace {

using namespace wirebend;

enum Exit { kOk = 0, kNotFabricable = 1, kBadInput = 2, kMachine = 3 };

struct Common {
  std::string profile_path;
  bool json_out = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--profile", c.profile_path, "Machine profile JSON (default: $WIREBEND_PROFILE, then built-in)");
  cmd->add_flag("--json", c.json_out, "Machine-readable output");
}

int fail(const Common& c, const std::exception& e) {
  if (c.json_out) {
    std::cout << error_json(e).dump(2) << "\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
  return dynamic_cast<const MachineError*>(&e) ? kMachine : kBadInput;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_diagnostics(const Diagnostics& d) {
  std::cout << "euler: " << to_string(d.euler.classification) << (d.euler_pass ? " (pass)" : " (FAIL)") << "\n";
  if (!d.path.empty()) {
    std::cout << "path:";
    for (auto v : d.path) std::cout << " " << v;
    std::cout << "\n";
  }
  for (const auto& f : d.vertex_findings) {
    if (f.pass) continue;
    std::cout << "  vertex " << f.vertex << " " << to_string(f.check) << " FAIL: " << f.detail << "\n";
  }
  for (const auto& f : d.edge_findings) {
    if (f.pass) continue;
    std::cout << "  edge " << f.a << "-" << f.b << " min_length FAIL: " << fmt(f.length) << " mm\n";
  }
  for (const auto& w : d.warnings) std::cout << "  warning: " << w << "\n";
  std::cout << "eulericity failures: " << d.failure_count(VertexCheck::Eulericity)
            << ", bend failures: " << d.failure_count(VertexCheck::BendAngle)
            << ", edge failures: " << d.edge_failure_count() << "\n";
  std::cout << (d.overall_fabricable ? "fabricable" : "NOT fabricable") << "\n";
}

void print_program_diagnostics(const ProgramDiagnostics& d) {
  for (const auto& f : d.findings) {
    if (f.pass) continue;
    std::cout << "  instruction " << f.instruction << " " << to_string(f.check) << " FAIL: " << f.detail << "\n";
  }
  std::cout << "machine limits: " << (d.fabricable ? "ok" : "VIOLATED") << "\n";
}

ProjectionView parse_view(const std::string& s) {
  static const std::map<std::string, ProjectionView> views{{"top", ProjectionView::Top},
                                                           {"front", ProjectionView::Front},
                                                           {"side", ProjectionView::Side},
                                                           {"iso", ProjectionView::Isometric}};
  return views.at(s);
}

struct MachineArgs {
  std::string port;
  bool emulate = false;
  double time_scale = 0.0;
};

void add_machine(CLI::App* cmd, MachineArgs& m) {
  cmd->add_option("--port", m.port, "Machine address host:port");
  cmd->add_flag("--emulate", m.emulate, "Use an in-process emulator instead of --port");
  cmd->add_option("--time-scale", m.time_scale, "Emulator wall seconds per modelled second (0 = instant)");
}

/// Holds an optional in-process emulator alive for as long as the controller uses it.
struct Connection {
  std::unique_ptr<Emulator> emulator;
  std::unique_ptr<MachineController> controller;
};

Connection connect(const MachineArgs& m, const MachineProfile& profile) {
  Connection c;
  std::unique_ptr<Transport> t;
  if (m.emulate || m.port.empty()) {
    if (!m.emulate) throw InvalidInput("give --port <host:port> or --emulate");
    c.emulator = std::make_unique<Emulator>(profile, EmulatorOptions{m.time_scale});
    t = c.emulator->connect();
  } else {
    const auto [host, port] = split_address(m.port);
    t = connect_tcp(host, port);
  }
  c.controller = std::make_unique<MachineController>(std::move(t), profile);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wirebend: wireframe to bent-wire fabrication toolkit"};
  app.require_subcommand(1);
  Common common;
  int code = kOk;

  // check
  std::string graph_path;
  auto* check = app.add_subcommand("check", "Fabricability diagnostics for a wireframe graph");
  check->add_option("graph", graph_path, "Graph file (.json or .obj)")->required();
  add_common(check, common);
  check->callback([&] {
    const auto profile = load_profile(common.profile_path);
    const auto input = read_graph_file(graph_path);
    auto d = check_all(input.graph, profile);
    d.warnings.insert(d.warnings.begin(), input.warnings.begin(), input.warnings.end());
    if (common.json_out) {
      std::cout << json(d).dump(2) << "\n";
    } else {
      print_diagnostics(d);
    }
    code = d.overall_fabricable ? kOk : kNotFabricable;
  });

  // compile
  std::string out_path;
  bool no_correct = false;
  auto* compile = app.add_subcommand("compile", "Compile a wireframe graph to an instruction file");
  compile->add_option("graph", graph_path, "Graph file (.json or .obj)")->required();
  compile->add_option("-o,--output", out_path, "Instruction file to write (stdout if omitted)");
  compile->add_flag("--no-correct", no_correct, "Skip error correction");
  add_common(compile, common);
  compile->callback([&] {
    const auto profile = load_profile(common.profile_path);
    CompileOptions opts;
    opts.correct = !no_correct;
    const auto r = compile_graph(read_graph_file(graph_path), profile, opts);
    if (!out_path.empty()) write_file(out_path, r.text);
    if (common.json_out) {
      std::cout << json(r).dump(2) << "\n";
    } else if (out_path.empty()) {
      std::cout << r.text;
    } else {
      std::cerr << "wrote " << r.program.size() << " instructions to " << out_path << "\n";
    }
  });

  // simulate
  std::string program_path;
  std::string svg_path;
  std::string view = "iso";
  bool svg_stdout = false;
  auto* sim = app.add_subcommand("simulate", "Forward-simulate an instruction file");
  sim->add_option("program", program_path, "Instruction text file")->required();
  sim->add_flag("--svg", svg_stdout, "Write an SVG projection to stdout");
  sim->add_option("--plot", svg_path, "Write an SVG projection to this file");
  sim->add_option("--view", view, "Projection for --svg/--plot")->check(CLI::IsMember({"top", "front", "side", "iso"}));
  add_common(sim, common);
  sim->callback([&] {
    const auto profile = load_profile(common.profile_path);
    const auto program = parse_text(read_file(program_path));
    const auto r = simulate_program(program, profile);
    const auto svg = [&] { return polyline_to_svg(r.polyline, parse_view(view), r.intersections); };
    if (!svg_path.empty()) write_file(svg_path, svg());
    if (svg_stdout) {
      std::cout << svg();
    } else if (common.json_out) {
      std::cout << json(r).dump(2) << "\n";
    } else {
      std::cout << "points: " << r.polyline.points.size() << "\n";
      const auto& end = r.polyline.points.back();
      std::cout << "end: (" << fmt(end.x) << ", " << fmt(end.y) << ", " << fmt(end.z) << ")\n";
      std::cout << "wire length: " << fmt(r.polyline.length(), 2) << " mm\n";
      std::cout << "time: " << fmt(r.timeline.total_time, 1) << " s\n";
      std::cout << "self-intersections: " << r.intersections.size() << "\n";
      for (const auto& [a, b] : r.intersections) std::cout << "  segments " << a << " and " << b << "\n";
      print_program_diagnostics(r.diagnostics);
    }
  });

  // estimate
  auto* est = app.add_subcommand("estimate", "Fabrication time, material length and cost");
  est->add_option("program", program_path, "Instruction text file")->required();
  add_common(est, common);
  est->callback([&] {
    const auto profile = load_profile(common.profile_path);
    const auto e = estimate(parse_text(read_file(program_path)), profile);
    if (common.json_out) {
      std::cout << json(e).dump(2) << "\n";
    } else {
      std::cout << "time: " << fmt(e.seconds, 1) << " s\n";
      std::cout << "material: " << fmt(e.material_mm, 1) << " mm\n";
      std::cout << "cost: $" << fmt(e.cost, 2) << "\n";
    }
  });

  // torque
  MaterialSpec material = MaterialSpec::aluminium_6061_t6();
  auto* torque = app.add_subcommand("torque", "Bend torque requirement and margin for a wire material");
  torque->add_option("--diameter", material.diameter, "Wire diameter, mm");
  torque->add_option("--uts", material.uts, "Ultimate tensile strength, MPa");
  add_common(torque, common);
  torque->callback([&] {
    const auto f = feasibility(material, load_profile(common.profile_path));
    if (common.json_out) {
      std::cout << json(f).dump(2) << "\n";
    } else {
      std::cout << "required: " << fmt(f.required, 3) << " N*m\n";
      std::cout << "available: " << fmt(f.available, 3) << " N*m\n";
      std::cout << "margin: " << fmt(f.margin, 2) << "x\n";
      std::cout << (f.fabricable ? "fabricable" : "NOT fabricable") << "\n";
    }
    code = f.fabricable ? kOk : kNotFabricable;
  });

  // profile
  auto* prof = app.add_subcommand("profile", "Print the effective machine profile");
  add_common(prof, common);
  prof->callback([&] { std::cout << profile_to_json(load_profile(common.profile_path)) << "\n"; });

  // run
  MachineArgs machine;
  auto* run = app.add_subcommand("run", "Stream an instruction file to the machine");
  run->add_option("program", program_path, "Instruction text file")->required();
  add_machine(run, machine);
  add_common(run, common);
  run->callback([&] {
    const auto profile = load_profile(common.profile_path);
    const auto program = parse_text(read_file(program_path));
    auto conn = connect(machine, profile);
    const auto report = conn.controller->run_program(program);
    if (common.json_out) {
      std::cout << json(report).dump(2) << "\n";
    } else {
      std::cout << to_string(report.status) << ": " << report.commands_acknowledged << "/" << report.commands_total
                << " commands acknowledged in " << fmt(report.seconds, 2) << " s\n";
      if (!report.error.empty()) std::cout << report.error << "\n";
    }
    code = report.status == RunStatus::Done ? kOk : kMachine;
  });

  // jog
  std::vector<std::string> jog_lines;
  std::string save_path;
  bool home_first = false;
  auto* jog = app.add_subcommand("jog", "Execute manual commands, e.g. jog \"F 10\" \"B 90\"");
  jog->add_option("commands", jog_lines, "Instruction lines")->required();
  jog->add_flag("--home", home_first, "Home the bend axis first");
  jog->add_option("--save", save_path, "Save the session log as an instruction file");
  add_machine(jog, machine);
  add_common(jog, common);
  jog->callback([&] {
    std::string text;
    for (const auto& l : jog_lines) text += l + "\n";
    const auto program = parse_text(text);
    auto conn = connect(machine, load_profile(common.profile_path));
    if (home_first) conn.controller->home();
    for (const auto& ins : program.instructions) conn.controller->jog(ins);
    if (!save_path.empty()) conn.controller->save_session(save_path);
    if (common.json_out) {
      std::cout << json{{"ok", true}, {"session", emit_text(conn.controller->session_log())}}.dump(2) << "\n";
    } else {
      std::cout << emit_text(conn.controller->session_log());
    }
  });

  // home / stop
  auto* home = app.add_subcommand("home", "Home the bend axis");
  add_machine(home, machine);
  add_common(home, common);
  home->callback([&] {
    auto conn = connect(machine, load_profile(common.profile_path));
    conn.controller->home();
    std::cout << (common.json_out ? json{{"ok", true}}.dump() : std::string("homed")) << "\n";
  });
  auto* stop = app.add_subcommand("stop", "Send STOP to the machine");
  add_machine(stop, machine);
  add_common(stop, common);
  stop->callback([&] {
    auto conn = connect(machine, load_profile(common.profile_path));
    const auto ack = conn.controller->stop();
    const double ms = static_cast<double>(ack.count()) / 1000.0;
    if (common.json_out) {
      std::cout << json{{"ok", true}, {"ack_ms", ms}}.dump() << "\n";
    } else {
      std::cout << "stopped (ack " << fmt(ms, 2) << " ms)\n";
    }
  });

  // serve
  std::string listen = "127.0.0.1:8080";
  std::string jobs_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--listen", listen, "host:port to listen on");
  serve->add_option("--machine", machine.port, "Machine address; the built-in emulator if omitted");
  serve->add_option("--time-scale", machine.time_scale, "Built-in emulator wall seconds per modelled second");
  serve->add_option("--jobs-dir", jobs_dir, "Directory for job records and instruction files");
  add_common(serve, common);
  serve->callback([&] {
    ServiceOptions opts;
    opts.profile = load_profile(common.profile_path);
    opts.machine_address = machine.port;
    opts.emulator.time_scale = machine.time_scale;
    opts.jobs_dir = jobs_dir;
    Service service(opts);
    HttpApi api(service);
    const auto [host, port] = split_address(listen);
    std::cerr << "listening on http://" << host << ":" << port << "/v1\n";
    api.listen(host, port);
  });

  // emulator
  std::string emu_listen = "127.0.0.1:7070";
  auto* emu = app.add_subcommand("emulator", "Run a machine emulator on a TCP port");
  emu->add_option("--listen", emu_listen, "host:port to listen on");
  emu->add_option("--time-scale", machine.time_scale, "Wall seconds per modelled second");
  add_common(emu, common);
  emu->callback([&] {
    Emulator emulator(load_profile(common.profile_path), EmulatorOptions{machine.time_scale});
    const auto [host, port] = split_address(emu_listen);
    const auto bound = emulator.listen(port, host);
    std::cerr << "emulator listening on " << host << ":" << bound << "\n";
    emulator.serve_forever();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    return fail(common, e);
  }
  return code;
}
