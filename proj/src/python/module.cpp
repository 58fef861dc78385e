#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wirebend/errormodel.hpp"
#include "wirebend/errors.hpp"
#include "wirebend/fabcheck.hpp"
#include "wirebend/fabsim.hpp"
#include "wirebend/graph.hpp"
#include "wirebend/instructions.hpp"
#include "wirebend/json_io.hpp"
#include "wirebend/machine/controller.hpp"
#include "wirebend/machine/emulator.hpp"
#include "wirebend/machine/material.hpp"
#include "wirebend/machine/steps.hpp"
#include "wirebend/service/pipeline.hpp"

namespace py = pybind11;
using namespace wirebend;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_python(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

MachineProfile profile_arg(const py::object& o) {
  if (o.is_none()) return MachineProfile{};
  if (py::isinstance<py::str>(o)) return profile_from_json(o.cast<std::string>());
  return profile_from_json(from_python(o).dump());
}

std::vector<double> xyz(const Vec3& v) { return {v.x, v.y, v.z}; }

GraphFormat format_arg(const std::string& name) {
  if (name == "json") return GraphFormat::Json;
  if (name == "obj") return GraphFormat::Obj;
  if (name == "auto") return GraphFormat::Auto;
  throw InvalidInput("format must be auto, json or obj");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wireframe to bent-wire fabrication toolkit";

  auto base = py::register_exception<Error>(m, "WirebendError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LimitError>(m, "LimitError", base.ptr());
  py::register_exception<MachineError>(m, "MachineError", base.ptr());

  py::enum_<InstructionKind>(m, "InstructionKind")
      .value("Feed", InstructionKind::Feed)
      .value("Bend", InstructionKind::Bend)
      .value("Rotate", InstructionKind::Rotate);

  py::class_<Instruction>(m, "Instruction")
      .def(py::init([](const std::string& letter, double magnitude) {
             if (letter == "F") return Instruction::feed(magnitude);
             if (letter == "B") return Instruction::bend(magnitude);
             if (letter == "R") return Instruction::rotate(magnitude);
             throw InvalidInput("instruction letter must be F, B or R");
           }),
           py::arg("kind"), py::arg("magnitude"))
      .def_readwrite("kind", &Instruction::kind)
      .def_readwrite("magnitude", &Instruction::magnitude)
      .def_property_readonly("letter", [](const Instruction& i) { return std::string(1, command_letter(i.kind)); })
      .def("__eq__", [](const Instruction& a, const Instruction& b) { return a == b; })
      .def("__repr__", [](const Instruction& i) {
        return "Instruction('" + std::string(1, command_letter(i.kind)) + "', " + std::to_string(i.magnitude) + ")";
      });

  py::class_<InstructionProgram>(m, "Program")
      .def(py::init<>())
      .def(py::init([](const std::vector<Instruction>& list, bool corrected) {
             InstructionProgram p;
             p.instructions = list;
             p.error_corrected = corrected;
             return p;
           }),
           py::arg("instructions"), py::arg("error_corrected") = false)
      .def_readwrite("instructions", &InstructionProgram::instructions)
      .def_readwrite("error_corrected", &InstructionProgram::error_corrected)
      .def_readwrite("source_hash", &InstructionProgram::source_hash)
      .def("__len__", &InstructionProgram::size)
      .def("__eq__", [](const InstructionProgram& a, const InstructionProgram& b) { return a == b; })
      .def("text", &emit_text)
      .def("to_dict", [](const InstructionProgram& p) { return to_python(json(p)); })
      .def_static("parse", &parse_text, py::arg("text"));

  py::class_<WireframeGraph>(m, "Graph")
      .def(py::init<>())
      .def_static(
          "parse",
          [](const std::string& text, const std::string& format) { return ingest_graph(text, format_arg(format)); },
          py::arg("document"), py::arg("format") = "auto")
      .def_static("load", [](const std::string& path) { return read_graph_file(path).graph; }, py::arg("path"))
      .def("add_vertex", [](WireframeGraph& g, double x, double y, double z) { return g.add_vertex({x, y, z}); })
      .def("add_edge", &WireframeGraph::add_edge)
      .def("remove_edge", &WireframeGraph::remove_edge)
      .def("has_edge", &WireframeGraph::has_edge)
      .def_property_readonly("vertices",
                             [](const WireframeGraph& g) {
                               std::vector<std::vector<double>> out;
                               for (const auto& v : g.vertices()) out.push_back(xyz(v));
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const WireframeGraph& g) {
                               std::vector<std::pair<VertexIndex, VertexIndex>> out;
                               for (const auto& e : g.edges()) out.emplace_back(e.a, e.b);
                               return out;
                             })
      .def("degrees", &WireframeGraph::degrees)
      .def("content_hash", &WireframeGraph::content_hash)
      .def("to_json", &graph_to_json)
      .def("__eq__", [](const WireframeGraph& a, const WireframeGraph& b) { return a == b; });

  m.def("euler_status", [](const WireframeGraph& g) { return to_python(json(euler_status(g))); });
  m.def("euler_path", &euler_path);
  m.def(
      "check",
      [](const WireframeGraph& g, const py::object& profile) {
        return to_python(json(check_all(g, profile_arg(profile))));
      },
      py::arg("graph"), py::arg("profile") = py::none());
  m.def(
      "check_program",
      [](const InstructionProgram& p, const py::object& profile) {
        return to_python(json(check_program(p, profile_arg(profile))));
      },
      py::arg("program"), py::arg("profile") = py::none());

  m.def(
      "compile",
      [](const WireframeGraph& g, const std::optional<std::vector<VertexIndex>>& path) {
        return compile_path(g, path ? *path : euler_path(g));
      },
      py::arg("graph"), py::arg("path") = py::none());
  m.def(
      "compile_points",
      [](const std::vector<std::vector<double>>& pts) {
        std::vector<Vec3> v;
        for (const auto& p : pts) {
          if (p.size() != 3) throw InvalidInput("points need three coordinates");
          v.push_back({p[0], p[1], p[2]});
        }
        return compile_points(v);
      },
      py::arg("points"));

  m.def("default_profile", [] { return to_python(json(MachineProfile{})); });
  m.def("setback_commanded",
        [](double theta, const py::object& profile) { return setback_commanded(theta, profile_arg(profile).compensation); },
        py::arg("theta"), py::arg("profile") = py::none());
  m.def("springback_target",
        [](double theta, const py::object& profile) { return springback_target(theta, profile_arg(profile).compensation); },
        py::arg("theta"), py::arg("profile") = py::none());
  m.def("combined_commanded",
        [](double theta, const py::object& profile) { return combined_commanded(theta, profile_arg(profile).compensation); },
        py::arg("theta"), py::arg("profile") = py::none());
  m.def(
      "apply_corrections",
      [](const InstructionProgram& p, const py::object& profile) {
        const auto prof = profile_arg(profile);
        return apply_corrections(p, prof.compensation, prof.limits.min_feed);
      },
      py::arg("program"), py::arg("profile") = py::none());

  m.def(
      "simulate",
      [](const InstructionProgram& p, const py::object& profile) {
        return to_python(json(simulate_program(p, profile_arg(profile))));
      },
      py::arg("program"), py::arg("profile") = py::none());
  m.def(
      "estimate",
      [](const InstructionProgram& p, const py::object& profile) {
        return to_python(json(estimate(p, profile_arg(profile))));
      },
      py::arg("program"), py::arg("profile") = py::none());
  m.def(
      "to_steps",
      [](const InstructionProgram& p, const py::object& profile) {
        const auto t = to_steps(p, profile_arg(profile)).totals;
        return to_python(json{{"feed", t.feed}, {"bend_swept", t.bend_swept}, {"rotate", t.rotate}});
      },
      py::arg("program"), py::arg("profile") = py::none());
  m.def(
      "torque",
      [](double diameter, double uts, const py::object& profile) {
        auto mat = MaterialSpec::aluminium_6061_t6();
        if (diameter > 0) mat.diameter = diameter;
        if (uts > 0) mat.uts = uts;
        return to_python(json(feasibility(mat, profile_arg(profile))));
      },
      py::arg("diameter") = 0.0, py::arg("uts") = 0.0, py::arg("profile") = py::none());

  m.def(
      "run_emulated",
      [](const InstructionProgram& p, const py::object& profile) {
        const auto prof = profile_arg(profile);
        json out;
        {
          py::gil_scoped_release release;
          Emulator emu(prof);
          MachineController ctl(emu.connect(), prof);
          out = ctl.run_program(p);
          const auto s = emu.core().status();
          out["emulator"] = {{"feed_steps", s.feed_steps},
                             {"bend_swept_steps", s.bend_swept_steps},
                             {"rotate_steps", s.rotate_steps}};
          out["wire"] = emu.core().wire();
        }
        return to_python(out);
      },
      py::arg("program"), py::arg("profile") = py::none());
}
