#include <doctest.h>

#include <random>

#include "wirebend/fabcheck.hpp"
#include "wirebend/service/pipeline.hpp"

using namespace wirebend;

namespace {

WireframeGraph load(const std::string& name) {
  return read_graph_file(std::string(WIREBEND_SOURCE_DIR) + "/data/" + name).graph;
}

/// Three vertices, first edge along +X, the second turning by `bend_deg` in the XY plane.
WireframeGraph corner(double bend_deg, double first = 30.0, double second = 30.0) {
  WireframeGraph g;
  g.add_vertex({0, 0, 0});
  g.add_vertex({first, 0, 0});
  const double a = deg_to_rad(bend_deg);
  g.add_vertex({first + second * std::cos(a), second * std::sin(a), 0});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

InstructionProgram prog(std::initializer_list<Instruction> list) {
  InstructionProgram p;
  p.instructions = list;
  return p;
}

const VertexFinding* finding(const Diagnostics& d, VertexIndex v, VertexCheck c) {
  for (const auto& f : d.vertex_findings) {
    if (f.vertex == v && f.check == c) return &f;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("cube edge trace passes every check") {
  const auto d = check_all(load("cube_trace.json"), MachineProfile{});
  CHECK(d.euler_pass);
  CHECK(d.euler.classification == EulerClass::Trail);
  CHECK(d.failure_count(VertexCheck::Eulericity) == 0);
  CHECK(d.failure_count(VertexCheck::BendAngle) == 0);
  CHECK(d.edge_failure_count() == 0);
  CHECK(d.overall_fabricable);
  CHECK(d.path == std::vector<VertexIndex>{0, 1, 2, 3, 0, 4, 5, 6, 7});
}

TEST_CASE("the full cube fails eulericity at all eight vertices") {
  const auto d = check_all(load("fullcube.json"), MachineProfile{});
  CHECK_FALSE(d.euler_pass);
  CHECK(d.failure_count(VertexCheck::Eulericity) == 8);
  CHECK(d.edge_failure_count() == 0);
  CHECK_FALSE(d.overall_fabricable);
  CHECK(d.path.empty());
}

TEST_CASE("a 170 degree bend fails at its vertex") {
  const auto d = check_all(corner(170.0), MachineProfile{});
  const auto* f = finding(d, 1, VertexCheck::BendAngle);
  REQUIRE(f);
  CHECK_FALSE(f->pass);
  CHECK(f->measured == doctest::Approx(170.0));
  CHECK(d.failure_count(VertexCheck::BendAngle) == 1);
  CHECK_FALSE(d.overall_fabricable);
}

TEST_CASE("limit boundaries") {
  const MachineProfile limits;
  SUBCASE("bend angle") {
    CHECK(check_all(corner(155.0), limits).overall_fabricable);
    CHECK_FALSE(check_all(corner(155.0001), limits).overall_fabricable);
  }
  SUBCASE("edge length") {
    CHECK(check_all(corner(90.0, 20.4), limits).overall_fabricable);
    const auto d = check_all(corner(90.0, 20.3999), limits);
    CHECK_FALSE(d.overall_fabricable);
    CHECK(d.edge_failure_count() == 1);
    CHECK(d.edge_findings[0].length == doctest::Approx(20.3999));
  }
  SUBCASE("feed") {
    CHECK(check_program(prog({Instruction::feed(25.0)}), limits).fabricable);
    const auto d = check_program(prog({Instruction::feed(24.9)}), limits);
    CHECK_FALSE(d.fabricable);
    CHECK(d.failure_count(ProgramCheck::MinFeed) == 1);
  }
  SUBCASE("cumulative rotation") {
    CHECK(check_program(prog({Instruction::feed(30), Instruction::rotate(360.0)}), limits).fabricable);
    CHECK_FALSE(check_program(prog({Instruction::feed(30), Instruction::rotate(360.1)}), limits).fabricable);
  }
  SUBCASE("stock budget") {
    CHECK(check_program(prog({Instruction::feed(300), Instruction::feed(300)}), limits).fabricable);
    const auto d = check_program(prog({Instruction::feed(300), Instruction::feed(300.1)}), limits);
    CHECK_FALSE(d.fabricable);
    CHECK(d.failure_count(ProgramCheck::StockLength) == 1);
    CHECK(d.feed_budget == 600.0);
  }
}

TEST_CASE("rotations accumulate") {
  const auto d =
      check_program(prog({Instruction::feed(30), Instruction::rotate(200), Instruction::rotate(200)}), MachineProfile{});
  CHECK_FALSE(d.fabricable);
  CHECK(d.failure_count(ProgramCheck::RotateCumulative) == 1);
  CHECK(d.peak_cumulative_rotation == 400.0);
  CHECK(check_program(prog({Instruction::feed(30), Instruction::rotate(200), Instruction::rotate(-200),
                            Instruction::rotate(300)}),
                      MachineProfile{})
            .fabricable);
}

TEST_CASE("corrected programs are held to the hard stop") {
  auto p = prog({Instruction::feed(30), Instruction::bend(160), Instruction::feed(30)});
  CHECK_FALSE(check_program(p, MachineProfile{}).fabricable);
  p.error_corrected = true;
  CHECK(check_program(p, MachineProfile{}).fabricable);
  p.instructions[1].magnitude = -165.5;
  CHECK_FALSE(check_program(p, MachineProfile{}).fabricable);
}

TEST_CASE("the U program passes") {
  const auto d = check_program(
      prog({Instruction::feed(35), Instruction::bend(90), Instruction::feed(35), Instruction::bend(90), Instruction::feed(35)}),
      MachineProfile{});
  CHECK(d.fabricable);
  CHECK(d.total_feed == 105.0);
}

TEST_CASE("tightening a limit never turns a failure into a pass") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> len(5.0, 60.0);
  std::uniform_real_distribution<double> bend(0.0, 179.0);
  std::uniform_real_distribution<double> limit(5.0, 60.0);
  for (int i = 0; i < 300; ++i) {
    const auto g = corner(bend(rng), len(rng), len(rng));
    MachineProfile loose, tight;
    loose.limits.min_edge = limit(rng);
    tight.limits.min_edge = loose.limits.min_edge + limit(rng) / 10.0;
    loose.bend.max_bend = bend(rng);
    tight.bend.max_bend = loose.bend.max_bend * 0.9;
    const auto dl = check_all(g, loose);
    const auto dt = check_all(g, tight);
    CHECK(dt.edge_failure_count() >= dl.edge_failure_count());
    CHECK(dt.failure_count(VertexCheck::BendAngle) >= dl.failure_count(VertexCheck::BendAngle));
    if (!dl.overall_fabricable) CHECK_FALSE(dt.overall_fabricable);
  }
}

TEST_CASE("disconnected graphs flag the minor component") {
  WireframeGraph g;
  for (int i = 0; i < 6; ++i) g.add_vertex({30.0 * i, 30.0 * (i % 2), 0});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(4, 5);
  const auto d = check_all(g, MachineProfile{});
  CHECK_FALSE(d.euler.connected);
  CHECK_FALSE(d.euler_pass);
  CHECK(d.failure_count(VertexCheck::Eulericity) >= 2);
  CHECK_FALSE(finding(d, 4, VertexCheck::Eulericity)->pass);
  CHECK_FALSE(finding(d, 5, VertexCheck::Eulericity)->pass);
}

TEST_CASE("isolated vertices and empty graphs") {
  auto g = corner(90.0);
  g.add_vertex({100, 100, 100});
  auto d = check_all(g, MachineProfile{});
  CHECK(d.overall_fabricable);
  CHECK(d.warnings.size() == 1);
  d = check_all(WireframeGraph{}, MachineProfile{});
  CHECK_FALSE(d.overall_fabricable);
  CHECK_FALSE(d.warnings.empty());
}
