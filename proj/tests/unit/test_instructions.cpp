#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wirebend/errors.hpp"
#include "wirebend/instructions.hpp"

using namespace wirebend;

namespace {

using P = std::vector<Vec3>;

InstructionProgram prog(std::initializer_list<Instruction> list) {
  InstructionProgram p;
  p.instructions = list;
  return p;
}

std::vector<Instruction> compile(const P& pts) { return compile_points(pts).instructions; }

double path_length(const P& pts) {
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) sum += distance(pts[i - 1], pts[i]);
  return sum;
}

}  // namespace

TEST_CASE("single edge compiles to one feed") {
  CHECK(compile({{0, 0, 0}, {30, 0, 0}}) == std::vector<Instruction>{Instruction::feed(30)});
}

TEST_CASE("planar U has no rotates") {
  const auto ins = compile({{0, 0, 0}, {35, 0, 0}, {35, 35, 0}, {0, 35, 0}});
  REQUIRE(ins.size() == 5);
  CHECK(ins[0] == Instruction::feed(35));
  CHECK(ins[1].kind == InstructionKind::Bend);
  CHECK(ins[1].magnitude == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(ins[2] == Instruction::feed(35));
  CHECK(ins[3].magnitude == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(ins[4] == Instruction::feed(35));
}

TEST_CASE("3D corner emits F, R, B at the second vertex") {
  const auto ins = compile({{0, 0, 0}, {30, 0, 0}, {30, 30, 0}, {30, 30, 30}});
  REQUIRE(ins.size() == 6);
  CHECK(ins[0] == Instruction::feed(30));
  CHECK(ins[1].kind == InstructionKind::Bend);
  CHECK(ins[2] == Instruction::feed(30));
  CHECK(ins[3].kind == InstructionKind::Rotate);
  CHECK(std::abs(ins[3].magnitude) == doctest::Approx(90.0).epsilon(1e-12));
  // n1 = +X x +Y = +Z, n2 = +Y x +Z = +X; about heading +Y, +Z reaches +X by +90 degrees.
  CHECK(ins[3].magnitude == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(ins[4].kind == InstructionKind::Bend);
  CHECK(ins[5] == Instruction::feed(30));
}

TEST_CASE("collinear vertices merge their feeds") {
  const auto ins = compile({{0, 0, 0}, {10, 0, 0}, {30, 0, 0}, {30, 30, 0}});
  REQUIRE(ins.size() == 3);
  CHECK(ins[0].magnitude == doctest::Approx(30.0));
  CHECK(ins[1].magnitude == doctest::Approx(90.0));
  CHECK(ins[2].magnitude == doctest::Approx(30.0));
}

TEST_CASE("a reversal bends 180 degrees without a rotate") {
  const auto ins = compile({{0, 0, 0}, {30, 0, 0}, {30, 30, 0}, {30, 0, 0}});
  REQUIRE(ins.size() == 5);
  CHECK(ins[3].kind == InstructionKind::Bend);
  CHECK(ins[3].magnitude == doctest::Approx(180.0));
}

TEST_CASE("compile errors") {
  CHECK_THROWS_AS(compile({{0, 0, 0}}), InvalidInput);
  CHECK_THROWS_AS(compile({{0, 0, 0}, {0, 0, 0}}), InvalidInput);
  WireframeGraph g;
  g.add_vertex({0, 0, 0});
  g.add_vertex({30, 0, 0});
  g.add_vertex({30, 30, 0});
  g.add_edge(0, 1);
  const std::vector<VertexIndex> bad{0, 2};
  CHECK_THROWS_AS(compile_path(g, bad), InvalidInput);
  const std::vector<VertexIndex> ok{1, 0};
  const auto p = compile_path(g, ok);
  CHECK(p.source_hash == g.content_hash());
  CHECK_FALSE(p.error_corrected);
}

TEST_CASE("feed total equals path length and each corner bends once") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracle::random_polyline(rng, 2 + rng() % 10, 5.0, 80.0, 170.0);
    const auto p = compile_points(pts);
    CHECK(total_feed(p) == doctest::Approx(path_length(pts)).epsilon(1e-9));
    std::size_t bends = 0;
    for (const auto& ins : p.instructions) bends += ins.kind == InstructionKind::Bend;
    CHECK(bends == pts.size() - 2);
    CHECK(p.instructions.front().kind == InstructionKind::Feed);
    validate_program(p);
  }
}

TEST_CASE("text format") {
  CHECK(emit_text(prog({Instruction::feed(35), Instruction::bend(90)})) == "F 35.0000\nB 90.0000\n");
  CHECK(emit_text(prog({Instruction::feed(1), Instruction::rotate(-0.00001)})) == "F 1.0000\nR 0.0000\n");
  CHECK(emit_text(prog({Instruction::feed(1), Instruction::bend(-12.34567)})) == "F 1.0000\nB -12.3457\n");
  CHECK(parse_text("# comment\nF 10.5\n") == prog({Instruction::feed(10.5)}));
  CHECK(parse_text("F 10\r\n\n  B  -45 \n") == prog({Instruction::feed(10), Instruction::bend(-45)}));
  CHECK(parse_text("") == InstructionProgram{});

  auto corrected = prog({Instruction::feed(33.0699), Instruction::bend(100.23)});
  corrected.error_corrected = true;
  const auto text = emit_text(corrected);
  CHECK(text.rfind("# error-corrected\n", 0) == 0);
  CHECK(parse_text(text) == corrected);
}

TEST_CASE("text parse errors") {
  CHECK_THROWS_AS(parse_text("X 10\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F ten\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F 10mm\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F10\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F -1\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F 0\n"), ParseError);
  CHECK_THROWS_AS(parse_text("B 180.0001\n"), ParseError);
  CHECK_THROWS_AS(parse_text("R -360.5\n"), ParseError);
  CHECK_THROWS_AS(parse_text("F nan\n"), ParseError);
  CHECK_NOTHROW(parse_text("B -180\nR 360\n"));
}

TEST_CASE("program validation") {
  CHECK_THROWS_AS(validate_program(prog({Instruction::bend(10)})), InvalidInput);
  CHECK_THROWS_AS(validate_program(prog({Instruction::feed(-1)})), InvalidInput);
  CHECK_THROWS_AS(validate_program(prog({Instruction::feed(1), Instruction::rotate(400)})), InvalidInput);
  CHECK_NOTHROW(validate_program(InstructionProgram{}));
}

TEST_CASE("parse inverts emit on random programs") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto p = oracle::random_program(rng);
    p.error_corrected = i % 2 == 0;
    const auto text = emit_text(p);
    CHECK(parse_text(text) == p);
    CHECK(emit_text(parse_text(text)) == text);
  }
}
