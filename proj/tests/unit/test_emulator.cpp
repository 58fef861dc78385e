#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <thread>

#include "wirebend/errors.hpp"
#include "wirebend/machine/controller.hpp"
#include "wirebend/machine/emulator.hpp"

using namespace wirebend;
using namespace std::chrono_literals;

namespace {

InstructionProgram prog(std::initializer_list<Instruction> list) {
  InstructionProgram p;
  p.instructions = list;
  return p;
}

InstructionProgram u_shape() {
  return prog({Instruction::feed(35), Instruction::bend(90), Instruction::feed(35), Instruction::bend(90),
               Instruction::feed(35)});
}

/// Random program inside the machine envelope.
InstructionProgram machine_program(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> feed(25.0, 60.0), bend(-150.0, 150.0), rot(-90.0, 90.0);
  InstructionProgram p;
  double rotation = 0.0;
  const int n = 1 + static_cast<int>(rng() % 8);
  p.instructions.push_back(Instruction::feed(feed(rng)));
  for (int k = 0; k < n; ++k) {
    const double r = rot(rng);
    if (std::abs(rotation + r) < 300.0 && rng() % 2) {
      p.instructions.push_back(Instruction::rotate(r));
      rotation += r;
    }
    p.instructions.push_back(Instruction::bend(bend(rng)));
    p.instructions.push_back(Instruction::feed(feed(rng)));
  }
  return p;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wirebend_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("homing is idempotent") {
  EmulatorCore core(MachineProfile{});
  std::atomic<bool> abort{false};
  std::size_t hits = 0;
  auto emit = [&](const protocol::Response& r) { hits += r.kind == protocol::ResponseKind::Hit; };
  CHECK(core.execute({protocol::Op::Home, 0}, abort, emit).kind == protocol::ResponseKind::Ok);
  auto first = core.status();
  CHECK(core.execute({protocol::Op::Home, 0}, abort, emit).kind == protocol::ResponseKind::Ok);
  auto second = core.status();
  CHECK(hits == 2);
  CHECK(first.homed);
  CHECK(second.bend_steps == 0);
  first.commands = second.commands = 0;
  first.limit_switch_hits = second.limit_switch_hits = 0;
  CHECK(first.homed == second.homed);
  CHECK(first.bend_steps == second.bend_steps);
  CHECK(first.peg_side == second.peg_side);
  CHECK(first.feed_steps == second.feed_steps);
}

TEST_CASE("emulator refuses bends before homing and moves past the hard stop") {
  EmulatorCore core(MachineProfile{});
  std::atomic<bool> abort{false};
  const auto r = core.execute({protocol::Op::Bend, 10}, abort, nullptr);
  CHECK(r == protocol::Response{protocol::ResponseKind::Err, 3});
  core.execute({protocol::Op::Home, 0}, abort, nullptr);
  CHECK(core.execute({protocol::Op::Bend, core.bend_limit_steps() + 1}, abort, nullptr) ==
        protocol::Response{protocol::ResponseKind::Err, 4});
  CHECK(core.execute({protocol::Op::Feed, -1}, abort, nullptr).kind == protocol::ResponseKind::Err);
  CHECK(core.execute({protocol::Op::Feed, 10}, abort, nullptr).kind == protocol::ResponseKind::Ok);
}

TEST_CASE("running the U shape bends the emulated wire into a U") {
  Emulator emu;
  MachineController ctl(emu.connect(), MachineProfile{});
  const auto report = ctl.run_program(u_shape());
  CHECK(report.status == RunStatus::Done);
  CHECK(report.commands_acknowledged == report.commands_total);
  const auto wire = emu.core().wire();
  const auto expect = simulate(u_shape());
  REQUIRE(wire.points.size() == expect.points.size());
  const MachineProfile m;
  for (std::size_t i = 0; i < wire.points.size(); ++i) {
    CHECK(distance(wire.points[i], expect.points[i]) < 35.0 * deg_to_rad(m.bend_resolution()) + m.feed_resolution());
  }
  CHECK(emu.core().status().homed);
  CHECK(ctl.homed());
  CHECK_FALSE(ctl.events().empty());
}

TEST_CASE("executed step totals equal the plan on random programs") {
  std::mt19937_64 rng(41);
  const MachineProfile m;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = machine_program(rng);
    Emulator emu;
    MachineController ctl(emu.connect(), m);
    const auto report = ctl.run_program(p);
    REQUIRE(report.status == RunStatus::Done);
    const auto plan = to_steps(p, m);
    const auto s = emu.core().status();
    CHECK(s.feed_steps == plan.totals.feed);
    CHECK(s.bend_swept_steps == plan.totals.bend_swept);
    CHECK(s.rotate_steps == plan.totals.rotate);
    CHECK(report.steps == plan.totals);
    CHECK(s.bend_steps == 0);
  }
}

TEST_CASE("stop halts a running program quickly") {
  Emulator emu(MachineProfile{}, EmulatorOptions{1.0});
  MachineController ctl(emu.connect(), MachineProfile{});
  auto running = ctl.start_program(prog({Instruction::feed(500.0), Instruction::feed(500.0)}));
  std::this_thread::sleep_for(300ms);
  const auto rtt = ctl.stop();
  CHECK(rtt < 100ms);
  REQUIRE(running.wait_for(5s) == std::future_status::ready);
  const auto report = running.get();
  CHECK(report.status == RunStatus::Stopped);
  const auto s = emu.core().status();
  CHECK(s.stopped);
  CHECK(s.feed_steps > 0);
  CHECK(s.feed_steps < to_steps(prog({Instruction::feed(500.0)}), MachineProfile{}).totals.feed);
  std::this_thread::sleep_for(100ms);
  CHECK(emu.core().status().feed_steps == s.feed_steps);

  // Motion stays refused until the machine is homed again.
  CHECK_THROWS_AS(ctl.jog(Instruction::feed(10)), MachineError);
  ctl.home();
  CHECK_NOTHROW(ctl.jog(Instruction::feed(10)));
}

TEST_CASE("controller over TCP") {
  Emulator emu;
  const auto port = emu.listen(0);
  REQUIRE(port > 0);
  {
    MachineController ctl(connect_tcp("127.0.0.1", port), MachineProfile{});
    const auto report = ctl.run_program(u_shape());
    CHECK(report.status == RunStatus::Done);
  }
  CHECK(emu.core().status().feed_steps == to_steps(u_shape(), MachineProfile{}).totals.feed);
  emu.stop_listening();
}

TEST_CASE("jog session saves as a program") {
  Emulator emu;
  MachineController ctl(emu.connect(), MachineProfile{});
  ctl.jog(Instruction::feed(10));
  try {
    ctl.jog(Instruction::bend(90));
    FAIL("bend before homing succeeded");
  } catch (const MachineError& e) {
    CHECK(e.code() == static_cast<int>(protocol::ErrorCode::NotHomed));
  }
  ctl.home();
  ctl.jog(Instruction::bend(90));
  CHECK(ctl.session_log() == prog({Instruction::feed(10), Instruction::bend(90)}));
  const auto path = temp_file("jog.txt");
  ctl.save_session(path.string());
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  REQUIRE(f);
  std::string text(256, '\0');
  text.resize(std::fread(text.data(), 1, text.size(), f));
  std::fclose(f);
  std::filesystem::remove(path);
  CHECK(text == "F 10.0000\nB 90.0000\n");
  CHECK(parse_text(text) == prog({Instruction::feed(10), Instruction::bend(90)}));
}

TEST_CASE("protocol errors come back as ERR lines") {
  Emulator emu;
  auto t = emu.connect();
  t->write_line("JUMP 3");
  CHECK(t->read_line(2s) == "ERR 1");
  t->write_line("F 1.5");
  CHECK(t->read_line(2s) == "ERR 2");
  t->write_line("HOME");
  CHECK(t->read_line(2s) == "HIT");
  CHECK(t->read_line(2s) == "OK");
  t->write_line("STOP");
  CHECK(t->read_line(2s) == "OK");
  t->write_line("F 10");
  CHECK(t->read_line(2s) == "ERR 5");
}

TEST_CASE("address parsing") {
  CHECK(split_address("127.0.0.1:7070") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 7070});
  CHECK(split_address(":8080").second == 8080);
  CHECK(split_address("9000") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 9000});
  CHECK_THROWS(split_address("host:notaport"));
}
