#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wirebend/instructions.hpp"
#include "wirebend/machine/profile.hpp"
#include "wirebend/machine/protocol.hpp"
#include "wirebend/machine/steps.hpp"
#include "wirebend/machine/transport.hpp"

namespace wirebend {

enum class RunStatus { Done, Stopped, Failed };

const char* to_string(RunStatus s);

struct RunReport {
  RunStatus status = RunStatus::Done;
  std::size_t commands_total = 0;
  std::size_t commands_acknowledged = 0;
  AxisSteps steps;  // planned step totals
  std::string error;
  double seconds = 0.0;  // wall clock
};

struct ControllerOptions {
  std::chrono::milliseconds command_timeout{5000};
  /// Home automatically before a program that bends if the axis is not yet homed.
  bool auto_home = true;
};

/// Host side of the machine protocol: one exclusive session over a transport. A reader
/// thread pairs replies with outstanding requests in order, so stop() can be issued from
/// any thread while run_program executes.
class MachineController {
 public:
  MachineController(std::unique_ptr<Transport> transport, MachineProfile profile, ControllerOptions options = {});
  ~MachineController();
  MachineController(const MachineController&) = delete;
  MachineController& operator=(const MachineController&) = delete;

  /// Zeroes the bend axis against its limit switch.
  void home();
  bool homed() const { return homed_; }

  /// Executes one instruction immediately and appends it to the session log.
  /// Bends on an unhomed machine fail with MachineError code NotHomed.
  void jog(const Instruction& ins);

  /// Streams a program with per-command acknowledgement. Blocks; stop() from another thread
  /// aborts it between motor pulses.
  RunReport run_program(const InstructionProgram& program);

  /// run_program on a worker thread.
  std::future<RunReport> start_program(const InstructionProgram& program);

  /// Sends STOP and waits for its acknowledgement; returns the round-trip time.
  std::chrono::microseconds stop();

  /// Manual jogs so far, as a program.
  InstructionProgram session_log() const;
  /// Writes the session log as an instruction text file.
  void save_session(const std::string& path) const;

  /// Lines the machine sent without being asked (limit-switch hits).
  std::vector<std::string> events() const;

 private:
  using Reply = std::shared_ptr<std::promise<protocol::Response>>;

  std::future<protocol::Response> send(const protocol::Command& cmd);
  protocol::Response await(std::future<protocol::Response>& reply, double motion_seconds);
  void reader_loop();
  RunReport run_impl(const InstructionProgram& program);
  double motion_seconds(const MotorCommand& m) const;
  void execute_motor(const MotorCommand& m, std::size_t* acknowledged);

  std::unique_ptr<Transport> transport_;
  MachineProfile profile_;
  ControllerOptions options_;
  StepQuantizer jog_quantizer_;

  std::mutex send_mu_;
  mutable std::mutex mu_;
  std::deque<Reply> pending_;
  std::vector<std::string> events_;
  std::vector<Instruction> jog_log_;
  std::atomic<bool> homed_{false};
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> running_{false};
  std::atomic<bool> closing_{false};
  std::thread reader_;
};

}  // namespace wirebend
