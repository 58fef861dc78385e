#include "wirebend/machine/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wirebend/errors.hpp"

namespace wirebend {

using protocol::Command;
using protocol::ErrorCode;
using protocol::Op;
using protocol::Response;
using protocol::ResponseKind;

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Done:
      return "done";
    case RunStatus::Stopped:
      return "stopped";
    case RunStatus::Failed:
      return "failed";
  }
  return "failed";
}

MachineController::MachineController(std::unique_ptr<Transport> transport, MachineProfile profile,
                                     ControllerOptions options)
    : transport_(std::move(transport)),
      profile_(std::move(profile)),
      options_(options),
      jog_quantizer_(profile_) {
  reader_ = std::thread([this] { reader_loop(); });
}

MachineController::~MachineController() {
  closing_ = true;
  transport_->close();
  if (reader_.joinable()) reader_.join();
}

void MachineController::reader_loop() {
  using namespace std::chrono_literals;
  while (!closing_) {
    const auto line = transport_->read_line(50ms);
    if (!line) {
      if (transport_->closed()) break;
      continue;
    }
    const auto r = protocol::parse_response(*line);
    std::lock_guard lock(mu_);
    if (!r) {
      events_.push_back("unparsed: " + *line);
      continue;
    }
    if (r->kind == ResponseKind::Hit) {
      events_.push_back("HIT");
      continue;
    }
    if (pending_.empty()) {
      events_.push_back("unsolicited: " + *line);
      continue;
    }
    pending_.front()->set_value(*r);
    pending_.pop_front();
  }
  std::lock_guard lock(mu_);
  for (auto& p : pending_) {
    p->set_exception(std::make_exception_ptr(MachineError("connection to machine closed")));
  }
  pending_.clear();
}

std::future<Response> MachineController::send(const Command& cmd) {
  auto reply = std::make_shared<std::promise<Response>>();
  auto fut = reply->get_future();
  std::lock_guard send_lock(send_mu_);
  {
    std::lock_guard lock(mu_);
    pending_.push_back(reply);
  }
  try {
    transport_->write_line(protocol::format(cmd));
  } catch (...) {
    std::lock_guard lock(mu_);
    if (!pending_.empty() && pending_.back() == reply) pending_.pop_back();
    throw;
  }
  return fut;
}

Response MachineController::await(std::future<Response>& reply, double motion_seconds) {
  const auto budget = options_.command_timeout + std::chrono::duration_cast<std::chrono::milliseconds>(
                                                     std::chrono::duration<double>(motion_seconds));
  if (reply.wait_for(budget) != std::future_status::ready) {
    throw MachineError("machine did not answer within " + std::to_string(budget.count()) + " ms");
  }
  return reply.get();
}

double MachineController::motion_seconds(const MotorCommand& m) const {
  const double steps = std::abs(static_cast<double>(m.value));
  switch (m.op) {
    case MotorOp::Feed:
      return steps * profile_.feed_resolution() / profile_.speeds.feed;
    case MotorOp::Bend:
      return steps * profile_.bend_resolution() / profile_.speeds.bend;
    case MotorOp::Rotate:
      return steps * profile_.rotate_resolution() / profile_.speeds.rotate;
    case MotorOp::Retract:
      return profile_.overheads.peg_retract;
    case MotorOp::Home:
      return profile_.overheads.homing;
  }
  return 0.0;
}

void MachineController::execute_motor(const MotorCommand& m, std::size_t* acknowledged) {
  auto reply = send(protocol::from_motor(m));
  const auto r = await(reply, motion_seconds(m));
  if (r.kind == ResponseKind::Err) {
    throw MachineError(std::string("machine error ") + std::to_string(r.code) + ": " +
                           protocol::describe(static_cast<ErrorCode>(r.code)),
                       r.code);
  }
  if (acknowledged) ++*acknowledged;
}

void MachineController::home() {
  execute_motor({MotorOp::Home, 0, 0}, nullptr);
  homed_ = true;
}

void MachineController::jog(const Instruction& ins) {
  if (running_) throw MachineError("a program is running");
  // The machine, not this host, knows whether it has been homed (another client may have).
  std::vector<MotorCommand> cmds;
  StepQuantizer next = jog_quantizer_;
  next.append(ins, jog_log_.size(), cmds);
  for (const auto& m : cmds) execute_motor(m, nullptr);
  if (ins.kind == InstructionKind::Bend) homed_ = true;
  std::lock_guard lock(mu_);
  jog_quantizer_ = next;
  jog_log_.push_back(ins);
}

RunReport MachineController::run_program(const InstructionProgram& program) {
  stop_requested_ = false;
  return run_impl(program);
}

RunReport MachineController::run_impl(const InstructionProgram& program) {
  RunReport report;
  if (running_.exchange(true)) {
    report.status = RunStatus::Failed;
    report.error = "a program is already running";
    return report;
  }
  struct Clear {
    std::atomic<bool>& flag;
    ~Clear() { flag = false; }
  } clear{running_};
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](RunStatus status, std::string error = {}) {
    report.status = status;
    report.error = std::move(error);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  StepPlan plan;
  try {
    plan = to_steps(program, profile_);
  } catch (const Error& e) {
    return finish(RunStatus::Failed, e.what());
  }
  report.commands_total = plan.commands.size();
  report.steps = plan.totals;

  const bool bends = std::any_of(plan.commands.begin(), plan.commands.end(),
                                 [](const MotorCommand& m) { return m.op == MotorOp::Bend; });
  try {
    if (stop_requested_) return finish(RunStatus::Stopped, "stopped");
    if (bends && !homed_) {
      if (!options_.auto_home) return finish(RunStatus::Failed, "bend before homing");
      home();
    }
    for (const auto& m : plan.commands) {
      if (stop_requested_) return finish(RunStatus::Stopped, "stopped");
      execute_motor(m, &report.commands_acknowledged);
    }
  } catch (const MachineError& e) {
    if (e.code() == static_cast<int>(ErrorCode::Stopped) || stop_requested_) {
      return finish(RunStatus::Stopped, e.what());
    }
    return finish(RunStatus::Failed, e.what());
  }
  return finish(RunStatus::Done);
}

std::future<RunReport> MachineController::start_program(const InstructionProgram& program) {
  stop_requested_ = false;
  return std::async(std::launch::async, [this, program] { return run_impl(program); });
}

std::chrono::microseconds MachineController::stop() {
  stop_requested_ = true;
  homed_ = false;  // the machine refuses motion until homed again
  const auto t0 = std::chrono::steady_clock::now();
  auto reply = send({Op::Stop, 0});
  // The running command's reply may precede ours; the reader pairs them in order.
  const auto r = await(reply, 0.0);
  const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);
  if (r.kind != ResponseKind::Ok) throw MachineError("STOP not acknowledged", r.code);
  return elapsed;
}

InstructionProgram MachineController::session_log() const {
  std::lock_guard lock(mu_);
  InstructionProgram p;
  p.instructions = jog_log_;
  return p;
}

void MachineController::save_session(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << emit_text(session_log());
}

std::vector<std::string> MachineController::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

}  // namespace wirebend
