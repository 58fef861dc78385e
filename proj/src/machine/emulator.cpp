#include "wirebend/machine/emulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace wirebend {

using protocol::Command;
using protocol::ErrorCode;
using protocol::Op;
using protocol::Response;
using protocol::ResponseKind;

namespace {

Response ok() { return {ResponseKind::Ok, 0}; }
Response err(ErrorCode code) { return {ResponseKind::Err, static_cast<int>(code)}; }

std::int64_t limit_steps(double limit, double resolution) {
  // One step of slack matches the host-side rounding of the last move.
  return static_cast<std::int64_t>(std::floor(limit / resolution + 1.0 + 1e-9));
}

}  // namespace

EmulatorCore::EmulatorCore(MachineProfile profile, EmulatorOptions options)
    : profile_(std::move(profile)),
      options_(options),
      bend_limit_steps_(limit_steps(profile_.bend.hard_stop, profile_.bend_resolution())),
      rotate_limit_steps_(limit_steps(profile_.rotate.max_cumulative, profile_.rotate_resolution())) {}

void EmulatorCore::record(std::string line) { log_.push_back(std::move(line)); }

std::int64_t EmulatorCore::pulse(Axis axis, std::int64_t steps, const std::atomic<bool>& abort) {
  const double rate = axis == Axis::Feed   ? profile_.speeds.feed / profile_.feed_resolution()
                      : axis == Axis::Bend ? profile_.speeds.bend / profile_.bend_resolution()
                                           : profile_.speeds.rotate / profile_.rotate_resolution();
  const std::int64_t total = std::abs(steps);
  const std::int64_t dir = steps < 0 ? -1 : 1;
  // Batches of about one millisecond of wall time; everything at once when unpaced.
  const std::int64_t batch =
      options_.time_scale > 0.0 ? std::max<std::int64_t>(1, static_cast<std::int64_t>(rate * 1e-3 / options_.time_scale))
                                : std::max<std::int64_t>(1, total);
  std::int64_t done = 0;
  while (done < total) {
    if (abort.load()) break;
    const std::int64_t n = std::min(batch, total - done);
    if (options_.time_scale > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(static_cast<double>(n) / rate * options_.time_scale));
    }
    std::lock_guard lock(mu_);
    const std::int64_t delta = dir * n;
    switch (axis) {
      case Axis::Feed:
        status_.feed_steps += delta;
        wire_.apply(Instruction::feed(static_cast<double>(n) * profile_.feed_resolution()), status_.commands);
        break;
      case Axis::Rotate:
        status_.rotate_steps += delta;
        wire_.apply(Instruction::rotate(static_cast<double>(delta) * profile_.rotate_resolution()), status_.commands);
        break;
      case Axis::Bend: {
        const std::int64_t before = status_.bend_steps;
        const std::int64_t after = before + delta;
        status_.bend_steps = after;
        if (!status_.retracted) {
          // The peg deforms the wire only while pushing past its previous excursion on its side.
          const std::int64_t pushed =
              std::max<std::int64_t>(0, status_.peg_side * after - std::max<std::int64_t>(0, status_.peg_side * before));
          if (pushed > 0) {
            status_.bend_swept_steps += status_.peg_side * pushed;
            wire_.apply(Instruction::bend(static_cast<double>(status_.peg_side * pushed) * profile_.bend_resolution()),
                        status_.commands);
          }
        }
        break;
      }
    }
    done += n;
  }
  return done;
}

Response EmulatorCore::execute(const Command& cmd, const std::atomic<bool>& abort,
                               const std::function<void(const Response&)>& emit) {
  {
    std::lock_guard lock(mu_);
    ++status_.commands;
    record(protocol::format(cmd));
    if (cmd.op == Op::Home) {
      status_.bend_steps = 0;
      status_.homed = true;
      status_.retracted = false;
      status_.peg_side = 1;
      status_.stopped = false;
      ++status_.limit_switch_hits;
      record("limit switch: bend axis home");
    } else if (status_.stopped || abort.load()) {
      return err(ErrorCode::Stopped);
    }
  }
  if (cmd.op == Op::Home) {
    if (emit) emit({ResponseKind::Hit, 0});
    return ok();
  }

  switch (cmd.op) {
    case Op::Feed: {
      if (cmd.arg < 0) return err(ErrorCode::OutOfRange);
      return pulse(Axis::Feed, cmd.arg, abort) == cmd.arg ? ok() : err(ErrorCode::Stopped);
    }
    case Op::Bend: {
      {
        std::lock_guard lock(mu_);
        if (!status_.homed) return err(ErrorCode::NotHomed);
        if (std::abs(status_.bend_steps + cmd.arg) > bend_limit_steps_) return err(ErrorCode::OutOfRange);
      }
      return pulse(Axis::Bend, cmd.arg, abort) == std::abs(cmd.arg) ? ok() : err(ErrorCode::Stopped);
    }
    case Op::Rotate: {
      {
        std::lock_guard lock(mu_);
        if (std::abs(status_.rotate_steps + cmd.arg) > rotate_limit_steps_) return err(ErrorCode::OutOfRange);
      }
      return pulse(Axis::Rotate, cmd.arg, abort) == std::abs(cmd.arg) ? ok() : err(ErrorCode::Stopped);
    }
    case Op::Retract: {
      std::lock_guard lock(mu_);
      if (cmd.arg == 1) {
        status_.retracted = true;
      } else if (status_.retracted) {
        // Lowering after a lift puts the peg on the other side of the wire.
        status_.retracted = false;
        status_.peg_side = -status_.peg_side;
      }
      return ok();
    }
    case Op::Home:
    case Op::Stop:
      break;
  }
  return err(ErrorCode::UnknownCommand);
}

void EmulatorCore::latch_stop() {
  std::lock_guard lock(mu_);
  status_.stopped = true;
  record("STOP");
}

EmulatorStatus EmulatorCore::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

WirePolyline EmulatorCore::wire() const {
  std::lock_guard lock(mu_);
  return wire_.emitted;
}

std::vector<std::string> EmulatorCore::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

EmulatorSession::EmulatorSession(std::shared_ptr<EmulatorCore> core, std::unique_ptr<Transport> transport)
    : core_(std::move(core)), transport_(std::move(transport)) {
  reader_ = std::thread([this] { reader_loop(); });
  executor_ = std::thread([this] { executor_loop(); });
}

EmulatorSession::~EmulatorSession() {
  request_close();
  if (reader_.joinable()) reader_.join();
  if (executor_.joinable()) executor_.join();
}

void EmulatorSession::wait() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return finished_threads_ == 2; });
}

void EmulatorSession::request_close() {
  {
    std::lock_guard lock(mu_);
    done_ = true;
  }
  abort_ = true;
  cv_.notify_all();
  transport_->close();
}

void EmulatorSession::finish_thread() {
  std::lock_guard lock(mu_);
  done_ = true;
  ++finished_threads_;
  cv_.notify_all();
}

void EmulatorSession::send(const Response& r) {
  std::lock_guard lock(write_mu_);
  try {
    transport_->write_line(protocol::format(r));
  } catch (const std::exception&) {
    // Peer went away; the reader notices and ends the session.
  }
}

void EmulatorSession::reader_loop() {
  using namespace std::chrono_literals;
  for (;;) {
    {
      std::lock_guard lock(mu_);
      if (done_) break;
    }
    const auto line = transport_->read_line(50ms);
    if (!line) {
      if (transport_->closed()) break;
      continue;
    }
    const auto parsed = protocol::parse_command(*line);
    std::unique_lock lock(mu_);
    if (parsed.command && parsed.command->op == Op::Stop) {
      core_->latch_stop();
      if (in_flight_ > 0) {
        abort_ = true;
        stop_ack_pending_ = true;
      } else {
        lock.unlock();
        send(ok());
      }
      continue;
    }
    // Malformed lines are queued too so replies stay in request order.
    queue_.push_back({parsed.command, parsed.error});
    ++in_flight_;
    cv_.notify_all();
  }
  finish_thread();
}

void EmulatorSession::executor_loop() {
  for (;;) {
    Pending next;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return done_ || !queue_.empty(); });
      if (done_) break;
      next = queue_.front();
      queue_.pop_front();
    }
    const Response r = next.command ? core_->execute(*next.command, abort_, [this](const Response& ev) { send(ev); })
                                    : err(next.parse_error);
    bool ack_stop = false;
    {
      std::lock_guard lock(mu_);
      --in_flight_;
      if (in_flight_ == 0) {
        ack_stop = stop_ack_pending_;
        stop_ack_pending_ = false;
        abort_ = false;
      }
    }
    send(r);
    if (ack_stop) send(ok());
  }
  finish_thread();
}

Emulator::Emulator(MachineProfile profile, EmulatorOptions options)
    : core_(std::make_shared<EmulatorCore>(std::move(profile), options)) {}

Emulator::~Emulator() {
  stop_listening();
  std::lock_guard lock(sessions_mu_);
  sessions_.clear();
}

std::unique_ptr<Transport> Emulator::connect() {
  auto [host_end, machine_end] = make_pipe();
  std::lock_guard lock(sessions_mu_);
  sessions_.push_back(std::make_unique<EmulatorSession>(core_, std::move(machine_end)));
  return std::move(host_end);
}

std::uint16_t Emulator::listen(std::uint16_t port, const std::string& host) {
  listener_ = std::make_unique<TcpListener>(port, host);
  listening_ = true;
  acceptor_ = std::thread([this] {
    while (listening_) {
      auto client = listener_->accept();
      if (!client) break;
      auto session = std::make_unique<EmulatorSession>(core_, std::move(client));
      {
        std::lock_guard lock(sessions_mu_);
        tcp_session_ = session.get();
      }
      session->wait();
      {
        std::lock_guard lock(sessions_mu_);
        tcp_session_ = nullptr;
      }
    }
  });
  return listener_->port();
}

void Emulator::serve_forever() {
  if (acceptor_.joinable()) acceptor_.join();
}

void Emulator::stop_listening() {
  listening_ = false;
  if (listener_) listener_->close();
  {
    std::lock_guard lock(sessions_mu_);
    if (tcp_session_) tcp_session_->request_close();
  }
  if (acceptor_.joinable() && acceptor_.get_id() != std::this_thread::get_id()) acceptor_.join();
}

}  // namespace wirebend
