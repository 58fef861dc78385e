#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wirebend/fabsim.hpp"
#include "wirebend/machine/profile.hpp"
#include "wirebend/machine/protocol.hpp"
#include "wirebend/machine/transport.hpp"

namespace wirebend {

struct EmulatorOptions {
  /// Wall-clock seconds per second of modelled motion. 0 executes moves instantly.
  double time_scale = 0.0;
};

struct EmulatorStatus {
  bool homed = false;
  bool retracted = false;
  bool stopped = false;
  int peg_side = 1;
  std::int64_t feed_steps = 0;
  std::int64_t bend_steps = 0;        // current bend-axis position
  std::int64_t bend_swept_steps = 0;  // signed sum of steps that deformed the wire
  std::int64_t rotate_steps = 0;
  std::size_t commands = 0;
  std::size_t limit_switch_hits = 0;
};

/// Step-accurate machine model behind the line protocol. Axis state and the wire shape it
/// has produced are guarded by an internal mutex, so status reads are safe from any thread.
class EmulatorCore {
 public:
  explicit EmulatorCore(MachineProfile profile, EmulatorOptions options = {});

  /// Executes one non-STOP command. `abort` is polled between pulse batches; `emit` receives
  /// unsolicited lines (HIT). Returns the final response line.
  protocol::Response execute(const protocol::Command& cmd, const std::atomic<bool>& abort,
                             const std::function<void(const protocol::Response&)>& emit);

  /// Latches the stopped state: motion is refused until the next HOME.
  void latch_stop();

  EmulatorStatus status() const;
  WirePolyline wire() const;
  std::vector<std::string> log() const;

  std::int64_t bend_limit_steps() const { return bend_limit_steps_; }
  std::int64_t rotate_limit_steps() const { return rotate_limit_steps_; }

 private:
  enum class Axis { Feed, Bend, Rotate };
  /// Moves `steps` pulses in batches; returns the count actually executed.
  std::int64_t pulse(Axis axis, std::int64_t steps, const std::atomic<bool>& abort);
  void record(std::string line);

  MachineProfile profile_;
  EmulatorOptions options_;
  std::int64_t bend_limit_steps_;
  std::int64_t rotate_limit_steps_;

  mutable std::mutex mu_;
  EmulatorStatus status_;
  SimState wire_;
  std::vector<std::string> log_;
};

/// Serves the protocol for one connection: a reader thread takes lines (handling STOP out
/// of band) and an executor thread runs motion commands in order.
class EmulatorSession {
 public:
  EmulatorSession(std::shared_ptr<EmulatorCore> core, std::unique_ptr<Transport> transport);
  ~EmulatorSession();
  EmulatorSession(const EmulatorSession&) = delete;
  EmulatorSession& operator=(const EmulatorSession&) = delete;

  /// Blocks until the peer disconnects or request_close() is called.
  void wait();
  /// Closes the transport and lets both threads wind down; the destructor joins them.
  void request_close();

 private:
  struct Pending {
    std::optional<protocol::Command> command;
    protocol::ErrorCode parse_error = protocol::ErrorCode::UnknownCommand;
  };

  void reader_loop();
  void executor_loop();
  void finish_thread();
  void send(const protocol::Response& r);

  std::shared_ptr<EmulatorCore> core_;
  std::unique_ptr<Transport> transport_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  std::size_t in_flight_ = 0;  // queued or executing commands
  bool stop_ack_pending_ = false;
  bool done_ = false;
  int finished_threads_ = 0;
  std::atomic<bool> abort_{false};
  std::mutex write_mu_;
  std::thread reader_;
  std::thread executor_;
};

/// A machine emulator reachable in-process (connect) or over TCP (listen).
class Emulator {
 public:
  explicit Emulator(MachineProfile profile = {}, EmulatorOptions options = {});
  ~Emulator();
  Emulator(const Emulator&) = delete;
  Emulator& operator=(const Emulator&) = delete;

  /// Host-side end of a fresh in-process connection.
  std::unique_ptr<Transport> connect();

  /// Starts accepting TCP clients one at a time; returns the bound port.
  std::uint16_t listen(std::uint16_t port = 0, const std::string& host = "127.0.0.1");

  /// Blocks serving TCP clients until stop_listening() (for the standalone emulator process).
  void serve_forever();
  void stop_listening();

  EmulatorCore& core() { return *core_; }
  const EmulatorCore& core() const { return *core_; }

 private:
  std::shared_ptr<EmulatorCore> core_;
  std::mutex sessions_mu_;
  std::vector<std::unique_ptr<EmulatorSession>> sessions_;
  EmulatorSession* tcp_session_ = nullptr;
  std::unique_ptr<TcpListener> listener_;
  std::thread acceptor_;
  std::atomic<bool> listening_{false};
};

}  // namespace wirebend
