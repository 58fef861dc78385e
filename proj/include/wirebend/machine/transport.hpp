#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace wirebend {

/// Line-oriented byte stream. write_line appends the LF; read_line strips it.
/// Writes may come from several threads; reads from one.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void write_line(std::string_view line) = 0;
  /// nullopt on timeout or once the peer has closed and nothing is buffered.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
  virtual bool closed() const = 0;
};

/// One direction of an in-process connection.
class LineQueue {
 public:
  void push(std::string line);
  std::optional<std::string> pop(std::chrono::milliseconds timeout);
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> lines_;
  bool closed_ = false;
};

/// Connected in-process endpoints: what one writes, the other reads.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_pipe();

/// TCP client transport.
std::unique_ptr<Transport> connect_tcp(const std::string& host, std::uint16_t port);

/// Listening TCP socket bound to 127.0.0.1 (or `host`). Port 0 picks a free port.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port = 0, const std::string& host = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Blocks until a client connects or the listener is closed (then nullptr).
  std::unique_ptr<Transport> accept();
  void close();

 private:
  std::atomic<int> fd_{-1};
  std::uint16_t port_ = 0;
};

/// Parses "host:port" (or ":port" / "port") into its parts; host defaults to 127.0.0.1.
std::pair<std::string, std::uint16_t> split_address(const std::string& address);

}  // namespace wirebend
