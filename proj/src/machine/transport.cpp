#include "wirebend/machine/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cerrno>
#include <cstring>

#include "wirebend/errors.hpp"

namespace wirebend {

void LineQueue::push(std::string line) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    lines_.push_back(std::move(line));
  }
  cv_.notify_one();
}

std::optional<std::string> LineQueue::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !lines_.empty() || closed_; });
  if (lines_.empty()) return std::nullopt;
  auto line = std::move(lines_.front());
  lines_.pop_front();
  return line;
}

void LineQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool LineQueue::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

namespace {

class PipeEnd final : public Transport {
 public:
  PipeEnd(std::shared_ptr<LineQueue> in, std::shared_ptr<LineQueue> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~PipeEnd() override { close(); }

  void write_line(std::string_view line) override {
    if (out_->closed()) throw MachineError("transport closed");
    out_->push(std::string(line));
  }
  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override { return in_->pop(timeout); }
  void close() override {
    in_->close();
    out_->close();
  }
  bool closed() const override { return out_->closed(); }

 private:
  std::shared_ptr<LineQueue> in_;
  std::shared_ptr<LineQueue> out_;
};

class TcpStream final : public Transport {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpStream() override {
    close();
  }

  void write_line(std::string_view line) override {
    std::string buf(line);
    buf += '\n';
    std::lock_guard lock(write_mu_);
    std::size_t sent = 0;
    while (sent < buf.size()) {
      const auto n = ::send(fd_.load(), buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        throw MachineError("socket write failed");
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        auto line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_ || fd_.load() < 0) return std::nullopt;
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd pfd{fd_.load(), POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 50)));
      if (r < 0 && errno != EINTR) return std::nullopt;
      if (r <= 0) continue;
      char chunk[512];
      const auto n = ::recv(fd_.load(), chunk, sizeof chunk, 0);
      if (n <= 0) {
        eof_ = true;
        continue;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close() override {
    const int fd = fd_.exchange(-1);
    if (fd >= 0) {
      ::shutdown(fd, SHUT_RDWR);
      ::close(fd);
    }
  }
  bool closed() const override { return fd_.load() < 0 || eof_; }

 private:
  std::atomic<int> fd_;
  std::mutex write_mu_;
  std::string buffer_;
  std::atomic<bool> eof_{false};
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_pipe() {
  auto a_to_b = std::make_shared<LineQueue>();
  auto b_to_a = std::make_shared<LineQueue>();
  return {std::make_unique<PipeEnd>(b_to_a, a_to_b), std::make_unique<PipeEnd>(a_to_b, b_to_a)};
}

std::unique_ptr<Transport> connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res) {
    throw MachineError("cannot resolve " + host);
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    ::freeaddrinfo(res);
    if (fd >= 0) ::close(fd);
    throw MachineError("cannot connect to " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  ::freeaddrinfo(res);
  return std::make_unique<TcpStream>(fd);
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw MachineError("socket() failed");
  fd_ = fd;
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw MachineError("bad listen address " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 4) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw MachineError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<Transport> TcpListener::accept() {
  for (;;) {
    const int lfd = fd_;
    if (lfd < 0) return nullptr;
    pollfd pfd{lfd, POLLIN, 0};
    const int r = ::poll(&pfd, 1, 100);
    if (r <= 0) continue;
    const int cfd = ::accept(lfd, nullptr, nullptr);
    if (cfd >= 0) return std::make_unique<TcpStream>(cfd);
    if (fd_ < 0) return nullptr;
  }
}

void TcpListener::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

std::pair<std::string, std::uint16_t> split_address(const std::string& address) {
  std::string host = "127.0.0.1";
  std::string port = address;
  if (const auto colon = address.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = address.substr(0, colon);
    port = address.substr(colon + 1);
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc{} || ptr != port.data() + port.size() || value < 0 || value > 65535) {
    throw InvalidInput("bad address '" + address + "', expected host:port");
  }
  return {host, static_cast<std::uint16_t>(value)};
}

}  // namespace wirebend
