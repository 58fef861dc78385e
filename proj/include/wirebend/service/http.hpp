#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "wirebend/service/service.hpp"

namespace httplib {
class Server;
}

namespace wirebend {

/// HTTP status for an exception raised while handling a request.
int http_status_for(const std::exception& e);

/// The /v1 JSON API over a Service.
class HttpApi {
 public:
  explicit HttpApi(Service& service);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds (port 0 picks a free one) and serves on a background thread. Returns the port.
  std::uint16_t start(const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, std::uint16_t port);
  void stop();

 private:
  void routes();

  Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace wirebend
