#include "wirebend/service/http.hpp"

#include <httplib.h>

#include "wirebend/machine/protocol.hpp"

namespace wirebend {

namespace {

constexpr const char* kJson = "application/json";

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("request body is not JSON: ") + e.what());
  }
}

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const std::exception& e) {
      reply(res, error_json(e), http_status_for(e));
    }
  };
}

Instruction jog_instruction(const json& body) {
  return instruction_from_json(body.contains("instruction") ? body["instruction"] : body);
}

}  // namespace

int http_status_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 400;
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const ConflictError*>(&e)) return 409;
  if (dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const LimitError*>(&e)) {
    return 422;
  }
  if (const auto* m = dynamic_cast<const MachineError*>(&e)) {
    const auto code = static_cast<protocol::ErrorCode>(m->code());
    if (code == protocol::ErrorCode::NotHomed || code == protocol::ErrorCode::Stopped) return 409;
    if (code == protocol::ErrorCode::OutOfRange) return 422;
    return 502;
  }
  return 500;
}

HttpApi::HttpApi(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) { routes(); }

HttpApi::~HttpApi() { stop(); }

void HttpApi::routes() {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"}});
  s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) { reply(res, {{"status", "ok"}}); });

  s.Post("/v1/validate", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto input = graph_from_request(parse_body(req));
           auto diag = check_all(input.graph, service_.profile());
           diag.warnings.insert(diag.warnings.begin(), input.warnings.begin(), input.warnings.end());
           reply(res, diag);
         }));

  s.Post("/v1/compile", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           const auto input = graph_from_request(body);
           reply(res, compile_graph(input, service_.profile(), compile_options_from_json(body)));
         }));

  s.Post("/v1/simulate", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           const auto program = program_from_json(body.contains("program") ? body["program"] : body);
           reply(res, simulate_program(program, service_.profile()));
         }));

  s.Post("/v1/estimate", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           const auto program = program_from_json(body.contains("program") ? body["program"] : body);
           reply(res, estimate(program, service_.profile()));
         }));

  s.Post("/v1/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
           reply(res, service_.create_job(parse_body(req)), 201);
         }));
  s.Get("/v1/jobs", guarded([this](const httplib::Request&, httplib::Response& res) {
          reply(res, {{"jobs", service_.jobs()}});
        }));
  s.Get("/v1/jobs/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
          reply(res, service_.job(req.path_params.at("id")));
        }));
  s.Post("/v1/jobs/:id/start", guarded([this](const httplib::Request& req, httplib::Response& res) {
           reply(res, service_.start_job(req.path_params.at("id")), 202);
         }));
  s.Post("/v1/jobs/:id/stop", guarded([this](const httplib::Request& req, httplib::Response& res) {
           reply(res, service_.stop_job(req.path_params.at("id")));
         }));

  s.Get("/v1/machine", guarded([this](const httplib::Request&, httplib::Response& res) {
          reply(res, service_.machine_status());
        }));
  s.Post("/v1/machine/jog", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto ins = jog_instruction(parse_body(req));
           service_.jog(ins);
           reply(res, {{"ok", true}, {"instruction", {{"kind", std::string(1, command_letter(ins.kind))},
                                                      {"magnitude", ins.magnitude}}}});
         }));
  s.Post("/v1/machine/home", guarded([this](const httplib::Request&, httplib::Response& res) {
           service_.home();
           reply(res, {{"ok", true}});
         }));
  s.Post("/v1/machine/stop", guarded([this](const httplib::Request&, httplib::Response& res) {
           const auto ack = service_.machine_stop();
           reply(res, {{"ok", true}, {"ack_ms", static_cast<double>(ack.count()) / 1000.0}});
         }));

  s.Get("/v1/profile", guarded([this](const httplib::Request&, httplib::Response& res) {
          reply(res, json(service_.profile()));
        }));
  s.Put("/v1/profile", guarded([this](const httplib::Request& req, httplib::Response& res) {
          MachineProfile p;
          try {
            p = parse_body(req).get<MachineProfile>();
          } catch (const json::exception& e) {
            throw ParseError(std::string("bad profile: ") + e.what());
          }
          service_.set_profile(p);
          reply(res, json(service_.profile()));
        }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      reply(res, {{"error", {{"kind", "not_found"}, {"message", "no such endpoint"}}}}, res.status);
    }
  });
}

std::uint16_t HttpApi::start(const std::string& host, std::uint16_t port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw InvalidInput("cannot listen on " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return static_cast<std::uint16_t>(bound);
}

void HttpApi::listen(const std::string& host, std::uint16_t port) {
  if (!server_->listen(host, port)) throw InvalidInput("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpApi::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace wirebend
