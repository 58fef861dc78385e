#include <doctest.h>
#include <httplib.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "wirebend/service/http.hpp"
#include "wirebend/service/service.hpp"

using namespace wirebend;
using namespace std::chrono_literals;

namespace {

const std::string kData = std::string(WIREBEND_SOURCE_DIR) + "/data/";

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  const std::string cmd = std::string(WIREBEND_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json graph_body(const std::string& file) { return json::parse(read_file(kData + file)); }

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wirebend_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json u_job() {
  json body = graph_body("u.json");
  body["options"] = {{"correct", false}};
  return body;
}

/// About four seconds of feeding on a real-time emulator.
json slow_job() { return {{"program", {{"text", "F 250\nF 250\n"}}}}; }

ServiceOptions paced(double time_scale) {
  ServiceOptions o;
  o.emulator.time_scale = time_scale;
  return o;
}

}  // namespace

TEST_CASE("pipeline compile and simulate") {
  const auto input = read_graph_file(kData + "u.json");
  const MachineProfile m;
  const auto r = compile_graph(input, m, {false, std::nullopt});
  CHECK(r.text == "F 35.0000\nB 90.0000\nF 35.0000\nB 90.0000\nF 35.0000\n");
  CHECK(r.path == std::vector<VertexIndex>{0, 1, 2, 3});
  CHECK_THROWS_AS(compile_graph(input, m), DomainError);

  auto sb = m;
  sb.compensation.peg_arc_radius = 0.0;
  const auto corrected = compile_graph(input, sb);
  CHECK(corrected.program.error_corrected);
  CHECK(corrected.text.rfind("# error-corrected\nF 33.0699\nB 100.2300\nF 28.5699\n", 0) == 0);
  const auto sim = simulate_program(corrected.program, sb);
  CHECK(distance(sim.polyline.points.back(), {0, 35, 0}) < 1e-3);

  CHECK_THROWS_AS(compile_graph(read_graph_file(kData + "fullcube.json"), m), InvalidInput);
  CHECK_THROWS_AS(compile_graph(read_graph_file(kData + "cube_trace.json"), m), LimitError);
}

TEST_CASE("estimate of the 241 mm cube trace") {
  const auto p = parse_text(read_file(kData + "cube_241.txt"));
  const auto e = estimate(p, MachineProfile{});
  CHECK(e.material_mm == doctest::Approx(241.0));
  CHECK(e.cost == doctest::Approx(241.0 * 0.6 / 304.8));
  CHECK(std::round(e.cost * 100) / 100 == doctest::Approx(0.47));
  CHECK(e.seconds == doctest::Approx(timeline(p, MachineProfile{}).total_time));
}

TEST_CASE("request decoding") {
  CHECK(graph_from_request(graph_body("u.json")).graph.edge_count() == 3);
  CHECK(graph_from_request({{"graph", graph_body("u.json")}}).graph.edge_count() == 3);
  CHECK(graph_from_request({{"obj", "v 0 0 0\nv 30 0 0\nl 1 2\n"}}).graph.edge_count() == 1);
  CHECK_THROWS_AS(graph_from_request({{"nothing", 1}}), ParseError);
  CHECK_FALSE(compile_options_from_json({{"no_correct", true}}).correct);
  CHECK(compile_options_from_json({{"options", {{"path", {3, 2, 1, 0}}}}}).path ==
        std::vector<VertexIndex>{3, 2, 1, 0});
  CHECK(program_from_json({{"text", "F 10\n"}}).size() == 1);
  CHECK(program_from_json({{"instructions", {{{"kind", "F"}, {"magnitude", 30}}, {{"kind", "B"}, {"magnitude", 45}}}}})[1] ==
        Instruction::bend(45));
  CHECK_THROWS_AS(program_from_json({{"instructions", {{{"kind", "B"}, {"magnitude", 45}}}}}), ParseError);
  CHECK(instruction_from_json({{"kind", "B"}, {"magnitude", -45}}) == Instruction::bend(-45));
  CHECK_THROWS_AS(instruction_from_json({{"kind", "B"}, {"magnitude", 190}}), ParseError);
  CHECK_THROWS_AS(program_from_json({{"instructions", {{{"kind", "Q"}, {"magnitude", 1}}}}}), ParseError);
}

TEST_CASE("job lifecycle transitions") {
  CHECK(is_valid_transition(JobStatus::Validated, JobStatus::Compiled));
  CHECK(is_valid_transition(JobStatus::Running, JobStatus::Stopped));
  CHECK_FALSE(is_valid_transition(JobStatus::Done, JobStatus::Running));
  CHECK_FALSE(is_valid_transition(JobStatus::Simulated, JobStatus::Done));
  CHECK_FALSE(is_valid_transition(JobStatus::Compiled, JobStatus::Compiled));
  for (auto s : {JobStatus::Validated, JobStatus::Compiled, JobStatus::Simulated, JobStatus::Running, JobStatus::Done,
                 JobStatus::Stopped, JobStatus::Failed}) {
    CHECK(job_status_from_string(to_string(s)) == s);
  }
  JobRecord r;
  r.advance(JobStatus::Compiled);
  CHECK_THROWS_AS(r.advance(JobStatus::Validated), ConflictError);
}

TEST_CASE("a job runs to completion on the emulator") {
  Service svc;
  auto job = svc.create_job(u_job());
  CHECK(job.status == JobStatus::Simulated);
  CHECK(job.program_text == "F 35.0000\nB 90.0000\nF 35.0000\nB 90.0000\nF 35.0000\n");
  CHECK(job.graph_hash == read_graph_file(kData + "u.json").graph.content_hash());
  svc.start_job(job.id);
  job = svc.wait_job(job.id, 10s);
  CHECK(job.status == JobStatus::Done);
  std::vector<JobStatus> seen;
  for (const auto& [status, when] : job.history) {
    seen.push_back(status);
    CHECK(when.back() == 'Z');
  }
  CHECK(seen == std::vector<JobStatus>{JobStatus::Validated, JobStatus::Compiled, JobStatus::Simulated,
                                       JobStatus::Running, JobStatus::Done});
  CHECK(job.run["status"] == "done");
  CHECK_THROWS_AS(svc.start_job(job.id), ConflictError);
  CHECK_THROWS_AS(svc.job("job-404"), NotFoundError);
  CHECK(svc.jobs().size() == 1);
}

TEST_CASE("unfabricable programs are refused at start") {
  Service svc;
  auto job = svc.create_job({{"program", {{"text", "F 10\n"}}}});
  CHECK(job.status == JobStatus::Simulated);
  CHECK_THROWS_AS(svc.start_job(job.id), LimitError);
  CHECK(svc.job(job.id).status == JobStatus::Simulated);
  CHECK_THROWS_AS(svc.create_job(graph_body("fullcube.json")), InvalidInput);
}

TEST_CASE("the machine session is exclusive") {
  Service svc(paced(1.0));
  const auto a = svc.create_job(slow_job());
  const auto b = svc.create_job({{"program", {{"text", "F 30\n"}}}});
  svc.start_job(a.id);
  CHECK(svc.job(a.id).status == JobStatus::Running);
  CHECK_THROWS_AS(svc.start_job(b.id), ConflictError);
  CHECK_THROWS_AS(svc.start_job(a.id), ConflictError);
  CHECK_THROWS_AS(svc.set_profile(MachineProfile{}), ConflictError);
  CHECK_THROWS_AS(svc.jog(Instruction::feed(30)), ConflictError);
  CHECK(svc.machine_status()["active_job"] == a.id);
  std::this_thread::sleep_for(200ms);
  const auto stopped = svc.stop_job(a.id);
  CHECK(stopped.status == JobStatus::Stopped);
  REQUIRE(stopped.stop_ack_ms.has_value());
  CHECK(*stopped.stop_ack_ms < 100.0);
  CHECK(svc.machine_status()["active_job"].is_null());
  CHECK_THROWS_AS(svc.stop_job(a.id), ConflictError);
  svc.home();
  svc.start_job(b.id);
  CHECK(svc.wait_job(b.id, 10s).status == JobStatus::Done);
}

TEST_CASE("jobs persist across restarts") {
  const auto dir = fresh_dir("jobs");
  std::string id;
  {
    ServiceOptions o;
    o.jobs_dir = dir.string();
    Service svc(o);
    id = svc.create_job(u_job()).id;
    svc.start_job(id);
    CHECK(svc.wait_job(id, 10s).status == JobStatus::Done);
    svc.create_job(u_job());
  }
  CHECK(std::filesystem::exists(dir / (id + ".json")));
  CHECK(read_file((dir / (id + ".txt")).string()) == "F 35.0000\nB 90.0000\nF 35.0000\nB 90.0000\nF 35.0000\n");
  ServiceOptions o;
  o.jobs_dir = dir.string();
  Service again(o);
  const auto jobs = again.jobs();
  REQUIRE(jobs.size() == 2);
  const auto j = again.job(id);
  CHECK(j.status == JobStatus::Done);
  CHECK(j.history.size() == 5);
  CHECK(parse_text(j.program_text).instructions == j.program.instructions);
  CHECK(again.create_job(u_job()).id == "job-3");
  std::filesystem::remove_all(dir);
}

TEST_CASE("job records round trip through json") {
  Service svc;
  const auto job = svc.create_job(u_job());
  const json j = job;
  const auto back = job_from_json(j);
  CHECK(json(back) == j);
  CHECK(back.program == job.program);
}

TEST_CASE("cli and service produce identical artifacts") {
  const auto cli = run_cli("compile " + kData + "u.json --no-correct");
  REQUIRE(cli.exit_code == 0);
  const auto api = compile_graph(read_graph_file(kData + "u.json"), MachineProfile{}, {false, std::nullopt});
  CHECK(cli.out == api.text);

  const auto cli_json = run_cli("compile " + kData + "u.json --no-correct --json");
  CHECK(json::parse(cli_json.out) == json(api));

  const auto check = run_cli("check " + kData + "fullcube.json --json");
  CHECK(check.exit_code == 1);
  const auto diag = check_all(read_graph_file(kData + "fullcube.json").graph, MachineProfile{});
  CHECK(json::parse(check.out) == json(diag));

  const auto sb = run_cli("compile " + kData + "u.json --profile " + kData + "springback_only_profile.json");
  auto profile = load_profile(kData + "springback_only_profile.json");
  CHECK(sb.out == compile_graph(read_graph_file(kData + "u.json"), profile).text);

  const auto est = run_cli("estimate " + kData + "cube_241.txt");
  CHECK(est.out.find("$0.47") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("check " + kData + "cube_trace.json").exit_code == 0);
  CHECK(run_cli("check " + kData + "fullcube.json").exit_code == 1);
  CHECK(run_cli("check " + kData + "does_not_exist.json").exit_code == 2);
  CHECK(run_cli("compile " + kData + "u.json").exit_code == 2);
  const auto err = run_cli("compile " + kData + "u.json --json");
  CHECK(json::parse(err.out)["error"]["kind"] == "domain_error");
}

TEST_CASE("http api") {
  Service svc(paced(0.05));
  HttpApi api(svc);
  const auto port = api.start("127.0.0.1", 0);
  httplib::Client http("127.0.0.1", port);
  http.set_read_timeout(10, 0);
  const std::string kJson = "application/json";
  auto post = [&](const std::string& path, const json& body) { return http.Post(path, body.dump(), kJson); };

  SUBCASE("health and unknown endpoints") {
    auto r = http.Get("/v1/health");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    r = http.Get("/v1/nothing");
    REQUIRE(r);
    CHECK(r->status == 404);
    CHECK(json::parse(r->body)["error"]["kind"] == "not_found");
  }

  SUBCASE("validate, compile, simulate, estimate") {
    auto r = post("/v1/validate", graph_body("fullcube.json"));
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto diag = json::parse(r->body);
    CHECK(diag["overall_fabricable"] == false);
    CHECK(diag["euler"]["status"]["classification"] == "none");

    r = post("/v1/compile", u_job());
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto compiled = json::parse(r->body);
    CHECK(compiled["text"] == run_cli("compile " + kData + "u.json --no-correct").out);

    r = post("/v1/simulate", {{"program", compiled["program"]}});
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body)["polyline"]["points"].size() == 4);

    r = post("/v1/estimate", {{"text", read_file(kData + "cube_241.txt")}});
    REQUIRE(r);
    CHECK(json::parse(r->body)["cost"].get<double>() == doctest::Approx(241.0 * 0.6 / 304.8));
  }

  SUBCASE("error statuses") {
    auto r = http.Post("/v1/compile", "{not json", kJson);
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(json::parse(r->body)["error"]["kind"] == "parse_error");
    r = post("/v1/compile", graph_body("u.json"));
    REQUIRE(r);
    CHECK(r->status == 422);
    CHECK(json::parse(r->body)["error"]["kind"] == "domain_error");
    r = post("/v1/compile", graph_body("fullcube.json"));
    REQUIRE(r);
    CHECK(r->status == 422);
    r = http.Get("/v1/jobs/job-99");
    REQUIRE(r);
    CHECK(r->status == 404);
    r = post("/v1/machine/jog", {{"kind", "B"}, {"magnitude", 90}});
    REQUIRE(r);
    CHECK(r->status == 409);
    r = http.Put("/v1/profile", json{{"speeds", {{"feed", -1}}}}.dump(), kJson);
    REQUIRE(r);
    CHECK(r->status == 422);
  }

  SUBCASE("jobs over http") {
    auto r = post("/v1/jobs", u_job());
    REQUIRE(r);
    CHECK(r->status == 201);
    const std::string id = json::parse(r->body)["id"];
    r = post("/v1/jobs/" + id + "/start", json::object());
    REQUIRE(r);
    CHECK(r->status == 202);
    CHECK(json::parse(r->body)["status"] == "running");
    r = post("/v1/jobs/" + id + "/start", json::object());
    REQUIRE(r);
    CHECK(r->status == 409);
    r = http.Get("/v1/machine");
    REQUIRE(r);
    CHECK(json::parse(r->body)["active_job"] == id);
    CHECK(svc.wait_job(id, 30s).status == JobStatus::Done);
    r = http.Get("/v1/jobs");
    REQUIRE(r);
    CHECK(json::parse(r->body)["jobs"].size() == 1);
    r = http.Get("/v1/jobs/" + id);
    CHECK(json::parse(r->body)["status"] == "done");
  }

  SUBCASE("profile") {
    auto r = http.Get("/v1/profile");
    REQUIRE(r);
    auto profile = json::parse(r->body);
    CHECK(profile["limits"]["min_feed"] == 25.0);
    profile["limits"]["min_feed"] = 20.0;
    r = http.Put("/v1/profile", profile.dump(), kJson);
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(svc.profile().limits.min_feed == 20.0);
  }

  SUBCASE("jog and home") {
    auto r = post("/v1/machine/home", json::object());
    REQUIRE(r);
    CHECK(r->status == 200);
    r = post("/v1/machine/jog", {{"instruction", {{"kind", "F"}, {"magnitude", 10}}}});
    REQUIRE(r);
    CHECK(r->status == 200);
    r = http.Get("/v1/machine");
    CHECK(json::parse(r->body)["session_log"] == "F 10.0000\n");
  }

  api.stop();
}
