#include "wirebend/service/service.hpp"

#include <ctime>
#include <filesystem>

namespace wirebend {

namespace fs = std::filesystem;

const char* to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Validated:
      return "validated";
    case JobStatus::Compiled:
      return "compiled";
    case JobStatus::Simulated:
      return "simulated";
    case JobStatus::Running:
      return "running";
    case JobStatus::Done:
      return "done";
    case JobStatus::Stopped:
      return "stopped";
    case JobStatus::Failed:
      return "failed";
  }
  return "failed";
}

std::optional<JobStatus> job_status_from_string(std::string_view s) {
  for (auto st : {JobStatus::Validated, JobStatus::Compiled, JobStatus::Simulated, JobStatus::Running, JobStatus::Done,
                  JobStatus::Stopped, JobStatus::Failed}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

bool is_valid_transition(JobStatus from, JobStatus to) {
  switch (from) {
    case JobStatus::Validated:
      return to == JobStatus::Compiled;
    case JobStatus::Compiled:
      return to == JobStatus::Simulated;
    case JobStatus::Simulated:
      return to == JobStatus::Running;
    case JobStatus::Running:
      return to == JobStatus::Done || to == JobStatus::Stopped || to == JobStatus::Failed;
    default:
      return false;
  }
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const auto secs = std::chrono::system_clock::to_time_t(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%03dZ", static_cast<int>(ms));
  return buf;
}

void JobRecord::advance(JobStatus next) {
  if (!is_valid_transition(status, next)) {
    throw ConflictError("job " + id + " cannot move from " + to_string(status) + " to " + to_string(next));
  }
  status = next;
  updated_at = utc_timestamp();
  history.emplace_back(next, updated_at);
}

void to_json(json& j, const JobRecord& r) {
  json history = json::array();
  for (const auto& [st, at] : r.history) history.push_back({{"status", to_string(st)}, {"at", at}});
  j = json{{"id", r.id},
           {"graph_hash", r.graph_hash},
           {"status", to_string(r.status)},
           {"program_text", r.program_text},
           {"program", r.program},
           {"diagnostics", r.diagnostics},
           {"program_diagnostics", r.program_diagnostics},
           {"timeline", r.timeline},
           {"history", history},
           {"created_at", r.created_at},
           {"updated_at", r.updated_at},
           {"run", r.run},
           {"stop_ack_ms", r.stop_ack_ms ? json(*r.stop_ack_ms) : json(nullptr)},
           {"error", r.error}};
}

JobRecord job_from_json(const json& j) {
  try {
    JobRecord r;
    r.id = j.at("id").get<std::string>();
    r.graph_hash = j.value("graph_hash", std::string{});
    r.program_text = j.at("program_text").get<std::string>();
    r.program = parse_text(r.program_text);
    r.program.source_hash = r.graph_hash;
    r.diagnostics = j.value("diagnostics", json(nullptr));
    r.program_diagnostics = j.value("program_diagnostics", json(nullptr));
    r.timeline = j.value("timeline", json(nullptr));
    const auto status = job_status_from_string(j.at("status").get<std::string>());
    if (!status) throw ParseError("unknown job status");
    r.status = *status;
    for (const auto& h : j.value("history", json::array())) {
      const auto st = job_status_from_string(h.at("status").get<std::string>());
      if (!st) throw ParseError("unknown job status in history");
      r.history.emplace_back(*st, h.at("at").get<std::string>());
    }
    r.created_at = j.value("created_at", std::string{});
    r.updated_at = j.value("updated_at", std::string{});
    r.run = j.value("run", json(nullptr));
    if (j.contains("stop_ack_ms") && j["stop_ack_ms"].is_number()) r.stop_ack_ms = j["stop_ack_ms"].get<double>();
    r.error = j.value("error", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad job record: ") + e.what());
  }
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  options_.profile.validate();
  if (!options_.jobs_dir.empty()) load_jobs();
}

Service::~Service() {
  bool running = false;
  {
    std::lock_guard lock(jobs_mu_);
    running = !active_job_.empty();
  }
  std::lock_guard lock(machine_mu_);
  if (running && controller_) {
    try {
      controller_->stop();
    } catch (const std::exception&) {
    }
  }
  join_watcher();
  controller_.reset();
  emulator_.reset();
}

MachineProfile Service::profile() const {
  std::lock_guard lock(profile_mu_);
  return options_.profile;
}

void Service::set_profile(MachineProfile profile) {
  profile.validate();
  std::lock_guard machine_lock(machine_mu_);
  {
    std::lock_guard lock(jobs_mu_);
    if (!active_job_.empty()) throw ConflictError("cannot change the profile while job " + active_job_ + " is running");
  }
  {
    std::lock_guard lock(profile_mu_);
    options_.profile = std::move(profile);
  }
  reset_machine();
}

void Service::persist(const JobRecord& r) const {
  if (options_.jobs_dir.empty()) return;
  write_file((fs::path(options_.jobs_dir) / (r.id + ".txt")).string(), r.program_text);
  write_file((fs::path(options_.jobs_dir) / (r.id + ".json")).string(), json(r).dump(2) + "\n");
}

void Service::load_jobs() {
  fs::create_directories(options_.jobs_dir);
  for (const auto& entry : fs::directory_iterator(options_.jobs_dir)) {
    if (entry.path().extension() != ".json") continue;
    auto r = job_from_json(json::parse(read_file(entry.path().string())));
    if (r.status == JobStatus::Running) {
      r.advance(JobStatus::Failed);
      r.error = "service restarted during the run";
      persist(r);
    }
    const auto dash = r.id.rfind('-');
    if (dash != std::string::npos) {
      try {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(r.id.substr(dash + 1)) + 1);
      } catch (const std::exception&) {
      }
    }
    jobs_[r.id] = std::move(r);
  }
}

JobRecord Service::create_job(const json& body) {
  const auto prof = profile();
  JobRecord r;
  r.created_at = utc_timestamp();
  r.updated_at = r.created_at;
  r.history.emplace_back(JobStatus::Validated, r.created_at);

  if (body.is_object() && body.contains("program")) {
    r.program = program_from_json(body["program"]);
    r.graph_hash = r.program.source_hash;
    r.advance(JobStatus::Compiled);
  } else {
    const auto input = graph_from_request(body);
    auto diag = check_all(input.graph, prof);
    diag.warnings.insert(diag.warnings.begin(), input.warnings.begin(), input.warnings.end());
    r.diagnostics = diag;
    r.graph_hash = input.graph.content_hash();
    r.program = compile_graph(input, prof, compile_options_from_json(body)).program;
    r.advance(JobStatus::Compiled);
  }
  r.program_text = emit_text(r.program);
  const auto sim = simulate_program(r.program, prof);
  r.program_diagnostics = sim.diagnostics;
  r.timeline = sim.timeline;
  r.advance(JobStatus::Simulated);

  std::lock_guard lock(jobs_mu_);
  r.id = "job-" + std::to_string(next_id_++);
  persist(r);
  jobs_[r.id] = r;
  return r;
}

JobRecord& Service::find(const std::string& id) {
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFoundError("no job '" + id + "'");
  return it->second;
}

JobRecord Service::job(const std::string& id) const {
  std::lock_guard lock(jobs_mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFoundError("no job '" + id + "'");
  return it->second;
}

std::vector<JobRecord> Service::jobs() const {
  std::lock_guard lock(jobs_mu_);
  std::vector<JobRecord> out;
  for (const auto& [id, r] : jobs_) out.push_back(r);
  return out;
}

MachineController& Service::machine() {
  if (!controller_) {
    const auto prof = profile();
    std::unique_ptr<Transport> transport;
    if (options_.machine_address.empty()) {
      emulator_ = std::make_unique<Emulator>(prof, options_.emulator);
      transport = emulator_->connect();
    } else {
      const auto [host, port] = split_address(options_.machine_address);
      transport = connect_tcp(host, port);
    }
    controller_ = std::make_unique<MachineController>(std::move(transport), prof, options_.controller);
  }
  return *controller_;
}

void Service::reset_machine() {
  join_watcher();
  controller_.reset();
  emulator_.reset();
}

void Service::join_watcher() {
  if (watcher_.joinable()) watcher_.join();
}

JobRecord Service::start_job(const std::string& id) {
  std::lock_guard machine_lock(machine_mu_);
  InstructionProgram program;
  JobRecord snapshot;
  {
    std::lock_guard lock(jobs_mu_);
    if (!active_job_.empty()) throw ConflictError("machine is busy with job " + active_job_);
    auto& r = find(id);
    if (r.status != JobStatus::Simulated) {
      throw ConflictError("job " + id + " is " + to_string(r.status) + " and cannot be started");
    }
    if (r.program_diagnostics.is_object() && !r.program_diagnostics.value("fabricable", true)) {
      throw LimitError("job " + id + " violates machine limits; see program_diagnostics");
    }
    program = r.program;
  }
  join_watcher();
  auto& m = machine();
  {
    std::lock_guard lock(jobs_mu_);
    auto& r = find(id);
    r.advance(JobStatus::Running);
    active_job_ = id;
    persist(r);
    snapshot = r;
  }
  auto future = m.start_program(program);
  watcher_ = std::thread([this, id, future = std::move(future)]() mutable {
    RunReport report;
    try {
      report = future.get();
    } catch (const std::exception& e) {
      report.status = RunStatus::Failed;
      report.error = e.what();
    }
    std::lock_guard lock(jobs_mu_);
    auto& r = jobs_.at(id);
    r.run = report;
    r.error = report.status == RunStatus::Done ? std::string{} : report.error;
    r.advance(report.status == RunStatus::Done      ? JobStatus::Done
              : report.status == RunStatus::Stopped ? JobStatus::Stopped
                                                    : JobStatus::Failed);
    active_job_.clear();
    persist(r);
    jobs_cv_.notify_all();
  });
  return snapshot;
}

JobRecord Service::stop_job(const std::string& id) {
  {
    std::lock_guard lock(jobs_mu_);
    const auto& r = find(id);
    if (r.status != JobStatus::Running) throw ConflictError("job " + id + " is not running");
  }
  std::chrono::microseconds ack{};
  {
    std::lock_guard machine_lock(machine_mu_);
    ack = machine().stop();
  }
  auto r = wait_job(id, std::chrono::milliseconds(5000));
  std::lock_guard lock(jobs_mu_);
  auto& rec = find(id);
  rec.stop_ack_ms = static_cast<double>(ack.count()) / 1000.0;
  persist(rec);
  return rec;
}

JobRecord Service::wait_job(const std::string& id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(jobs_mu_);
  find(id);
  jobs_cv_.wait_for(lock, timeout, [&] { return find(id).status != JobStatus::Running; });
  return find(id);
}

void Service::jog(const Instruction& ins) {
  std::lock_guard machine_lock(machine_mu_);
  {
    std::lock_guard lock(jobs_mu_);
    if (!active_job_.empty()) throw ConflictError("machine is busy with job " + active_job_);
  }
  machine().jog(ins);
}

void Service::home() {
  std::lock_guard machine_lock(machine_mu_);
  {
    std::lock_guard lock(jobs_mu_);
    if (!active_job_.empty()) throw ConflictError("machine is busy with job " + active_job_);
  }
  machine().home();
}

std::chrono::microseconds Service::machine_stop() {
  std::lock_guard machine_lock(machine_mu_);
  return machine().stop();
}

json Service::machine_status() {
  std::lock_guard machine_lock(machine_mu_);
  auto& m = machine();
  json j{{"emulated", emulator_ != nullptr},
         {"address", options_.machine_address},
         {"homed", m.homed()},
         {"session_log", emit_text(m.session_log())},
         {"events", m.events()}};
  {
    std::lock_guard lock(jobs_mu_);
    j["active_job"] = active_job_.empty() ? json(nullptr) : json(active_job_);
  }
  if (emulator_) {
    const auto s = emulator_->core().status();
    j["emulator"] = {{"homed", s.homed},
                     {"stopped", s.stopped},
                     {"retracted", s.retracted},
                     {"feed_steps", s.feed_steps},
                     {"bend_steps", s.bend_steps},
                     {"rotate_steps", s.rotate_steps},
                     {"commands", s.commands}};
  }
  return j;
}

}  // namespace wirebend
