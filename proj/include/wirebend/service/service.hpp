#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wirebend/errors.hpp"
#include "wirebend/machine/controller.hpp"
#include "wirebend/machine/emulator.hpp"
#include "wirebend/service/pipeline.hpp"

namespace wirebend {

class ConflictError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "conflict"; }
};

class NotFoundError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_found"; }
};

enum class JobStatus { Validated, Compiled, Simulated, Running, Done, Stopped, Failed };

const char* to_string(JobStatus s);
std::optional<JobStatus> job_status_from_string(std::string_view s);
/// Forward moves only: each stage to the next, and running to one of its outcomes.
bool is_valid_transition(JobStatus from, JobStatus to);

struct JobRecord {
  std::string id;
  std::string graph_hash;
  InstructionProgram program;
  std::string program_text;
  json diagnostics;          // design checks, null for jobs submitted as a program
  json program_diagnostics;  // machine limit checks
  json timeline;
  JobStatus status = JobStatus::Validated;
  std::vector<std::pair<JobStatus, std::string>> history;  // status and ISO-8601 UTC time
  std::string created_at;
  std::string updated_at;
  json run;  // RunReport once a run finishes
  std::optional<double> stop_ack_ms;
  std::string error;

  /// Throws ConflictError for a move that is not forward along the lifecycle.
  void advance(JobStatus next);
};

void to_json(json& j, const JobRecord& r);
JobRecord job_from_json(const json& j);

std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

struct ServiceOptions {
  MachineProfile profile;
  /// host:port of a machine speaking the line protocol; empty runs the built-in emulator.
  std::string machine_address;
  EmulatorOptions emulator;
  ControllerOptions controller;
  /// When set, every job is written here as <id>.json plus its instruction file <id>.txt,
  /// and existing records are loaded at startup.
  std::string jobs_dir;
};

/// Job store plus the single machine session. Pipeline calls are pure and may run
/// concurrently; machine operations serialise on the session.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  MachineProfile profile() const;
  /// Replaces the active profile; the machine session is rebuilt. Rejected while running.
  void set_profile(MachineProfile profile);

  /// Body as for /v1/compile (graph plus "options") or a program ({"program": ...}).
  /// Runs validate, compile and simulate; the new job ends at `simulated`.
  JobRecord create_job(const json& body);
  JobRecord job(const std::string& id) const;
  std::vector<JobRecord> jobs() const;

  /// Streams the job's program to the machine in the background. ConflictError if another
  /// job is running or this one has already been started.
  JobRecord start_job(const std::string& id);
  /// Sends STOP and waits for the run to wind down.
  JobRecord stop_job(const std::string& id);
  /// Blocks until the job leaves `running` or the timeout passes.
  JobRecord wait_job(const std::string& id, std::chrono::milliseconds timeout);

  void jog(const Instruction& ins);
  void home();
  std::chrono::microseconds machine_stop();
  json machine_status();

  /// The built-in emulator, or nullptr when driving an external machine.
  Emulator* emulator() { return emulator_.get(); }

 private:
  MachineController& machine();  // requires machine_mu_
  void reset_machine();          // requires machine_mu_
  void persist(const JobRecord& r) const;
  void load_jobs();
  JobRecord& find(const std::string& id);  // requires jobs_mu_
  void join_watcher();

  ServiceOptions options_;
  mutable std::mutex profile_mu_;

  mutable std::mutex jobs_mu_;
  std::condition_variable jobs_cv_;
  std::map<std::string, JobRecord> jobs_;
  std::uint64_t next_id_ = 1;

  std::mutex machine_mu_;
  std::unique_ptr<Emulator> emulator_;
  std::unique_ptr<MachineController> controller_;
  std::string active_job_;  // guarded by jobs_mu_
  std::thread watcher_;
};

}  // namespace wirebend
