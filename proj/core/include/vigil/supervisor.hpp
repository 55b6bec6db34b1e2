#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vigil/history.hpp"
#include "vigil/judgement.hpp"
#include "vigil/monitor.hpp"
#include "vigil/scenario.hpp"
#include "vigil/trust.hpp"

namespace vigil {

enum class ProcStatus : uint8_t { Running, Halted, Faulted, Killed, Refused };

const char* proc_status_name(ProcStatus s);

// One supervised process: its program, live state, archive, and the
// per-process detector bookkeeping.
struct Process {
  std::string pid;
  std::optional<Program> program;  // empty when the launch was refused
  VmState state;
  std::unique_ptr<HistoryStore> history;
  CycleDetector cycles;
  ProcStatus status = ProcStatus::Running;
  PolicyFile policy;

  // Finding deduplication: each episode is reported once.
  std::set<FindingKind> reported_once;
  std::set<uint16_t> reported_loop_pcs;
  std::optional<uint64_t> reported_interrupt_since;
  std::map<std::string, bool> range_violating;

  bool live() const { return status == ProcStatus::Running; }
};

struct ScriptedRequest {
  uint64_t tick = 0;
  std::string raw;
};

// The supervisor loop. Each tick boundary serves queued requests, injects
// scheduled interrupts, steps every live process, archives the new states,
// runs the detectors, converts findings into security reports and trust
// deductions, runs scheduled judgements against the just-archived states,
// and finally writes the abnormality flag for flagged processes. Requests
// are only ever served at boundaries, so every judgement refers to an
// unambiguous snapshot.
class Supervisor {
 public:
  explicit Supervisor(Scenario scenario);

  // Measures and verifies launch artifacts, admits or refuses each program,
  // and records the tick-0 snapshots. Throws ScenarioInvalid when an admitted
  // program does not assemble.
  void launch();

  // Runs the loop to run_limit or until no process is live, serving the
  // request script at its recorded ticks, then serves any trailing requests.
  void run();

  void set_request_script(std::vector<ScriptedRequest> script);
  // Optional interactive source drained at every tick boundary.
  void set_request_poll(std::function<std::vector<std::string>()> poll,
                        std::function<void(const std::string&)> sink);

  // Serves one request line at the current boundary and returns the full
  // response block (content lines, plus a #mac trailer in keyed mode).
  std::string serve_line(const std::string& raw);

  uint64_t now() const { return now_; }
  bool keyed() const { return scenario_.mac_key.has_value(); }
  bool attestation_failed() const { return attestation_failed_; }
  const std::vector<Measurement>& measurements() const { return measurements_; }
  const Digest& pcr_value() const { return pcr_.value(); }
  const JudgementLog& judgements() const { return judgement_log_; }
  const TrustLedger& trust() const { return trust_; }
  const std::vector<SecurityReport>& reports() const { return reports_; }
  const Process* process(const std::string& pid) const;
  const std::vector<Process>& processes() const { return processes_; }

  std::string summary_text() const;
  // 0 ok, 3 when any attestation mismatch occurred.
  int suggested_exit_code() const;

  // Everything a run emits, as (file name, content) pairs with stable order.
  std::vector<std::pair<std::string, std::string>> log_files() const;

 private:
  Process* find(const std::string& pid);
  bool any_live() const;
  void serve_boundary(uint64_t now);
  void inject_interrupts(uint64_t now);
  void step_processes(uint64_t now);
  void post_step(uint64_t now);
  void emit_finding(Process& proc, const Finding& finding,
                    std::vector<std::string>* flag_pids);
  void emit_report(const SecurityReport& report);
  void check_ranges(Process& proc);
  void run_scheduled_judgements(uint64_t now);
  std::string handle(const std::string& effective, uint64_t now);
  std::string respond_ask(const std::vector<std::string>& args,
                          const std::string& rest, uint64_t now);
  std::string respond_status(const std::string& pid) const;
  std::string respond_attest() const;
  std::string finish_block(std::string content) const;

  Scenario scenario_;
  std::vector<Process> processes_;
  TrustLedger trust_;
  JudgementLog judgement_log_;
  Pcr pcr_;
  std::vector<Measurement> measurements_;
  bool attestation_failed_ = false;
  bool launched_ = false;
  uint64_t now_ = 0;

  std::vector<ScriptedRequest> script_;
  size_t script_pos_ = 0;
  std::function<std::vector<std::string>()> poll_;
  std::function<void(const std::string&)> sink_;

  std::vector<SecurityReport> reports_;
  std::vector<std::string> finding_lines_;
  std::vector<std::string> report_lines_;
  std::vector<std::string> refusal_lines_;
  std::vector<std::string> request_lines_;
  std::vector<std::string> response_blocks_;
};

// Byte-compares two log bundles; reports the first diverging file and line.
struct Divergence {
  std::string file;
  size_t line = 0;  // 1-based; 0 when a whole file is missing or extra
  std::string detail;
};
std::optional<Divergence> compare_logs(
    const std::vector<std::pair<std::string, std::string>>& expected,
    const std::vector<std::pair<std::string, std::string>>& actual);

}  // namespace vigil
