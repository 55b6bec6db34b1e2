#include "vigil/supervisor.hpp"

#include <algorithm>
#include <sstream>

#include "vigil/assembler.hpp"

namespace vigil {

const char* proc_status_name(ProcStatus s) {
  switch (s) {
    case ProcStatus::Running: return "running";
    case ProcStatus::Halted: return "halted";
    case ProcStatus::Faulted: return "faulted";
    case ProcStatus::Killed: return "killed";
    case ProcStatus::Refused: return "refused";
  }
  return "?";
}

Supervisor::Supervisor(Scenario scenario) : scenario_(std::move(scenario)) {}

Process* Supervisor::find(const std::string& pid) {
  for (auto& p : processes_) {
    if (p.pid == pid) return &p;
  }
  return nullptr;
}

const Process* Supervisor::process(const std::string& pid) const {
  for (const auto& p : processes_) {
    if (p.pid == pid) return &p;
  }
  return nullptr;
}

bool Supervisor::any_live() const {
  return std::any_of(processes_.begin(), processes_.end(),
                     [](const Process& p) { return p.live(); });
}

void Supervisor::launch() {
  for (const auto& [name, bytes] : scenario_.measured_artifacts) {
    Measurement m{name, measure(bytes)};
    pcr_.extend(m.digest);
    measurements_.push_back(std::move(m));
  }

  std::set<std::string> refused;
  if (scenario_.manifest) {
    LaunchVerification v = verify_launch(*scenario_.manifest, scenario_.measured_artifacts);
    if (!v.ok) {
      attestation_failed_ = true;
      bool scenario_wide = v.measured.size() != scenario_.manifest->expected.size();
      for (size_t idx : v.mismatched) {
        const std::string& name = v.measured[idx].name;
        if (name.starts_with("program:")) {
          refused.insert(name.substr(8));
        } else {
          scenario_wide = true;
        }
      }
      if (v.mismatched.empty()) scenario_wide = true;  // pcr-only mismatch
      if (scenario_wide) {
        for (const auto& spec : scenario_.programs) refused.insert(spec.pid);
      }
    }
  }

  for (const auto& spec : scenario_.programs) {
    Process proc;
    proc.pid = spec.pid;
    proc.policy = spec.policy.value_or(PolicyFile{});
    trust_.register_pid(spec.pid);

    if (refused.contains(spec.pid)) {
      proc.status = ProcStatus::Refused;
      SecurityReport r;
      r.tick = 0;
      r.pid = spec.pid;
      r.kind = ReportKind::AttestationMismatch;
      r.severity = proc.policy.severities.of(r.kind);
      r.details = "launch refused: artifact does not match golden manifest";
      processes_.push_back(std::move(proc));
      emit_report(r);
      continue;
    }

    try {
      proc.program = assemble(spec.source);
    } catch (const AssembleError& e) {
      throw ScenarioInvalid("program " + spec.pid + ": " + e.what());
    }
    proc.history = std::make_unique<HistoryStore>(*proc.program, scenario_.history);
    proc.history->log_event(0, EventKind::ProcessStarted);
    proc.history->record(proc.state, true);
    proc.cycles.observe(proc.pid, *proc.history->latest());
    processes_.push_back(std::move(proc));
    check_ranges(processes_.back());
  }
  launched_ = true;
}

void Supervisor::set_request_script(std::vector<ScriptedRequest> script) {
  std::stable_sort(script.begin(), script.end(),
                   [](const ScriptedRequest& a, const ScriptedRequest& b) {
                     return a.tick < b.tick;
                   });
  script_ = std::move(script);
  script_pos_ = 0;
}

void Supervisor::set_request_poll(std::function<std::vector<std::string>()> poll,
                                  std::function<void(const std::string&)> sink) {
  poll_ = std::move(poll);
  sink_ = std::move(sink);
}

std::string Supervisor::serve_line(const std::string& raw) {
  request_lines_.push_back("@" + std::to_string(now_) + "\t" + raw);

  std::string effective = raw;
  if (keyed()) {
    size_t marker = raw.rfind(" #mac=");
    bool ok = false;
    if (marker != std::string::npos) {
      auto tag = digest_from_hex(raw.substr(marker + 6));
      if (tag) {
        ok = verify_message(*scenario_.mac_key, raw.substr(0, marker), *tag);
      }
      effective = raw.substr(0, marker);
    }
    if (!ok) {
      SecurityReport r;
      r.tick = now_;
      r.pid = "-";
      r.kind = ReportKind::MessageIntegrityFailure;
      r.severity = SeverityTable{}.of(r.kind);
      r.details = "inbound request failed integrity verification";
      emit_report(r);
      std::string block = finish_block("err integrity-failure\n");
      response_blocks_.push_back(block);
      return block;
    }
  }

  std::string block = finish_block(handle(effective, now_));
  response_blocks_.push_back(block);
  return block;
}

std::string Supervisor::finish_block(std::string content) const {
  if (content.empty()) content = "err unknown-command\n";
  if (keyed()) {
    content += "#mac=" + to_hex(tag_message(*scenario_.mac_key, content)) + "\n";
  }
  return content;
}

void Supervisor::serve_boundary(uint64_t now) {
  while (script_pos_ < script_.size() && script_[script_pos_].tick <= now) {
    serve_line(script_[script_pos_].raw);
    ++script_pos_;
  }
  if (poll_) {
    for (const std::string& raw : poll_()) {
      std::string block = serve_line(raw);
      if (sink_) sink_(block);
    }
  }
}

void Supervisor::inject_interrupts(uint64_t now) {
  for (const auto& inj : scenario_.interrupt_script) {
    if (inj.tick != now) continue;
    Process* proc = find(inj.pid);
    if (!proc || !proc->live()) continue;
    proc->state = inject_interrupt(proc->state, now);
    proc->history->log_event(now, EventKind::InterruptInjected);
    proc->cycles.reset();
  }
}

void Supervisor::step_processes(uint64_t now) {
  for (auto& proc : processes_) {
    if (!proc.live()) continue;
    StepEffect effect;
    proc.state = step(proc.state, *proc.program, &effect);
    if (proc.state.halted) proc.status = ProcStatus::Halted;
    if (proc.state.faulted) proc.status = ProcStatus::Faulted;

    if (effect.store_addr) {
      auto report =
          check_write(proc.policy.protected_region, proc.pid, *effect.store_addr,
                      now + 1, Writer::Program, proc.policy.severities);
      if (report) emit_report(*report);
    }
  }
}

void Supervisor::emit_report(const SecurityReport& report) {
  reports_.push_back(report);
  report_lines_.push_back(report.line());
  trust_.apply(report);
}

void Supervisor::emit_finding(Process& proc, const Finding& finding,
                              std::vector<std::string>* flag_pids) {
  finding_lines_.push_back(finding.line());

  SecurityReport r;
  r.tick = finding.tick;
  r.pid = finding.pid;
  r.kind = report_kind_for(finding.kind);
  r.severity = proc.policy.severities.of(r.kind);
  r.details = finding.message;
  emit_report(r);

  if (flag_pids) flag_pids->push_back(proc.pid);
}

void Supervisor::check_ranges(Process& proc) {
  auto violations = check_snapshot(proc.policy.ranges, proc.state, proc.pid,
                                   proc.policy.severities);
  std::set<std::string> violating_now;
  for (auto& v : violations) {
    std::string target = v.details.substr(0, v.details.find('='));
    violating_now.insert(target);
    if (!proc.range_violating[target]) {
      emit_report(v);
    }
  }
  for (const RangeDecl& decl : proc.policy.ranges.ranges) {
    std::string name = decl.target_name();
    proc.range_violating[name] = violating_now.contains(name);
  }
}

void Supervisor::run_scheduled_judgements(uint64_t now) {
  std::vector<std::pair<std::string, const VmState*>> targets;
  for (const auto& proc : processes_) {
    if (proc.live()) targets.emplace_back(proc.pid, &proc.state);
  }
  run_schedule(scenario_.schedule, now, judgement_log_, targets,
               [this, now](const ScheduleEntry& entry, const std::string& pid,
                           const PropError& e) {
                 const char* code = e.kind == PropError::Kind::FreeVariable
                                        ? "free-variable"
                                        : "range-too-large";
                 refusal_lines_.push_back("REFUSAL tick=" + std::to_string(now) +
                                          " pid=" + pid + " name=" + entry.name +
                                          " err=" + code);
               });
}

void Supervisor::post_step(uint64_t now) {
  bool sampled = now % scenario_.sampling_stride == 0;
  std::vector<std::string> flag_pids;

  for (auto& proc : processes_) {
    if (proc.status == ProcStatus::Refused || !proc.history) continue;
    if (proc.state.tick != now) continue;  // not stepped this tick (already dead)

    bool snapshot_due = sampled || !proc.state.live();
    proc.history->record(proc.state, snapshot_due);

    if (!proc.live()) continue;

    if (snapshot_due) {
      if (auto f = proc.cycles.observe(proc.pid, *proc.history->latest())) {
        if (!proc.reported_once.contains(f->kind)) {
          proc.reported_once.insert(f->kind);
          emit_finding(proc, *f, &flag_pids);
        }
      }
    }
    if (auto f = detect_suspected_loop(proc.pid, *proc.history, scenario_.monitor)) {
      if (!proc.reported_loop_pcs.contains(uint16_t(f->evidence_a))) {
        proc.reported_loop_pcs.insert(uint16_t(f->evidence_a));
        emit_finding(proc, *f, &flag_pids);
      }
    }
    if (auto f = check_interrupt_latency(proc.pid, proc.state, scenario_.monitor, now)) {
      if (proc.reported_interrupt_since != proc.state.interrupt_since) {
        proc.reported_interrupt_since = proc.state.interrupt_since;
        emit_finding(proc, *f, &flag_pids);
      }
    }
    if (auto f = check_resources(proc.pid, proc.state, scenario_.monitor)) {
      if (!proc.reported_once.contains(f->kind)) {
        proc.reported_once.insert(f->kind);
        emit_finding(proc, *f, &flag_pids);
      }
    }
    if (sampled) check_ranges(proc);
  }

  run_scheduled_judgements(now);

  // Flag writes are boundary events: they land after the tick's snapshot was
  // archived and judged, and they void any divergence evidence in flight.
  for (const std::string& pid : flag_pids) {
    Process* proc = find(pid);
    if (!proc || !proc->live() || proc->state.mem[kFlagCell] == 1) continue;
    proc->state = set_flag(proc->state);
    proc->history->log_event(now, EventKind::FlagSet);
    proc->cycles.reset();
  }
}

void Supervisor::run() {
  if (!launched_) launch();
  for (now_ = 0; now_ < scenario_.run_limit && any_live(); ++now_) {
    serve_boundary(now_);
    inject_interrupts(now_);
    step_processes(now_);
    post_step(now_ + 1);
  }
  // Trailing requests observe the final states.
  while (script_pos_ < script_.size()) {
    serve_line(script_[script_pos_].raw);
    ++script_pos_;
  }
  if (poll_) {
    for (const std::string& raw : poll_()) {
      std::string block = serve_line(raw);
      if (sink_) sink_(block);
    }
  }
}

// --- request handling -------------------------------------------------------

namespace {
std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}
}  // namespace

std::string Supervisor::respond_ask(const std::vector<std::string>& args,
                                    const std::string& rest, uint64_t now) {
  if (args.size() < 2) return "err bad-prop\n";
  const Process* proc = process(args[0]);
  if (!proc || proc->status == ProcStatus::Refused) return "err unknown-pid\n";

  Prop prop;
  try {
    prop = parse_prop(rest);
  } catch (const PropError&) {
    return "err bad-prop\n";
  }
  try {
    const JudgementRecord& rec = judge(judgement_log_, now, proc->pid, prop, proc->state);
    return std::string(rec.result ? "yes" : "no") + " id=" + std::to_string(rec.id) + "\n";
  } catch (const PropError&) {
    // Refused judgements never fabricate a verdict.
    return "err bad-prop\n";
  }
}

std::string Supervisor::respond_status(const std::string& pid) const {
  std::string out;
  for (const auto& proc : processes_) {
    if (!pid.empty() && proc.pid != pid) continue;
    const Snapshot* latest = proc.history ? proc.history->latest() : nullptr;
    out += "pid=" + proc.pid + " status=" + proc_status_name(proc.status) +
           " tick=" + std::to_string(proc.state.tick) +
           " pc=" + std::to_string(proc.state.pc) +
           " trust=" + std::to_string(trust_.score(proc.pid)) + "/" +
           trust_class_name(trust_.cls(proc.pid)) +
           " reports=" + std::to_string(trust_.report_count(proc.pid)) +
           " digest=" + (latest ? to_hex(latest->state_digest) : "-") + "\n";
  }
  return out;
}

std::string Supervisor::respond_attest() const {
  std::string out;
  for (size_t i = 0; i < measurements_.size(); ++i) {
    out += "measurement " + std::to_string(i) + " name=" + measurements_[i].name +
           " sha256=" + to_hex(measurements_[i].digest) + "\n";
  }
  out += "pcr=" + to_hex(pcr_.value()) + "\n";
  out += std::string("attestation=") +
         (!scenario_.manifest ? "none" : attestation_failed_ ? "mismatch" : "ok") +
         "\n";
  return out;
}

std::string Supervisor::handle(const std::string& effective, uint64_t now) {
  std::vector<std::string> words = split_words(effective);
  if (words.empty()) return "err unknown-command\n";
  const std::string& verb = words[0];
  std::vector<std::string> args(words.begin() + 1, words.end());

  if (verb == "ASK") {
    if (args.empty()) return "err unknown-pid\n";
    // Everything after the pid token is the proposition text.
    size_t verb_pos = effective.find(verb);
    size_t pid_pos = effective.find(args[0], verb_pos + verb.size());
    std::string rest = effective.substr(pid_pos + args[0].size());
    size_t begin = rest.find_first_not_of(" \t");
    rest = begin == std::string::npos ? "" : rest.substr(begin);
    return respond_ask(args, rest, now);
  }
  if (verb == "STATUS") {
    if (!args.empty() && !process(args[0])) return "err unknown-pid\n";
    return respond_status(args.empty() ? "" : args[0]);
  }
  if (verb == "LIST") {
    std::string out = "pids=";
    for (size_t i = 0; i < processes_.size(); ++i) {
      out += (i ? "," : "") + processes_[i].pid;
    }
    return out + "\n";
  }
  if (verb == "TRUST") {
    if (!args.empty() && !process(args[0])) return "err unknown-pid\n";
    std::string out;
    for (const auto& proc : processes_) {
      if (!args.empty() && proc.pid != args[0]) continue;
      out += "pid=" + proc.pid + " score=" + std::to_string(trust_.score(proc.pid)) +
             " class=" + trust_class_name(trust_.cls(proc.pid)) + "\n";
    }
    return out;
  }
  if (verb == "REPORTS") {
    if (!args.empty() && !process(args[0])) return "err unknown-pid\n";
    std::string out;
    size_t n = 0;
    std::string body;
    for (const auto& r : reports_) {
      if (!args.empty() && r.pid != args[0]) continue;
      body += r.line() + "\n";
      ++n;
    }
    out = "ok reports=" + std::to_string(n) + "\n" + body;
    return out;
  }
  if (verb == "HISTORY") {
    if (args.size() != 3) return "err unknown-command\n";
    const Process* proc = process(args[0]);
    if (!proc || !proc->history) return "err unknown-pid\n";
    uint64_t from = 0, to = 0;
    try {
      from = std::stoull(args[1]);
      to = std::stoull(args[2]);
    } catch (const std::exception&) {
      return "err unknown-command\n";
    }
    std::string body;
    size_t n = 0;
    try {
      for (const Snapshot& s : proc->history->query(from, to)) {
        body += snapshot_line(s) + "\n";
        ++n;
      }
    } catch (const HistoryError&) {
      // nothing retained in range
    }
    return "ok records=" + std::to_string(n) + "\n" + body;
  }
  if (verb == "ATTEST") {
    return respond_attest();
  }
  if (verb == "KILL") {
    if (args.empty()) return "err unknown-pid\n";
    Process* proc = find(args[0]);
    if (!proc) return "err unknown-pid\n";
    if (!proc->live()) {
      return "ok pid=" + proc->pid + " status=" + proc_status_name(proc->status) + "\n";
    }
    std::string token;
    for (size_t i = 1; i < args.size(); ++i) {
      if (args[i].starts_with("confirm=")) token = args[i].substr(8);
    }
    const Snapshot* latest = proc->history->latest();
    std::string expect = latest ? to_hex(latest->state_digest).substr(0, 8) : "";
    if (token.empty() || token != expect) return "err confirmation-required\n";
    proc->state.halted = true;
    proc->status = ProcStatus::Killed;
    proc->history->log_event(now, EventKind::ProcessKilled);
    proc->cycles.reset();
    return "ok killed=" + proc->pid + " tick=" + std::to_string(now) + "\n";
  }
  return "err unknown-command\n";
}

// --- outputs ----------------------------------------------------------------

std::string Supervisor::summary_text() const {
  std::string out;
  for (const auto& proc : processes_) {
    out += "pid=" + proc.pid + " status=" + proc_status_name(proc.status) +
           " tick=" + std::to_string(proc.state.tick) +
           " trust=" + std::to_string(trust_.score(proc.pid)) + "/" +
           trust_class_name(trust_.cls(proc.pid)) +
           " reports=" + std::to_string(trust_.report_count(proc.pid)) + "\n";
  }
  out += "pcr=" + to_hex(pcr_.value()) + "\n";
  out += std::string("attestation=") +
         (!scenario_.manifest ? "none" : attestation_failed_ ? "mismatch" : "ok") +
         "\n";
  ChainVerdict chain = judgement_log_.verify();
  out += "judgements=" + std::to_string(judgement_log_.records().size()) +
         " chain=" + (chain.ok ? "ok" : "broken") + "\n";
  return out;
}

int Supervisor::suggested_exit_code() const { return attestation_failed_ ? 3 : 0; }

std::vector<std::pair<std::string, std::string>> Supervisor::log_files() const {
  auto join = [](const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  };

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("summary.txt", summary_text());
  {
    std::string att;
    for (size_t i = 0; i < measurements_.size(); ++i) {
      att += "measurement " + std::to_string(i) + " name=" + measurements_[i].name +
             " sha256=" + to_hex(measurements_[i].digest) + "\n";
    }
    att += "pcr=" + to_hex(pcr_.value()) + "\n";
    files.emplace_back("attestation.log", att);
  }
  files.emplace_back("findings.log", join(finding_lines_));
  files.emplace_back("reports.log", join(report_lines_));
  files.emplace_back("refusals.log", join(refusal_lines_));
  files.emplace_back("judgements.log", join(judgement_log_.export_lines()));
  files.emplace_back("requests.log", join(request_lines_));
  {
    std::string out;
    for (const auto& block : response_blocks_) {
      out += block;
      out += '\n';
    }
    files.emplace_back("responses.log", out);
  }
  for (const auto& proc : processes_) {
    if (!proc.history) continue;
    std::string hist;
    const Snapshot* latest = proc.history->latest();
    if (latest) {
      for (const Snapshot& s : proc.history->query(0, latest->tick)) {
        hist += snapshot_line(s) + "\n";
      }
    }
    files.emplace_back("history." + proc.pid + ".log", hist);

    std::string events;
    for (const EventLogEntry& e : proc.history->events()) {
      events += std::to_string(e.tick) + "\t" + event_kind_name(e.kind) + "\n";
    }
    files.emplace_back("events." + proc.pid + ".log", events);
  }
  return files;
}

std::optional<Divergence> compare_logs(
    const std::vector<std::pair<std::string, std::string>>& expected,
    const std::vector<std::pair<std::string, std::string>>& actual) {
  auto sorted = [](std::vector<std::pair<std::string, std::string>> v) {
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
  };
  auto exp = sorted(expected);
  auto act = sorted(actual);

  size_t i = 0, j = 0;
  while (i < exp.size() || j < act.size()) {
    if (i < exp.size() && (j == act.size() || exp[i].first < act[j].first)) {
      return Divergence{exp[i].first, 0, "file missing from replay"};
    }
    if (j < act.size() && (i == exp.size() || act[j].first < exp[i].first)) {
      return Divergence{act[j].first, 0, "unexpected file in replay"};
    }
    if (exp[i].second != act[j].second) {
      // Locate the first differing line.
      std::istringstream a(exp[i].second), b(act[j].second);
      std::string la, lb;
      size_t line = 0;
      while (true) {
        ++line;
        bool ga = bool(std::getline(a, la));
        bool gb = bool(std::getline(b, lb));
        if (!ga && !gb) break;
        if (!ga || !gb || la != lb) {
          return Divergence{exp[i].first, line,
                            !ga   ? "replay has extra line"
                            : !gb ? "replay is missing line"
                                  : "line differs"};
        }
      }
      return Divergence{exp[i].first, 0, "content differs"};
    }
    ++i;
    ++j;
  }
  return std::nullopt;
}

}  // namespace vigil
