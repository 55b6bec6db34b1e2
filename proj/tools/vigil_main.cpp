#include <poll.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vigil/supervisor.hpp"

namespace fs = std::filesystem;
using namespace vigil;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioInvalid = 2;
constexpr int kExitAttestationMismatch = 3;
constexpr int kExitReplayDivergence = 4;

std::string read_file_or_die(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path.string() << "\n";
    std::exit(kExitScenarioInvalid);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_logs(const fs::path& dir,
                const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << (dir / name).string() << "\n";
      std::exit(1);
    }
    out << content;
  }
}

// `@<tick>\t<request>` (or a space separator); bare lines are served after
// the run against the final states.
std::vector<ScriptedRequest> parse_request_script(const std::string& text) {
  std::vector<ScriptedRequest> script;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ScriptedRequest req;
    req.tick = UINT64_MAX;
    if (line[0] == '@') {
      size_t sep = line.find_first_of(" \t");
      if (sep != std::string::npos) {
        try {
          req.tick = std::stoull(line.substr(1, sep - 1));
        } catch (const std::exception&) {
          sep = std::string::npos;
        }
      }
      if (sep == std::string::npos) {
        std::cerr << "error: bad request script line: " << line << "\n";
        std::exit(kExitScenarioInvalid);
      }
      req.raw = line.substr(sep + 1);
    } else {
      req.raw = line;
    }
    script.push_back(std::move(req));
  }
  return script;
}

// Non-blocking stdin line reader for interactive serving between ticks.
class StdinPoller {
 public:
  std::vector<std::string> drain() {
    std::vector<std::string> lines;
    if (eof_) return lines;
    while (true) {
      pollfd pfd{STDIN_FILENO, POLLIN, 0};
      int rc = ::poll(&pfd, 1, 0);
      if (rc <= 0 || !(pfd.revents & (POLLIN | POLLHUP))) break;
      char buf[4096];
      ssize_t n = ::read(STDIN_FILENO, buf, sizeof(buf));
      if (n <= 0) {
        eof_ = true;
        break;
      }
      pending_.append(buf, size_t(n));
    }
    flush_lines(lines);
    return lines;
  }

  // Blocking drain of whatever remains, used once the run is over.
  std::vector<std::string> drain_to_eof() {
    std::vector<std::string> lines;
    while (!eof_) {
      char buf[4096];
      ssize_t n = ::read(STDIN_FILENO, buf, sizeof(buf));
      if (n <= 0) {
        eof_ = true;
        break;
      }
      pending_.append(buf, size_t(n));
    }
    flush_lines(lines);
    if (!pending_.empty()) {
      lines.push_back(pending_);
      pending_.clear();
    }
    return lines;
  }

 private:
  void flush_lines(std::vector<std::string>& lines) {
    size_t start = 0;
    while (true) {
      size_t nl = pending_.find('\n', start);
      if (nl == std::string::npos) break;
      std::string line = pending_.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(std::move(line));
      start = nl + 1;
    }
    pending_.erase(0, start);
  }

  std::string pending_;
  bool eof_ = false;
};

Scenario load_or_die(const fs::path& path) {
  try {
    return load_scenario(path);
  } catch (const ScenarioInvalid& e) {
    std::cerr << "scenario invalid: " << e.what() << "\n";
    std::exit(kExitScenarioInvalid);
  }
}

std::string with_mac(const std::optional<MacKey>& key, std::string line) {
  if (key) {
    line += " #mac=" + to_hex(tag_message(*key, line));
  }
  return line;
}

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir,
            const std::string& requests_path, bool serve) {
  Scenario scenario = load_or_die(scenario_path);

  Supervisor sup(std::move(scenario));
  if (!requests_path.empty()) {
    sup.set_request_script(parse_request_script(read_file_or_die(requests_path)));
  }
  StdinPoller poller;
  if (serve) {
    sup.set_request_poll([&poller] { return poller.drain(); },
                         [](const std::string& block) {
                           std::cout << block << std::flush;
                         });
  }

  try {
    sup.launch();
    sup.run();
  } catch (const ScenarioInvalid& e) {
    std::cerr << "scenario invalid: " << e.what() << "\n";
    return kExitScenarioInvalid;
  }

  if (serve) {
    for (const std::string& line : poller.drain_to_eof()) {
      std::cout << sup.serve_line(line) << std::flush;
    }
  }

  write_logs(out_dir, sup.log_files());
  std::cout << sup.summary_text();
  return sup.suggested_exit_code();
}

int cmd_ask(const fs::path& scenario_path, const std::string& pid,
            const std::string& prop, uint64_t at_tick) {
  Scenario scenario = load_or_die(scenario_path);
  scenario.run_limit = std::min(scenario.run_limit, at_tick);
  std::optional<MacKey> key = scenario.mac_key;

  Supervisor sup(std::move(scenario));
  try {
    sup.launch();
    sup.run();
  } catch (const ScenarioInvalid& e) {
    std::cerr << "scenario invalid: " << e.what() << "\n";
    return kExitScenarioInvalid;
  }
  std::cout << sup.serve_line(with_mac(key, "ASK " + pid + " " + prop));
  return kExitOk;
}

int cmd_attest(const fs::path& scenario_path, const std::string& write_path) {
  Scenario scenario = load_or_die(scenario_path);
  std::optional<MacKey> key = scenario.mac_key;

  Supervisor sup(std::move(scenario));
  try {
    sup.launch();
  } catch (const ScenarioInvalid& e) {
    std::cerr << "scenario invalid: " << e.what() << "\n";
    return kExitScenarioInvalid;
  }

  if (!write_path.empty()) {
    std::string json = "{\n  \"golden_manifest\": [\n";
    const auto& ms = sup.measurements();
    for (size_t i = 0; i < ms.size(); ++i) {
      json += "    {\"name\": \"" + ms[i].name + "\", \"sha256_hex\": \"" +
              to_hex(ms[i].digest) + "\"}";
      json += i + 1 < ms.size() ? ",\n" : "\n";
    }
    json += "  ],\n  \"expected_pcr_hex\": \"" + to_hex(sup.pcr_value()) + "\"\n}\n";
    std::ofstream out(write_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << write_path << "\n";
      return 1;
    }
    out << json;
  }

  std::cout << sup.serve_line(with_mac(key, "ATTEST"));
  return sup.attestation_failed() ? kExitAttestationMismatch : kExitOk;
}

int cmd_replay(const fs::path& scenario_path, const fs::path& log_dir) {
  Scenario scenario = load_or_die(scenario_path);

  std::vector<std::pair<std::string, std::string>> recorded;
  if (!fs::is_directory(log_dir)) {
    std::cerr << "error: " << log_dir.string() << " is not a directory\n";
    return kExitScenarioInvalid;
  }
  for (const auto& entry : fs::directory_iterator(log_dir)) {
    if (!entry.is_regular_file()) continue;
    recorded.emplace_back(entry.path().filename().string(),
                          read_file_or_die(entry.path()));
  }

  // The judgement chain must verify before any byte comparison: a tampered
  // log fails here regardless of what a re-run would produce.
  std::string requests_text;
  for (const auto& [name, content] : recorded) {
    if (name == "judgements.log") {
      std::vector<std::string> lines;
      std::istringstream in(content);
      std::string line;
      while (std::getline(in, line)) lines.push_back(line);
      ChainVerdict v = JudgementLog::verify_lines(lines);
      if (!v.ok) {
        std::cout << "judgement chain broken at entry " << v.bad_entry_id << ": "
                  << v.detail << "\n";
        return kExitReplayDivergence;
      }
    }
    if (name == "requests.log") requests_text = content;
  }

  Supervisor sup(std::move(scenario));
  sup.set_request_script(parse_request_script(requests_text));
  try {
    sup.launch();
    sup.run();
  } catch (const ScenarioInvalid& e) {
    std::cerr << "scenario invalid: " << e.what() << "\n";
    return kExitScenarioInvalid;
  }

  if (auto div = compare_logs(recorded, sup.log_files())) {
    std::cout << "DivergenceAt(" << div->file;
    if (div->line) std::cout << ":" << div->line;
    std::cout << ") " << div->detail << "\n";
    return kExitReplayDivergence;
  }
  std::cout << "replay ok\n";
  return kExitOk;
}

int cmd_verify_log(const fs::path& log_path) {
  std::vector<std::string> lines;
  std::istringstream in(read_file_or_die(log_path));
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  ChainVerdict v = JudgementLog::verify_lines(lines);
  if (!v.ok) {
    std::cout << "entry " << v.bad_entry_id << ": " << v.detail << "\n";
    return 1;
  }
  std::cout << "chain ok (" << lines.size() << " entries)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vigil: self-monitoring process supervisor"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "vigil-logs", requests_path;
  bool serve = false;
  auto* run = app.add_subcommand("run", "run a scenario to completion");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "log output directory");
  run->add_option("--requests", requests_path, "request script (@tick <request> lines)");
  run->add_flag("--serve", serve, "serve requests from stdin between ticks");

  std::string ask_pid, ask_prop, ask_scenario;
  uint64_t at_tick = 0;
  auto* ask = app.add_subcommand("ask", "evaluate one proposition against a process");
  ask->add_option("pid", ask_pid)->required();
  ask->add_option("prop", ask_prop, "proposition text")->required();
  ask->add_option("--scenario", ask_scenario, "scenario JSON file")->required();
  ask->add_option("--at", at_tick, "tick to run to before asking (default 0)");

  std::string attest_scenario, write_manifest;
  auto* attest = app.add_subcommand("attest", "measure artifacts and report the pcr");
  attest->add_option("--scenario", attest_scenario, "scenario JSON file")->required();
  attest->add_option("--write", write_manifest, "write a golden manifest JSON");

  std::string replay_scenario, replay_dir;
  auto* replay = app.add_subcommand("replay", "re-run and compare recorded logs");
  replay->add_option("scenario", replay_scenario)->required();
  replay->add_option("logdir", replay_dir)->required();

  std::string verify_path;
  auto* verify = app.add_subcommand("verify-log", "verify a judgement log chain");
  verify->add_option("log", verify_path)->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(scenario_path, out_dir, requests_path, serve);
  if (ask->parsed()) return cmd_ask(ask_scenario, ask_pid, ask_prop, at_tick);
  if (attest->parsed()) return cmd_attest(attest_scenario, write_manifest);
  if (replay->parsed()) return cmd_replay(replay_scenario, replay_dir);
  if (verify->parsed()) return cmd_verify_log(verify_path);
  return 1;
}
