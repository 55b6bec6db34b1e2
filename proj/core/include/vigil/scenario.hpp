#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vigil/history.hpp"
#include "vigil/judgement.hpp"
#include "vigil/monitor.hpp"
#include "vigil/trust.hpp"

namespace vigil {

struct ScenarioInvalid : std::runtime_error {
  explicit ScenarioInvalid(const std::string& msg) : std::runtime_error(msg) {}
};

struct PolicyFile {
  TypeRangePolicy ranges;
  ProtectedRegion protected_region;
  SeverityTable severities;
  std::optional<GoldenManifest> golden_manifest;
  std::optional<MacKey> mac_key;
};

// Parses the policy JSON: {"ranges": [{"target","lo","hi"}], "protected":
// {"lo","hi"}, "severities": {...}, "golden_manifest": [{"name",
// "sha256_hex"}], "expected_pcr_hex": "...", "mac_key_hex": "..."}.
PolicyFile parse_policy(const std::string& json_text);

struct ProgramSpec {
  std::string pid;
  std::string program_ref;          // path as written in the scenario
  std::string policy_ref;           // optional
  std::string source;               // raw assembly bytes
  std::optional<PolicyFile> policy;
};

struct InterruptInjection {
  uint64_t tick = 0;
  std::string pid;
};

struct Scenario {
  std::vector<ProgramSpec> programs;
  JudgementSchedule schedule;
  std::vector<InterruptInjection> interrupt_script;
  uint64_t sampling_stride = 1;
  uint64_t run_limit = 0;
  MonitorConfig monitor;
  HistoryConfig history;
  std::optional<GoldenManifest> manifest;
  std::optional<MacKey> mac_key;

  // Artifacts measured into the pcr at startup, in order: the scenario file
  // itself, each policy file at first reference, then each program source.
  std::vector<std::pair<std::string, std::string>> measured_artifacts;
};

// Loads a scenario file and everything it references; throws ScenarioInvalid.
Scenario load_scenario(const std::filesystem::path& path);

// Parses scenario JSON with an injected file reader (used by tests).
Scenario parse_scenario(
    const std::string& json_text,
    const std::function<std::string(const std::string&)>& read_ref);

}  // namespace vigil
