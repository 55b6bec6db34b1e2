#include "vigil/scenario.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vigil {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioInvalid("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

uint64_t require_u64(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw ScenarioInvalid(where + ": missing or non-numeric '" + key + "'");
  }
  return j[key].get<uint64_t>();
}

std::string require_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ScenarioInvalid(where + ": missing or non-string '" + key + "'");
  }
  return j[key].get<std::string>();
}

// target strings: "reg(3)" / "r3" / "mem(17)"
RangeDecl parse_target(const std::string& target) {
  RangeDecl decl;
  std::string inner;
  if (target.starts_with("reg(") && target.ends_with(")")) {
    decl.is_reg = true;
    inner = target.substr(4, target.size() - 5);
  } else if (target.starts_with("mem(") && target.ends_with(")")) {
    decl.is_reg = false;
    inner = target.substr(4, target.size() - 5);
  } else if ((target.starts_with("r") || target.starts_with("R")) && target.size() >= 2) {
    decl.is_reg = true;
    inner = target.substr(1);
  } else {
    throw ScenarioInvalid("bad policy target '" + target + "'");
  }
  try {
    decl.index = uint16_t(std::stoul(inner));
  } catch (const std::exception&) {
    throw ScenarioInvalid("bad policy target '" + target + "'");
  }
  if (decl.is_reg && decl.index >= kRegCount) {
    throw ScenarioInvalid("policy target '" + target + "' out of range");
  }
  if (!decl.is_reg && decl.index >= kMemWords) {
    throw ScenarioInvalid("policy target '" + target + "' out of range");
  }
  return decl;
}

GoldenManifest parse_manifest_fields(const json& j, const std::string& where) {
  GoldenManifest manifest;
  for (const auto& entry : j["golden_manifest"]) {
    Measurement m;
    m.name = require_string(entry, "name", where);
    auto digest = digest_from_hex(require_string(entry, "sha256_hex", where));
    if (!digest) throw ScenarioInvalid(where + ": bad sha256_hex");
    m.digest = *digest;
    manifest.expected.push_back(std::move(m));
  }
  auto pcr = digest_from_hex(require_string(j, "expected_pcr_hex", where));
  if (!pcr) throw ScenarioInvalid(where + ": bad expected_pcr_hex");
  manifest.expected_pcr = *pcr;
  return manifest;
}

PolicyFile parse_policy_json(const json& j, const std::string& where) {
  PolicyFile policy;
  if (j.contains("ranges")) {
    std::vector<std::string> seen;
    for (const auto& entry : j["ranges"]) {
      RangeDecl decl = parse_target(require_string(entry, "target", where));
      decl.lo = require_u64(entry, "lo", where);
      decl.hi = require_u64(entry, "hi", where);
      if (decl.lo > decl.hi) {
        throw ScenarioInvalid(where + ": range lo > hi for " + decl.target_name());
      }
      std::string name = decl.target_name();
      for (const auto& s : seen) {
        if (s == name) throw ScenarioInvalid(where + ": duplicate target " + name);
      }
      seen.push_back(name);
      policy.ranges.ranges.push_back(decl);
    }
  }
  if (j.contains("protected")) {
    policy.protected_region.lo =
        uint16_t(require_u64(j["protected"], "lo", where));
    policy.protected_region.hi =
        uint16_t(require_u64(j["protected"], "hi", where));
    if (policy.protected_region.lo > policy.protected_region.hi ||
        policy.protected_region.hi >= kMemWords) {
      throw ScenarioInvalid(where + ": bad protected region");
    }
  }
  if (j.contains("severities")) {
    for (const auto& [name, value] : j["severities"].items()) {
      auto kind = report_kind_from_name(name);
      if (!kind) throw ScenarioInvalid(where + ": unknown severity kind '" + name + "'");
      if (!value.is_number_unsigned() || value.get<uint64_t>() < 1 ||
          value.get<uint64_t>() > 100) {
        throw ScenarioInvalid(where + ": severity for " + name + " must be 1..100");
      }
      policy.severities.set(*kind, int(value.get<uint64_t>()));
    }
  }
  if (j.contains("golden_manifest")) {
    policy.golden_manifest = parse_manifest_fields(j, where);
  }
  if (j.contains("mac_key_hex")) {
    auto key = key_from_hex(require_string(j, "mac_key_hex", where));
    if (!key) throw ScenarioInvalid(where + ": mac_key_hex must be 64 hex chars");
    policy.mac_key = *key;
  }
  return policy;
}

bool valid_pid(const std::string& pid) {
  if (pid.empty() || pid.size() > 64) return false;
  for (char c : pid) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

}  // namespace

PolicyFile parse_policy(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioInvalid(std::string("policy JSON: ") + e.what());
  }
  return parse_policy_json(j, "policy");
}

Scenario parse_scenario(
    const std::string& json_text,
    const std::function<std::string(const std::string&)>& read_ref) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioInvalid(std::string("scenario JSON: ") + e.what());
  }

  Scenario sc;
  sc.run_limit = require_u64(j, "run_limit", "scenario");
  if (j.contains("sampling_stride")) {
    sc.sampling_stride = require_u64(j, "sampling_stride", "scenario");
    if (sc.sampling_stride < 1) throw ScenarioInvalid("sampling_stride must be >= 1");
  }

  if (!j.contains("programs") || !j["programs"].is_array() || j["programs"].empty()) {
    throw ScenarioInvalid("scenario: 'programs' must be a non-empty array");
  }

  sc.measured_artifacts.emplace_back("scenario", json_text);

  std::vector<std::string> policy_refs;  // first-reference order
  for (const auto& p : j["programs"]) {
    ProgramSpec spec;
    spec.pid = require_string(p, "pid", "program");
    if (!valid_pid(spec.pid)) throw ScenarioInvalid("bad pid '" + spec.pid + "'");
    for (const auto& other : sc.programs) {
      if (other.pid == spec.pid) throw ScenarioInvalid("duplicate pid '" + spec.pid + "'");
    }
    spec.program_ref = require_string(p, "program", "program " + spec.pid);
    if (p.contains("policy")) {
      spec.policy_ref = require_string(p, "policy", "program " + spec.pid);
      bool seen = false;
      for (const auto& r : policy_refs) seen = seen || r == spec.policy_ref;
      if (!seen) policy_refs.push_back(spec.policy_ref);
    }
    sc.programs.push_back(std::move(spec));
  }

  std::map<std::string, std::string> policy_texts;
  for (const auto& ref : policy_refs) {
    policy_texts[ref] = read_ref(ref);
    sc.measured_artifacts.emplace_back("policy:" + ref, policy_texts[ref]);
  }
  for (auto& spec : sc.programs) {
    spec.source = read_ref(spec.program_ref);
    sc.measured_artifacts.emplace_back("program:" + spec.pid, spec.source);
    if (!spec.policy_ref.empty()) {
      spec.policy = parse_policy(policy_texts[spec.policy_ref]);
    }
  }

  if (j.contains("schedule")) {
    for (const auto& entry : j["schedule"]) {
      ScheduleEntry se;
      se.name = require_string(entry, "name", "schedule");
      se.period = require_u64(entry, "period", "schedule " + se.name);
      if (se.period < 1) throw ScenarioInvalid("schedule " + se.name + ": period must be >= 1");
      std::string prop_text = require_string(entry, "prop", "schedule " + se.name);
      try {
        se.prop = parse_prop(prop_text);
      } catch (const PropError& e) {
        throw ScenarioInvalid("schedule " + se.name + ": " + e.what());
      }
      if (entry.contains("category")) {
        auto cat = category_from_name(entry["category"].get<std::string>());
        if (!cat) throw ScenarioInvalid("schedule " + se.name + ": bad category");
        se.category = *cat;
      }
      sc.schedule.push_back(std::move(se));
    }
  }

  if (j.contains("interrupts")) {
    for (const auto& entry : j["interrupts"]) {
      InterruptInjection inj;
      inj.tick = require_u64(entry, "tick", "interrupts");
      inj.pid = require_string(entry, "pid", "interrupts");
      if (inj.tick > sc.run_limit) {
        throw ScenarioInvalid("interrupt at tick " + std::to_string(inj.tick) +
                              " beyond run_limit");
      }
      bool known = false;
      for (const auto& p : sc.programs) known = known || p.pid == inj.pid;
      if (!known) throw ScenarioInvalid("interrupt for unknown pid '" + inj.pid + "'");
      sc.interrupt_script.push_back(std::move(inj));
    }
  }

  if (j.contains("monitor")) {
    const auto& m = j["monitor"];
    if (m.contains("interrupt_deadline")) {
      sc.monitor.interrupt_deadline = require_u64(m, "interrupt_deadline", "monitor");
    }
    if (m.contains("loop_window")) {
      sc.monitor.loop_window = require_u64(m, "loop_window", "monitor");
    }
    if (m.contains("loop_revisit_threshold")) {
      sc.monitor.loop_revisit_threshold =
          require_u64(m, "loop_revisit_threshold", "monitor");
    }
    if (sc.monitor.interrupt_deadline < 1 || sc.monitor.loop_window < 1 ||
        sc.monitor.loop_revisit_threshold < 1) {
      throw ScenarioInvalid("monitor thresholds must be >= 1");
    }
    if (m.contains("watch_set")) {
      for (const auto& r : m["watch_set"]) {
        if (!r.is_number_unsigned() || r.get<uint64_t>() >= kRegCount) {
          throw ScenarioInvalid("watch_set entries must be register indices 0..7");
        }
        sc.monitor.watch_set.push_back(uint8_t(r.get<uint64_t>()));
      }
    }
    if (m.contains("step_budget")) {
      sc.monitor.step_budget = require_u64(m, "step_budget", "monitor");
    }
  }

  if (j.contains("history")) {
    const auto& h = j["history"];
    if (h.contains("capacity")) {
      sc.history.capacity = size_t(require_u64(h, "capacity", "history"));
    }
    if (h.contains("checkpoint_stride")) {
      sc.history.checkpoint_stride = require_u64(h, "checkpoint_stride", "history");
    }
    if (sc.history.capacity < 1 || sc.history.checkpoint_stride < 1) {
      throw ScenarioInvalid("history capacity and checkpoint_stride must be >= 1");
    }
  }

  if (j.contains("manifest")) {
    std::string ref = require_string(j, "manifest", "scenario");
    json mj;
    try {
      mj = json::parse(read_ref(ref));
    } catch (const json::exception& e) {
      throw ScenarioInvalid("manifest " + ref + ": " + e.what());
    }
    if (!mj.contains("golden_manifest")) {
      throw ScenarioInvalid("manifest " + ref + ": no golden_manifest field");
    }
    sc.manifest = parse_manifest_fields(mj, "manifest " + ref);
  }

  if (j.contains("mac_key")) {
    std::string ref = require_string(j, "mac_key", "scenario");
    json kj;
    try {
      kj = json::parse(read_ref(ref));
    } catch (const json::exception& e) {
      throw ScenarioInvalid("mac_key " + ref + ": " + e.what());
    }
    if (!kj.contains("mac_key_hex")) {
      throw ScenarioInvalid("mac_key " + ref + ": no mac_key_hex field");
    }
    auto key = key_from_hex(kj["mac_key_hex"].get<std::string>());
    if (!key) throw ScenarioInvalid("mac_key " + ref + ": mac_key_hex must be 64 hex chars");
    sc.mac_key = *key;
  }

  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::filesystem::path dir = path.parent_path();
  return parse_scenario(text, [&dir](const std::string& ref) {
    return read_file(dir / ref);
  });
}

}  // namespace vigil
