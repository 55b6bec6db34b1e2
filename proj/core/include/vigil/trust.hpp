#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vigil/digest.hpp"
#include "vigil/monitor.hpp"
#include "vigil/vm.hpp"

namespace vigil {

enum class ReportKind : uint8_t {
  RangeViolation,
  MemoryStructureViolation,
  NonResponsive,
  CertifiedDivergence,
  SuspectedLoop,
  ResourceBudgetExceeded,
  AttestationMismatch,
  MessageIntegrityFailure,
};

inline constexpr ReportKind kAllReportKinds[] = {
    ReportKind::RangeViolation,        ReportKind::MemoryStructureViolation,
    ReportKind::NonResponsive,         ReportKind::CertifiedDivergence,
    ReportKind::SuspectedLoop,         ReportKind::ResourceBudgetExceeded,
    ReportKind::AttestationMismatch,   ReportKind::MessageIntegrityFailure,
};

const char* report_kind_name(ReportKind k);
std::optional<ReportKind> report_kind_from_name(std::string_view name);
ReportKind report_kind_for(FindingKind finding);

// Severity of each report kind, 1..100; deductions from the trust score.
struct SeverityTable {
  int of(ReportKind k) const;
  void set(ReportKind k, int severity);

 private:
  std::map<ReportKind, int> overrides_;
};

struct SecurityReport {
  uint64_t tick = 0;
  std::string pid;
  ReportKind kind = ReportKind::RangeViolation;
  int severity = 0;
  std::string details;

  std::string line() const;
};

struct RangeDecl {
  bool is_reg = true;
  uint16_t index = 0;  // register 0..7 or memory address 0..255
  uint64_t lo = 0;
  uint64_t hi = 0;  // inclusive

  std::string target_name() const;
};

struct TypeRangePolicy {
  std::vector<RangeDecl> ranges;
};

// Memory management structures the supervised program must not touch, plus
// the flag cell 255 which only the supervisor may write.
struct ProtectedRegion {
  uint16_t lo = 0;
  uint16_t hi = 15;

  bool covers(uint16_t addr) const { return (addr >= lo && addr <= hi) || addr == kFlagCell; }
};

enum class Writer : uint8_t { Program, Supervisor };

std::vector<SecurityReport> check_snapshot(const TypeRangePolicy& policy,
                                           const VmState& state,
                                           const std::string& pid,
                                           const SeverityTable& severities);

std::optional<SecurityReport> check_write(const ProtectedRegion& region,
                                          const std::string& pid, uint16_t addr,
                                          uint64_t tick, Writer writer,
                                          const SeverityTable& severities);

enum class TrustClass : uint8_t { Trusted, Suspect, Untrusted };

const char* trust_class_name(TrustClass c);
TrustClass trust_class_of(int score);

// Per-process score 0..100, starting at 100; each report deducts its
// severity, floored at zero. Scores never increase within a run.
class TrustLedger {
 public:
  void register_pid(const std::string& pid);
  void apply(const SecurityReport& report);
  int score(const std::string& pid) const;  // 100 if unknown
  TrustClass cls(const std::string& pid) const;
  size_t report_count(const std::string& pid) const;

 private:
  struct Entry {
    int score = 100;
    size_t reports = 0;
  };
  std::map<std::string, Entry> entries_;
};

// --- chain of trust -------------------------------------------------------

struct Measurement {
  std::string name;
  Digest digest{};
};

Digest measure(std::span<const uint8_t> bytes);
Digest measure(std::string_view bytes);

// Extend-only platform configuration register; genesis is 32 zero bytes.
class Pcr {
 public:
  void extend(const Digest& measurement);
  const Digest& value() const { return value_; }

 private:
  Digest value_{};
};

struct GoldenManifest {
  std::vector<Measurement> expected;  // order is significant
  Digest expected_pcr{};
};

struct TrustError : std::runtime_error {
  enum class Kind { ManifestMissing, KeyMissing };
  TrustError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct LaunchVerification {
  bool ok = true;
  std::vector<Measurement> measured;
  Digest final_pcr{};
  // Indices into `measured` whose name/digest disagree with the manifest
  // (or were not expected at all).
  std::vector<size_t> mismatched;
  std::string detail;
};

// Measures each artifact in order, extends a fresh pcr, and compares both the
// per-artifact measurements and the final pcr against the manifest.
LaunchVerification verify_launch(
    const GoldenManifest& manifest,
    const std::vector<std::pair<std::string, std::string>>& artifacts);
// Throws ManifestMissing when no manifest is configured.
LaunchVerification verify_launch(
    const std::optional<GoldenManifest>& manifest,
    const std::vector<std::pair<std::string, std::string>>& artifacts);

// Keyed-mode entry points; throw KeyMissing when no key is configured.
Digest tag_message(const std::optional<MacKey>& key, std::string_view message);
bool verify_message(const std::optional<MacKey>& key, std::string_view message,
                    const Digest& tag);

}  // namespace vigil
