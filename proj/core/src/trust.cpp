#include "vigil/trust.hpp"

#include <algorithm>

namespace vigil {

const char* report_kind_name(ReportKind k) {
  switch (k) {
    case ReportKind::RangeViolation: return "RangeViolation";
    case ReportKind::MemoryStructureViolation: return "MemoryStructureViolation";
    case ReportKind::NonResponsive: return "NonResponsive";
    case ReportKind::CertifiedDivergence: return "CertifiedDivergence";
    case ReportKind::SuspectedLoop: return "SuspectedLoop";
    case ReportKind::ResourceBudgetExceeded: return "ResourceBudgetExceeded";
    case ReportKind::AttestationMismatch: return "AttestationMismatch";
    case ReportKind::MessageIntegrityFailure: return "MessageIntegrityFailure";
  }
  return "?";
}

std::optional<ReportKind> report_kind_from_name(std::string_view name) {
  for (ReportKind k : kAllReportKinds) {
    if (name == report_kind_name(k)) return k;
  }
  return std::nullopt;
}

ReportKind report_kind_for(FindingKind finding) {
  switch (finding) {
    case FindingKind::CertifiedDivergence: return ReportKind::CertifiedDivergence;
    case FindingKind::SuspectedLoop: return ReportKind::SuspectedLoop;
    case FindingKind::NonResponsive: return ReportKind::NonResponsive;
    case FindingKind::ResourceBudgetExceeded: return ReportKind::ResourceBudgetExceeded;
  }
  return ReportKind::SuspectedLoop;
}

namespace {
int default_severity(ReportKind k) {
  switch (k) {
    case ReportKind::RangeViolation: return 15;
    case ReportKind::MemoryStructureViolation: return 40;
    case ReportKind::NonResponsive: return 25;
    case ReportKind::CertifiedDivergence: return 30;
    case ReportKind::SuspectedLoop: return 10;
    case ReportKind::ResourceBudgetExceeded: return 10;
    case ReportKind::AttestationMismatch: return 100;
    case ReportKind::MessageIntegrityFailure: return 50;
  }
  return 10;
}
}  // namespace

int SeverityTable::of(ReportKind k) const {
  auto it = overrides_.find(k);
  return it != overrides_.end() ? it->second : default_severity(k);
}

void SeverityTable::set(ReportKind k, int severity) {
  if (severity < 1) severity = 1;
  if (severity > 100) severity = 100;
  overrides_[k] = severity;
}

std::string SecurityReport::line() const {
  return "REPORT tick=" + std::to_string(tick) + " pid=" + pid +
         " kind=" + report_kind_name(kind) + " severity=" + std::to_string(severity) +
         " details=" + details;
}

std::string RangeDecl::target_name() const {
  return (is_reg ? "reg" : "mem") + std::string("(") + std::to_string(index) + ")";
}

std::vector<SecurityReport> check_snapshot(const TypeRangePolicy& policy,
                                           const VmState& state,
                                           const std::string& pid,
                                           const SeverityTable& severities) {
  std::vector<SecurityReport> reports;
  for (const RangeDecl& decl : policy.ranges) {
    uint64_t value = decl.is_reg ? state.regs[decl.index % kRegCount]
                                 : state.mem[decl.index % kMemWords];
    if (value >= decl.lo && value <= decl.hi) continue;
    SecurityReport r;
    r.tick = state.tick;
    r.pid = pid;
    r.kind = ReportKind::RangeViolation;
    r.severity = severities.of(r.kind);
    r.details = decl.target_name() + "=" + std::to_string(value) + " outside [" +
                std::to_string(decl.lo) + "," + std::to_string(decl.hi) + "]";
    reports.push_back(std::move(r));
  }
  return reports;
}

std::optional<SecurityReport> check_write(const ProtectedRegion& region,
                                          const std::string& pid, uint16_t addr,
                                          uint64_t tick, Writer writer,
                                          const SeverityTable& severities) {
  if (writer == Writer::Supervisor) return std::nullopt;
  if (!region.covers(addr)) return std::nullopt;
  SecurityReport r;
  r.tick = tick;
  r.pid = pid;
  r.kind = ReportKind::MemoryStructureViolation;
  r.severity = severities.of(r.kind);
  r.details = "store to protected address " + std::to_string(addr);
  return r;
}

const char* trust_class_name(TrustClass c) {
  switch (c) {
    case TrustClass::Trusted: return "Trusted";
    case TrustClass::Suspect: return "Suspect";
    case TrustClass::Untrusted: return "Untrusted";
  }
  return "?";
}

TrustClass trust_class_of(int score) {
  if (score >= 80) return TrustClass::Trusted;
  if (score >= 30) return TrustClass::Suspect;
  return TrustClass::Untrusted;
}

void TrustLedger::register_pid(const std::string& pid) { entries_.try_emplace(pid); }

void TrustLedger::apply(const SecurityReport& report) {
  auto it = entries_.find(report.pid);
  if (it == entries_.end()) return;  // reports about unknown writers are logged only
  Entry& e = it->second;
  e.score = std::max(0, e.score - report.severity);
  e.reports += 1;
}

int TrustLedger::score(const std::string& pid) const {
  auto it = entries_.find(pid);
  return it == entries_.end() ? 100 : it->second.score;
}

TrustClass TrustLedger::cls(const std::string& pid) const {
  return trust_class_of(score(pid));
}

size_t TrustLedger::report_count(const std::string& pid) const {
  auto it = entries_.find(pid);
  return it == entries_.end() ? 0 : it->second.reports;
}

Digest measure(std::span<const uint8_t> bytes) { return Sha256::of(bytes); }

Digest measure(std::string_view bytes) { return Sha256::of(bytes); }

void Pcr::extend(const Digest& measurement) {
  Sha256 h;
  h.update(value_);
  h.update(measurement);
  value_ = h.finish();
}

LaunchVerification verify_launch(
    const GoldenManifest& manifest,
    const std::vector<std::pair<std::string, std::string>>& artifacts) {
  LaunchVerification v;
  Pcr pcr;
  for (size_t i = 0; i < artifacts.size(); ++i) {
    Measurement m{artifacts[i].first, measure(artifacts[i].second)};
    pcr.extend(m.digest);
    bool expected = i < manifest.expected.size() &&
                    manifest.expected[i].name == m.name &&
                    manifest.expected[i].digest == m.digest;
    if (!expected) {
      v.ok = false;
      v.mismatched.push_back(i);
      v.detail += (v.detail.empty() ? "" : "; ");
      v.detail += "measurement " + std::to_string(i) + " (" + m.name + ") " +
                  (i < manifest.expected.size() ? "does not match manifest"
                                                : "not in manifest");
    }
    v.measured.push_back(std::move(m));
  }
  if (artifacts.size() != manifest.expected.size()) {
    v.ok = false;
    v.detail += (v.detail.empty() ? "" : "; ");
    v.detail += "manifest lists " + std::to_string(manifest.expected.size()) +
                " measurements, got " + std::to_string(artifacts.size());
  }
  v.final_pcr = pcr.value();
  if (v.final_pcr != manifest.expected_pcr) {
    v.ok = false;
    v.detail += (v.detail.empty() ? "" : "; ");
    v.detail += "final pcr mismatch";
  }
  return v;
}

LaunchVerification verify_launch(
    const std::optional<GoldenManifest>& manifest,
    const std::vector<std::pair<std::string, std::string>>& artifacts) {
  if (!manifest) {
    throw TrustError(TrustError::Kind::ManifestMissing,
                     "no golden manifest configured");
  }
  return verify_launch(*manifest, artifacts);
}

Digest tag_message(const std::optional<MacKey>& key, std::string_view message) {
  if (!key) {
    throw TrustError(TrustError::Kind::KeyMissing, "keyed mode without a key");
  }
  return tag_message(*key, message);
}

bool verify_message(const std::optional<MacKey>& key, std::string_view message,
                    const Digest& tag) {
  if (!key) {
    throw TrustError(TrustError::Kind::KeyMissing, "keyed mode without a key");
  }
  return verify_message(*key, message, tag);
}

}  // namespace vigil
