#include <doctest.h>

#include <random>

#include "support/ref_hash.hpp"
#include "vigil/trust.hpp"

using namespace vigil;
using namespace vigil::testsupport;

TEST_CASE("range policy flags exactly the out-of-range targets") {
  SeverityTable sev;
  TypeRangePolicy policy;
  policy.ranges.push_back({true, 0, 0, 10});

  VmState s;
  s.regs[0] = 7;
  CHECK(check_snapshot(policy, s, "p1", sev).empty());

  s.regs[0] = 11;
  auto reports = check_snapshot(policy, s, "p1", sev);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].kind == ReportKind::RangeViolation);
  CHECK(reports[0].severity == 15);

  s.regs[0] = 10;  // inclusive upper bound
  CHECK(check_snapshot(policy, s, "p1", sev).empty());

  CHECK(check_snapshot(TypeRangePolicy{}, s, "p1", sev).empty());

  policy.ranges.push_back({false, 9, 1, 1});  // mem(9) must be 1
  CHECK(check_snapshot(policy, s, "p1", sev).size() == 1);
  s.mem[9] = 1;
  CHECK(check_snapshot(policy, s, "p1", sev).empty());
}

TEST_CASE("protected region write checks") {
  SeverityTable sev;
  ProtectedRegion region;  // [0, 15] plus the flag cell

  auto hit = check_write(region, "p1", 3, 7, Writer::Program, sev);
  REQUIRE(hit.has_value());
  CHECK(hit->kind == ReportKind::MemoryStructureViolation);
  CHECK(hit->severity == 40);
  CHECK(hit->tick == 7);

  CHECK(!check_write(region, "p1", 16, 7, Writer::Program, sev));  // boundary
  CHECK(check_write(region, "p1", 15, 7, Writer::Program, sev));
  CHECK(check_write(region, "p1", 255, 7, Writer::Program, sev));
  CHECK(!check_write(region, "p1", 255, 7, Writer::Supervisor, sev));
}

TEST_CASE("trust scores deduct severities with a floor at zero") {
  SeverityTable sev;
  TrustLedger ledger;
  ledger.register_pid("p1");
  CHECK(ledger.score("p1") == 100);
  CHECK(ledger.cls("p1") == TrustClass::Trusted);

  SecurityReport r;
  r.pid = "p1";
  r.kind = ReportKind::MemoryStructureViolation;
  r.severity = sev.of(r.kind);
  ledger.apply(r);
  CHECK(ledger.score("p1") == 60);
  CHECK(ledger.cls("p1") == TrustClass::Suspect);

  r.kind = ReportKind::AttestationMismatch;
  r.severity = sev.of(r.kind);
  ledger.apply(r);
  CHECK(ledger.score("p1") == 0);
  CHECK(ledger.cls("p1") == TrustClass::Untrusted);

  ledger.apply(r);  // already at the floor
  CHECK(ledger.score("p1") == 0);
  CHECK(ledger.report_count("p1") == 3);
}

TEST_CASE("class thresholds are exact") {
  CHECK(trust_class_of(100) == TrustClass::Trusted);
  CHECK(trust_class_of(80) == TrustClass::Trusted);
  CHECK(trust_class_of(79) == TrustClass::Suspect);
  CHECK(trust_class_of(30) == TrustClass::Suspect);
  CHECK(trust_class_of(29) == TrustClass::Untrusted);
  CHECK(trust_class_of(0) == TrustClass::Untrusted);
}

TEST_CASE("every monitor finding maps to exactly one report kind") {
  CHECK(report_kind_for(FindingKind::CertifiedDivergence) ==
        ReportKind::CertifiedDivergence);
  CHECK(report_kind_for(FindingKind::SuspectedLoop) == ReportKind::SuspectedLoop);
  CHECK(report_kind_for(FindingKind::NonResponsive) == ReportKind::NonResponsive);
  CHECK(report_kind_for(FindingKind::ResourceBudgetExceeded) ==
        ReportKind::ResourceBudgetExceeded);
}

TEST_CASE("default severity table") {
  SeverityTable sev;
  CHECK(sev.of(ReportKind::RangeViolation) == 15);
  CHECK(sev.of(ReportKind::MemoryStructureViolation) == 40);
  CHECK(sev.of(ReportKind::NonResponsive) == 25);
  CHECK(sev.of(ReportKind::CertifiedDivergence) == 30);
  CHECK(sev.of(ReportKind::SuspectedLoop) == 10);
  CHECK(sev.of(ReportKind::ResourceBudgetExceeded) == 10);
  CHECK(sev.of(ReportKind::AttestationMismatch) == 100);
  CHECK(sev.of(ReportKind::MessageIntegrityFailure) == 50);

  sev.set(ReportKind::SuspectedLoop, 99);
  CHECK(sev.of(ReportKind::SuspectedLoop) == 99);
  for (ReportKind k : kAllReportKinds) {
    CHECK(sev.of(k) >= 1);
    CHECK(sev.of(k) <= 100);
  }
}

TEST_CASE("measure matches the published vector and the reference oracle") {
  CHECK(to_hex(measure("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(measure("abc") == measure("abc"));

  std::string data = "artifact bytes";
  std::string flipped = data;
  flipped[0] ^= 1;
  CHECK(measure(data) == ref_sha256(data));
  CHECK(measure(data) != measure(flipped));
}

TEST_CASE("pcr extension is ordered and deterministic") {
  Pcr fresh;
  CHECK(fresh.value() == Digest{});  // genesis

  Digest a = measure("first");
  Digest b = measure("second");

  Pcr ab, ba, ab2;
  ab.extend(a);
  ab.extend(b);
  ba.extend(b);
  ba.extend(a);
  ab2.extend(a);
  ab2.extend(b);
  CHECK(ab.value() != ba.value());
  CHECK(ab.value() == ab2.value());

  // Reference recomputation: H(H(zero || a) || b).
  std::string step1(32, '\0');
  step1.append(reinterpret_cast<const char*>(a.data()), a.size());
  Digest inner = ref_sha256(step1);
  std::string step2(reinterpret_cast<const char*>(inner.data()), inner.size());
  step2.append(reinterpret_cast<const char*>(b.data()), b.size());
  CHECK(ab.value() == ref_sha256(step2));
}

TEST_CASE("verify_launch accepts matching artifacts and refuses tampering") {
  std::vector<std::pair<std::string, std::string>> artifacts = {
      {"policy:base", "{\"ranges\":[]}"},
      {"program:p1", "NOP\nHALT\n"},
      {"program:p2", "HALT\n"},
  };
  GoldenManifest manifest;
  {
    Pcr pcr;
    for (const auto& [name, bytes] : artifacts) {
      manifest.expected.push_back({name, measure(bytes)});
      pcr.extend(measure(bytes));
    }
    manifest.expected_pcr = pcr.value();
  }

  CHECK(verify_launch(manifest, artifacts).ok);

  auto tampered = artifacts;
  tampered[1].second[0] = 'J';
  LaunchVerification v = verify_launch(manifest, tampered);
  CHECK(!v.ok);
  REQUIRE(v.mismatched.size() == 1);
  CHECK(v.measured[v.mismatched[0]].name == "program:p1");

  auto reordered = artifacts;
  std::swap(reordered[1], reordered[2]);
  CHECK(!verify_launch(manifest, reordered).ok);

  auto missing = artifacts;
  missing.pop_back();
  CHECK(!verify_launch(manifest, missing).ok);
}

TEST_CASE("manifest and key absence raise their dedicated errors") {
  std::vector<std::pair<std::string, std::string>> artifacts;
  CHECK_THROWS_AS(verify_launch(std::optional<GoldenManifest>{}, artifacts),
                  TrustError);
  CHECK_THROWS_AS(tag_message(std::optional<MacKey>{}, "msg"), TrustError);
  CHECK_THROWS_AS(verify_message(std::optional<MacKey>{}, "msg", Digest{}),
                  TrustError);

  std::optional<GoldenManifest> manifest = GoldenManifest{};
  CHECK_NOTHROW(verify_launch(manifest, artifacts));
  std::optional<MacKey> key = MacKey{};
  CHECK_NOTHROW(tag_message(key, "msg"));
}

TEST_CASE("report lines render the documented shape") {
  SecurityReport r;
  r.tick = 12;
  r.pid = "p9";
  r.kind = ReportKind::RangeViolation;
  r.severity = 15;
  r.details = "reg(0)=11 outside [0,10]";
  CHECK(r.line() ==
        "REPORT tick=12 pid=p9 kind=RangeViolation severity=15 details=reg(0)=11 "
        "outside [0,10]");
}

TEST_CASE("report kind names round-trip") {
  for (ReportKind k : kAllReportKinds) {
    CHECK(report_kind_from_name(report_kind_name(k)) == k);
  }
  CHECK(!report_kind_from_name("Nonsense"));
}
