#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "torsion8/arith.hpp"
#include "torsion8/pipeline.hpp"

using namespace torsion8;
using namespace torsion8::pipeline;
using evidence::ClaimKind;

namespace {

critb::CensusSource waterhouse() {
  return [](int l, int k) {
    ecount::TraceCensus c;
    c.l = l;
    c.k = k;
    const auto t = oracle::waterhouse_traces(l, k);
    c.traces.assign(t.begin(), t.end());
    return c;
  };
}

Options quick(std::vector<std::uint32_t> primes) {
  Options o;
  o.primes = std::move(primes);
  o.census = waterhouse();
  o.fixed_time = "1970-01-01T00:00:00Z";
  return o;
}

evidence::EvidenceSet data_evidence() {
  return evidence::load(std::string(TORSION8_DATA_DIR) + "/evidence_d8.json");
}

}  // namespace

TEST_CASE("Oesterle candidates") {
  const auto c8 = oesterle_candidates(8, 23);
  CHECK(c8.front() == 29);
  CHECK(c8.back() == 6719);  // (3^4 + 1)^2 = 6724
  std::vector<std::uint32_t> expected;
  for (auto p : primes_in(24, 6724)) expected.push_back(p);
  CHECK(c8 == expected);
  CHECK(oesterle_candidates(1, 7).empty());   // (sqrt 3 + 1)^2 < 7.5
  CHECK(oesterle_candidates(2, 13).empty());  // 16
  CHECK(below_oesterle_bound(6723, 8));
  CHECK_FALSE(below_oesterle_bound(6724, 8));
  CHECK(below_oesterle_bound(7, 1));
  CHECK_FALSE(below_oesterle_bound(8, 1));
  CHECK(below_oesterle_bound(38, 3));  // (3^1.5 + 1)^2 = 38.39...
  CHECK_FALSE(below_oesterle_bound(39, 3));
}

TEST_CASE("rank-zero primes and the known floor") {
  CHECK(is_rank_zero(29));
  CHECK(is_rank_zero(71));
  CHECK_FALSE(is_rank_zero(37));
  CHECK_FALSE(is_rank_zero(43));
  CHECK(default_known_floor(8) == 23u);
  CHECK(default_known_floor(1) == 7u);
  CHECK_FALSE(default_known_floor(9).has_value());
}

TEST_CASE("the large-p bound") {
  for (std::uint64_t p : {107, 109, 113, 137, 6719}) CHECK(prop71_check(p, 8));
  for (std::uint64_t p : {29, 31, 97, 101, 103}) CHECK_FALSE(prop71_check(p, 8));
  CHECK(prop71_check(11, 1) == (1 * 65536 * 7 < 325 * (121 - 1)));
}

TEST_CASE("evidence parsing") {
  CHECK(evidence::parse("").empty());
  CHECK(evidence::parse("  \n").empty());
  CHECK(evidence::parse("[]").empty());
  const auto ev = evidence::parse(R"([{"id": "x", "prime": 43, "claim_kind": "gonality_lower_bound", "value": 9,
                                       "source": "s"}])");
  CHECK(ev.entries().size() == 1);
  CHECK_THROWS_AS(evidence::parse(R"([{"id": "x", "prime": 43, "claim_kind": "gonality", "source": "s"}])"),
                  evidence::EvidenceError);
  CHECK_THROWS_AS(evidence::parse(R"([{"id": "x", "prime": 43, "claim_kind": "gonality_lower_bound", "source": "s"}])"),
                  evidence::EvidenceError);
  CHECK_THROWS_AS(evidence::parse(R"([{"id": "x", "prime": 43, "claim_kind": "cuspidal_generation", "source": "s",
                                       "extra": 1}])"),
                  evidence::EvidenceError);
  CHECK_THROWS_AS(evidence::parse(R"([{"id": "x", "prime": 43, "claim_kind": "cuspidal_generation", "source": "s"},
                                      {"id": "x", "prime": 47, "claim_kind": "cuspidal_generation", "source": "s"}])"),
                  evidence::EvidenceError);
  CHECK_THROWS_AS(evidence::parse("{"), evidence::EvidenceError);
  CHECK(data_evidence().entries().size() == 33);
}

TEST_CASE("gonality gate is strict") {
  const auto ev = evidence::parse(R"([
    {"id": "g8", "prime": 29, "claim_kind": "gonality_lower_bound", "value": 8, "source": "s"},
    {"id": "g9", "prime": 31, "claim_kind": "gonality_lower_bound", "value": 9, "source": "s"}])");
  CHECK(gonality_gate(29, 8, ev) == false);
  CHECK(gonality_gate(31, 8, ev) == true);
  CHECK_FALSE(gonality_gate(41, 8, ev).has_value());
}

TEST_CASE("contradictory evidence stops the run") {
  const auto ev = evidence::parse(R"([
    {"id": "yes", "prime": 29, "claim_kind": "principality_check_passed", "source": "s"},
    {"id": "no", "prime": 29, "claim_kind": "principality_check_passed", "value": false, "source": "t"}])");
  REQUIRE(ev.contradictions().size() == 1);
  CHECK_THROWS_AS(run_pipeline(ev, quick({101})), ContradictionError);
}

TEST_CASE("101 is eliminated by computation alone") {
  const auto r = run_pipeline({}, quick({101}));
  REQUIRE(r.certificates.size() == 1);
  const auto& c = r.certificates.front();
  CHECK(c.status == Status::eliminated);
  CHECK_FALSE(shape_violation(c).has_value());
  for (const auto& s : c.steps) {
    CHECK(s.provenance == Provenance::computed);
    CHECK(s.outcome != Outcome::failed);
    CHECK(s.outcome != Outcome::missing_evidence);
  }
  CHECK(r.summary.complete());
  CHECK(r.summary.eliminated == std::vector<std::uint32_t>{101});
}

TEST_CASE("rank-zero primes need evidence") {
  const auto bare = run_pipeline({}, quick({29}));
  CHECK(bare.certificates.front().status == Status::needs_external_evidence);
  CHECK_FALSE(bare.summary.complete());

  const auto full = run_pipeline(data_evidence(), quick({29}));
  const auto& c = full.certificates.front();
  CHECK(c.status == Status::eliminated);
  bool cited = false;
  for (const auto& s : c.steps) {
    if (s.provenance == Provenance::external) {
      CHECK_FALSE(s.evidence_id.empty());
      cited = true;
    }
  }
  CHECK(cited);
}

TEST_CASE("a denial leaves the prime unresolved") {
  const auto ev = evidence::parse(R"([
    {"id": "g", "prime": 29, "claim_kind": "gonality_lower_bound", "value": 9, "source": "s"},
    {"id": "c", "prime": 29, "claim_kind": "cuspidal_generation", "source": "s"},
    {"id": "p", "prime": 29, "claim_kind": "principality_check_passed", "value": false, "source": "s"}])");
  const auto r = run_pipeline(ev, quick({29}));
  CHECK(r.certificates.front().status != Status::eliminated);
}

TEST_CASE("evidence for other primes does not leak") {
  const auto ev = evidence::parse(R"([
    {"id": "g", "prime": 31, "claim_kind": "gonality_lower_bound", "value": 9, "source": "s"},
    {"id": "c", "prime": 31, "claim_kind": "cuspidal_generation", "source": "s"},
    {"id": "p", "prime": 31, "claim_kind": "principality_check_passed", "source": "s"}])");
  const auto r = run_pipeline(ev, quick({29}));
  CHECK(r.certificates.front().status == Status::needs_external_evidence);
  for (const auto& s : r.certificates.front().steps) CHECK(s.evidence_id.empty());
}

TEST_CASE("certificates round-trip through JSON and replay identically") {
  const auto a = run_pipeline(data_evidence(), quick({29, 43, 101, 113}));
  const auto b = run_pipeline(data_evidence(), quick({29, 43, 101, 113}));
  REQUIRE(a.certificates.size() == 4);
  for (std::size_t i = 0; i < a.certificates.size(); ++i) {
    const auto j = to_json(a.certificates[i]);
    CHECK(j == to_json(b.certificates[i]));
    CHECK(to_json(certificate_from_json(j)) == j);
    CHECK(j.contains("anchor") == false);
    for (const auto& s : j.at("steps")) CHECK(s.contains("anchor"));
  }
  CHECK(to_json(a.summary) == to_json(b.summary));
}

TEST_CASE("shape invariant") {
  Certificate c;
  c.prime = 101;
  c.d = 8;
  c.status = Status::eliminated;
  CHECK(shape_violation(c).has_value());  // nothing supports (a) or (b)
  Step a{"formal_immersion", "x", "a", {}, "ok", Outcome::satisfied, Provenance::computed, ""};
  Step b{"criterion_b_point_count", "x", "b", {}, "ok", Outcome::satisfied, Provenance::computed, ""};
  c.steps = {a, b};
  CHECK_FALSE(shape_violation(c).has_value());
  c.steps.push_back({"extra", "x", "b", {}, "cited", Outcome::satisfied, Provenance::external, ""});
  CHECK(shape_violation(c).has_value());  // external without an id
  c.steps.back().evidence_id = "e";
  CHECK_FALSE(shape_violation(c).has_value());
  c.steps.push_back({"more", "x", "a", {}, "no", Outcome::failed, Provenance::computed, ""});
  CHECK(shape_violation(c).has_value());
}

TEST_CASE("verdict cache") {
  nlohmann::json j = {{"schema_version", 1},
                      {"d", 8},
                      {"l", 2},
                      {"entries",
                       {{{"id", "imm-1009"},
                         {"prime", 1009},
                         {"level", "X0"},
                         {"verdict", "verified"},
                         {"provenance", "reported"},
                         {"source", "s"}}}}};
  const auto cache = VerdictCache::from_json(j);
  REQUIRE(cache.find(1009) != nullptr);
  CHECK(cache.find(1009)->verified);
  CHECK_FALSE(cache.find(1009)->computed);
  CHECK(cache.find(1013) == nullptr);

  auto o = quick({1009, 1013});
  o.verdicts = &cache;
  const auto r = run_pipeline({}, o);
  CHECK(r.certificates[0].status == Status::eliminated);
  bool cites = false;
  for (const auto& s : r.certificates[0].steps) cites = cites || s.evidence_id == "imm-1009";
  CHECK(cites);
  CHECK(r.certificates[1].status == Status::needs_external_evidence);

  j["schema_version"] = 2;
  CHECK_THROWS(VerdictCache::from_json(j));
}

TEST_CASE("artifacts on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "torsion8_test_artifacts";
  std::filesystem::remove_all(dir);
  const auto r = run_pipeline({}, quick({101}));
  write_artifacts(r, dir.string());
  CHECK(std::filesystem::exists(dir / "certificates" / "101.json"));
  std::ifstream in(dir / "summary.json");
  const auto s = nlohmann::json::parse(in);
  CHECK(s.at("eliminated") == nlohmann::json::array({101}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("l must not be a candidate") {
  auto o = quick({101});
  o.l = 101;
  CHECK_THROWS_AS(run_pipeline({}, o), std::invalid_argument);
}
