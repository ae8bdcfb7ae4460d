#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "torsion8/checkpoint.hpp"
#include "torsion8/critb.hpp"
#include "torsion8/evidence.hpp"
#include "torsion8/immersion.hpp"

// Candidate primes for S(d) and the per-prime elimination argument: a prime
// is eliminated once assumption (a) (cusp sums reduce injectively mod l) and
// assumption (b) (no rational point off the cusp-sum classes) both hold, or
// by the rank-zero route (gonality gate plus cusp/principality evidence).
namespace torsion8::pipeline {

/// Primes p with known_floor < p < (3^{d/2} + 1)^2, compared exactly.
std::vector<std::uint32_t> oesterle_candidates(int d, std::uint32_t known_floor);
/// Whether p lies below (3^{d/2} + 1)^2.
bool below_oesterle_bound(std::uint64_t p, int d);

/// Primes p for which J1(p)(Q) is finite.
const std::vector<std::uint32_t>& rank_zero_primes();
bool is_rank_zero(std::uint32_t p);

/// Largest prime q with Primes(q) known to lie in S(d), for d <= 8.
std::optional<std::uint32_t> default_known_floor(int d);

/// nullopt when no gonality evidence exists for p; else bound > d (strict).
std::optional<bool> gonality_gate(std::uint32_t p, int d, const evidence::EvidenceSet& ev);

/// d * 2^16 * 7 < 325 (p^2 - 1).
bool prop71_check(std::uint64_t p, int d);

// ------------------------------------------------------------ certificates

enum class Status { in_target_set, eliminated, needs_external_evidence, open };
enum class Provenance { computed, external };
enum class Outcome { satisfied, failed, missing_evidence, info };

std::string to_string(Status s);
std::string to_string(Provenance p);
std::string to_string(Outcome o);

struct Step {
  std::string rule_id;
  std::string anchor;
  std::string assumption;  // "a", "b" or empty
  nlohmann::json inputs = nlohmann::json::object();
  std::string result;
  Outcome outcome = Outcome::info;
  Provenance provenance = Provenance::computed;
  std::string evidence_id;  // external steps only
};

struct Certificate {
  std::uint32_t prime = 0;
  int d = 0;
  int l = 2;
  Status status = Status::open;
  std::vector<Step> steps;
  std::string toolkit_version;
  std::string started_at;
  std::string finished_at;
};

nlohmann::json to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

/// Empty when the certificate is well formed: eliminated needs a satisfied
/// step for each of (a) and (b) plus no failed or missing ones, and every
/// external step names an evidence id.
std::optional<std::string> shape_violation(const Certificate& c);

// ------------------------------------------------------------ verdict cache

/// Formal-immersion verdicts for primes above the interactive cap. Entries
/// are either computed by this toolkit (replayable) or reported from an
/// external sweep (cited, treated as external evidence).
struct CachedVerdict {
  std::string id;
  std::uint32_t prime = 0;
  std::string level;
  bool verified = false;
  bool computed = false;
  std::string source;
};

class VerdictCache {
 public:
  VerdictCache() = default;
  static VerdictCache load(const std::string& path);
  static VerdictCache from_json(const nlohmann::json& j);

  int d() const { return d_; }
  int l() const { return l_; }
  const CachedVerdict* find(std::uint32_t p) const;
  std::size_t size() const { return entries_.size(); }
  std::string digest() const { return digest_; }

 private:
  int d_ = 0;
  int l_ = 0;
  std::map<std::uint32_t, CachedVerdict> entries_;
  std::string digest_;
};

inline constexpr int kVerdictSchemaVersion = 1;

// ------------------------------------------------------------ running

struct ContradictionError : std::runtime_error {
  ContradictionError(const std::string& what, nlohmann::json details)
      : std::runtime_error(what), details(std::move(details)) {}
  nlohmann::json details;
};

struct Options {
  int d = 8;
  int l = 2;
  std::optional<std::uint32_t> known_floor;        // default_known_floor(d) when unset
  std::optional<std::vector<std::uint32_t>> primes;  // restrict the candidates
  /// Primes at or above the cap take their immersion verdict from the
  /// cache when it has one; 0 computes every verdict.
  std::uint32_t immersion_cap = 300;
  const VerdictCache* verdicts = nullptr;
  immersion::ImmersionOptions immersion;
  critb::CensusSource census = critb::default_census_source();
  int jobs = 1;
  checkpoint::Log* checkpoint = nullptr;
  std::optional<std::string> fixed_time;  // pins every timestamp
  std::function<void(const std::string&)> progress;
};

struct Summary {
  int d = 0;
  int l = 0;
  std::uint32_t known_floor = 0;
  std::vector<std::uint32_t> eliminated;
  std::vector<std::uint32_t> needs_external;
  std::vector<std::uint32_t> open;
  std::string conclusion;
  bool complete() const { return needs_external.empty() && open.empty(); }
};

nlohmann::json to_json(const Summary& s);

struct Result {
  std::vector<Certificate> certificates;  // ascending prime
  Summary summary;
};

/// Throws ContradictionError when the evidence both asserts and denies a
/// claim, std::invalid_argument for bad options and std::logic_error when
/// a produced certificate violates its shape invariant.
Result run_pipeline(const evidence::EvidenceSet& ev, const Options& options);

/// Writes certificates/<p>.json and summary.json under dir, each through a
/// temporary file and rename.
void write_artifacts(const Result& r, const std::string& dir);

}  // namespace torsion8::pipeline
