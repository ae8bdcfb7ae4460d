#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

// Externally asserted facts the pipeline cannot compute, each with a
// citation. The claim kinds form a closed list.
namespace torsion8::evidence {

enum class ClaimKind {
  cuspidal_generation,           // J1(p)(Q) generated by differences of rational cusps
  hecke_annihilator_exists,      // some t in the Hecke algebra kills J1(p)(Q)
  principality_check_passed,     // t(x - x0) non-principal for every non-cusp-sum class
  positive_rank_factors_in_J0,   // positive-rank simple factors of J1(p) occur in J0(p)
  gonality_lower_bound,          // value: lower bound for the gonality of X1(p)
};

std::string to_string(ClaimKind k);
/// Throws EvidenceError for anything outside the closed list.
ClaimKind claim_kind_from_string(const std::string& s);

struct EvidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Entry {
  std::string id;
  std::uint32_t prime = 0;
  ClaimKind kind = ClaimKind::cuspidal_generation;
  /// gonality_lower_bound: the bound (required). Other kinds: 1 asserts the
  /// claim (the default when absent), 0 denies it.
  std::int64_t value = 1;
  std::string source;

  bool asserted() const { return kind == ClaimKind::gonality_lower_bound || value != 0; }
  bool operator==(const Entry&) const = default;
};

/// Two entries about the same prime and boolean claim, one asserting and
/// one denying it.
struct Contradiction {
  Entry asserted;
  Entry denied;
};

class EvidenceSet {
 public:
  EvidenceSet() = default;
  /// Rejects duplicate ids.
  explicit EvidenceSet(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// First entry (in file order) for the prime and kind.
  const Entry* find(std::uint32_t prime, ClaimKind kind) const;
  /// Largest evidenced gonality lower bound for the prime.
  const Entry* best_gonality_bound(std::uint32_t prime) const;
  std::vector<Contradiction> contradictions() const;

 private:
  std::vector<Entry> entries_;
};

/// Parses a JSON array of {id, prime, claim_kind, value?, source}. An empty
/// document (zero bytes or whitespace) is an empty set.
EvidenceSet parse(const std::string& text);
EvidenceSet load(const std::string& path);

nlohmann::json to_json(const Entry& e);

}  // namespace torsion8::evidence
