#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torsion8/modsym.hpp"

// Formal-immersion check at sums of rational cusps on X_H(p).
//
// The rational cusps of X_H(p) above oo are indexed by the m = [G : H]
// cosets; cusp k is moved to cusp 0 by the diamond <g^k>. A point of the
// d-th symmetric power supported on those cusps is a multiplicity pattern
// (n_0, ..., n_{m-1}) with sum d. Up to the diamond action we may take
// n_0 >= 1. The pattern passes when the rows <g^k> T_j e, j = 1..n_k, are
// linearly independent over F_l, where e is the test vector supplied by a
// criterion provider.
namespace torsion8::immersion {

/// Row vectors over F_l, entries in [0, l).
using FlRow = std::vector<std::uint32_t>;

/// Rows handed to the pattern checker: rows[k][j - 1] is the image of
/// <g^k> T_j e in the provider's F_l-module, for j = 1..d.
struct TestModule {
  std::size_t rank = 0;                      // F_l dimension of the ambient module
  std::vector<std::vector<FlRow>> rows;      // [cusp][j - 1]
  std::optional<std::string> inapplicable;   // set when no pattern can pass
};

/// Pluggable construction of the test rows. Callers only see this interface.
class CriterionProvider {
 public:
  virtual ~CriterionProvider() = default;
  virtual std::string name() const = 0;
  virtual TestModule build(const modsym::SymbolSpace& space, int d, int l) const = 0;
};

/// Default: the Hecke module T e of the winding element e (cuspidal part of
/// {0, oo}) as a lattice, built as the Z-span of <a> T_n e for n up to the
/// Sturm bound, and rows read in (T e) / l (T e). Closure of the span under
/// T_2 and the diamond generator is checked; a failure throws
/// std::logic_error.
class WindingLatticeProvider final : public CriterionProvider {
 public:
  std::string name() const override { return "winding-lattice"; }
  TestModule build(const modsym::SymbolSpace& space, int d, int l) const override;
};

/// Naive recipe: coordinates of <a> T_j e in the Manin-symbol basis, each
/// row scaled to be integral and primitive away from l, then reduced mod l.
class ManinCoordinateProvider final : public CriterionProvider {
 public:
  std::string name() const override { return "manin-coordinates"; }
  TestModule build(const modsym::SymbolSpace& space, int d, int l) const override;
};

std::shared_ptr<const CriterionProvider> default_provider();

struct ImmersionOptions {
  std::shared_ptr<const CriterionProvider> provider = default_provider();
  /// Levels whose cuspidal subspace exceeds this are skipped (not_verified).
  std::size_t max_cuspidal_dimension = 320;
  /// Keep every checked pattern in the verdict when there are at most this many.
  std::size_t max_recorded_patterns = 64;
};

struct PatternResult {
  std::vector<int> multiplicities;  // one entry per rational cusp above oo
  bool pass = false;
  bool operator==(const PatternResult&) const = default;
};

struct ImmersionVerdict {
  std::uint32_t p = 0;
  int d = 0;
  int l = 2;
  std::string level_tag;  // "X0" or "XH:<index>"
  std::string provider;
  int cusps = 0;
  std::size_t cuspidal_dimension = 0;
  std::size_t module_rank = 0;
  std::uint64_t patterns_checked = 0;
  std::vector<PatternResult> patterns;  // all of them when few, else only a failure
  bool verified = false;
  std::string reason;  // why not verified; empty when verified
  std::vector<std::string> assumptions;

  bool operator==(const ImmersionVerdict&) const = default;
};

/// Pattern check at one level. Rejects p == l, even p and levels beyond the
/// symbol-space caps (std::invalid_argument).
ImmersionVerdict formal_immersion_check(std::uint32_t p, int d, int l, const modsym::Subgroup& h,
                                        const ImmersionOptions& options = {});
ImmersionVerdict formal_immersion_check(std::uint32_t p, int d, int l = 2);

/// Tries X0 first and then proper subgroups by increasing index, stopping at
/// the first level that verifies. Proper subgroups are only tried for
/// p <= 250 and X0 only for p <= 1000 (beyond that: a single not_verified
/// entry). attempts holds every level tried, in order.
struct LevelSearch {
  std::vector<ImmersionVerdict> attempts;
  const ImmersionVerdict& final() const { return attempts.back(); }
  bool verified() const { return !attempts.empty() && attempts.back().verified; }
};

LevelSearch search_levels(std::uint32_t p, int d, int l, const ImmersionOptions& options = {});

/// Per-prime search over a list of primes; results in input order. The
/// serial version is the reference for the OpenMP one.
std::vector<LevelSearch> sweep_serial(const std::vector<std::uint32_t>& primes, int d, int l,
                                      const ImmersionOptions& options = {});
std::vector<LevelSearch> sweep_parallel(const std::vector<std::uint32_t>& primes, int d, int l,
                                        const ImmersionOptions& options = {});

/// Number of patterns with n_0 >= 1 over m cusps: C(d + m - 2, d - 1).
std::uint64_t pattern_count(int cusps, int d);

}  // namespace torsion8::immersion
