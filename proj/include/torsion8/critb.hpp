#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "torsion8/ecount.hpp"

// Assumption (b) via point counts: a prime p is cleared when no curve over
// F_{l^d'} (d' <= d) has order divisible by p and p divides no l^d' +- 1.
namespace torsion8::critb {

/// Supplies the trace census over F_{l^k}. The default reads
/// ecount::trace_census in family mode (cached when a cache dir is set).
using CensusSource = std::function<ecount::TraceCensus(int l, int k)>;
CensusSource default_census_source();

/// Sorted union over d' = 1..d of the primes dividing a realized order.
std::vector<std::uint32_t> primes_dividing_orders(int l, int d, const CensusSource& source = default_census_source());

struct Cyclotomic {
  int dprime;
  int sign;  // +1: p | l^d' + 1, -1: p | l^d' - 1
  bool operator==(const Cyclotomic&) const = default;
};

/// Least d' <= d (and, for that d', sign -1 before +1) with p | l^d' + sign.
/// Throws std::invalid_argument when p == l.
std::optional<Cyclotomic> cyclotomic_divisor(std::uint32_t p, int l, int d);

struct Witness {
  enum class Kind { clear, curve_order, cyclotomic };
  Kind kind = Kind::clear;
  int dprime = 0;
  std::int64_t trace = 0;  // curve_order: the Frobenius trace over F_{l^d'}
  int sign = 0;            // cyclotomic

  bool operator==(const Witness&) const = default;
};

struct CriterionBReport {
  int l = 0;
  int d = 0;
  std::map<std::uint32_t, Witness> per_prime;

  std::vector<std::uint32_t> survivors() const;
};

/// Per-prime verdicts. A curve-order witness takes precedence over a
/// cyclotomic one; among curve witnesses the least d', then least |a|, then
/// the negative trace first.
CriterionBReport criterion_b_report(int l, int d, const std::vector<std::uint32_t>& candidates,
                                    const CensusSource& source = default_census_source());

std::vector<std::uint32_t> criterion_b_survivors(int l, int d, const std::vector<std::uint32_t>& candidates,
                                                 const CensusSource& source = default_census_source());

/// Recheck a witness by direct arithmetic (Hasse bound and divisibility).
bool witness_holds(std::uint32_t p, int l, const Witness& w);

/// Order of l in (Z/pZ)^x / {+-1}. Throws std::invalid_argument when p == l
/// or p is not an odd prime.
int cusp_closed_point_degree(std::uint32_t p, int l);

}  // namespace torsion8::critb
