#include "torsion8/critb.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "torsion8/arith.hpp"

namespace torsion8::critb {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Census traces reordered for witness selection: |a| ascending, negative
// first on ties.
std::vector<int> witness_order(std::vector<int> traces) {
  std::sort(traces.begin(), traces.end(), [](int a, int b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
  });
  return traces;
}

}  // namespace

CensusSource default_census_source() {
  return [](int l, int k) { return ecount::trace_census(l, k, ecount::Mode::family); };
}

std::vector<std::uint32_t> primes_dividing_orders(int l, int d, const CensusSource& source) {
  std::set<std::uint32_t> out;
  for (int k = 1; k <= d; ++k) {
    const auto census = source(l, k);
    for (auto n : census.orders()) {
      for (auto r : prime_divisors(static_cast<std::uint64_t>(n))) out.insert(static_cast<std::uint32_t>(r));
    }
  }
  return {out.begin(), out.end()};
}

std::optional<Cyclotomic> cyclotomic_divisor(std::uint32_t p, int l, int d) {
  if (p == static_cast<std::uint32_t>(l)) throw std::invalid_argument("cyclotomic_divisor: p equals l");
  std::uint64_t power = 1;
  for (int k = 1; k <= d; ++k) {
    power = power * static_cast<std::uint64_t>(l) % p;
    if (power == 1 % p) return Cyclotomic{k, -1};
    if ((power + 1) % p == 0) return Cyclotomic{k, +1};
  }
  return std::nullopt;
}

std::vector<std::uint32_t> CriterionBReport::survivors() const {
  std::vector<std::uint32_t> out;
  for (const auto& [p, w] : per_prime) {
    if (w.kind != Witness::Kind::clear) out.push_back(p);
  }
  return out;
}

CriterionBReport criterion_b_report(int l, int d, const std::vector<std::uint32_t>& candidates,
                                    const CensusSource& source) {
  CriterionBReport report;
  report.l = l;
  report.d = d;
  for (auto p : candidates) {
    if (p == static_cast<std::uint32_t>(l)) throw std::invalid_argument("criterion_b: candidate equals l");
    report.per_prime[p] = Witness{};
  }
  if (candidates.empty()) return report;

  for (int k = 1; k <= d; ++k) {
    const auto census = source(l, k);
    const auto q = census.q();
    const auto order = witness_order(census.traces);
    for (auto& [p, w] : report.per_prime) {
      if (w.kind == Witness::Kind::curve_order) continue;
      for (int a : order) {
        if ((q + 1 - a) % static_cast<std::int64_t>(p) == 0) {
          w = Witness{Witness::Kind::curve_order, k, a, 0};
          break;
        }
      }
    }
  }
  for (auto& [p, w] : report.per_prime) {
    if (w.kind != Witness::Kind::clear) continue;
    if (auto c = cyclotomic_divisor(p, l, d)) w = Witness{Witness::Kind::cyclotomic, c->dprime, 0, c->sign};
  }
  return report;
}

std::vector<std::uint32_t> criterion_b_survivors(int l, int d, const std::vector<std::uint32_t>& candidates,
                                                 const CensusSource& source) {
  return criterion_b_report(l, d, candidates, source).survivors();
}

bool witness_holds(std::uint32_t p, int l, const Witness& w) {
  switch (w.kind) {
    case Witness::Kind::clear:
      return true;
    case Witness::Kind::curve_order: {
      const auto q = ipow(l, w.dprime);
      return w.trace * w.trace <= 4 * q && (q + 1 - w.trace) % static_cast<std::int64_t>(p) == 0;
    }
    case Witness::Kind::cyclotomic:
      return (ipow(l, w.dprime) + w.sign) % static_cast<std::int64_t>(p) == 0;
  }
  return false;
}

int cusp_closed_point_degree(std::uint32_t p, int l) {
  if (p == static_cast<std::uint32_t>(l)) throw std::invalid_argument("cusp_closed_point_degree: p equals l");
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("cusp_closed_point_degree: p must be an odd prime");
  const std::uint64_t base = static_cast<std::uint64_t>(mod(l, p));
  std::uint64_t x = base;
  for (int k = 1;; ++k) {
    if (x == 1 || x == p - 1) return k;
    x = x * base % p;
  }
}

}  // namespace torsion8::critb
