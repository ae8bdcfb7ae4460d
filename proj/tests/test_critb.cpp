#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "torsion8/arith.hpp"
#include "torsion8/critb.hpp"

using namespace torsion8;

namespace {

// Census source from the Waterhouse classification, independent of ecount.
critb::CensusSource oracle_source() {
  return [](int l, int k) {
    ecount::TraceCensus c;
    c.l = l;
    c.k = k;
    const auto t = oracle::waterhouse_traces(l, k);
    c.traces.assign(t.begin(), t.end());
    return c;
  };
}

}  // namespace

TEST_CASE("cyclotomic divisors") {
  CHECK(critb::cyclotomic_divisor(3, 2, 8) == critb::Cyclotomic{1, +1});  // 3 | 2 + 1
  CHECK(critb::cyclotomic_divisor(7, 2, 8) == critb::Cyclotomic{3, -1});
  CHECK(critb::cyclotomic_divisor(17, 2, 8) == critb::Cyclotomic{4, +1});
  CHECK(critb::cyclotomic_divisor(257, 2, 8) == critb::Cyclotomic{8, +1});
  CHECK_FALSE(critb::cyclotomic_divisor(101, 2, 8).has_value());
  CHECK_THROWS_AS(critb::cyclotomic_divisor(2, 2, 8), std::invalid_argument);
}

TEST_CASE("library census and the Waterhouse oracle give the same prime set") {
  CHECK(critb::primes_dividing_orders(2, 6) == critb::primes_dividing_orders(2, 6, oracle_source()));
  CHECK(critb::primes_dividing_orders(3, 3) == critb::primes_dividing_orders(3, 3, oracle_source()));
}

TEST_CASE("witness precedence") {
  // Among curve witnesses: least d', then least |a|, negative first.
  const auto report = critb::criterion_b_report(2, 8, {43, 257, 101, 37}, oracle_source());
  const auto& w43 = report.per_prime.at(43);
  CHECK(w43.kind == critb::Witness::Kind::curve_order);
  CHECK(w43.dprime == 7);  // 129 = 128 + 1 - 0; nothing earlier
  CHECK(w43.trace == 0);
  CHECK(critb::witness_holds(43, 2, w43));
  // 257 = 2^8 + 1 also divides #E = 257 - a for a = 0 over F_{2^8}; the
  // curve witness wins over the cyclotomic one.
  const auto& w257 = report.per_prime.at(257);
  CHECK(w257.kind == critb::Witness::Kind::curve_order);
  CHECK(w257.dprime == 8);
  CHECK(w257.trace == 0);
  CHECK(report.per_prime.at(101).kind == critb::Witness::Kind::clear);
  // 37 | 74 = 65 - (-9) over F_{2^6}
  const auto& w37 = report.per_prime.at(37);
  CHECK(w37.kind == critb::Witness::Kind::curve_order);
  CHECK(w37.dprime == 6);
  CHECK(w37.trace == -9);
}

TEST_CASE("every reported witness rechecks by arithmetic") {
  std::vector<std::uint32_t> cands;
  for (auto p : primes_in(29, 6724)) cands.push_back(p);
  const auto report = critb::criterion_b_report(2, 8, cands, oracle_source());
  for (const auto& [p, w] : report.per_prime) {
    CAPTURE(p);
    if (w.kind != critb::Witness::Kind::clear) {
      CHECK(critb::witness_holds(p, 2, w));
    } else {
      // cleared: no realized order over F_{2^k}, k <= 8, is divisible by p
      for (int k = 1; k <= 8; ++k) {
        for (int a : oracle::waterhouse_traces(2, k)) CHECK((oracle::ipow(2, k) + 1 - a) % p != 0);
      }
    }
  }
}

TEST_CASE("cusp closed-point degree") {
  CHECK(critb::cusp_closed_point_degree(7, 2) == 3);    // 2^3 = 1 mod 7
  CHECK(critb::cusp_closed_point_degree(11, 2) == 5);   // 2^5 = -1 mod 11
  CHECK(critb::cusp_closed_point_degree(3, 2) == 1);
  CHECK_THROWS_AS(critb::cusp_closed_point_degree(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(critb::cusp_closed_point_degree(5, 5), std::invalid_argument);
}
