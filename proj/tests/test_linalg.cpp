#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "torsion8/gf2.hpp"
#include "torsion8/qmatrix.hpp"
#include "torsion8/zlattice.hpp"

using namespace torsion8;

namespace {

std::vector<std::vector<long>> random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long lo,
                                             long hi) {
  std::uniform_int_distribution<long> pick(lo, hi);
  std::vector<std::vector<long>> m(rows, std::vector<long>(cols));
  for (auto& r : m) {
    for (auto& v : r) v = pick(rng);
  }
  return m;
}

std::vector<QVector> as_rows(const std::vector<std::vector<long>>& m) {
  std::vector<QVector> out;
  for (const auto& r : m) {
    QVector v;
    for (long x : r) v.emplace_back(x);
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("GF(2) rank of identity and zero") {
  std::vector<std::vector<long>> id(5, std::vector<long>(5, 0));
  for (int i = 0; i < 5; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  CHECK(gf2::reduce_rank_gf2(as_rows(id)) == 5);
  CHECK(gf2::reduce_rank_gf2(as_rows(std::vector<std::vector<long>>(5, std::vector<long>(5, 0)))) == 0);
}

TEST_CASE("GF(2) rank agrees with the elimination oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + static_cast<std::size_t>(trial % 7) * 10, cols = 64 + static_cast<std::size_t>(trial % 3);
    // small entries give plenty of dependencies mod 2
    const auto m = random_matrix(rng, rows, cols, -3, 3);
    CHECK(gf2::reduce_rank_gf2(as_rows(m)) == oracle::rank_mod2(m));
  }
  const auto square = random_matrix(rng, 64, 64, -1000, 1000);
  CHECK(gf2::reduce_rank_gf2(as_rows(square)) == oracle::rank_mod2(square));
}

TEST_CASE("GF(2) normalization keeps 2-adic content") {
  // [2, 4] has content 2, which is kept: the row vanishes mod 2.
  CHECK(gf2::reduce_rank_gf2({QVector{Rational(2), Rational(4)}}) == 0);
  // [3, 6] has odd content 3, which is removed: [1, 2] survives.
  CHECK(gf2::reduce_rank_gf2({QVector{Rational(3), Rational(6)}}) == 1);
  // odd denominators are cleared
  CHECK(gf2::reduce_rank_gf2({QVector{Rational(1, 3), Rational(2, 3)}}) == 1);
  CHECK_THROWS_AS(gf2::reduce_rank_gf2({QVector{Rational(1, 2), Rational(1)}}), std::domain_error);
}

TEST_CASE("rational rank, kernel and solve") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
    auto m = random_matrix(rng, n, n + 2, -5, 5);
    m[0] = m[1];  // force a dependency
    QMatrix a(n, n + 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n + 2; ++j) a(i, j) = m[i][j];
    }
    const auto r = rank(a);
    const auto ker = kernel(a);
    CHECK(r + ker.size() == n + 2);
    for (const auto& v : ker) CHECK(is_zero(a * v));
    QVector x(n + 2);
    for (std::size_t j = 0; j < n + 2; ++j) {
      x[j] = Rational(static_cast<long>(j) - 2, 3);
      x[j].canonicalize();
    }
    const QVector b = a * x;
    CHECK(a * solve(a, b) == b);
  }
  QMatrix a(2, 2);
  a(0, 0) = 1;
  a(1, 0) = 1;
  CHECK_THROWS_AS(solve(a, QVector{Rational(1), Rational(2)}), std::domain_error);
}

TEST_CASE("integer lattice: membership and coordinates") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 6;
    const auto gens = random_matrix(rng, 9, dim, -6, 6);
    IntegerLattice lat(dim);
    for (const auto& g : gens) {
      ZVector z;
      for (long v : g) z.emplace_back(v);
      lat.insert(z);
    }
    CHECK(lat.rank() <= dim);
    for (const auto& g : gens) {
      ZVector z;
      for (long v : g) z.emplace_back(v);
      REQUIRE(lat.contains(z));
      const ZVector c = lat.coordinates(z);
      ZVector back(dim, 0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) back[j] += c[i] * lat.basis()[i][j];
      }
      CHECK(back == z);
    }
  }
  IntegerLattice even(2);
  even.insert({Integer(2), Integer(0)});
  even.insert({Integer(0), Integer(2)});
  CHECK(even.contains({Integer(4), Integer(-2)}));
  CHECK_FALSE(even.contains({Integer(1), Integer(0)}));
  CHECK_THROWS_AS(even.coordinates({Integer(1), Integer(0)}), std::domain_error);
  // (2, 0) and (3, 0) generate (1, 0)
  IntegerLattice g(2);
  g.insert({Integer(2), Integer(0)});
  g.insert({Integer(3), Integer(0)});
  CHECK(g.rank() == 1);
  CHECK(g.contains({Integer(1), Integer(0)}));
}
