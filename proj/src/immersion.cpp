#include "torsion8/immersion.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>

#include "torsion8/arith.hpp"
#include "torsion8/zlattice.hpp"

namespace torsion8::immersion {

using modsym::Subgroup;
using modsym::SymbolSpace;

namespace {

std::uint32_t reduce_mod(const Integer& x, int l) {
  return static_cast<std::uint32_t>(mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(l)));
}

// <g^k> T_j e for j = 1..n and every cusp k, as rational vectors.
std::vector<std::vector<QVector>> hecke_images(const SymbolSpace& space, const QVector& e, int n) {
  const int m = space.subgroup().index();
  std::vector<std::vector<QVector>> out(static_cast<std::size_t>(m));
  for (int j = 1; j <= n; ++j) {
    const QVector t = space.apply_hecke(j, e);
    for (int k = 0; k < m; ++k) {
      out[static_cast<std::size_t>(k)].push_back(k == 0 ? t : space.apply_diamond(space.subgroup().coset_rep(k), t));
    }
  }
  return out;
}

Integer lcm_of_denominators(const std::vector<std::vector<QVector>>& images) {
  Integer out = 1;
  for (const auto& per_cusp : images) {
    for (const auto& v : per_cusp) {
      const Integer den = common_denominator(v);
      mpz_lcm(out.get_mpz_t(), out.get_mpz_t(), den.get_mpz_t());
    }
  }
  return out;
}

ZVector scaled_integral(const QVector& v, const Integer& scale) {
  ZVector z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Rational x = v[i] * scale;
    if (x.get_den() != 1) throw std::logic_error("winding lattice: scale does not clear a denominator");
    z[i] = x.get_num();
  }
  return z;
}

QVector unscaled(const ZVector& z, const Integer& scale) {
  QVector v(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    v[i] = Rational(z[i], scale);
    v[i].canonicalize();
  }
  return v;
}

// Integral, primitive away from l, reduced mod l.
FlRow normalize_row(const QVector& v, int l) {
  const Integer den = common_denominator(v);
  ZVector z(v.size());
  Integer content = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Rational x = v[i] * den;
    z[i] = x.get_num();
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), z[i].get_mpz_t());
  }
  FlRow row(v.size(), 0);
  if (content == 0) return row;
  while (mpz_divisible_ui_p(content.get_mpz_t(), static_cast<unsigned long>(l))) content /= l;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Integer y = z[i] / content;
    row[i] = reduce_mod(y, l);
  }
  return row;
}

// ------------------------------------------------------------ echelon forms

// Incremental row echelon over GF(2), bit-packed; push/pop in stack order.
class BitEchelon {
 public:
  using Row = std::vector<std::uint64_t>;

  static Row pack(const FlRow& r) {
    Row out((r.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] & 1U) out[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return out;
  }

  bool push(Row v) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t c = pivots_[i];
      if ((v[c / 64] >> (c % 64)) & 1U) {
        for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= rows_[i][w];
      }
    }
    for (std::size_t w = 0; w < v.size(); ++w) {
      if (v[w] != 0) {
        pivots_.push_back(w * 64 + static_cast<std::size_t>(__builtin_ctzll(v[w])));
        rows_.push_back(std::move(v));
        return true;
      }
    }
    return false;
  }
  void pop() {
    rows_.pop_back();
    pivots_.pop_back();
  }

 private:
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
};

// Same over GF(l), rows normalized to pivot 1.
class ModEchelon {
 public:
  using Row = FlRow;

  explicit ModEchelon(int l) : l_(static_cast<std::uint64_t>(l)) {}

  bool push(Row v) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::uint64_t f = v[pivots_[i]];
      if (f == 0) continue;
      for (std::size_t c = 0; c < v.size(); ++c) {
        v[c] = static_cast<std::uint32_t>((v[c] + (l_ - f) * rows_[i][c]) % l_);
      }
    }
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (v[c] == 0) continue;
      const auto inv = static_cast<std::uint64_t>(inv_mod(v[c], static_cast<std::int64_t>(l_)));
      for (auto& x : v) x = static_cast<std::uint32_t>(x * inv % l_);
      pivots_.push_back(c);
      rows_.push_back(std::move(v));
      return true;
    }
    return false;
  }
  void pop() {
    rows_.pop_back();
    pivots_.pop_back();
  }

 private:
  std::uint64_t l_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
};

// ------------------------------------------------------------ pattern search

struct SearchOutcome {
  std::uint64_t checked = 0;
  std::vector<PatternResult> recorded;
  std::optional<std::vector<int>> failure;
};

// Depth-first over cusps. Rows of cusp k are pushed one at a time on top of
// the rows already chosen for cusps < k; the first dependency fails every
// pattern with at least that many rows at cusp k, so the search stops there.
template <class Echelon>
class PatternSearch {
 public:
  PatternSearch(Echelon echelon, std::vector<std::vector<typename Echelon::Row>> rows, int d, bool record)
      : ech_(std::move(echelon)),
        rows_(std::move(rows)),
        m_(static_cast<int>(rows_.size())),
        d_(d),
        record_(record),
        n_(rows_.size(), 0) {}

  SearchOutcome run() {
    visit(0, d_);
    return std::move(out_);
  }

 private:
  void visit(int k, int r) {
    const bool last = k == m_ - 1;
    const int lo = last ? r : (k == 0 ? 1 : 0);
    const auto& cusp_rows = rows_[static_cast<std::size_t>(k)];
    int pushed = 0;
    for (; pushed < r; ++pushed) {
      if (!ech_.push(cusp_rows[static_cast<std::size_t>(pushed)])) {
        std::vector<int> bad(n_.begin(), n_.begin() + k);
        bad.resize(static_cast<std::size_t>(m_), 0);
        bad[static_cast<std::size_t>(k)] = last ? r : pushed + 1;
        if (!last && pushed + 1 < r) bad[static_cast<std::size_t>(k) + 1] = r - pushed - 1;
        ++out_.checked;
        if (record_) out_.recorded.push_back({bad, false});
        out_.failure = std::move(bad);
        for (int i = 0; i < pushed; ++i) ech_.pop();
        return;
      }
    }
    for (int x = r; x >= lo; --x) {
      n_[static_cast<std::size_t>(k)] = x;
      if (x == r) {
        ++out_.checked;
        if (record_) {
          std::vector<int> pattern(n_.begin(), n_.begin() + k + 1);
          pattern.resize(static_cast<std::size_t>(m_), 0);
          out_.recorded.push_back({std::move(pattern), true});
        }
      } else {
        visit(k + 1, r - x);
        if (out_.failure) break;
      }
      if (x > 0) ech_.pop();
      --pushed;
    }
    for (; pushed > 0; --pushed) ech_.pop();
    n_[static_cast<std::size_t>(k)] = 0;
  }

  Echelon ech_;
  std::vector<std::vector<typename Echelon::Row>> rows_;
  int m_;
  int d_;
  bool record_;
  std::vector<int> n_;
  SearchOutcome out_;
};

SearchOutcome search_patterns(const TestModule& module, int d, int l, bool record) {
  if (l == 2) {
    std::vector<std::vector<BitEchelon::Row>> rows;
    for (const auto& cusp : module.rows) {
      auto& packed = rows.emplace_back();
      for (const auto& r : cusp) packed.push_back(BitEchelon::pack(r));
    }
    return PatternSearch<BitEchelon>(BitEchelon{}, std::move(rows), d, record).run();
  }
  return PatternSearch<ModEchelon>(ModEchelon(l), module.rows, d, record).run();
}

void validate(std::uint32_t p, int d, int l) {
  if (d < 1) throw std::invalid_argument("immersion: d must be positive");
  if (l < 2 || !is_prime(static_cast<std::uint64_t>(l))) throw std::invalid_argument("immersion: l must be prime");
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("immersion: p must be an odd prime");
  if (p == static_cast<std::uint32_t>(l)) throw std::invalid_argument("immersion: p equals l");
}

}  // namespace

// ------------------------------------------------------------ providers

TestModule WindingLatticeProvider::build(const SymbolSpace& space, int d, int l) const {
  TestModule out;
  if (space.cuspidal_dimension() == 0) {
    out.inapplicable = "genus 0";
    return out;
  }
  const QVector e = modsym::eisenstein_path(space).cuspidal;
  if (is_zero(e)) {
    out.inapplicable = "winding element vanishes";
    return out;
  }
  const Subgroup& h = space.subgroup();
  const int m = h.index();
  const int sturm = std::max(d, m * (space.level() + 1) / 6 + 2);
  const auto images = hecke_images(space, e, sturm);
  const Integer scale = lcm_of_denominators(images);

  IntegerLattice lattice(space.dimension());
  for (int j = 0; j < sturm; ++j) {
    for (int k = 0; k < m; ++k) {
      lattice.insert(scaled_integral(images[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], scale));
    }
  }
  for (const auto& b : lattice.basis()) {
    const QVector v = unscaled(b, scale);
    if (!lattice.contains(scaled_integral(space.apply_hecke(2, v), scale)) ||
        (m > 1 && !lattice.contains(scaled_integral(space.apply_diamond(h.coset_rep(1), v), scale)))) {
      throw std::logic_error("winding lattice: span up to the Sturm bound is not Hecke stable");
    }
  }
  out.rank = lattice.rank();
  if (out.rank < static_cast<std::size_t>(d)) {
    out.inapplicable = "Hecke module rank " + std::to_string(out.rank) + " < d";
    return out;
  }
  out.rows.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < d; ++j) {
      const ZVector c = lattice.coordinates(scaled_integral(images[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], scale));
      FlRow row(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) row[i] = reduce_mod(c[i], l);
      out.rows[static_cast<std::size_t>(k)].push_back(std::move(row));
    }
  }
  return out;
}

TestModule ManinCoordinateProvider::build(const SymbolSpace& space, int d, int l) const {
  TestModule out;
  if (space.cuspidal_dimension() == 0) {
    out.inapplicable = "genus 0";
    return out;
  }
  const QVector e = modsym::eisenstein_path(space).cuspidal;
  if (is_zero(e)) {
    out.inapplicable = "winding element vanishes";
    return out;
  }
  out.rank = space.dimension();
  for (const auto& cusp : hecke_images(space, e, d)) {
    auto& rows = out.rows.emplace_back();
    for (const auto& v : cusp) rows.push_back(normalize_row(v, l));
  }
  return out;
}

std::shared_ptr<const CriterionProvider> default_provider() {
  static const auto provider = std::make_shared<const WindingLatticeProvider>();
  return provider;
}

// ------------------------------------------------------------ checks

std::uint64_t pattern_count(int cusps, int d) {
  if (cusps < 1 || d < 1) return 0;
  // C(d + m - 2, d - 1), exact step by step.
  std::uint64_t c = 1;
  const int n = d + cusps - 2;
  const int k = std::min(d - 1, cusps - 1);
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

ImmersionVerdict formal_immersion_check(std::uint32_t p, int d, int l, const Subgroup& h,
                                        const ImmersionOptions& options) {
  validate(p, d, l);
  if (h.p() != static_cast<int>(p)) throw std::invalid_argument("immersion: subgroup belongs to a different level");
  ImmersionVerdict v;
  v.p = p;
  v.d = d;
  v.l = l;
  v.level_tag = h.tag();
  v.provider = options.provider->name();
  v.cusps = h.index();
  if (l == 2) v.assumptions.push_back("t(J(Q)) has odd order (assumed, not checked)");

  v.cuspidal_dimension = 2 * static_cast<std::size_t>(modsym::genus(h));
  if (v.cuspidal_dimension == 0) {
    v.reason = "genus 0";
    return v;
  }
  if (v.cuspidal_dimension > options.max_cuspidal_dimension) {
    v.reason = "cuspidal dimension " + std::to_string(v.cuspidal_dimension) + " exceeds cap " +
               std::to_string(options.max_cuspidal_dimension);
    return v;
  }
  const SymbolSpace space = SymbolSpace::build(static_cast<int>(p), h);
  if (space.cuspidal_dimension() != v.cuspidal_dimension) {
    throw std::logic_error("immersion: cuspidal dimension disagrees with the genus formula at p = " +
                           std::to_string(p));
  }
  const TestModule module = options.provider->build(space, d, l);
  v.module_rank = module.rank;
  if (module.inapplicable) {
    v.reason = *module.inapplicable;
    return v;
  }
  const bool record = pattern_count(v.cusps, d) <= options.max_recorded_patterns;
  SearchOutcome found = search_patterns(module, d, l, record);
  v.patterns_checked = found.checked;
  if (found.failure) {
    v.reason = "dependent rows";
    if (!record) found.recorded = {{*found.failure, false}};
  } else {
    v.verified = true;
  }
  v.patterns = std::move(found.recorded);
  return v;
}

ImmersionVerdict formal_immersion_check(std::uint32_t p, int d, int l) {
  return formal_immersion_check(p, d, l, Subgroup::full(static_cast<int>(p)));
}

LevelSearch search_levels(std::uint32_t p, int d, int l, const ImmersionOptions& options) {
  validate(p, d, l);
  LevelSearch out;
  if (p > 1000) {
    ImmersionVerdict v;
    v.p = p;
    v.d = d;
    v.l = l;
    v.level_tag = "X0";
    v.provider = options.provider->name();
    v.cusps = 1;
    v.reason = "beyond the X0 space cap (p <= 1000)";
    out.attempts.push_back(std::move(v));
    return out;
  }
  for (const auto& h : Subgroup::all(static_cast<int>(p))) {
    if (!h.is_full() && p > 250) break;
    out.attempts.push_back(formal_immersion_check(p, d, l, h, options));
    if (out.attempts.back().verified) break;
  }
  return out;
}

std::vector<LevelSearch> sweep_serial(const std::vector<std::uint32_t>& primes, int d, int l,
                                      const ImmersionOptions& options) {
  std::vector<LevelSearch> out;
  out.reserve(primes.size());
  for (auto p : primes) out.push_back(search_levels(p, d, l, options));
  return out;
}

std::vector<LevelSearch> sweep_parallel(const std::vector<std::uint32_t>& primes, int d, int l,
                                        const ImmersionOptions& options) {
  std::vector<LevelSearch> out(primes.size());
  std::exception_ptr error;
  const auto n = static_cast<std::int64_t>(primes.size());
  // Largest primes first would balance better, but dynamic scheduling with
  // chunk 1 is enough at these sizes.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = search_levels(primes[static_cast<std::size_t>(i)], d, l, options);
    } catch (...) {
#pragma omp critical(torsion8_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace torsion8::immersion
