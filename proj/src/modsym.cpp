#include "torsion8/modsym.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "torsion8/arith.hpp"

namespace torsion8::modsym {

// ---------------------------------------------------------------- Subgroup

Subgroup::Subgroup(int p, int index) : p_(p), index_(index) {
  if (!is_prime(static_cast<std::uint64_t>(p))) {
    throw std::invalid_argument("Subgroup: level " + std::to_string(p) + " is not prime");
  }
  group_order_ = std::max(1, (p - 1) / 2);
  if (index < 1 || group_order_ % index != 0) {
    throw std::invalid_argument("Subgroup: index " + std::to_string(index) + " does not divide |G| = " +
                                std::to_string(group_order_));
  }
  log_.assign(static_cast<std::size_t>(p), 0);
  const auto g = static_cast<std::int64_t>(primitive_root(static_cast<std::uint64_t>(p)));
  std::int64_t x = 1;
  for (int k = 0; k < std::max(1, p - 1); ++k) {
    log_[static_cast<std::size_t>(x)] = k;
    x = x * g % p;
  }
  x = 1;
  for (int k = 0; k < index; ++k) {
    coset_reps_.push_back(static_cast<int>(x));
    x = x * g % p;
  }
}

Subgroup Subgroup::full(int p) { return Subgroup(p, 1); }

Subgroup Subgroup::of_index(int p, int index) { return Subgroup(p, index); }

Subgroup Subgroup::generated_by(int p, const std::vector<int>& generators) {
  Subgroup full_group(p, 1);
  std::int64_t m = full_group.group_order_;
  for (int a : generators) {
    if (mod(a, p) == 0) throw std::invalid_argument("Subgroup: generator is not a unit mod p");
    m = gcd(m, full_group.log_[static_cast<std::size_t>(mod(a, p))]);
  }
  return Subgroup(p, static_cast<int>(m));
}

Subgroup Subgroup::from_elements(int p, const std::vector<int>& elements) {
  Subgroup h = generated_by(p, elements);
  std::vector<bool> seen(static_cast<std::size_t>(h.group_order_), false);
  int distinct = 0;
  for (int a : elements) {
    const int l = h.log_[static_cast<std::size_t>(mod(a, p))] % h.group_order_;
    if (!seen[static_cast<std::size_t>(l)]) {
      seen[static_cast<std::size_t>(l)] = true;
      ++distinct;
    }
  }
  if (distinct != h.order()) {
    throw std::invalid_argument("Subgroup: element set is not closed under multiplication mod p");
  }
  return h;
}

int Subgroup::coset(std::int64_t a) const {
  const auto r = mod(a, p_);
  if (r == 0) throw std::domain_error("Subgroup::coset: 0 is not a unit");
  return log_[static_cast<std::size_t>(r)] % index_;
}

std::string Subgroup::tag() const { return is_full() ? "X0" : "XH:" + std::to_string(index_); }

std::vector<Subgroup> Subgroup::all(int p) {
  std::vector<Subgroup> out;
  const int order = std::max(1, (p - 1) / 2);
  for (int m = 1; m <= order; ++m) {
    if (order % m == 0) out.push_back(Subgroup(p, m));
  }
  return out;
}

// ---------------------------------------------------------------- indexing

std::vector<P1Class> p1_representatives(int p) {
  std::vector<P1Class> out;
  out.reserve(static_cast<std::size_t>(p) + 1);
  out.push_back({0, 1});
  for (int d = 0; d < p; ++d) out.push_back({1, d});
  return out;
}

SymbolIndex::SymbolIndex(const Subgroup& h)
    : h_(h), p_(h.p()), m_(h.index()), size_(static_cast<std::size_t>(h.index()) * (h.p() + 1)) {
  inv_.assign(static_cast<std::size_t>(p_), 0);
  coset_.assign(static_cast<std::size_t>(p_), 0);
  for (int a = 1; a < p_; ++a) {
    inv_[static_cast<std::size_t>(a)] = static_cast<int>(inv_mod(a, p_));
    coset_[static_cast<std::size_t>(a)] = h.coset(a);
  }
}

int SymbolIndex::index(std::int64_t c, std::int64_t d) const {
  const auto cc = mod(c, p_);
  const auto dd = mod(d, p_);
  if (cc == 0) {
    if (dd == 0) return -1;
    return coset_[static_cast<std::size_t>(dd)];
  }
  const int k = coset_[static_cast<std::size_t>(cc)];
  const std::int64_t scale = cc * inv_[static_cast<std::size_t>(h_.coset_rep(k))] % p_;
  const std::int64_t t = dd * inv_[static_cast<std::size_t>(scale)] % p_;
  return m_ + k * p_ + static_cast<int>(t);
}

P1Class SymbolIndex::pair(int i) const {
  if (i < m_) return {0, h_.coset_rep(i)};
  const int j = i - m_;
  return {h_.coset_rep(j / p_), j % p_};
}

// ---------------------------------------------------------------- Heilbronn

const std::vector<Heilbronn>& heilbronn_merel(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<Heilbronn>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;
  if (n < 1) throw std::invalid_argument("heilbronn_merel: n must be positive");
  auto out = std::make_unique<std::vector<Heilbronn>>();
  // a > b >= 0 and d > c >= 0 force a + d <= n + 1.
  for (int a = 1; a <= n; ++a) {
    for (int d = 1; a + d <= n + 1; ++d) {
      const long long k = static_cast<long long>(a) * d - n;
      if (k < 0) continue;
      if (k == 0) {
        for (int c = 0; c < d; ++c) out->push_back({a, 0, c, d});
        for (int b = 1; b < a; ++b) out->push_back({a, b, 0, d});
        continue;
      }
      for (int b = 1; b < a; ++b) {
        if (k % b != 0) continue;
        const long long c = k / b;
        if (c < d) out->push_back({a, b, static_cast<int>(c), d});
      }
    }
  }
  slot = std::move(out);
  return *slot;
}

// ---------------------------------------------------------------- genus

int genus(const Subgroup& h) {
  const int p = h.p();
  const int m = h.index();
  const long long mu = static_cast<long long>(p + 1) * m;
  long long nu2 = 0, nu3 = 0;
  // An elliptic point of Gamma_0(p) survives in Gamma_H exactly when the
  // lower-right entry of its stabiliser (a root of x^2+1, resp. x^2-x+1)
  // lies in +-H; it then splits into m elliptic points.
  for (int x = 0; x < p; ++x) {
    const long long xx = static_cast<long long>(x) * x;
    if ((xx + 1) % p == 0) {
      if (p == 2 || h.contains(x)) nu2 += m;
    }
    if ((xx - x + 1) % p == 0) {
      if (p == 3 || h.contains(x)) nu3 += m;
    }
  }
  const long long cusps = 2LL * m;
  const long long twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
  if (twelve_g % 12 != 0) throw std::logic_error("genus: formula produced a non-integer");
  return static_cast<int>(twelve_g / 12);
}

// ---------------------------------------------------------------- space

namespace {

void axpy(SparseQVector& x, const Rational& s, const SparseQVector& y) {
  SparseQVector out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.push_back(std::move(x[i++]));
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.emplace_back(y[j].first, s * y[j].second);
      ++j;
    } else {
      Rational v = x[i].second + s * y[j].second;
      if (sgn(v) != 0) out.emplace_back(x[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  x = std::move(out);
}

}  // namespace

SymbolSpace::SymbolSpace(int p, const Subgroup& h) : p_(p), h_(h), index_(h) {}

SymbolSpace SymbolSpace::build(int p, const Subgroup& h) {
  if (p < 3 || !is_prime(static_cast<std::uint64_t>(p))) {
    throw std::invalid_argument("build_space: level must be an odd prime, got " + std::to_string(p));
  }
  if (h.p() != p) throw std::invalid_argument("build_space: subgroup belongs to a different level");
  if (h.is_full() ? p > 1000 : p > 250) {
    throw std::invalid_argument("build_space: level " + std::to_string(p) + " exceeds the supported cap for " +
                                h.tag());
  }
  SymbolSpace s(p, h);
  const auto& idx = s.index_;
  const auto n = static_cast<int>(idx.size());

  // 2-term relations x + x sigma = 0, sigma: (c, d) -> (d, -c).
  s.symbol_gen_.assign(static_cast<std::size_t>(n), 0);
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (assigned[static_cast<std::size_t>(i)]) continue;
    const auto [c, d] = idx.pair(i);
    const int j = idx.index(d, -c);
    assigned[static_cast<std::size_t>(i)] = assigned[static_cast<std::size_t>(j)] = true;
    if (j == i) continue;  // x = -x, so x = 0
    const int g = static_cast<int>(s.rep_symbol_.size());
    s.rep_symbol_.push_back(i);
    s.symbol_gen_[static_cast<std::size_t>(i)] = g + 1;
    s.symbol_gen_[static_cast<std::size_t>(j)] = -(g + 1);
  }
  const std::size_t num_gens = s.rep_symbol_.size();

  // 3-term relations x + x tau + x tau^2 = 0, tau: (c, d) -> (d, -c - d),
  // eliminated with the highest generator as pivot so that the earliest
  // generators survive as the basis.
  std::vector<SparseQVector> pivot_row(num_gens);
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (visited[static_cast<std::size_t>(i)]) continue;
    int orbit[3];
    orbit[0] = i;
    for (int k = 1; k < 3; ++k) {
      const auto [c, d] = idx.pair(orbit[k - 1]);
      orbit[k] = idx.index(d, -c - d);
    }
    std::map<int, long> coeffs;
    for (int sym : orbit) {
      visited[static_cast<std::size_t>(sym)] = true;
      const int sg = s.symbol_gen_[static_cast<std::size_t>(sym)];
      if (sg != 0) coeffs[std::abs(sg) - 1] += sg > 0 ? 1 : -1;
    }
    SparseQVector row;
    for (auto [g, v] : coeffs) {
      if (v != 0) row.emplace_back(g, Rational(v));
    }
    if (row.empty()) continue;
    ++s.num_relations_;
    while (!row.empty()) {
      const int col = row.back().first;
      auto& piv = pivot_row[static_cast<std::size_t>(col)];
      if (piv.empty()) {
        const Rational inv = 1 / row.back().second;
        for (auto& e : row) e.second *= inv;
        piv = std::move(row);
        break;
      }
      const Rational f = -row.back().second;
      axpy(row, f, piv);
    }
  }

  // Express pivot generators in terms of free ones (ascending back-substitution).
  std::vector<int> basis_of_gen(num_gens, -1);
  for (std::size_t g = 0; g < num_gens; ++g) {
    if (pivot_row[g].empty()) {
      basis_of_gen[g] = static_cast<int>(s.basis_gens_.size());
      s.basis_gens_.push_back(static_cast<int>(g));
    }
  }
  std::vector<SparseQVector> value(num_gens);  // generator -> free generators
  for (std::size_t g = 0; g < num_gens; ++g) {
    if (pivot_row[g].empty()) {
      value[g] = {{static_cast<int>(g), Rational(1)}};
      continue;
    }
    SparseQVector v;
    for (const auto& [col, coef] : pivot_row[g]) {
      if (static_cast<std::size_t>(col) == g) continue;
      axpy(v, -coef, value[static_cast<std::size_t>(col)]);
    }
    value[g] = std::move(v);
  }
  s.gen_basis_.resize(num_gens);
  for (std::size_t g = 0; g < num_gens; ++g) {
    SparseQVector v;
    for (auto& [col, coef] : value[g]) v.emplace_back(basis_of_gen[static_cast<std::size_t>(col)], coef);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    s.gen_basis_[g] = std::move(v);
  }

  // Boundary: [c, d] = g{0, oo} -> [g 0] - [g oo].
  const std::size_t dim = s.basis_gens_.size();
  s.boundary_ = QMatrix(s.num_cusps(), dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto [c, d] = s.basis_symbol(j);
    const std::int64_t a = mod(c, p) == 0 ? inv_mod(d, p) : 1;  // g oo = a / c
    const std::int64_t b = mod(d, p) == 0 ? mod(-inv_mod(c, p), p) : 0;  // g 0 = b / d
    s.boundary_(static_cast<std::size_t>(s.cusp_of(b, d)), j) += 1;
    s.boundary_(static_cast<std::size_t>(s.cusp_of(a, c)), j) -= 1;
  }
  s.cuspidal_basis_ = kernel(s.boundary_);
  return s;
}

int SymbolSpace::cusp_of(std::int64_t numerator, std::int64_t denominator) const {
  if (mod(denominator, p_) == 0) return h_.coset(numerator);
  return h_.index() + h_.coset(denominator);
}

P1Class SymbolSpace::basis_symbol(std::size_t j) const {
  return index_.pair(rep_symbol_[static_cast<std::size_t>(basis_gens_[j])]);
}

void SymbolSpace::add_symbol(std::vector<Rational>& gen_acc, std::vector<int>& touched, int symbol,
                             const Rational& coef) const {
  const int sg = symbol_gen_[static_cast<std::size_t>(symbol)];
  if (sg == 0) return;
  const auto g = static_cast<std::size_t>(std::abs(sg) - 1);
  if (sgn(gen_acc[g]) == 0) touched.push_back(static_cast<int>(g));
  if (sg > 0) {
    gen_acc[g] += coef;
  } else {
    gen_acc[g] -= coef;
  }
}

QVector SymbolSpace::gen_to_vector(const std::vector<Rational>& gen_acc, const std::vector<int>& touched) const {
  QVector out(dimension());
  std::vector<int> gens = touched;
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  for (int g : gens) {
    const Rational& coef = gen_acc[static_cast<std::size_t>(g)];
    if (sgn(coef) == 0) continue;
    for (const auto& [j, v] : gen_basis_[static_cast<std::size_t>(g)]) out[static_cast<std::size_t>(j)] += coef * v;
  }
  return out;
}

QVector SymbolSpace::symbol_vector(std::int64_t c, std::int64_t d) const {
  const int i = index_.index(c, d);
  if (i < 0) throw std::invalid_argument("symbol_vector: (0, 0) is not a Manin symbol");
  std::vector<Rational> acc(num_generators());
  std::vector<int> touched;
  add_symbol(acc, touched, i, Rational(1));
  return gen_to_vector(acc, touched);
}

QVector SymbolSpace::apply_hecke(int n, const QVector& v) const {
  if (v.size() != dimension()) throw std::invalid_argument("apply_hecke: vector length mismatch");
  const auto& family = heilbronn_merel(n);
  std::vector<Rational> acc(num_generators());
  std::vector<int> touched;
  std::vector<long> counts(num_generators(), 0);
  std::vector<int> count_touched;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (sgn(v[j]) == 0) continue;
    const auto [c, d] = basis_symbol(j);
    for (const auto& h : family) {
      const std::int64_t u = static_cast<std::int64_t>(c) * h.a + static_cast<std::int64_t>(d) * h.c;
      const std::int64_t w = static_cast<std::int64_t>(c) * h.b + static_cast<std::int64_t>(d) * h.d;
      const int sym = index_.index(u, w);
      if (sym < 0) continue;
      const int sg = symbol_gen_[static_cast<std::size_t>(sym)];
      if (sg == 0) continue;
      const auto g = static_cast<std::size_t>(std::abs(sg) - 1);
      if (counts[g] == 0) count_touched.push_back(static_cast<int>(g));
      counts[g] += sg > 0 ? 1 : -1;
    }
    for (int g : count_touched) {
      auto& cnt = counts[static_cast<std::size_t>(g)];
      if (cnt != 0) {
        // add_symbol works on symbols; go through the generator directly.
        if (sgn(acc[static_cast<std::size_t>(g)]) == 0) touched.push_back(g);
        acc[static_cast<std::size_t>(g)] += v[j] * cnt;
      }
      cnt = 0;
    }
    count_touched.clear();
  }
  return gen_to_vector(acc, touched);
}

QMatrix SymbolSpace::hecke_matrix(int n) const {
  const std::size_t dim = dimension();
  QMatrix m(dim, dim);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < dim; ++j) {
    QVector e(dim);
    e[j] = 1;
    m.set_column(j, apply_hecke(n, e));
  }
  return m;
}

QVector SymbolSpace::apply_diamond(std::int64_t a, const QVector& v) const {
  if (mod(a, p_) == 0) throw std::invalid_argument("apply_diamond: a must be a unit mod p");
  std::vector<Rational> acc(num_generators());
  std::vector<int> touched;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (sgn(v[j]) == 0) continue;
    const auto [c, d] = basis_symbol(j);
    add_symbol(acc, touched, index_.index(a * c, a * d), v[j]);
  }
  return gen_to_vector(acc, touched);
}

QMatrix SymbolSpace::diamond_matrix(std::int64_t a) const {
  const std::size_t dim = dimension();
  QMatrix m(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    QVector e(dim);
    e[j] = 1;
    m.set_column(j, apply_diamond(a, e));
  }
  return m;
}

QMatrix SymbolSpace::star_matrix() const {
  const std::size_t dim = dimension();
  QMatrix m(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto [c, d] = basis_symbol(j);
    m.set_column(j, symbol_vector(-c, d));
  }
  return m;
}

bool SymbolSpace::relations_hold() const {
  for (int i = 0; i < static_cast<int>(index_.size()); ++i) {
    const auto [c, d] = index_.pair(i);
    QVector two = symbol_vector(c, d);
    const QVector sig = symbol_vector(d, -c);
    for (std::size_t k = 0; k < two.size(); ++k) two[k] += sig[k];
    if (!is_zero(two)) return false;
    QVector three = symbol_vector(c, d);
    const QVector t1 = symbol_vector(d, -c - d);
    const QVector t2 = symbol_vector(-c - d, c);
    for (std::size_t k = 0; k < three.size(); ++k) three[k] += t1[k] + t2[k];
    if (!is_zero(three)) return false;
  }
  return true;
}

HeckeMatrix hecke_operator(const SymbolSpace& space, int n) {
  if (n < 1) throw std::invalid_argument("hecke_operator: n must be positive");
  return HeckeMatrix(n, space.hecke_matrix(n));
}

QMatrix restrict_to(const QMatrix& op, const std::vector<QVector>& basis) {
  if (basis.empty()) return QMatrix(0, 0);
  const QMatrix k = QMatrix::from_columns(basis, op.rows());
  try {
    return solve(k, op * k);
  } catch (const std::domain_error&) {
    throw std::domain_error("restrict_to: subspace is not invariant under the operator");
  }
}

EisensteinPath eisenstein_path(const SymbolSpace& space) {
  EisensteinPath out;
  out.path = space.symbol_vector(0, 1);
  out.boundary = space.boundary_of(out.path);
  const auto& cusp_basis = space.cuspidal_basis();
  if (cusp_basis.empty()) {
    out.cuspidal = QVector(space.dimension());
    return out;
  }
  // A = prod (T_q - eps) over the Eisenstein eigenvalues eps of T_q kills the
  // Eisenstein part and, for q >= 7, is invertible on cusp forms.
  int q = 7;
  while (q == space.level() || !is_prime(static_cast<std::uint64_t>(q))) ++q;
  const int m = space.subgroup().index();
  const std::int64_t qinv = inv_mod(q, space.level());
  auto annihilate = [&](QVector v) {
    auto factor = [&](const QVector& x, std::int64_t diamond, const Rational& scalar_coef, const Rational& diamond_coef) {
      QVector y = space.apply_hecke(q, x);
      const QVector dx = m == 1 ? x : space.apply_diamond(diamond, x);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] -= scalar_coef * x[i] + diamond_coef * dx[i];
      return y;
    };
    if (m == 1) return factor(v, 1, Rational(q + 1), Rational(0));
    for (std::int64_t dia : {static_cast<std::int64_t>(q), qinv}) {
      v = factor(v, dia, Rational(1), Rational(q));
      v = factor(v, dia, Rational(q), Rational(1));
    }
    return v;
  };
  std::vector<QVector> images;
  images.reserve(cusp_basis.size());
  for (const auto& b : cusp_basis) images.push_back(annihilate(b));
  const QMatrix ak = QMatrix::from_columns(images, space.dimension());
  if (rank(ak) != cusp_basis.size()) {
    throw std::logic_error("eisenstein_path: Eisenstein annihilator is singular on cusp forms");
  }
  const QVector z = solve(ak, annihilate(out.path));
  out.cuspidal = QVector(space.dimension());
  for (std::size_t k = 0; k < cusp_basis.size(); ++k) {
    if (sgn(z[k]) == 0) continue;
    for (std::size_t i = 0; i < out.cuspidal.size(); ++i) out.cuspidal[i] += z[k] * cusp_basis[k][i];
  }
  return out;
}

Rational cuspidal_plus_trace(const SymbolSpace& space, int n) {
  const auto& k = space.cuspidal_basis();
  if (k.empty()) return 0;
  const QMatrix t = restrict_to(space.hecke_matrix(n), k);
  const QMatrix star = restrict_to(space.star_matrix(), k);
  return (t + t * star).trace() / 2;
}

}  // namespace torsion8::modsym
