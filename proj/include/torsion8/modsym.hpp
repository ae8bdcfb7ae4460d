#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "torsion8/qmatrix.hpp"

// Weight-2 modular symbols for Gamma_H(p), p prime, where H is a subgroup of
// G = (Z/pZ)^x / {+-1}. H = G gives Gamma_0(p); H trivial gives Gamma_1(p).
//
// Manin symbols [c, d] are indexed by pairs (c, d) mod p, not both zero,
// modulo scaling by +-H; the symbol [c, d] is g{0, oo} for any g in SL2(Z)
// with bottom row congruent to (c, d). Hecke operators use Merel's
// Heilbronn family. Everything is exact over Q.
namespace torsion8::modsym {

/// A subgroup H of the cyclic group G = (Z/pZ)^x / {+-1}, stored by its
/// index [G : H] (a divisor of |G|).
class Subgroup {
 public:
  static Subgroup full(int p);
  static Subgroup of_index(int p, int index);
  /// Subgroup generated by the given residues (taken mod +-1).
  static Subgroup generated_by(int p, const std::vector<int>& generators);
  /// The given residue set must already be closed (as a subset of G, with
  /// +-1 identified); anything else is rejected.
  static Subgroup from_elements(int p, const std::vector<int>& elements);

  int p() const { return p_; }
  int index() const { return index_; }
  int group_order() const { return group_order_; }  // |G|
  int order() const { return group_order_ / index_; }  // |H|
  bool is_full() const { return index_ == 1; }

  bool contains(std::int64_t a) const { return coset(a) == 0; }
  /// Coset of a (a unit mod p) in G / H, as an integer in [0, index).
  int coset(std::int64_t a) const;
  /// Canonical representative of coset k: g^k for the least primitive root g.
  int coset_rep(int k) const { return coset_reps_[static_cast<std::size_t>(k)]; }

  /// "X0" for the full group, otherwise "XH:<index>".
  std::string tag() const;

  /// Every subgroup of G, ordered by increasing index (X0 first).
  static std::vector<Subgroup> all(int p);

  bool operator==(const Subgroup& o) const { return p_ == o.p_ && index_ == o.index_; }

 private:
  Subgroup(int p, int index);
  int p_ = 0;
  int index_ = 1;
  int group_order_ = 1;
  std::vector<int> log_;         // discrete log base g, indexed by residue
  std::vector<int> coset_reps_;
};

struct P1Class {
  int c;
  int d;
  bool operator==(const P1Class&) const = default;
};

/// Canonical representatives of P^1(F_p): (0:1) first, then (1:0) .. (1:p-1).
std::vector<P1Class> p1_representatives(int p);

/// Bijection between Gamma_H(p) \ SL2(Z) cosets and [0, size()).
class SymbolIndex {
 public:
  explicit SymbolIndex(const Subgroup& h);

  std::size_t size() const { return size_; }
  /// Index of the class of (c, d); -1 when c = d = 0 mod p.
  int index(std::int64_t c, std::int64_t d) const;
  P1Class pair(int i) const;

 private:
  Subgroup h_;
  int p_;
  int m_;
  std::size_t size_;
  std::vector<int> inv_;
  std::vector<int> coset_;
};

struct Heilbronn {
  int a, b, c, d;
};

/// Merel's family {[a b; c d] : a > b >= 0, d > c >= 0, ad - bc = n}.
/// Cached; safe to call concurrently.
const std::vector<Heilbronn>& heilbronn_merel(int n);

/// Genus of X_H(p) from the index / elliptic point / cusp count formula.
/// Independent of the symbol machinery; used as the dimension oracle.
int genus(const Subgroup& h);

class SymbolSpace {
 public:
  /// Builds the presentation. Rejects even p (other than the P^1 helper
  /// above, level 2 has no use here) and p > 1000 for X0, p > 250 for a
  /// proper subgroup.
  static SymbolSpace build(int p, const Subgroup& h);

  int level() const { return p_; }
  const Subgroup& subgroup() const { return h_; }
  const SymbolIndex& symbols() const { return index_; }

  std::size_t dimension() const { return basis_gens_.size(); }
  std::size_t num_generators() const { return rep_symbol_.size(); }
  std::size_t num_relations() const { return num_relations_; }
  std::size_t num_cusps() const { return 2 * static_cast<std::size_t>(h_.index()); }

  /// Cusp numbering: [0, m) are oo-type cusps a/c with p | c, indexed by the
  /// coset of a; [m, 2m) are 0-type cusps indexed by the coset of c.
  int cusp_of(std::int64_t numerator, std::int64_t denominator) const;

  /// Boundary map to the formal cusp space: {a, b} -> [a] - [b], so the
  /// path {0, oo} maps to (cusp 0) - (cusp oo).
  const QMatrix& boundary() const { return boundary_; }
  QVector boundary_of(const QVector& v) const { return boundary_ * v; }

  /// Basis (as coordinate vectors) of the cuspidal subspace ker(boundary).
  const std::vector<QVector>& cuspidal_basis() const { return cuspidal_basis_; }
  std::size_t cuspidal_dimension() const { return cuspidal_basis_.size(); }

  /// Coordinates of the Manin symbol [c, d].
  QVector symbol_vector(std::int64_t c, std::int64_t d) const;
  /// Representative Manin symbol of basis element j.
  P1Class basis_symbol(std::size_t j) const;

  QVector apply_hecke(int n, const QVector& v) const;
  QMatrix hecke_matrix(int n) const;
  /// Diamond operator <a>: [c, d] -> [a c, a d].
  QVector apply_diamond(std::int64_t a, const QVector& v) const;
  QMatrix diamond_matrix(std::int64_t a) const;
  /// Involution induced by z -> -conj(z): [c, d] -> [-c, d].
  QMatrix star_matrix() const;

  /// Checks that the presentation respects every 2- and 3-term relation
  /// (each relation maps to zero). Used by tests.
  bool relations_hold() const;

 private:
  SymbolSpace(int p, const Subgroup& h);
  void add_symbol(std::vector<Rational>& gen_acc, std::vector<int>& touched, int symbol, const Rational& coef) const;
  QVector gen_to_vector(const std::vector<Rational>& gen_acc, const std::vector<int>& touched) const;

  int p_;
  Subgroup h_;
  SymbolIndex index_;
  std::vector<int> symbol_gen_;            // +-(g+1) or 0
  std::vector<int> rep_symbol_;            // generator -> symbol
  std::vector<SparseQVector> gen_basis_;   // generator -> basis coordinates
  std::vector<int> basis_gens_;            // basis index -> generator
  std::size_t num_relations_ = 0;
  QMatrix boundary_;
  std::vector<QVector> cuspidal_basis_;
};

class HeckeMatrix {
 public:
  HeckeMatrix(int n, QMatrix matrix) : n_(n), matrix_(std::move(matrix)) {}
  int index() const { return n_; }
  const QMatrix& matrix() const { return matrix_; }

 private:
  int n_;
  QMatrix matrix_;
};

HeckeMatrix hecke_operator(const SymbolSpace& space, int n);

/// Restriction of an operator to an invariant subspace given by a basis:
/// returns R with op * basis[j] = sum_i R(i, j) basis[i]. Throws if the
/// subspace is not invariant.
QMatrix restrict_to(const QMatrix& op, const std::vector<QVector>& basis);

struct EisensteinPath {
  QVector path;       // coordinates of {0, oo}
  QVector cuspidal;   // its projection to the cuspidal subspace
  QVector boundary;   // boundary of the path
};

/// The path {0, oo} and its Hecke-equivariant projection onto the cuspidal
/// subspace (along the Eisenstein subspace).
EisensteinPath eisenstein_path(const SymbolSpace& space);

/// Trace of T_n on the +1 part of the cuspidal subspace for the star
/// involution (dimension = genus).
Rational cuspidal_plus_trace(const SymbolSpace& space, int n);

}  // namespace torsion8::modsym
