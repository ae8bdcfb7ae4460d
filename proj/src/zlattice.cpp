#include "torsion8/zlattice.hpp"

#include <stdexcept>
#include <utility>

namespace torsion8 {

namespace {

std::size_t leading(const ZVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) != 0) return i;
  }
  return v.size();
}

void sub_mul(ZVector& x, const Integer& f, const ZVector& y) {
  if (f == 0) return;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(y[i]) != 0) x[i] -= f * y[i];
  }
}

}  // namespace

bool IntegerLattice::insert(ZVector v) {
  if (v.size() != ambient_) throw std::invalid_argument("IntegerLattice::insert: length mismatch");
  std::size_t r = 0;
  for (;;) {
    const std::size_t col = leading(v);
    if (col == ambient_) return false;
    while (r < rows_.size() && pivots_[r] < col) ++r;
    if (r == rows_.size() || pivots_[r] != col) break;
    ZVector& row = rows_[r];
    if (mpz_divisible_p(v[col].get_mpz_t(), row[col].get_mpz_t())) {
      sub_mul(v, Integer(v[col] / row[col]), row);
      continue;
    }
    // Replace (row, v) by (s row + t v, (row_c/g) v - (v_c/g) row).
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), row[col].get_mpz_t(), v[col].get_mpz_t());
    const Integer rc = row[col] / g;
    const Integer vc = v[col] / g;
    ZVector new_row(ambient_), new_v(ambient_);
    for (std::size_t i = 0; i < ambient_; ++i) {
      new_row[i] = s * row[i] + t * v[i];
      new_v[i] = rc * v[i] - vc * row[i];
    }
    if (sgn(new_row[col]) < 0) {
      for (auto& x : new_row) x = -x;
    }
    row = std::move(new_row);
    v = std::move(new_v);
    reduce_above_pivots(r);
  }
  const std::size_t lead = leading(v);
  if (sgn(v[lead]) < 0) {
    for (auto& x : v) x = -x;
  }
  rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(r), std::move(v));
  pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(r), lead);
  reduce_above_pivots(r);
  return true;
}

// Keeps entries of `row` beyond its pivot small by reducing modulo the
// pivots of later rows; this bounds coefficient growth during insertion.
void IntegerLattice::reduce_above_pivots(std::size_t row) {
  ZVector& v = rows_[row];
  for (std::size_t r = row + 1; r < rows_.size(); ++r) {
    const std::size_t col = pivots_[r];
    if (sgn(v[col]) == 0) continue;
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), v[col].get_mpz_t(), rows_[r][col].get_mpz_t());
    sub_mul(v, q, rows_[r]);
  }
}

ZVector IntegerLattice::coordinates(ZVector v) const {
  if (v.size() != ambient_) throw std::invalid_argument("IntegerLattice::coordinates: length mismatch");
  ZVector coords(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::size_t col = pivots_[r];
    if (sgn(v[col]) == 0) continue;
    if (!mpz_divisible_p(v[col].get_mpz_t(), rows_[r][col].get_mpz_t())) {
      throw std::domain_error("IntegerLattice::coordinates: vector is not in the lattice");
    }
    coords[r] = v[col] / rows_[r][col];
    sub_mul(v, coords[r], rows_[r]);
  }
  if (leading(v) != ambient_) throw std::domain_error("IntegerLattice::coordinates: vector is not in the span");
  return coords;
}

bool IntegerLattice::contains(ZVector v) const {
  try {
    coordinates(std::move(v));
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

}  // namespace torsion8
