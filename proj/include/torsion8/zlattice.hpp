#pragma once

#include <cstddef>
#include <vector>

#include "torsion8/qmatrix.hpp"

namespace torsion8 {

using ZVector = std::vector<Integer>;

/// A sublattice of Z^n kept in row echelon form (positive pivots, rows
/// ordered by pivot column). Rows are combined by extended gcd, so the rows
/// always form a Z-basis of the span of everything inserted.
class IntegerLattice {
 public:
  explicit IntegerLattice(std::size_t ambient) : ambient_(ambient) {}

  std::size_t ambient_dimension() const { return ambient_; }
  std::size_t rank() const { return rows_.size(); }
  const std::vector<ZVector>& basis() const { return rows_; }

  /// Adds v to the generating set; returns true if the lattice grew.
  bool insert(ZVector v);
  bool contains(ZVector v) const;
  /// Integer coordinates of v in basis(); throws std::domain_error if v is
  /// not in the lattice.
  ZVector coordinates(ZVector v) const;

 private:
  void reduce_above_pivots(std::size_t row);

  std::size_t ambient_;
  std::vector<ZVector> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace torsion8
