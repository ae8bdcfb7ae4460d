#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

namespace torsion8 {

using Rational = mpq_class;
using Integer = mpz_class;
using QVector = std::vector<Rational>;

/// Sparse rational vector, entries sorted by index, no explicit zeros.
using SparseQVector = std::vector<std::pair<int, Rational>>;

/// Dense exact rational matrix, row-major. Matrices act on column vectors.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n);
  /// Matrix whose columns are the given vectors (all of equal length).
  static QMatrix from_columns(const std::vector<QVector>& columns, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  QVector column(std::size_t c) const;
  void set_column(std::size_t c, const QVector& v);

  QMatrix operator*(const QMatrix& other) const;
  QVector operator*(const QVector& v) const;
  QMatrix operator+(const QMatrix& other) const;
  QMatrix operator-(const QMatrix& other) const;
  QMatrix scaled(const Rational& s) const;
  bool operator==(const QMatrix& other) const;
  bool is_zero() const;

  Rational trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Rank over Q.
std::size_t rank(QMatrix m);

/// Basis of the right kernel {x : m x = 0}, as column vectors, one per free
/// column of the reduced echelon form (free columns in increasing order).
std::vector<QVector> kernel(const QMatrix& m);

/// Some solution x of a x = b; throws std::domain_error if inconsistent.
QVector solve(const QMatrix& a, const QVector& b);
/// Column-wise solve of a X = b with a single elimination.
QMatrix solve(const QMatrix& a, const QMatrix& b);

bool is_zero(const QVector& v);

/// Least common multiple of all denominators (1 for an integral vector).
Integer common_denominator(const QVector& v);

}  // namespace torsion8
