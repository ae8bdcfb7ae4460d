#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "torsion8/qmatrix.hpp"

namespace torsion8::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

/// Bit-packed matrix over GF(2); each row is a run of 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * words_ + c / kWordBits] >> (c % kWordBits)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool v);
  void flip(std::size_t r, std::size_t c) { data_[r * words_ + c / kWordBits] ^= Word{1} << (c % kWordBits); }

  Word* row(std::size_t r) { return data_.data() + r * words_; }
  const Word* row(std::size_t r) const { return data_.data() + r * words_; }

  /// Appends a row given as bits; returns its index.
  std::size_t push_row(const std::vector<bool>& bits);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<Word> data_;
};

/// Rank by word-parallel Gaussian elimination (works on a copy).
std::size_t rank(BitMatrix m);

/// Reduces rows of rational numbers to GF(2). Each row is scaled by its
/// least common denominator and the odd part of its content is divided out;
/// 2-adic content is kept. Rows whose denominators are even are not
/// 2-integral and throw std::domain_error.
BitMatrix reduce_rows(const std::vector<QVector>& rows);

/// Rank over GF(2) of the reduction of the given rational rows.
std::size_t reduce_rank_gf2(const std::vector<QVector>& rows);

}  // namespace torsion8::gf2
