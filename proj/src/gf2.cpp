#include "torsion8/gf2.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace torsion8::gf2 {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + kWordBits - 1) / kWordBits), data_(rows * words_, 0) {}

void BitMatrix::set(std::size_t r, std::size_t c, bool v) {
  Word& w = data_[r * words_ + c / kWordBits];
  const Word bit = Word{1} << (c % kWordBits);
  w = v ? (w | bit) : (w & ~bit);
}

std::size_t BitMatrix::push_row(const std::vector<bool>& bits) {
  if (bits.size() != cols_) throw std::invalid_argument("BitMatrix::push_row: width mismatch");
  data_.resize((rows_ + 1) * words_, 0);
  for (std::size_t c = 0; c < cols_; ++c) {
    if (bits[c]) set(rows_, c, true);
  }
  return rows_++;
}

std::size_t rank(BitMatrix m) {
  const std::size_t words = m.words_per_row();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    const std::size_t w = col / kWordBits;
    const Word bit = Word{1} << (col % kWordBits);
    std::size_t sel = rank;
    while (sel < m.rows() && !(m.row(sel)[w] & bit)) ++sel;
    if (sel == m.rows()) continue;
    if (sel != rank) {
      for (std::size_t k = 0; k < words; ++k) std::swap(m.row(sel)[k], m.row(rank)[k]);
    }
    const Word* pivot = m.row(rank);
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      Word* target = m.row(r);
      if (!(target[w] & bit)) continue;
      for (std::size_t k = w; k < words; ++k) target[k] ^= pivot[k];
    }
    ++rank;
  }
  return rank;
}

BitMatrix reduce_rows(const std::vector<QVector>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  BitMatrix out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const QVector& row = rows[r];
    if (row.size() != cols) throw std::invalid_argument("reduce_rows: ragged input");
    const Integer den = common_denominator(row);
    if (mpz_even_p(den.get_mpz_t())) {
      throw std::domain_error("reduce_rows: row " + std::to_string(r) +
                              " has even denominator " + den.get_str() + " and is not 2-integral");
    }
    std::vector<Integer> ints(cols);
    Integer content = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      ints[c] = row[c].get_num() * (den / row[c].get_den());
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), ints[c].get_mpz_t());
    }
    if (content == 0) continue;
    const auto twos = mpz_scan1(content.get_mpz_t(), 0);
    Integer odd;
    mpz_tdiv_q_2exp(odd.get_mpz_t(), content.get_mpz_t(), twos);
    for (std::size_t c = 0; c < cols; ++c) {
      ints[c] /= odd;
      if (mpz_odd_p(ints[c].get_mpz_t())) out.set(r, c, true);
    }
  }
  return out;
}

std::size_t reduce_rank_gf2(const std::vector<QVector>& rows) { return rank(reduce_rows(rows)); }

}  // namespace torsion8::gf2
