#pragma once

#include <cstdint>
#include <memory>
#include <vector>

// Arithmetic in F_q, q = l^k <= 2^16, in the polynomial basis over F_l.
//
// An element is stored as its code c0 + c1*l + ... + c_{k-1}*l^{k-1}, where
// c_i are the coefficients of 1, x, ..., x^{k-1} modulo the field modulus.
// Codes run through [0, q); 0 and 1 are the field's zero and one.
namespace torsion8::ff {

using Element = std::uint32_t;

inline constexpr std::uint32_t kMaxOrder = 1U << 16;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
 public:
  /// Prefer make_field(); the constructor is public for make_shared only.
  Field(int l, int k);

  int characteristic() const { return l_; }
  int degree() const { return k_; }
  std::uint32_t order() const { return q_; }
  /// Monic modulus, coefficients of x^0 .. x^k.
  const std::vector<int>& modulus() const { return modulus_; }

  std::vector<int> coefficients(Element x) const;
  Element from_coefficients(const std::vector<int>& c) const;
  /// Image of the integer n under Z -> F_l -> F_q.
  Element from_int(std::int64_t n) const;

  Element add(Element a, Element b) const;
  Element sub(Element a, Element b) const;
  Element neg(Element a) const;
  Element mul(Element a, Element b) const;
  /// Schoolbook multiply-and-reduce, independent of the log tables.
  Element mul_reference(Element a, Element b) const;
  Element inv(Element a) const;  // throws std::domain_error for 0
  Element pow(Element a, std::uint64_t e) const;
  Element frobenius(Element a) const { return pow(a, static_cast<std::uint64_t>(l_)); }
  Element square(Element a) const { return mul(a, a); }

  /// Absolute trace F_q -> F_l, as an integer in [0, l).
  int trace(Element a) const;
  /// Whether a is a square in F_q (0 counts as a square).
  bool is_square(Element a) const;

  /// A fixed generator of the multiplicative group (the least code that
  /// generates).
  Element generator() const { return gen_; }

 private:
  Element add_digits(Element a, Element b, int sign) const;

  int l_;
  int k_;
  std::uint32_t q_;
  std::vector<int> modulus_;
  Element gen_ = 1;
  std::vector<std::uint32_t> log_;  // log_[0] unused
  std::vector<Element> exp_;        // length 2(q-1), avoids a mod in mul
  std::vector<std::uint8_t> trace_;
};

/// F_{l^k} with the lexicographically least monic irreducible modulus,
/// coefficients compared from x^0 upward. Throws std::invalid_argument for a
/// non-prime l, k < 1 or l^k > 2^16.
FieldPtr make_field(int l, int k);

/// All q elements in code order; starts 0, 1.
std::vector<Element> enumerate_elements(const Field& f);

/// Exhaustive irreducibility test by trial division (coefficients x^0..x^n).
bool is_irreducible(const std::vector<int>& poly, int l);

}  // namespace torsion8::ff
