#include "torsion8/ff.hpp"

#include <stdexcept>
#include <string>

#include "torsion8/arith.hpp"

namespace torsion8::ff {

namespace {

using Poly = std::vector<int>;  // coefficients x^0 upward

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

// Remainder of f modulo the monic g, over F_l.
Poly poly_rem(Poly f, const Poly& g, int l) {
  const std::size_t dg = g.size() - 1;
  trim(f);
  while (f.size() > dg) {
    const int lead = f.back();
    const std::size_t shift = f.size() - 1 - dg;
    for (std::size_t i = 0; i <= dg; ++i) {
      f[shift + i] = static_cast<int>(mod(f[shift + i] - static_cast<std::int64_t>(lead) * g[i], l));
    }
    trim(f);
  }
  return f;
}

}  // namespace

bool is_irreducible(const Poly& poly, int l) {
  Poly f = poly;
  trim(f);
  if (f.size() < 2) return false;
  const int n = static_cast<int>(f.size()) - 1;
  if (n == 1) return true;
  // Make monic so trial division only needs monic divisors.
  const auto inv_lead = inv_mod(f.back(), l);
  for (auto& c : f) c = static_cast<int>(mod(c * inv_lead, l));
  for (int dg = 1; dg <= n / 2; ++dg) {
    std::uint64_t count = 1;
    for (int i = 0; i < dg; ++i) count *= static_cast<std::uint64_t>(l);
    for (std::uint64_t t = 0; t < count; ++t) {
      Poly g(static_cast<std::size_t>(dg) + 1);
      std::uint64_t u = t;
      for (int i = 0; i < dg; ++i) {
        g[static_cast<std::size_t>(i)] = static_cast<int>(u % static_cast<std::uint64_t>(l));
        u /= static_cast<std::uint64_t>(l);
      }
      g[static_cast<std::size_t>(dg)] = 1;
      if (poly_rem(f, g, l).empty()) return false;
    }
  }
  return true;
}

Field::Field(int l, int k) : l_(l), k_(k) {
  if (l < 2 || !is_prime(static_cast<std::uint64_t>(l))) {
    throw std::invalid_argument("make_field: characteristic " + std::to_string(l) + " is not prime");
  }
  if (k < 1) throw std::invalid_argument("make_field: degree must be positive");
  std::uint64_t q = 1;
  for (int i = 0; i < k; ++i) {
    q *= static_cast<std::uint64_t>(l);
    if (q > kMaxOrder) {
      throw std::invalid_argument("make_field: " + std::to_string(l) + "^" + std::to_string(k) + " exceeds 2^16");
    }
  }
  q_ = static_cast<std::uint32_t>(q);

  // Least monic irreducible, comparing c0 first: c0 is the most significant
  // digit of the search counter.
  modulus_.assign(static_cast<std::size_t>(k) + 1, 0);
  modulus_[static_cast<std::size_t>(k)] = 1;
  bool found = false;
  for (std::uint32_t t = 0; t < q_ && !found; ++t) {
    std::uint32_t u = t;
    for (int i = k - 1; i >= 0; --i) {
      modulus_[static_cast<std::size_t>(i)] = static_cast<int>(u % static_cast<std::uint32_t>(l));
      u /= static_cast<std::uint32_t>(l);
    }
    found = is_irreducible(modulus_, l);
  }
  if (!found) throw std::logic_error("make_field: no irreducible polynomial found");

  trace_.resize(q_);
  if (q_ == 2) {
    gen_ = 1;
  } else {
    const auto divisors = prime_divisors(q_ - 1);
    auto slow_pow = [&](Element a, std::uint64_t e) {
      Element r = 1;
      while (e) {
        if (e & 1) r = mul_reference(r, a);
        a = mul_reference(a, a);
        e >>= 1;
      }
      return r;
    };
    for (Element g = 2; g < q_; ++g) {
      bool ok = true;
      for (auto r : divisors) {
        if (slow_pow(g, (q_ - 1) / r) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        gen_ = g;
        break;
      }
    }
  }
  log_.assign(q_, 0);
  exp_.assign(2 * static_cast<std::size_t>(q_ - 1), 0);
  Element x = 1;
  for (std::uint32_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = x;
    exp_[i + q_ - 1] = x;
    log_[x] = i;
    x = mul_reference(x, gen_);
  }
  for (Element a = 0; a < q_; ++a) {
    Element s = 0;
    Element y = a;
    for (int i = 0; i < k_; ++i) {
      s = add(s, y);
      y = pow(y, static_cast<std::uint64_t>(l_));
    }
    trace_[a] = static_cast<std::uint8_t>(s);  // s lies in the prime field
  }
}

std::vector<int> Field::coefficients(Element x) const {
  std::vector<int> c(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    c[static_cast<std::size_t>(i)] = static_cast<int>(x % static_cast<Element>(l_));
    x /= static_cast<Element>(l_);
  }
  return c;
}

Element Field::from_coefficients(const std::vector<int>& c) const {
  if (c.size() > static_cast<std::size_t>(k_)) {
    throw std::invalid_argument("from_coefficients: too many coefficients");
  }
  Element x = 0;
  for (std::size_t i = c.size(); i-- > 0;) {
    x = x * static_cast<Element>(l_) + static_cast<Element>(mod(c[i], l_));
  }
  return x;
}

Element Field::from_int(std::int64_t n) const { return static_cast<Element>(mod(n, l_)); }

Element Field::add_digits(Element a, Element b, int sign) const {
  Element out = 0;
  Element place = 1;
  const auto l = static_cast<Element>(l_);
  for (int i = 0; i < k_; ++i) {
    const int da = static_cast<int>(a % l);
    const int db = static_cast<int>(b % l);
    out += place * static_cast<Element>(mod(da + sign * db, l_));
    a /= l;
    b /= l;
    place *= l;
  }
  return out;
}

Element Field::add(Element a, Element b) const {
  if (l_ == 2) return a ^ b;
  return add_digits(a, b, 1);
}

Element Field::sub(Element a, Element b) const {
  if (l_ == 2) return a ^ b;
  return add_digits(a, b, -1);
}

Element Field::neg(Element a) const { return sub(0, a); }

Element Field::mul(Element a, Element b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

Element Field::mul_reference(Element a, Element b) const {
  const auto ca = coefficients(a);
  const auto cb = coefficients(b);
  Poly prod(2 * static_cast<std::size_t>(k_), 0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      prod[static_cast<std::size_t>(i + j)] =
          (prod[static_cast<std::size_t>(i + j)] + ca[static_cast<std::size_t>(i)] * cb[static_cast<std::size_t>(j)]) % l_;
    }
  }
  return from_coefficients(poly_rem(prod, modulus_, l_));
}

Element Field::inv(Element a) const {
  if (a == 0) throw std::domain_error("Field::inv: zero has no inverse");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

Element Field::pow(Element a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[static_cast<std::size_t>((static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1))];
}

int Field::trace(Element a) const { return trace_[a]; }

bool Field::is_square(Element a) const {
  if (a == 0 || l_ == 2) return true;
  return log_[a] % 2 == 0;
}

FieldPtr make_field(int l, int k) { return std::make_shared<const Field>(l, k); }

std::vector<Element> enumerate_elements(const Field& f) {
  std::vector<Element> out(f.order());
  for (Element x = 0; x < f.order(); ++x) out[x] = x;
  return out;
}

}  // namespace torsion8::ff
