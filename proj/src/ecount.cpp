#include "torsion8/ecount.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "torsion8/arith.hpp"

namespace torsion8::ecount {

namespace {

// Tables shared by the census kernels: inverse squares and absolute traces
// (characteristic 2), quadratic character (odd characteristic).
struct Tables {
  const ff::Field& f;
  std::vector<Element> inv_sq;
  std::vector<std::uint8_t> tr;
  std::vector<std::int8_t> chi;

  explicit Tables(const ff::Field& field) : f(field) {
    const auto q = f.order();
    if (f.characteristic() == 2) {
      inv_sq.assign(q, 0);
      tr.assign(q, 0);
      for (Element x = 0; x < q; ++x) {
        if (x != 0) inv_sq[x] = f.square(f.inv(x));
        tr[x] = static_cast<std::uint8_t>(f.trace(x));
      }
    } else {
      chi.assign(q, 0);
      for (Element x = 1; x < q; ++x) chi[x] = f.is_square(x) ? 1 : -1;
    }
  }
};

Element rhs(const ff::Field& f, const CurveModel& c, Element x) {
  // ((x + a2) x + a4) x + a6
  Element v = f.add(x, c.a2);
  v = f.add(f.mul(v, x), c.a4);
  return f.add(f.mul(v, x), c.a6);
}

// Affine points over one x by the closed-form method.
int points_over_x(const Tables& t, const CurveModel& c, Element x) {
  const ff::Field& f = t.f;
  const Element b = f.add(f.mul(c.a1, x), c.a3);
  const Element r = rhs(f, c, x);
  if (f.characteristic() == 2) {
    if (b == 0) return 1;  // y^2 = r has the single root r^(q/2)
    return t.tr[f.mul(r, t.inv_sq[b])] == 0 ? 2 : 0;
  }
  // (2y + b)^2 = b^2 + 4 r
  const Element disc = f.add(f.square(b), f.mul(f.from_int(4), r));
  return 1 + t.chi[disc];
}

int points_over_x_scan(const ff::Field& f, const CurveModel& c, Element x) {
  const Element b = f.add(f.mul(c.a1, x), c.a3);
  const Element r = rhs(f, c, x);
  int n = 0;
  for (Element y = 0; y < f.order(); ++y) {
    if (f.add(f.square(y), f.mul(b, y)) == r) ++n;
  }
  return n;
}

std::int64_t count_with(const Tables& t, const CurveModel& c) {
  std::int64_t n = 1;
  for (Element x = 0; x < t.f.order(); ++x) n += points_over_x(t, c, x);
  return n;
}

// Number of (a1, ..., a6) tuples the full enumeration walks.
std::uint64_t full_tuple_count(std::uint32_t q) {
  std::uint64_t n = 1;
  for (int i = 0; i < 5; ++i) n *= q;
  return n;
}

CurveModel full_model(const FieldPtr& f, std::uint64_t t) {
  const std::uint64_t q = f->order();
  CurveModel c;
  c.field = f;
  c.family = Family::full;
  Element* coeffs[5] = {&c.a1, &c.a2, &c.a3, &c.a4, &c.a6};
  for (auto* slot : coeffs) {
    *slot = static_cast<Element>(t % q);
    t /= q;
  }
  return c;
}

// Family models are indexed by a chunk number (the outer loop the parallel
// census splits on) and an inner index; both enumerations below are the
// same sequence as enumerate_curves.
struct FamilyLayout {
  std::uint32_t q;
  bool char2;
  int l;
  // char 2: chunks [0, q) are the ordinary branch (chunk = a2),
  // chunks [q, q + (q-1) q) the supersingular one (chunk = (a3-1) q + a4).
  // odd: chunk = a (or a2 * q + a4 in characteristic 3), inner = b.
  std::uint64_t chunks() const {
    if (char2) return q + static_cast<std::uint64_t>(q - 1) * q;
    if (l == 3) return static_cast<std::uint64_t>(q) * q;
    return q;
  }
};

template <typename Visit>
void visit_family_chunk(const FieldPtr& f, const FamilyLayout& lay, std::uint64_t chunk, Visit&& visit) {
  const std::uint32_t q = lay.q;
  CurveModel c;
  c.field = f;
  if (lay.char2) {
    if (chunk < q) {
      c.family = Family::char2_ordinary;
      c.a1 = 1;
      c.a2 = static_cast<Element>(chunk);
      for (Element a6 = 1; a6 < q; ++a6) {
        c.a6 = a6;
        visit(c);
      }
    } else {
      const std::uint64_t s = chunk - q;
      c.family = Family::char2_supersingular;
      c.a3 = static_cast<Element>(s / q + 1);
      c.a4 = static_cast<Element>(s % q);
      for (Element a6 = 0; a6 < q; ++a6) {
        c.a6 = a6;
        visit(c);
      }
    }
    return;
  }
  c.family = Family::odd_short;
  if (lay.l == 3) {
    c.a2 = static_cast<Element>(chunk / q);
    c.a4 = static_cast<Element>(chunk % q);
  } else {
    c.a4 = static_cast<Element>(chunk);
  }
  for (Element b = 0; b < q; ++b) {
    c.a6 = b;
    if (is_smooth(c)) visit(c);
  }
}

void check_size(int l, int k, Mode mode) {
  auto f = ff::make_field(l, k);  // validates l and k
  if (mode == Mode::full && f->order() > kFullModeCap) {
    throw std::invalid_argument("full enumeration is limited to q <= " + std::to_string(kFullModeCap));
  }
}

TraceCensus finish(const FieldPtr& f, int k, Mode mode, const std::vector<char>& seen) {
  TraceCensus out;
  out.l = f->characteristic();
  out.k = k;
  out.mode = mode;
  out.modulus = f->modulus();
  const auto q = static_cast<std::int64_t>(f->order());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.traces.push_back(static_cast<int>(static_cast<std::int64_t>(i) - 2 * static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(q))) - 2));
  }
  return out;
}

// Index of trace a in the `seen` array: offset by a bound safely past 2 sqrt(q).
std::size_t slot(std::int64_t a, std::int64_t q) {
  return static_cast<std::size_t>(a + 2 * static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(q))) + 2);
}

std::size_t slots(std::int64_t q) { return 2 * slot(0, q) + 1; }

}  // namespace

Element discriminant(const CurveModel& c) {
  const ff::Field& f = *c.field;
  auto n = [&](std::int64_t v) { return f.from_int(v); };
  auto m = [&](Element a, Element b) { return f.mul(a, b); };
  auto a = [&](Element x, Element y) { return f.add(x, y); };
  auto s = [&](Element x, Element y) { return f.sub(x, y); };
  const Element b2 = a(m(c.a1, c.a1), m(n(4), c.a2));
  const Element b4 = a(m(n(2), c.a4), m(c.a1, c.a3));
  const Element b6 = a(m(c.a3, c.a3), m(n(4), c.a6));
  Element b8 = a(m(m(c.a1, c.a1), c.a6), m(n(4), m(c.a2, c.a6)));
  b8 = s(b8, m(m(c.a1, c.a3), c.a4));
  b8 = a(b8, m(c.a2, m(c.a3, c.a3)));
  b8 = s(b8, m(c.a4, c.a4));
  Element d = f.neg(m(m(b2, b2), b8));
  d = s(d, m(n(8), m(b4, m(b4, b4))));
  d = s(d, m(n(27), m(b6, b6)));
  d = a(d, m(n(9), m(b2, m(b4, b6))));
  return d;
}

std::int64_t point_count(const CurveModel& c, CountMethod method) {
  if (!c.field) throw std::invalid_argument("point_count: model has no field");
  if (!is_smooth(c)) throw std::invalid_argument("point_count: singular model");
  const ff::Field& f = *c.field;
  std::int64_t closed = -1;
  std::int64_t scanned = -1;
  if (method != CountMethod::yscan) {
    const Tables t(f);
    closed = count_with(t, c);
  }
  if (method != CountMethod::trace) {
    scanned = 1;
    for (Element x = 0; x < f.order(); ++x) scanned += points_over_x_scan(f, c, x);
  }
  if (method == CountMethod::both && closed != scanned) {
    throw std::logic_error("point_count: closed-form count " + std::to_string(closed) + " disagrees with y-scan " +
                           std::to_string(scanned));
  }
  return closed >= 0 ? closed : scanned;
}

void enumerate_curves(const FieldPtr& f, Mode mode, const std::function<void(const CurveModel&)>& visit) {
  if (mode == Mode::full) {
    if (f->order() > kFullModeCap) {
      throw std::invalid_argument("enumerate_curves: full mode is limited to q <= " + std::to_string(kFullModeCap));
    }
    const auto total = full_tuple_count(f->order());
    for (std::uint64_t t = 0; t < total; ++t) {
      const auto c = full_model(f, t);
      if (is_smooth(c)) visit(c);
    }
    return;
  }
  const FamilyLayout lay{f->order(), f->characteristic() == 2, f->characteristic()};
  for (std::uint64_t chunk = 0; chunk < lay.chunks(); ++chunk) visit_family_chunk(f, lay, chunk, visit);
}

std::vector<CurveModel> curves(const FieldPtr& f, Mode mode) {
  std::vector<CurveModel> out;
  enumerate_curves(f, mode, [&](const CurveModel& c) { out.push_back(c); });
  return out;
}

TraceCensus trace_census_serial(int l, int k, Mode mode) {
  check_size(l, k, mode);
  const auto f = ff::make_field(l, k);
  const auto q = static_cast<std::int64_t>(f->order());
  const Tables t(*f);
  std::vector<char> seen(slots(q), 0);
  enumerate_curves(f, mode, [&](const CurveModel& c) { seen[slot(q + 1 - count_with(t, c), q)] = 1; });
  return finish(f, k, mode, seen);
}

TraceCensus trace_census_parallel(int l, int k, Mode mode) {
  check_size(l, k, mode);
  const auto f = ff::make_field(l, k);
  const auto q = static_cast<std::int64_t>(f->order());
  const Tables t(*f);
  const FamilyLayout lay{f->order(), l == 2, l};
  const std::int64_t chunks = mode == Mode::full ? q * q : static_cast<std::int64_t>(lay.chunks());
  std::vector<char> seen(slots(q), 0);
#pragma omp parallel
  {
    std::vector<char> local(seen.size(), 0);
    auto record = [&](const CurveModel& c) { local[slot(q + 1 - count_with(t, c), q)] = 1; };
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
      if (mode == Mode::full) {
        // Chunk fixes (a1, a2); the inner loop runs over (a3, a4, a6).
        const auto inner = static_cast<std::uint64_t>(q * q * q);
        for (std::uint64_t u = 0; u < inner; ++u) {
          const auto c = full_model(f, static_cast<std::uint64_t>(chunk) + static_cast<std::uint64_t>(q * q) * u);
          if (is_smooth(c)) record(c);
        }
      } else {
        visit_family_chunk(f, lay, static_cast<std::uint64_t>(chunk), record);
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < seen.size(); ++i) seen[i] |= local[i];
  }
  return finish(f, k, mode, seen);
}

std::int64_t TraceCensus::q() const {
  std::int64_t v = 1;
  for (int i = 0; i < k; ++i) v *= l;
  return v;
}

std::vector<std::int64_t> TraceCensus::orders() const {
  std::vector<std::int64_t> out;
  out.reserve(traces.size());
  for (auto it = traces.rbegin(); it != traces.rend(); ++it) out.push_back(q() + 1 - *it);
  return out;
}

bool TraceCensus::realizes(int a) const { return std::binary_search(traces.begin(), traces.end(), a); }

std::string TraceCensus::method() const { return mode == Mode::full ? "brute-force-full" : "brute-force-family"; }

std::string to_string(Mode m) { return m == Mode::full ? "full" : "family"; }

Mode mode_from_string(const std::string& s) {
  if (s == "family") return Mode::family;
  if (s == "full") return Mode::full;
  throw std::invalid_argument("unknown census mode '" + s + "'");
}

std::optional<std::filesystem::path> default_cache_dir() {
  if (const char* env = std::getenv(kCacheEnv); env != nullptr && *env != '\0') return std::filesystem::path(env);
  return std::nullopt;
}

std::filesystem::path census_cache_file(const std::filesystem::path& dir, int l, int k, Mode mode) {
  return dir / ("census_l" + std::to_string(l) + "_k" + std::to_string(k) + "_" + to_string(mode) + ".json");
}

TraceCensus trace_census(int l, int k, Mode mode, const std::optional<std::filesystem::path>& cache_dir) {
  const auto dir = cache_dir ? cache_dir : default_cache_dir();
  if (!dir) return trace_census_parallel(l, k, mode);
  const auto path = census_cache_file(*dir, l, k, mode);
  const auto modulus = ff::make_field(l, k)->modulus();
  if (std::ifstream in(path); in) {
    try {
      const auto j = nlohmann::json::parse(in);
      if (j.at("schema_version").get<int>() == kCensusSchemaVersion && j.at("l").get<int>() == l &&
          j.at("k").get<int>() == k && j.at("mode").get<std::string>() == to_string(mode) &&
          j.at("modulus").get<std::vector<int>>() == modulus) {
        TraceCensus c;
        c.l = l;
        c.k = k;
        c.mode = mode;
        c.modulus = modulus;
        c.traces = j.at("traces").get<std::vector<int>>();
        if (std::is_sorted(c.traces.begin(), c.traces.end())) return c;
      }
    } catch (const nlohmann::json::exception&) {
      // unreadable cache: recompute below
    }
  }
  auto census = trace_census_parallel(l, k, mode);
  nlohmann::json j = {{"schema_version", kCensusSchemaVersion}, {"l", l},
                      {"k", k},
                      {"mode", to_string(mode)},
                      {"modulus", census.modulus},
                      {"traces", census.traces}};
  std::filesystem::create_directories(*dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
  return census;
}

std::int64_t extend_trace(std::int64_t a, std::int64_t q, int m) {
  if (m < 0) throw std::invalid_argument("extend_trace: m must be non-negative");
  if (a * a > 4 * q) throw std::invalid_argument("extend_trace: trace outside the Hasse interval");
  std::int64_t prev = 2;
  std::int64_t cur = a;
  if (m == 0) return prev;
  for (int i = 1; i < m; ++i) {
    const std::int64_t next = a * cur - q * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace torsion8::ecount
