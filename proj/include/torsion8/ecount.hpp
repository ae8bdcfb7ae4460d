#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torsion8/ff.hpp"

namespace torsion8::ecount {

using ff::Element;
using ff::FieldPtr;

enum class Family { char2_ordinary, char2_supersingular, full, odd_short };

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over a small field.
struct CurveModel {
  FieldPtr field;
  Element a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  Family family = Family::full;
};

Element discriminant(const CurveModel& c);
inline bool is_smooth(const CurveModel& c) { return discriminant(c) != 0; }

/// In characteristic 2 the quadratic in y is solved either through the trace
/// of c / b^2 or by scanning every y. `both` runs the two and throws
/// std::logic_error if they disagree. Odd characteristic always uses the
/// quadratic character of the discriminant of the quadratic; `yscan` and
/// `both` add the scan there too.
enum class CountMethod { trace, yscan, both };

/// #C(F_q), point at infinity included. Throws std::invalid_argument for a
/// singular model.
std::int64_t point_count(const CurveModel& c, CountMethod method = CountMethod::trace);

enum class Mode { family, full };

/// family: in characteristic 2 the ordinary models y^2 + xy = x^3 + a2 x^2 + a6
/// (a6 != 0) followed by the supersingular ones y^2 + a3 y = x^3 + a4 x + a6
/// (a3 != 0); in odd characteristic y^2 = x^3 + a x + b (with an x^2 term in
/// characteristic 3). full: every smooth long Weierstrass model, q <= 32 only.
/// Models are visited in a fixed order. Throws std::invalid_argument when full
/// mode is asked for above the cap.
void enumerate_curves(const FieldPtr& f, Mode mode, const std::function<void(const CurveModel&)>& visit);
std::vector<CurveModel> curves(const FieldPtr& f, Mode mode);

inline constexpr std::uint32_t kFullModeCap = 32;

struct TraceCensus {
  int l = 0;
  int k = 0;
  Mode mode = Mode::family;
  std::vector<int> modulus;
  std::vector<int> traces;  // sorted, distinct

  std::int64_t q() const;
  /// q + 1 - a for every realized a, ascending.
  std::vector<std::int64_t> orders() const;
  bool realizes(int a) const;
  std::string method() const;  // "brute-force-family" or "brute-force-full"
};

/// Census computed in one thread; the reference implementation.
TraceCensus trace_census_serial(int l, int k, Mode mode);
/// Same census with the coefficient space split across OpenMP threads.
TraceCensus trace_census_parallel(int l, int k, Mode mode);

/// Cached census. The cache directory is `cache_dir` if given, else
/// $TORSION8_CACHE_DIR, else no caching. A cache file whose schema version or
/// modulus does not match is recomputed and overwritten.
TraceCensus trace_census(int l, int k, Mode mode, const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

inline constexpr int kCensusSchemaVersion = 1;
inline constexpr const char* kCacheEnv = "TORSION8_CACHE_DIR";

std::optional<std::filesystem::path> default_cache_dir();
std::filesystem::path census_cache_file(const std::filesystem::path& dir, int l, int k, Mode mode);

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// a_m for the Frobenius trace a over F_q: a_0 = 2, a_1 = a,
/// a_m = a a_{m-1} - q a_{m-2}.
std::int64_t extend_trace(std::int64_t a, std::int64_t q, int m);

}  // namespace torsion8::ecount
