#include "torsion8/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "torsion8/arith.hpp"
#include "torsion8/checkpoint.hpp"
#include "torsion8/ecount.hpp"
#include "torsion8/evidence.hpp"
#include "torsion8/immersion.hpp"
#include "torsion8/pipeline.hpp"

namespace torsion8::cli {

namespace {

using nlohmann::json;

constexpr const char* kFixedTime = "1970-01-01T00:00:00Z";

struct BadFlags : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

std::shared_ptr<const immersion::CriterionProvider> provider_named(const std::string& name) {
  if (name == "winding-lattice") return immersion::default_provider();
  if (name == "manin-coordinates") return std::make_shared<const immersion::ManinCoordinateProvider>();
  throw BadFlags("unknown provider '" + name + "'");
}

std::pair<int, int> parse_shard(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw BadFlags("--shard expects I/N");
  try {
    const int i = std::stoi(s.substr(0, slash));
    const int n = std::stoi(s.substr(slash + 1));
    if (n < 1 || i < 0 || i >= n) throw BadFlags("--shard expects 0 <= I < N");
    return {i, n};
  } catch (const std::logic_error&) {
    throw BadFlags("--shard expects I/N");
  }
}

// ------------------------------------------------------------ census

struct CensusArgs {
  int l = 0;
  int k = 0;
  bool full = false;
  std::string cache_dir;
};

int cmd_census(const CensusArgs& a, std::ostream& out) {
  if (a.l < 2 || !is_prime(static_cast<std::uint64_t>(a.l))) throw BadFlags("--l must be prime");
  if (a.k < 1) throw BadFlags("--k must be positive");
  std::uint64_t q = 1;
  for (int i = 0; i < a.k; ++i) {
    q *= static_cast<std::uint64_t>(a.l);
    if (q > (1U << 16)) throw BadFlags("l^k exceeds the field cap 2^16");
  }
  const auto mode = a.full ? ecount::Mode::full : ecount::Mode::family;
  if (a.full && q > ecount::kFullModeCap) {
    throw BadFlags("--full-enum needs l^k <= " + std::to_string(ecount::kFullModeCap));
  }
  std::optional<std::filesystem::path> dir;
  if (!a.cache_dir.empty()) dir = a.cache_dir;
  const auto census = ecount::trace_census(a.l, a.k, mode, dir);
  const auto orders = census.orders();
  std::vector<std::uint64_t> primes;
  for (auto n : orders) {
    for (auto r : prime_divisors(static_cast<std::uint64_t>(n))) primes.push_back(r);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  out << "l=" << a.l << " k=" << a.k << " q=" << q << " mode=" << ecount::to_string(mode)
      << " method=" << census.method() << '\n';
  out << "traces=" << join(census.traces) << '\n';
  out << "orders=" << join(orders) << '\n';
  out << "prime_divisors=" << join(primes) << '\n';
  return kOk;
}

// ------------------------------------------------------------ immersion

struct ImmersionArgs {
  std::uint32_t p = 0;
  std::string range;
  int d = 0;
  int l = 2;
  std::string level = "X0";
  int jobs = 1;
  std::string checkpoint;
  std::string shard;
  std::string provider = "winding-lattice";
  std::size_t max_cusp_dim = immersion::ImmersionOptions{}.max_cuspidal_dimension;
  std::string verdict_json;
  bool force = false;
};

std::vector<std::uint32_t> immersion_primes(const ImmersionArgs& a) {
  if ((a.p != 0) == !a.range.empty()) throw BadFlags("give exactly one of --p and --p-range");
  std::vector<std::uint32_t> primes;
  if (a.p != 0) {
    if (a.p < 3 || !is_prime(a.p)) throw BadFlags("--p must be an odd prime");
    primes.push_back(a.p);
  } else {
    const auto colon = a.range.find(':');
    if (colon == std::string::npos) throw BadFlags("--p-range expects LO:HI");
    try {
      const auto lo = std::stoull(a.range.substr(0, colon));
      const auto hi = std::stoull(a.range.substr(colon + 1));
      if (hi <= lo) throw BadFlags("--p-range: empty range");
      for (auto p : primes_in(std::max<std::uint64_t>(lo, 3), hi)) primes.push_back(p);
    } catch (const std::logic_error&) {
      throw BadFlags("--p-range expects LO:HI");
    }
  }
  if (!a.shard.empty()) {
    const auto [i, n] = parse_shard(a.shard);
    primes = shard(primes, i, n);
  }
  return primes;
}

json verdict_payload(std::uint32_t p, const std::vector<immersion::ImmersionVerdict>& attempts) {
  json tried = json::array();
  for (const auto& v : attempts) {
    json j{{"level", v.level_tag}, {"verified", v.verified}, {"module_rank", v.module_rank},
           {"patterns_checked", v.patterns_checked}};
    if (!v.reason.empty()) j["reason"] = v.reason;
    tried.push_back(std::move(j));
  }
  return {{"p", p},
          {"level", attempts.back().level_tag},
          {"verified", attempts.back().verified},
          {"attempts", std::move(tried)}};
}

std::string verdict_line(const json& payload) {
  return "p=" + std::to_string(payload.at("p").get<std::uint32_t>()) + " level=" +
         payload.at("level").get<std::string>() + " verdict=" +
         (payload.at("verified").get<bool>() ? "verified" : "not_verified");
}

int cmd_immersion(const ImmersionArgs& a, std::ostream& out, std::ostream& err) {
  if (a.d < 1) throw BadFlags("--d must be positive");
  if (a.l < 2 || !is_prime(static_cast<std::uint64_t>(a.l))) throw BadFlags("--l must be prime");
  if (a.jobs < 1) throw BadFlags("--jobs must be positive");
  const auto primes = immersion_primes(a);
  for (auto p : primes) {
    if (p == static_cast<std::uint32_t>(a.l)) throw BadFlags("p must differ from l");
  }
  immersion::ImmersionOptions opt;
  opt.provider = provider_named(a.provider);
  opt.max_cuspidal_dimension = a.max_cusp_dim;

  const bool search = a.level == "auto";
  std::optional<int> index;
  if (!search) {
    if (a.level == "X0") {
      index = 1;
    } else {
      try {
        index = std::stoi(a.level.rfind("XH:", 0) == 0 ? a.level.substr(3) : a.level);
      } catch (const std::logic_error&) {
        throw BadFlags("--H expects X0, auto, or a subgroup index");
      }
    }
    for (auto p : primes) {
      if (*index < 1 || ((p - 1) / 2) % static_cast<std::uint32_t>(*index) != 0) {
        throw BadFlags("--H: index " + std::to_string(*index) + " does not divide (p-1)/2 for p = " + std::to_string(p));
      }
      if (*index > 1 && p > 250) throw BadFlags("--H: proper subgroups need p <= 250");
      if (p > 1000) throw BadFlags("--H: X0 needs p <= 1000");
    }
  }

  std::optional<checkpoint::Log> log;
  if (!a.checkpoint.empty()) log.emplace(a.checkpoint);
  const json params{{"d", a.d}, {"l", a.l}, {"H", a.level}, {"provider", opt.provider->name()},
                    {"max_cusp_dim", a.max_cusp_dim}};

  std::vector<json> payloads(primes.size());
  std::exception_ptr error;
  bool mismatch = false;
  const auto n = static_cast<std::int64_t>(primes.size());
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(a.jobs)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto p = primes[static_cast<std::size_t>(i)];
    const std::string id = checkpoint::task_id("immersion", params, p);
    std::optional<checkpoint::Record> done;
    json payload;
    try {
      done = log ? log->find(id) : std::nullopt;
      if (done && !a.force) {
        payload = done->payload;
      } else {
        std::vector<immersion::ImmersionVerdict> attempts;
        if (search) {
          attempts = immersion::search_levels(p, a.d, a.l, opt).attempts;
        } else {
          attempts.push_back(immersion::formal_immersion_check(
              p, a.d, a.l, modsym::Subgroup::of_index(static_cast<int>(p), *index), opt));
        }
        payload = verdict_payload(p, attempts);
      }
    } catch (...) {
#pragma omp critical(torsion8_cli_error)
      if (!error) error = std::current_exception();
    }
#pragma omp ordered
    {
      if (!payload.is_null()) {
        try {
          if (log && done && a.force && checkpoint::digest(payload) != done->digest) {
            err << "p=" << p << ": recomputed result differs from the checkpoint\n";
            mismatch = true;
          } else if (log && !done) {
            log->append({id, checkpoint::digest(payload), checkpoint::utc_now(), payload});
          }
          out << verdict_line(payload) << '\n' << std::flush;
          err << "[immersion] p=" << p << (done && !a.force ? " (checkpoint)" : "") << '\n';
          payloads[static_cast<std::size_t>(i)] = payload;
        } catch (...) {
          if (!error) error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);

  if (!a.verdict_json.empty()) {
    json entries = json::array();
    for (const auto& pl : payloads) {
      const auto p = pl.at("p").get<std::uint32_t>();
      entries.push_back({{"id", "immersion-d" + std::to_string(a.d) + "-l" + std::to_string(a.l) + "-" + std::to_string(p)},
                         {"prime", p},
                         {"level", pl.at("level")},
                         {"verdict", pl.at("verified").get<bool>() ? "verified" : "not_verified"},
                         {"provenance", "computed"},
                         {"source", std::string("torsion8 ") + TORSION8_VERSION + " immersion, provider " +
                                        opt.provider->name()}});
    }
    const json doc{{"schema_version", pipeline::kVerdictSchemaVersion}, {"d", a.d}, {"l", a.l},
                   {"entries", std::move(entries)}};
    std::ofstream f(a.verdict_json, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + a.verdict_json);
    f << doc.dump(2) << '\n';
  }
  return mismatch ? kInvariantFailure : kOk;
}

// ------------------------------------------------------------ pipeline

struct PipelineArgs {
  int d = 0;
  int l = 2;
  std::string evidence;
  std::string out;
  int jobs = 1;
  std::string checkpoint;
  std::vector<std::uint32_t> primes;
  std::string verdicts;
  std::uint32_t immersion_cap = 300;
  std::uint32_t known_floor = 0;
  std::string provider = "winding-lattice";
  bool fixed_time = false;
};

int cmd_pipeline(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
  if (a.d < 1) throw BadFlags("--d must be positive");
  if (a.jobs < 1) throw BadFlags("--jobs must be positive");
  evidence::EvidenceSet ev;
  try {
    ev = evidence::load(a.evidence);
  } catch (const evidence::EvidenceError& e) {
    throw BadFlags(e.what());
  }
  std::optional<pipeline::VerdictCache> cache;
  if (!a.verdicts.empty()) {
    try {
      cache = pipeline::VerdictCache::load(a.verdicts);
    } catch (const std::runtime_error& e) {
      throw BadFlags(e.what());
    }
    if (cache->d() != a.d || cache->l() != a.l) throw BadFlags("verdict cache was made for another d or l");
  }
  std::optional<checkpoint::Log> log;
  if (!a.checkpoint.empty()) log.emplace(a.checkpoint);

  pipeline::Options opt;
  opt.d = a.d;
  opt.l = a.l;
  if (a.known_floor != 0) opt.known_floor = a.known_floor;
  if (!a.primes.empty()) opt.primes = a.primes;
  opt.immersion_cap = a.immersion_cap;
  opt.verdicts = cache ? &*cache : nullptr;
  opt.immersion.provider = provider_named(a.provider);
  opt.jobs = a.jobs;
  opt.checkpoint = log ? &*log : nullptr;
  if (a.fixed_time) opt.fixed_time = kFixedTime;
  opt.progress = [&err](const std::string& s) { err << "[pipeline] " << s << '\n'; };

  pipeline::Result r;
  try {
    r = pipeline::run_pipeline(ev, opt);
  } catch (const pipeline::ContradictionError& e) {
    err << "contradictory evidence: " << e.what() << '\n' << e.details.dump(2) << '\n';
    return kContradiction;
  }
  pipeline::write_artifacts(r, a.out);
  out << "conclusion: " << r.summary.conclusion << '\n';
  out << "eliminated=" << join(r.summary.eliminated) << '\n';
  out << "needs_external=" << join(r.summary.needs_external) << '\n';
  out << "open=" << join(r.summary.open) << '\n';
  return r.summary.complete() ? kOk : kOpenPrimes;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torsion primes of degree d: census, formal immersion and elimination pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TORSION8_VERSION);

  CensusArgs ca;
  auto* census = app.add_subcommand("census", "Frobenius trace census over F_{l^k}");
  census->add_option("--l", ca.l, "field characteristic")->required();
  census->add_option("--k", ca.k, "extension degree")->required();
  census->add_flag("--full-enum", ca.full, "every long Weierstrass model (l^k <= 32)");
  census->add_option("--cache-dir", ca.cache_dir, "census cache directory (default $TORSION8_CACHE_DIR)");

  ImmersionArgs ia;
  auto* imm = app.add_subcommand("immersion", "formal-immersion check at sums of rational cusps");
  imm->add_option("--p", ia.p, "a single prime");
  imm->add_option("--p-range", ia.range, "primes in LO:HI (HI exclusive)");
  imm->add_option("--d", ia.d, "degree")->required();
  imm->add_option("--l", ia.l, "auxiliary prime")->capture_default_str();
  imm->add_option("--H", ia.level, "X0, a subgroup index, or auto (X0 then larger indices)")->capture_default_str();
  imm->add_option("--jobs", ia.jobs, "worker threads")->capture_default_str();
  imm->add_option("--checkpoint", ia.checkpoint, "JSON-lines checkpoint file");
  imm->add_option("--shard", ia.shard, "I/N: keep primes whose position mod N is I");
  imm->add_option("--provider", ia.provider, "winding-lattice or manin-coordinates")->capture_default_str();
  imm->add_option("--max-cusp-dim", ia.max_cusp_dim, "skip levels with a larger cuspidal space")->capture_default_str();
  imm->add_option("--verdict-json", ia.verdict_json, "also write the verdicts as a pipeline verdict cache");
  imm->add_flag("--force", ia.force, "recompute checkpointed primes and compare digests");

  PipelineArgs pa;
  auto* pipe = app.add_subcommand("pipeline", "eliminate every candidate prime and write certificates");
  pipe->add_option("--d", pa.d, "degree")->required();
  pipe->add_option("--l", pa.l, "auxiliary prime")->capture_default_str();
  pipe->add_option("--evidence", pa.evidence, "evidence JSON file")->required();
  pipe->add_option("--out", pa.out, "output directory")->required();
  pipe->add_option("--jobs", pa.jobs, "worker threads")->capture_default_str();
  pipe->add_option("--checkpoint", pa.checkpoint, "JSON-lines checkpoint file");
  pipe->add_option("--primes", pa.primes, "restrict to these candidates")->delimiter(',');
  pipe->add_option("--verdicts", pa.verdicts, "cached immersion verdicts for primes above the cap");
  pipe->add_option("--immersion-cap", pa.immersion_cap, "primes from here on use the verdict cache (0: compute all)")
      ->capture_default_str();
  pipe->add_option("--known-floor", pa.known_floor, "largest p with Primes(p) known to lie in S(d)");
  pipe->add_option("--provider", pa.provider, "winding-lattice or manin-coordinates")->capture_default_str();
  pipe->add_flag("--fixed-time", pa.fixed_time, "write a fixed timestamp (byte-stable artifacts)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (census->parsed()) return cmd_census(ca, out);
    if (imm->parsed()) return cmd_immersion(ia, out, err);
    return cmd_pipeline(pa, out, err);
  } catch (const BadFlags& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    err << "internal failure: " << e.what() << '\n';
    return kInvariantFailure;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace torsion8::cli
