#include "torsion8/pipeline.hpp"

#include <gmpxx.h>
#include <omp.h>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "torsion8/arith.hpp"

namespace torsion8::pipeline {

namespace fs = std::filesystem;
using evidence::ClaimKind;
using nlohmann::json;

// ------------------------------------------------------------ gates

bool below_oesterle_bound(std::uint64_t p, int d) {
  if (d < 1) throw std::invalid_argument("oesterle: d must be positive");
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), 3, static_cast<unsigned long>(d));
  // p < 3^d + 1 + 2 sqrt(3^d)  <=>  x < 0 or x^2 < 4 * 3^d, x = p - 3^d - 1
  const mpz_class x = mpz_class(static_cast<unsigned long>(p)) - t - 1;
  if (x < 0) return true;
  return x * x < 4 * t;
}

std::vector<std::uint32_t> oesterle_candidates(int d, std::uint32_t known_floor) {
  if (d < 1) throw std::invalid_argument("oesterle: d must be positive");
  if (d > 16) throw std::invalid_argument("oesterle: candidate enumeration supports d <= 16");
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), 3, static_cast<unsigned long>(d));
  mpz_class root;
  mpz_class four_t = 4 * t;
  mpz_sqrt(root.get_mpz_t(), four_t.get_mpz_t());
  const mpz_class hi = t + 1 + root + 1;
  std::vector<std::uint32_t> out;
  for (auto p : primes_in(static_cast<std::uint64_t>(known_floor) + 1, hi.get_ui())) {
    if (below_oesterle_bound(p, d)) out.push_back(p);
  }
  return out;
}

const std::vector<std::uint32_t>& rank_zero_primes() {
  static const std::vector<std::uint32_t> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 47, 59, 71};
  return primes;
}

bool is_rank_zero(std::uint32_t p) {
  const auto& r = rank_zero_primes();
  return std::binary_search(r.begin(), r.end(), p);
}

std::optional<std::uint32_t> default_known_floor(int d) {
  static const std::map<int, std::uint32_t> floors{{1, 7}, {2, 13}, {3, 13}, {4, 17},
                                                   {5, 19}, {6, 19}, {7, 23}, {8, 23}};
  auto it = floors.find(d);
  if (it == floors.end()) return std::nullopt;
  return it->second;
}

std::optional<bool> gonality_gate(std::uint32_t p, int d, const evidence::EvidenceSet& ev) {
  const auto* e = ev.best_gonality_bound(p);
  if (e == nullptr) return std::nullopt;
  return e->value > d;
}

bool prop71_check(std::uint64_t p, int d) {
  if (p % 2 == 0) throw std::invalid_argument("prop71_check: p must be odd");
  const mpz_class lhs = mpz_class(d) * 65536 * 7;
  const mpz_class pp(static_cast<unsigned long>(p));
  return lhs < 325 * (pp * pp - 1);
}

// ------------------------------------------------------------ certificates

std::string to_string(Status s) {
  switch (s) {
    case Status::in_target_set: return "in_target_set";
    case Status::eliminated: return "eliminated";
    case Status::needs_external_evidence: return "needs_external_evidence";
    case Status::open: return "open";
  }
  return "?";
}

std::string to_string(Provenance p) { return p == Provenance::computed ? "computed" : "external"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::satisfied: return "satisfied";
    case Outcome::failed: return "failed";
    case Outcome::missing_evidence: return "missing_evidence";
    case Outcome::info: return "info";
  }
  return "?";
}

namespace {

template <class E>
E parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (auto v : values) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("certificate: unknown value '" + s + "'");
}

}  // namespace

json to_json(const Certificate& c) {
  json steps = json::array();
  for (const auto& s : c.steps) {
    json j{{"rule_id", s.rule_id},
           {"anchor", s.anchor},
           {"inputs", s.inputs},
           {"result", s.result},
           {"outcome", to_string(s.outcome)},
           {"provenance", to_string(s.provenance)}};
    if (!s.assumption.empty()) j["assumption"] = s.assumption;
    if (!s.evidence_id.empty()) j["evidence_id"] = s.evidence_id;
    steps.push_back(std::move(j));
  }
  return {{"prime", c.prime},
          {"d", c.d},
          {"l", c.l},
          {"status", to_string(c.status)},
          {"steps", std::move(steps)},
          {"toolkit_version", c.toolkit_version},
          {"started_at", c.started_at},
          {"finished_at", c.finished_at}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.prime = j.at("prime").get<std::uint32_t>();
  c.d = j.at("d").get<int>();
  c.l = j.at("l").get<int>();
  c.status = parse_enum(j.at("status").get<std::string>(),
                        {Status::in_target_set, Status::eliminated, Status::needs_external_evidence, Status::open});
  for (const auto& sj : j.at("steps")) {
    Step s;
    s.rule_id = sj.at("rule_id").get<std::string>();
    s.anchor = sj.at("anchor").get<std::string>();
    s.inputs = sj.at("inputs");
    s.result = sj.at("result").get<std::string>();
    s.outcome = parse_enum(sj.at("outcome").get<std::string>(),
                           {Outcome::satisfied, Outcome::failed, Outcome::missing_evidence, Outcome::info});
    s.provenance = parse_enum(sj.at("provenance").get<std::string>(), {Provenance::computed, Provenance::external});
    s.assumption = sj.value("assumption", "");
    s.evidence_id = sj.value("evidence_id", "");
    c.steps.push_back(std::move(s));
  }
  c.toolkit_version = j.at("toolkit_version").get<std::string>();
  c.started_at = j.at("started_at").get<std::string>();
  c.finished_at = j.at("finished_at").get<std::string>();
  return c;
}

std::optional<std::string> shape_violation(const Certificate& c) {
  bool a_ok = false;
  bool b_ok = false;
  bool blocked = false;
  for (const auto& s : c.steps) {
    if (s.provenance == Provenance::external && s.evidence_id.empty() && s.outcome != Outcome::missing_evidence) {
      return "external step " + s.rule_id + " cites no evidence id";
    }
    if (s.assumption.empty()) continue;
    if (s.outcome == Outcome::satisfied) {
      (s.assumption == "a" ? a_ok : b_ok) = true;
    } else if (s.outcome != Outcome::info) {
      blocked = true;
    }
  }
  if (c.status == Status::eliminated && (!a_ok || !b_ok || blocked)) {
    return "eliminated without satisfied (a) and (b) steps";
  }
  if (c.status != Status::eliminated && a_ok && b_ok && !blocked) {
    return "both assumptions hold but the prime is not eliminated";
  }
  return std::nullopt;
}

// ------------------------------------------------------------ verdict cache

VerdictCache VerdictCache::from_json(const json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kVerdictSchemaVersion) {
    throw std::runtime_error("verdict cache: unsupported schema");
  }
  VerdictCache out;
  out.d_ = j.at("d").get<int>();
  out.l_ = j.at("l").get<int>();
  for (const auto& e : j.at("entries")) {
    CachedVerdict v;
    v.id = e.at("id").get<std::string>();
    v.prime = e.at("prime").get<std::uint32_t>();
    v.level = e.at("level").get<std::string>();
    const auto verdict = e.at("verdict").get<std::string>();
    if (verdict != "verified" && verdict != "not_verified") throw std::runtime_error("verdict cache: bad verdict " + verdict);
    v.verified = verdict == "verified";
    const auto provenance = e.at("provenance").get<std::string>();
    if (provenance != "computed" && provenance != "reported") {
      throw std::runtime_error("verdict cache: bad provenance " + provenance);
    }
    v.computed = provenance == "computed";
    v.source = e.at("source").get<std::string>();
    if (!out.entries_.emplace(v.prime, v).second) {
      throw std::runtime_error("verdict cache: duplicate prime " + std::to_string(v.prime));
    }
  }
  out.digest_ = checkpoint::digest(j);
  return out;
}

VerdictCache VerdictCache::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open verdict cache " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("verdict cache " + path + ": " + e.what());
  }
}

const CachedVerdict* VerdictCache::find(std::uint32_t p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? nullptr : &it->second;
}

// ------------------------------------------------------------ routing

namespace {

struct Context {
  const evidence::EvidenceSet& ev;
  const Options& opt;
  std::uint32_t floor;
  const critb::CriterionBReport& critb;
};

Step evidence_step(const std::string& rule, const std::string& anchor, const std::string& assumption,
                   const evidence::EvidenceSet& ev, std::uint32_t p, ClaimKind kind) {
  Step s;
  s.rule_id = rule;
  s.anchor = anchor;
  s.assumption = assumption;
  s.provenance = Provenance::external;
  s.inputs = {{"prime", p}, {"claim_kind", evidence::to_string(kind)}};
  const auto* e = ev.find(p, kind);
  if (e == nullptr) {
    s.outcome = Outcome::missing_evidence;
    s.result = "no " + evidence::to_string(kind) + " evidence";
    return s;
  }
  s.evidence_id = e->id;
  s.outcome = e->asserted() ? Outcome::satisfied : Outcome::failed;
  s.result = e->asserted() ? "asserted" : "denied";
  s.inputs["source"] = e->source;
  return s;
}

// Combine steps that must all hold into one outcome.
Outcome all_of(std::initializer_list<Outcome> parts) {
  Outcome out = Outcome::satisfied;
  for (auto o : parts) {
    if (o == Outcome::failed) return Outcome::failed;
    if (o == Outcome::missing_evidence) out = Outcome::missing_evidence;
  }
  return out;
}

// Evidence steps carry the assumption tag only through the combining step,
// so a single (b) conclusion is counted even when it rests on two entries.
Step combine(const std::string& rule, const std::string& anchor, const std::string& assumption, Outcome o,
             json inputs) {
  Step s;
  s.rule_id = rule;
  s.anchor = anchor;
  s.assumption = assumption;
  s.inputs = std::move(inputs);
  s.outcome = o;
  s.result = o == Outcome::satisfied ? "holds" : o == Outcome::failed ? "fails" : "pending external evidence";
  return s;
}

json attempt_json(const immersion::ImmersionVerdict& v) {
  json j{{"level", v.level_tag},
         {"verified", v.verified},
         {"cuspidal_dimension", v.cuspidal_dimension},
         {"module_rank", v.module_rank},
         {"patterns_checked", v.patterns_checked}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  for (const auto& pr : v.patterns) {
    if (!pr.pass) j["failing_pattern"] = pr.multiplicities;
  }
  return j;
}

void route_rank_zero(const Context& cx, std::uint32_t p, Certificate& c) {
  const int d = cx.opt.d;
  Step gate;
  gate.rule_id = "gonality_gate";
  gate.anchor = "reduction is injective on X1(p)^(d)(Q) when J1(p)(Q) is finite and gon X1(p) > d";
  gate.assumption = "a";
  gate.provenance = Provenance::external;
  gate.inputs = {{"prime", p}, {"d", d}};
  if (const auto* e = cx.ev.best_gonality_bound(p)) {
    gate.evidence_id = e->id;
    gate.inputs["gonality_lower_bound"] = e->value;
    gate.inputs["source"] = e->source;
    gate.outcome = e->value > d ? Outcome::satisfied : Outcome::failed;
    gate.result = e->value > d ? "gonality bound exceeds d" : "gonality bound does not exceed d";
  } else {
    gate.outcome = Outcome::missing_evidence;
    gate.result = "no gonality_lower_bound evidence";
  }
  c.steps.push_back(gate);

  // (b): either the cusps generate J1(p)(Q) or a Hecke element kills it;
  // in both cases the residue classes are ruled out by a principality check.
  Step gen = evidence_step("cuspidal_generation", "J1(p)(Q) is generated by differences of rational cusps", "",
                           cx.ev, p, ClaimKind::cuspidal_generation);
  Step ann = evidence_step("hecke_annihilator", "some t in the Hecke algebra kills J1(p)(Q)", "", cx.ev, p,
                           ClaimKind::hecke_annihilator_exists);
  Step pr = evidence_step("principality_check", "t(x - x0) is not principal off the cusp-sum classes", "", cx.ev, p,
                          ClaimKind::principality_check_passed);
  Outcome control;
  if (gen.outcome == Outcome::satisfied || ann.outcome == Outcome::satisfied) {
    control = Outcome::satisfied;
    if (gen.outcome == Outcome::satisfied) c.steps.push_back(gen);
    if (ann.outcome == Outcome::satisfied) c.steps.push_back(ann);
  } else {
    control = (gen.outcome == Outcome::failed && ann.outcome == Outcome::failed) ? Outcome::failed
                                                                                 : Outcome::missing_evidence;
    c.steps.push_back(gen);
    c.steps.push_back(ann);
  }
  c.steps.push_back(pr);
  c.steps.push_back(combine("rank_zero_assumption_b", "no rational point off the cusp-sum residue classes", "b",
                            all_of({control, pr.outcome}), {{"prime", p}}));
}

Step immersion_step(const Context& cx, std::uint32_t p) {
  Step s;
  s.rule_id = "formal_immersion";
  s.anchor = "formal immersion at sums of rational cusps implies injectivity of reduction";
  s.assumption = "a";
  s.inputs = {{"prime", p}, {"d", cx.opt.d}, {"l", cx.opt.l}, {"provider", cx.opt.immersion.provider->name()}};
  const bool use_cache = cx.opt.immersion_cap != 0 && p >= cx.opt.immersion_cap;
  const CachedVerdict* cached = use_cache && cx.opt.verdicts ? cx.opt.verdicts->find(p) : nullptr;
  if (cached != nullptr) {
    s.inputs["level"] = cached->level;
    s.inputs["cache_entry"] = cached->id;
    s.inputs["source"] = cached->source;
    s.outcome = cached->verified ? Outcome::satisfied : Outcome::failed;
    s.result = (cached->verified ? "verified at " : "not verified at ") + cached->level;
    if (cached->computed) {
      s.provenance = Provenance::computed;
      s.inputs["cached"] = true;
    } else {
      s.provenance = Provenance::external;
      s.evidence_id = cached->id;
    }
    return s;
  }
  if (p > 1000) {
    s.provenance = Provenance::external;
    s.outcome = Outcome::missing_evidence;
    s.result = "beyond the X0 space cap and absent from the verdict cache";
    return s;
  }
  const auto search = immersion::search_levels(p, cx.opt.d, cx.opt.l, cx.opt.immersion);
  json attempts = json::array();
  for (const auto& v : search.attempts) attempts.push_back(attempt_json(v));
  s.inputs["attempts"] = std::move(attempts);
  s.inputs["assumptions"] = search.final().assumptions;
  s.outcome = search.verified() ? Outcome::satisfied : Outcome::failed;
  s.result = search.verified() ? "verified at " + search.final().level_tag : "not verified at any level tried";
  return s;
}

void route_general(const Context& cx, std::uint32_t p, Certificate& c) {
  const int d = cx.opt.d;
  c.steps.push_back(immersion_step(cx, p));

  const auto& w = cx.critb.per_prime.at(p);
  Step b;
  b.rule_id = "criterion_b_point_count";
  b.anchor = "no point of order p on an elliptic curve over F_{l^d'}, d' <= d, and p divides no l^d' +- 1";
  b.inputs = {{"prime", p}, {"d", d}, {"l", cx.opt.l}};
  switch (w.kind) {
    case critb::Witness::Kind::clear:
      b.assumption = "b";
      b.outcome = Outcome::satisfied;
      b.result = "no witness";
      break;
    case critb::Witness::Kind::curve_order:
      b.inputs["witness"] = {{"kind", "curve_order"}, {"dprime", w.dprime}, {"trace", w.trace}};
      b.result = "p divides #E(F_{l^" + std::to_string(w.dprime) + "}) for trace " + std::to_string(w.trace);
      break;
    case critb::Witness::Kind::cyclotomic:
      b.inputs["witness"] = {{"kind", "cyclotomic"}, {"dprime", w.dprime}, {"sign", w.sign}};
      b.result = "p divides l^" + std::to_string(w.dprime) + (w.sign > 0 ? " + 1" : " - 1");
      break;
  }
  c.steps.push_back(b);
  if (w.kind == critb::Witness::Kind::clear) return;

  if (prop71_check(p, d)) {
    Step bound;
    bound.rule_id = "prop71_bound";
    bound.anchor = "d < 325 (p^2 - 1) / (7 * 2^16) excludes p once positive-rank factors lie in J0(p)";
    bound.inputs = {{"prime", p}, {"d", d}, {"lhs", d * 65536 * 7}};
    bound.inputs["rhs"] = mpz_class(mpz_class(325) * (mpz_class(p) * p - 1)).get_str();
    bound.outcome = Outcome::satisfied;
    bound.result = "inequality holds";
    c.steps.push_back(bound);
    Step f = evidence_step("positive_rank_factors", "positive-rank simple factors of J1(p) occur in J0(p)", "", cx.ev,
                           p, ClaimKind::positive_rank_factors_in_J0);
    c.steps.push_back(f);
    c.steps.push_back(combine("positive_rank_assumption_b", "no rational point off the cusp-sum residue classes", "b",
                              f.outcome, {{"prime", p}}));
  } else {
    Step ann = evidence_step("hecke_annihilator", "some t in the Hecke algebra kills J1(p)(Q)", "", cx.ev, p,
                             ClaimKind::hecke_annihilator_exists);
    Step pr = evidence_step("principality_check", "t(x - x0) is not principal off the cusp-sum classes", "", cx.ev, p,
                            ClaimKind::principality_check_passed);
    c.steps.push_back(ann);
    c.steps.push_back(pr);
    c.steps.push_back(combine("annihilator_assumption_b", "no rational point off the cusp-sum residue classes", "b",
                              all_of({ann.outcome, pr.outcome}), {{"prime", p}}));
  }
}

Status settle(Certificate& c) {
  bool a_ok = false;
  bool b_ok = false;
  bool failed = false;
  bool missing = false;
  for (const auto& s : c.steps) {
    if (s.assumption.empty()) continue;
    if (s.outcome == Outcome::satisfied) (s.assumption == "a" ? a_ok : b_ok) = true;
    if (s.outcome == Outcome::failed) failed = true;
    if (s.outcome == Outcome::missing_evidence) missing = true;
  }
  Step e;
  e.rule_id = "elimination";
  e.anchor = "(a) and (b) together exclude p from S(d)";
  e.inputs = {{"a", a_ok}, {"b", b_ok}};
  if (a_ok && b_ok && !failed && !missing) {
    e.result = "p not in S(d)";
    e.outcome = Outcome::satisfied;
    c.status = Status::eliminated;
  } else if (failed) {
    e.result = "a required step failed";
    e.outcome = Outcome::failed;
    c.status = Status::open;
  } else {
    e.result = "waiting on external evidence";
    e.outcome = Outcome::missing_evidence;
    c.status = Status::needs_external_evidence;
  }
  c.steps.push_back(e);
  return c.status;
}

Certificate certify(const Context& cx, std::uint32_t p) {
  Certificate c;
  c.prime = p;
  c.d = cx.opt.d;
  c.l = cx.opt.l;
  c.toolkit_version = TORSION8_VERSION;
  c.started_at = cx.opt.fixed_time ? *cx.opt.fixed_time : checkpoint::utc_now();

  Step o;
  o.rule_id = "oesterle_bound";
  o.anchor = "S(d) lies in Primes((3^{d/2} + 1)^2)";
  o.inputs = {{"prime", p}, {"d", cx.opt.d}, {"known_floor", cx.floor}};
  o.result = "candidate";
  c.steps.push_back(o);

  Step rz;
  rz.rule_id = "rank_zero_table";
  rz.anchor = "J1(p)(Q) is finite exactly for p <= 31 and p in {41, 47, 59, 71}";
  rz.inputs = {{"prime", p}};
  rz.result = is_rank_zero(p) ? "rank zero" : "not rank zero";
  c.steps.push_back(rz);

  if (is_rank_zero(p)) {
    route_rank_zero(cx, p, c);
  } else {
    route_general(cx, p, c);
  }
  settle(c);
  c.finished_at = cx.opt.fixed_time ? *cx.opt.fixed_time : checkpoint::utc_now();
  if (auto bad = shape_violation(c)) throw std::logic_error("certificate for " + std::to_string(p) + ": " + *bad);
  return c;
}

json evidence_json(const evidence::EvidenceSet& ev) {
  json out = json::array();
  for (const auto& e : ev.entries()) out.push_back(evidence::to_json(e));
  return out;
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed on " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

json to_json(const Summary& s) {
  return {{"d", s.d},
          {"l", s.l},
          {"known_floor", s.known_floor},
          {"eliminated", s.eliminated},
          {"needs_external", s.needs_external},
          {"open", s.open},
          {"conclusion", s.conclusion}};
}

Result run_pipeline(const evidence::EvidenceSet& ev, const Options& opt) {
  if (opt.l < 2 || !is_prime(static_cast<std::uint64_t>(opt.l))) throw std::invalid_argument("pipeline: l must be prime");
  const auto floor = opt.known_floor ? opt.known_floor : default_known_floor(opt.d);
  if (!floor) throw std::invalid_argument("pipeline: no known floor for d = " + std::to_string(opt.d));
  if (opt.jobs < 1) throw std::invalid_argument("pipeline: jobs must be positive");

  if (const auto bad = ev.contradictions(); !bad.empty()) {
    json details = json::array();
    for (const auto& c : bad) details.push_back({{"asserted", evidence::to_json(c.asserted)}, {"denied", evidence::to_json(c.denied)}});
    throw ContradictionError("evidence both asserts and denies a claim", details);
  }

  std::vector<std::uint32_t> candidates = oesterle_candidates(opt.d, *floor);
  if (opt.primes) {
    std::vector<std::uint32_t> keep;
    for (auto p : *opt.primes) {
      if (!std::binary_search(candidates.begin(), candidates.end(), p)) {
        throw std::invalid_argument("pipeline: " + std::to_string(p) + " is not a candidate prime for d = " +
                                    std::to_string(opt.d));
      }
      keep.push_back(p);
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    candidates = std::move(keep);
  }
  if (std::binary_search(candidates.begin(), candidates.end(), static_cast<std::uint32_t>(opt.l))) {
    throw std::invalid_argument("pipeline: l = " + std::to_string(opt.l) + " is itself a candidate; pick another l");
  }

  std::vector<std::uint32_t> general;
  for (auto p : candidates) {
    if (!is_rank_zero(p)) general.push_back(p);
  }
  const auto report = critb::criterion_b_report(opt.l, opt.d, general, opt.census);
  const Context cx{ev, opt, *floor, report};

  const json params{{"d", opt.d},
                    {"l", opt.l},
                    {"known_floor", *floor},
                    {"immersion_cap", opt.immersion_cap},
                    {"provider", opt.immersion.provider->name()},
                    {"evidence", checkpoint::digest(evidence_json(ev))},
                    {"verdicts", opt.verdicts ? opt.verdicts->digest() : ""}};

  std::vector<Certificate> certs(candidates.size());
  std::exception_ptr error;
  const auto n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt.jobs)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto p = candidates[static_cast<std::size_t>(i)];
    try {
      const std::string id = checkpoint::task_id("pipeline", params, p);
      std::optional<checkpoint::Record> done = opt.checkpoint ? opt.checkpoint->find(id) : std::nullopt;
      if (done) {
        certs[static_cast<std::size_t>(i)] = certificate_from_json(done->payload);
      } else {
        Certificate c = certify(cx, p);
        if (opt.checkpoint) {
          const json payload = to_json(c);
          opt.checkpoint->append({id, checkpoint::digest(payload), c.finished_at, payload});
        }
        certs[static_cast<std::size_t>(i)] = std::move(c);
      }
      if (opt.progress) {
#pragma omp critical(torsion8_progress)
        opt.progress("p=" + std::to_string(p) + " " + to_string(certs[static_cast<std::size_t>(i)].status) +
                     (done ? " (checkpoint)" : ""));
      }
    } catch (...) {
#pragma omp critical(torsion8_pipeline_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  Result r;
  r.summary.d = opt.d;
  r.summary.l = opt.l;
  r.summary.known_floor = *floor;
  for (const auto& c : certs) {
    switch (c.status) {
      case Status::eliminated: r.summary.eliminated.push_back(c.prime); break;
      case Status::needs_external_evidence: r.summary.needs_external.push_back(c.prime); break;
      case Status::open: r.summary.open.push_back(c.prime); break;
      case Status::in_target_set: break;
    }
  }
  const std::string target = "S(" + std::to_string(opt.d) + ") = Primes(" + std::to_string(*floor) + ")";
  if (r.summary.complete()) {
    r.summary.conclusion = opt.primes ? "every selected candidate eliminated" : target;
  } else {
    r.summary.conclusion = "undetermined: " + std::to_string(r.summary.needs_external.size() + r.summary.open.size()) +
                           " candidate(s) not eliminated";
  }
  r.certificates = std::move(certs);
  return r;
}

void write_artifacts(const Result& r, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "certificates");
  for (const auto& c : r.certificates) {
    write_atomic(root / "certificates" / (std::to_string(c.prime) + ".json"), to_json(c).dump(2) + "\n");
  }
  write_atomic(root / "summary.json", to_json(r.summary).dump(2) + "\n");
}

}  // namespace torsion8::pipeline
