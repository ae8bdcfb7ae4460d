#include "torsion8/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace torsion8::evidence {

namespace {

constexpr ClaimKind kAllKinds[] = {
    ClaimKind::cuspidal_generation,         ClaimKind::hecke_annihilator_exists,
    ClaimKind::principality_check_passed,   ClaimKind::positive_rank_factors_in_J0,
    ClaimKind::gonality_lower_bound,
};

Entry entry_from_json(const nlohmann::json& j, std::size_t position) {
  const std::string where = "evidence entry " + std::to_string(position);
  if (!j.is_object()) throw EvidenceError(where + ": not an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "prime" && key != "claim_kind" && key != "value" && key != "source") {
      throw EvidenceError(where + ": unknown field '" + key + "'");
    }
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw EvidenceError(where + ": missing field '" + key + "'");
    return j.at(key);
  };
  Entry e;
  const auto& id = require("id");
  const auto& prime = require("prime");
  const auto& kind = require("claim_kind");
  const auto& source = require("source");
  if (!id.is_string() || id.get<std::string>().empty()) throw EvidenceError(where + ": id must be a non-empty string");
  if (!prime.is_number_unsigned()) throw EvidenceError(where + ": prime must be a positive integer");
  if (!kind.is_string()) throw EvidenceError(where + ": claim_kind must be a string");
  if (!source.is_string() || source.get<std::string>().empty()) {
    throw EvidenceError(where + ": source citation must be a non-empty string");
  }
  e.id = id.get<std::string>();
  e.prime = prime.get<std::uint32_t>();
  e.kind = claim_kind_from_string(kind.get<std::string>());
  e.source = source.get<std::string>();
  if (e.kind == ClaimKind::gonality_lower_bound) {
    const auto& value = require("value");
    if (!value.is_number_integer()) throw EvidenceError(where + ": gonality value must be an integer");
    e.value = value.get<std::int64_t>();
  } else if (j.contains("value")) {
    const auto& value = j.at("value");
    if (value.is_boolean()) {
      e.value = value.get<bool>() ? 1 : 0;
    } else if (value.is_number_integer() && (value.get<std::int64_t>() == 0 || value.get<std::int64_t>() == 1)) {
      e.value = value.get<std::int64_t>();
    } else {
      throw EvidenceError(where + ": value of a boolean claim must be true/false");
    }
  }
  return e;
}

}  // namespace

std::string to_string(ClaimKind k) {
  switch (k) {
    case ClaimKind::cuspidal_generation: return "cuspidal_generation";
    case ClaimKind::hecke_annihilator_exists: return "hecke_annihilator_exists";
    case ClaimKind::principality_check_passed: return "principality_check_passed";
    case ClaimKind::positive_rank_factors_in_J0: return "positive_rank_factors_in_J0";
    case ClaimKind::gonality_lower_bound: return "gonality_lower_bound";
  }
  return "?";
}

ClaimKind claim_kind_from_string(const std::string& s) {
  for (auto k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  throw EvidenceError("unknown claim_kind '" + s + "'");
}

EvidenceSet::EvidenceSet(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::set<std::string> ids;
  for (const auto& e : entries_) {
    if (!ids.insert(e.id).second) throw EvidenceError("duplicate evidence id '" + e.id + "'");
  }
}

const Entry* EvidenceSet::find(std::uint32_t prime, ClaimKind kind) const {
  for (const auto& e : entries_) {
    if (e.prime == prime && e.kind == kind) return &e;
  }
  return nullptr;
}

const Entry* EvidenceSet::best_gonality_bound(std::uint32_t prime) const {
  const Entry* best = nullptr;
  for (const auto& e : entries_) {
    if (e.prime != prime || e.kind != ClaimKind::gonality_lower_bound) continue;
    if (best == nullptr || e.value > best->value) best = &e;
  }
  return best;
}

std::vector<Contradiction> EvidenceSet::contradictions() const {
  std::vector<Contradiction> out;
  for (const auto& a : entries_) {
    if (a.kind == ClaimKind::gonality_lower_bound || !a.asserted()) continue;
    for (const auto& b : entries_) {
      if (b.prime == a.prime && b.kind == a.kind && !b.asserted()) out.push_back({a, b});
    }
  }
  return out;
}

EvidenceSet parse(const std::string& text) {
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; })) return {};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw EvidenceError(std::string("evidence file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw EvidenceError("evidence file must be a JSON array");
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) entries.push_back(entry_from_json(doc[i], i));
  return EvidenceSet(std::move(entries));
}

EvidenceSet load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvidenceError("cannot open evidence file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

nlohmann::json to_json(const Entry& e) {
  nlohmann::json j{{"id", e.id}, {"prime", e.prime}, {"claim_kind", to_string(e.kind)}};
  if (e.kind == ClaimKind::gonality_lower_bound) {
    j["value"] = e.value;
  } else if (e.value == 0) {
    j["value"] = false;
  }
  j["source"] = e.source;
  return j;
}

}  // namespace torsion8::evidence
