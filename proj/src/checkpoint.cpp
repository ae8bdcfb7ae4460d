#include "torsion8/checkpoint.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace torsion8::checkpoint {

namespace {

nlohmann::json to_json(const Record& r) {
  return {{"task_id", r.task_id}, {"digest", r.digest}, {"completed_at", r.completed_at}, {"payload", r.payload}};
}

Record from_json(const nlohmann::json& j) {
  Record r;
  r.task_id = j.at("task_id").get<std::string>();
  r.digest = j.at("digest").get<std::string>();
  r.completed_at = j.at("completed_at").get<std::string>();
  if (j.contains("payload")) r.payload = j.at("payload");
  return r;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string task_id(const std::string& command, const nlohmann::json& params, std::uint64_t index) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return fnv1a_hex(command + '\n' + params.dump() + '\n' + std::to_string(index));
}

std::string digest(const nlohmann::json& payload) { return fnv1a_hex(payload.dump()); }

Log::Log(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string> lines;
  std::size_t start = 0;
  bool torn = false;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      torn = true;  // no terminating newline: the writer died mid-line
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    Record r;
    try {
      r = from_json(nlohmann::json::parse(lines[i]));
    } catch (const std::exception& e) {
      if (torn && i + 1 == lines.size()) break;
      throw std::runtime_error("checkpoint " + path_ + ": corrupt record on line " + std::to_string(i + 1));
    }
    if (torn && i + 1 == lines.size()) torn = false;  // complete record, just no newline
    auto [it, inserted] = records_.emplace(r.task_id, r);
    if (!inserted && it->second.digest != r.digest) {
      throw std::runtime_error("checkpoint " + path_ + ": task " + r.task_id + " recorded with two digests");
    }
  }
  if (torn || (!text.empty() && text.back() != '\n')) {
    std::lock_guard lock(mu_);
    compact_locked();
  }
}

std::size_t Log::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::optional<Record> Log::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void Log::append(const Record& r) {
  std::lock_guard lock(mu_);
  auto it = records_.find(r.task_id);
  if (it != records_.end()) {
    if (it->second.digest != r.digest) {
      throw std::runtime_error("checkpoint: task " + r.task_id + " replayed with a different digest");
    }
    return;
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("checkpoint: cannot append to " + path_);
  out << to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("checkpoint: write failed on " + path_);
  records_.emplace(r.task_id, r);
}

void Log::compact_locked() {
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
    for (const auto& [_, r] : records_) out << to_json(r).dump() << '\n';
    if (!out) throw std::runtime_error("checkpoint: write failed on " + tmp);
  }
  std::filesystem::rename(tmp, path_);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace torsion8::checkpoint
