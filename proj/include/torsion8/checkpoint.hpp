#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

// Append-only JSON-lines checkpoints for long sweeps. One line per finished
// task: {"task_id", "digest", "completed_at", "payload"}. A torn last line
// (crash mid-write) is dropped on open and the file is compacted through an
// atomic rename. Files from disjoint shards can be merged by concatenation.
namespace torsion8::checkpoint {

/// 64-bit FNV-1a, as 16 lowercase hex digits. Stable across platforms; used
/// for ids and digests, not for security.
std::string fnv1a_hex(const std::string& data);

/// Deterministic id of sub-task `index` of `command` run with `params`
/// (params are serialized in sorted-key form first).
std::string task_id(const std::string& command, const nlohmann::json& params, std::uint64_t index);

/// Digest of a result payload (its compact sorted-key serialization).
std::string digest(const nlohmann::json& payload);

struct Record {
  std::string task_id;
  std::string digest;
  std::string completed_at;
  nlohmann::json payload;
};

class Log {
 public:
  /// Opens (creating if needed) the checkpoint at path. Records with
  /// duplicate ids must agree on the digest, otherwise std::runtime_error.
  explicit Log(std::string path);

  const std::string& path() const { return path_; }
  std::size_t size() const;
  std::optional<Record> find(const std::string& task_id) const;

  /// Appends and flushes one record. Thread safe; a record whose id is
  /// already present with a different digest throws std::runtime_error.
  void append(const Record& r);

 private:
  void compact_locked();

  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, Record> records_;
};

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_now();

}  // namespace torsion8::checkpoint
