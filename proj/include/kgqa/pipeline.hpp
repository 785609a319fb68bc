#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgqa/scoring.hpp"

namespace kgqa {

// Flat key=value run configuration. Values loaded from a config file have
// relative path-like entries resolved against the file's directory; values
// set programmatically (CLI flags) resolve against the working directory.
class Config {
 public:
  Config() = default;

  static Config load_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback = "") const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  size_t get_size(const std::string& key, size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  uint64_t seed() const { return get_u64("seed", 7); }
  // `seeds` list when present, otherwise the single root seed.
  std::vector<uint64_t> seed_sweep() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  std::string canonical_string() const;

 private:
  std::map<std::string, std::string> kv_;
};

struct CommandResult {
  std::string summary;      // aligned plain-text tables
  std::string report_json;  // machine-readable report
};

// Dispatches one of: ingest, generate, filter, train, eval, score, stats.
// Stage errors surface as kgqa::Error with a stage-tagged message.
CommandResult run_command(const Config& config, const std::string& command);

// Loads generic MCQ JSONL ({"id", "context"?, "question", "options",
// "answer_index"}). Malformed lines are skipped and counted; when
// require_gold is false, answer_index may be absent (-1).
std::vector<EvalItem> load_eval_items_file(const std::string& path,
                                           size_t* malformed = nullptr,
                                           bool require_gold = true);

}  // namespace kgqa
