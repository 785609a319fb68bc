#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgqa {

// Sentence templates keyed by relation id (or, for score-time conversion,
// by question pattern). Each template contains `{head}` and `{tail}` exactly
// once, with `{tail}` in final position.
class TemplateTable {
 public:
  TemplateTable() = default;

  // JSON object mapping key -> template string.
  static TemplateTable parse_json(std::istream& in);

  void add(const std::string& key, const std::string& text);

  bool contains(const std::string& key) const {
    return entries_.count(key) > 0;
  }
  size_t size() const { return entries_.size(); }

  const std::string& text(const std::string& key) const;

  // Template with both placeholders substituted.
  std::string instantiate(const std::string& key, const std::string& head,
                          const std::string& tail) const;

  // Template text up to and excluding {tail}, with {head} substituted.
  std::string question_form(const std::string& key,
                            const std::string& head) const;

  std::vector<std::string> keys() const;

 private:
  std::unordered_map<std::string, std::string> entries_;
};

}  // namespace kgqa
