#include "kgqa/templates.hpp"

#include <algorithm>

#include <json.hpp>

#include "kgqa/error.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

namespace {

constexpr std::string_view kHead = "{head}";
constexpr std::string_view kTail = "{tail}";

size_t count_occurrences(std::string_view text, std::string_view needle) {
  size_t count = 0;
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string replace_once(std::string text, std::string_view placeholder,
                         const std::string& value) {
  size_t pos = text.find(placeholder);
  text.replace(pos, placeholder.size(), value);
  return text;
}

}  // namespace

TemplateTable TemplateTable::parse_json(std::istream& in) {
  if (!in) fail(ErrorCode::io, "TemplateTable: unreadable input stream");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("TemplateTable: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    fail(ErrorCode::parse, "TemplateTable: top-level JSON value must be an object");
  }
  TemplateTable table;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) {
      fail(ErrorCode::parse, "TemplateTable: value for '" + it.key() +
                                 "' must be a string");
    }
    table.add(it.key(), it.value().get<std::string>());
  }
  return table;
}

void TemplateTable::add(const std::string& key, const std::string& text) {
  if (count_occurrences(text, kHead) != 1 || count_occurrences(text, kTail) != 1) {
    fail(ErrorCode::config, "template '" + key +
                                "' must contain {head} and {tail} exactly once");
  }
  if (!ends_with(text, kTail)) {
    fail(ErrorCode::config,
         "template '" + key + "' must end with the {tail} placeholder");
  }
  entries_[key] = text;
}

const std::string& TemplateTable::text(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    fail(ErrorCode::unsupported_relation, "no template for '" + key + "'");
  }
  return it->second;
}

std::string TemplateTable::instantiate(const std::string& key,
                                       const std::string& head,
                                       const std::string& tail) const {
  std::string out = replace_once(text(key), kHead, head);
  return replace_once(std::move(out), kTail, tail);
}

std::string TemplateTable::question_form(const std::string& key,
                                         const std::string& head) const {
  std::string t = text(key);
  t = t.substr(0, t.size() - kTail.size());
  while (!t.empty() && t.back() == ' ') t.pop_back();
  return replace_once(std::move(t), kHead, head);
}

std::vector<std::string> TemplateTable::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, _] : entries_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kgqa
