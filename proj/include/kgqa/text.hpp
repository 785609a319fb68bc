#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace kgqa {

// Trims the ends and squeezes internal whitespace runs to single spaces.
std::string collapse_whitespace(std::string_view s);

// Removes blank markers ('_' runs) from node text, then collapses whitespace.
std::string strip_blanks(std::string_view s);

// Lowercased alphanumeric tokens. Splits on whitespace and punctuation;
// bytes >= 0x80 (multi-byte UTF-8) are kept as token characters.
std::vector<std::string> tokenize(std::string_view s);

class StopwordSet {
 public:
  StopwordSet() = default;

  static StopwordSet load(std::istream& in);
  static StopwordSet from_words(const std::vector<std::string>& words);

  bool contains(std::string_view lowercased_token) const {
    return words_.count(std::string(lowercased_token)) > 0;
  }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// tokenize() minus stopwords.
std::vector<std::string> keyword_tokens(std::string_view s,
                                        const StopwordSet& stopwords);

// Agent placeholders are "Person" followed by a single capital letter at a
// word boundary (PersonX, PersonY, ...).
std::vector<std::string> find_agent_tokens(std::string_view s);

std::string replace_agent_tokens(
    std::string_view s,
    const std::vector<std::pair<std::string, std::string>>& names);

bool contains_agent_token(std::string_view s);

bool ends_with(std::string_view s, std::string_view suffix);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace kgqa
