#include "kgqa/text.hpp"

#include <cctype>

namespace kgqa {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

bool is_token_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_space_byte(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string strip_blanks(std::string_view s) {
  std::string no_blanks;
  no_blanks.reserve(s.size());
  for (char c : s) {
    if (c == '_') {
      no_blanks.push_back(' ');
    } else {
      no_blanks.push_back(c);
    }
  }
  return collapse_whitespace(no_blanks);
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : s) {
    if (is_token_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

StopwordSet StopwordSet::load(std::istream& in) {
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = collapse_whitespace(line);
    if (word.empty() || word[0] == '#') continue;
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    set.words_.insert(word);
  }
  return set;
}

StopwordSet StopwordSet::from_words(const std::vector<std::string>& words) {
  StopwordSet set;
  for (const auto& w : words) {
    std::string lw = w;
    for (auto& c : lw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    set.words_.insert(lw);
  }
  return set;
}

std::vector<std::string> keyword_tokens(std::string_view s,
                                        const StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(s)) {
    if (!stopwords.contains(tok)) out.push_back(std::move(tok));
  }
  return out;
}

namespace {

// Returns the length of the agent token starting at position i, or 0.
size_t agent_token_len(std::string_view s, size_t i) {
  static constexpr std::string_view kPrefix = "Person";
  if (s.size() - i < kPrefix.size() + 1) return 0;
  if (s.substr(i, kPrefix.size()) != kPrefix) return 0;
  char cap = s[i + kPrefix.size()];
  if (cap < 'A' || cap > 'Z') return 0;
  // Word boundaries on both sides.
  if (i > 0 && is_token_byte(static_cast<unsigned char>(s[i - 1]))) return 0;
  size_t end = i + kPrefix.size() + 1;
  if (end < s.size() && is_token_byte(static_cast<unsigned char>(s[end]))) return 0;
  return kPrefix.size() + 1;
}

}  // namespace

std::vector<std::string> find_agent_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (size_t i = 0; i < s.size(); ++i) {
    size_t len = agent_token_len(s, i);
    if (len == 0) continue;
    std::string tok(s.substr(i, len));
    bool seen = false;
    for (const auto& t : out) {
      if (t == tok) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(tok));
    i += len - 1;
  }
  return out;
}

std::string replace_agent_tokens(
    std::string_view s,
    const std::vector<std::pair<std::string, std::string>>& names) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    size_t len = agent_token_len(s, i);
    if (len > 0) {
      std::string_view tok = s.substr(i, len);
      const std::string* replacement = nullptr;
      for (const auto& [agent, name] : names) {
        if (agent == tok) {
          replacement = &name;
          break;
        }
      }
      if (replacement != nullptr) {
        out.append(*replacement);
        i += len;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

bool contains_agent_token(std::string_view s) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (agent_token_len(s, i) > 0) return true;
  }
  return false;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace kgqa
