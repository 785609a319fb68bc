#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgqa/kg.hpp"
#include "kgqa/rng.hpp"
#include "kgqa/templates.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

struct NamePool {
  std::vector<std::string> names;

  // One name per line, '#' comments allowed. Names must be distinct.
  static NamePool load(std::istream& in);
  void validate() const;
};

using AgentNameMap = std::vector<std::pair<std::string, std::string>>;

struct Lexicalization {
  std::string sentence;
  std::string answer;  // lexicalized tail, same agent substitutions applied
  AgentNameMap agent_names;
};

// Turns a triple into a sentence. A pre-associated edge sentence takes
// precedence over the relation template; blanks are stripped and every
// distinct agent token is mapped to a distinct name drawn from the pool.
Lexicalization lexicalize(const KnowledgeGraph& kg, const Triple& triple,
                          const TemplateTable& templates, const NamePool& names,
                          Rng& rng);

struct PartialQa {
  std::string id;
  std::string question;
  std::string answer;
  uint32_t triple_index = 0;
  AgentNameMap agent_names;
};

// Splits a lexicalized sentence into question and answer. The answer span
// must be a whitespace-delimited suffix of the sentence and the remaining
// question must be non-empty.
PartialQa make_question(const std::string& sentence,
                        const std::string& answer_span);

enum class OverlapMode { all_tokens, keyword_tokens };

// True iff the two texts share a token (minus stopwords in keyword mode).
bool has_keyword_overlap(std::string_view head_text, std::string_view tail_text,
                         const StopwordSet& stopwords, OverlapMode mode);

class FrequencyTable {
 public:
  FrequencyTable() = default;

  // TSV `word \t zipf`.
  static FrequencyTable load(std::istream& in);

  void add(const std::string& word, double zipf);
  // 0 for words missing from the table.
  double zipf(std::string_view word) const;
  size_t size() const { return zipf_.size(); }

 private:
  std::unordered_map<std::string, double> zipf_;
};

// Every token of the label must reach the zipf threshold.
bool passes_commonness(std::string_view label, const FrequencyTable& freq,
                       double threshold);

// True iff the label's first alphabetic character is uppercase.
bool is_named_entity(std::string_view label);

enum class Family { atomic, cwwv };

struct GenContext {
  Family family = Family::cwwv;
  const TemplateTable* templates = nullptr;
  const NamePool* names = nullptr;
  const StopwordSet* stopwords = nullptr;
  const FrequencyTable* frequencies = nullptr;  // null disables the filter
  double commonness_threshold = 2.5;
};

struct GenReport {
  size_t input = 0;
  size_t emitted = 0;
  std::map<std::string, size_t> dropped;

  size_t total_dropped() const {
    size_t n = 0;
    for (const auto& [_, v] : dropped) n += v;
    return n;
  }
  void merge(const GenReport& other);
};

// One triple -> one question/answer pair, or a drop reason. Pure function of
// (kg, triple_index, ctx, seed); callers may fan out over triples freely.
// Drop reasons: "ne", "rare", "overlap", "sentence_mismatch",
// "empty_question". A relation without a template (and no edge sentence)
// raises unsupported_relation.
std::optional<PartialQa> generate_item(const KnowledgeGraph& kg,
                                       uint32_t triple_index,
                                       const GenContext& ctx, uint64_t seed,
                                       std::string* drop_reason = nullptr);

std::vector<PartialQa> generate_items(const KnowledgeGraph& kg,
                                      const Partition& partition,
                                      const GenContext& ctx, uint64_t seed,
                                      GenReport* report = nullptr);

}  // namespace kgqa
