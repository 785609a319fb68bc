#include "kgqa/qa.hpp"

#include <algorithm>
#include <cctype>

namespace kgqa {

NamePool NamePool::load(std::istream& in) {
  if (!in) fail(ErrorCode::io, "NamePool: unreadable input stream");
  NamePool pool;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string name = collapse_whitespace(line);
    if (!name.empty()) pool.names.push_back(name);
  }
  pool.validate();
  return pool;
}

void NamePool::validate() const {
  if (names.empty()) fail(ErrorCode::config, "NamePool: no names loaded");
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::config, "NamePool: names must be distinct");
  }
}

namespace {

Lexicalization finish_lexicalization(const std::string& base,
                                     const std::string& tail_text,
                                     const NamePool& names, Rng& rng) {
  Lexicalization out;
  std::vector<std::string> agents = find_agent_tokens(base);
  if (!agents.empty()) {
    if (agents.size() > names.names.size()) {
      fail(ErrorCode::config,
           "lexicalize: more agent tokens than names in the pool");
    }
    std::vector<size_t> picks =
        rng.pick_indices(names.names.size(), agents.size());
    for (size_t i = 0; i < agents.size(); ++i) {
      out.agent_names.emplace_back(agents[i], names.names[picks[i]]);
    }
  }
  out.sentence = collapse_whitespace(replace_agent_tokens(base, out.agent_names));
  out.answer =
      collapse_whitespace(replace_agent_tokens(tail_text, out.agent_names));
  return out;
}

}  // namespace

Lexicalization lexicalize(const KnowledgeGraph& kg, const Triple& triple,
                          const TemplateTable& templates, const NamePool& names,
                          Rng& rng) {
  std::string tail_text = strip_blanks(kg.node(triple.tail).label);
  if (!triple.sentence.empty()) {
    return finish_lexicalization(collapse_whitespace(triple.sentence),
                                 tail_text, names, rng);
  }
  std::string head_text = strip_blanks(kg.node(triple.head).label);
  std::string base = templates.instantiate(triple.relation, head_text, tail_text);
  return finish_lexicalization(base, tail_text, names, rng);
}

PartialQa make_question(const std::string& sentence,
                        const std::string& answer_span) {
  if (answer_span.empty()) {
    fail(ErrorCode::template_integrity, "make_question: empty answer span");
  }
  if (!ends_with(sentence, answer_span)) {
    fail(ErrorCode::template_integrity,
         "make_question: answer is not a suffix of the sentence");
  }
  size_t cut = sentence.size() - answer_span.size();
  if (cut > 0) {
    // require a whitespace boundary so the cut never lands mid-word
    char before = sentence[cut - 1];
    if (!std::isspace(static_cast<unsigned char>(before))) {
      fail(ErrorCode::template_integrity,
           "make_question: answer does not start at a word boundary");
    }
  }
  std::string question = sentence.substr(0, cut);
  while (!question.empty() &&
         std::isspace(static_cast<unsigned char>(question.back()))) {
    question.pop_back();
  }
  if (question.empty()) {
    fail(ErrorCode::template_integrity, "make_question: question is empty");
  }
  PartialQa out;
  out.question = question;
  out.answer = answer_span;
  return out;
}

bool has_keyword_overlap(std::string_view head_text, std::string_view tail_text,
                         const StopwordSet& stopwords, OverlapMode mode) {
  std::vector<std::string> head_tokens;
  std::vector<std::string> tail_tokens;
  if (mode == OverlapMode::keyword_tokens) {
    head_tokens = keyword_tokens(head_text, stopwords);
    tail_tokens = keyword_tokens(tail_text, stopwords);
  } else {
    head_tokens = tokenize(head_text);
    tail_tokens = tokenize(tail_text);
  }
  std::sort(head_tokens.begin(), head_tokens.end());
  for (const auto& tok : tail_tokens) {
    if (std::binary_search(head_tokens.begin(), head_tokens.end(), tok)) {
      return true;
    }
  }
  return false;
}

FrequencyTable FrequencyTable::load(std::istream& in) {
  if (!in) fail(ErrorCode::io, "FrequencyTable: unreadable input stream");
  FrequencyTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split(line, '\t');
    if (cells.size() < 2) {
      fail(ErrorCode::parse, "FrequencyTable: line " + std::to_string(line_no) +
                                 " is not `word \\t zipf`");
    }
    try {
      table.add(collapse_whitespace(cells[0]), std::stod(cells[1]));
    } catch (const std::exception&) {
      fail(ErrorCode::parse, "FrequencyTable: bad zipf value on line " +
                                 std::to_string(line_no));
    }
  }
  return table;
}

void FrequencyTable::add(const std::string& word, double zipf) {
  std::string lw = word;
  for (auto& c : lw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  zipf_[lw] = zipf;
}

double FrequencyTable::zipf(std::string_view word) const {
  auto it = zipf_.find(std::string(word));
  return it == zipf_.end() ? 0.0 : it->second;
}

bool passes_commonness(std::string_view label, const FrequencyTable& freq,
                       double threshold) {
  for (const auto& tok : tokenize(label)) {
    if (freq.zipf(tok) < threshold) return false;
  }
  return true;
}

bool is_named_entity(std::string_view label) {
  for (unsigned char c : label) {
    if (std::isalpha(c)) return std::isupper(c) != 0;
    if (c >= 0x80) return false;  // non-ASCII letter: case unknown
  }
  return false;
}

void GenReport::merge(const GenReport& other) {
  input += other.input;
  emitted += other.emitted;
  for (const auto& [reason, count] : other.dropped) dropped[reason] += count;
}

namespace {

std::optional<std::string> family_filter_drop(const KnowledgeGraph& kg,
                                              const Triple& triple,
                                              const GenContext& ctx) {
  const Node& head = kg.node(triple.head);
  const Node& tail = kg.node(triple.tail);
  std::string head_text = strip_blanks(head.label);
  std::string tail_text = strip_blanks(tail.label);

  if (ctx.family == Family::cwwv) {
    if (is_named_entity(head.label) || is_named_entity(tail.label)) {
      return "ne";
    }
    if (ctx.frequencies != nullptr &&
        (!passes_commonness(head_text, *ctx.frequencies,
                            ctx.commonness_threshold) ||
         !passes_commonness(tail_text, *ctx.frequencies,
                            ctx.commonness_threshold))) {
      return "rare";
    }
  }
  OverlapMode mode = ctx.family == Family::atomic ? OverlapMode::keyword_tokens
                                                  : OverlapMode::all_tokens;
  if (has_keyword_overlap(head_text, tail_text, *ctx.stopwords, mode)) {
    return "overlap";
  }
  return std::nullopt;
}

}  // namespace

std::optional<PartialQa> generate_item(const KnowledgeGraph& kg,
                                       uint32_t triple_index,
                                       const GenContext& ctx, uint64_t seed,
                                       std::string* drop_reason) {
  const Triple& triple = kg.triples()[triple_index];
  if (auto reason = family_filter_drop(kg, triple, ctx)) {
    if (drop_reason != nullptr) *drop_reason = *reason;
    return std::nullopt;
  }

  auto lexicalize_with_fresh_rng = [&](bool force_template) {
    Rng rng(derive_seed(seed, "item", static_cast<uint64_t>(triple_index)));
    if (force_template) {
      Triple stripped = triple;
      stripped.sentence.clear();
      return lexicalize(kg, stripped, *ctx.templates, *ctx.names, rng);
    }
    return lexicalize(kg, triple, *ctx.templates, *ctx.names, rng);
  };

  Lexicalization lex = lexicalize_with_fresh_rng(false);
  bool from_sentence = !triple.sentence.empty();
  PartialQa qa;
  try {
    qa = make_question(lex.sentence, lex.answer);
  } catch (const Error&) {
    // An edge sentence that does not end in the tail falls back to the
    // relation template when one exists.
    if (from_sentence && ctx.templates->contains(triple.relation)) {
      lex = lexicalize_with_fresh_rng(true);
      try {
        qa = make_question(lex.sentence, lex.answer);
      } catch (const Error&) {
        if (drop_reason != nullptr) *drop_reason = "empty_question";
        return std::nullopt;
      }
    } else if (from_sentence) {
      if (drop_reason != nullptr) *drop_reason = "sentence_mismatch";
      return std::nullopt;
    } else {
      if (drop_reason != nullptr) *drop_reason = "empty_question";
      return std::nullopt;
    }
  }
  qa.id = "q" + std::to_string(triple_index);
  qa.triple_index = triple_index;
  qa.agent_names = std::move(lex.agent_names);
  return qa;
}

std::vector<PartialQa> generate_items(const KnowledgeGraph& kg,
                                      const Partition& partition,
                                      const GenContext& ctx, uint64_t seed,
                                      GenReport* report) {
  std::vector<PartialQa> out;
  GenReport local;
  for (uint32_t triple_index : partition.triple_ids) {
    ++local.input;
    std::string reason;
    if (auto item = generate_item(kg, triple_index, ctx, seed, &reason)) {
      out.push_back(std::move(*item));
      ++local.emitted;
    } else {
      ++local.dropped[reason];
    }
  }
  if (report != nullptr) *report = local;
  return out;
}

}  // namespace kgqa
