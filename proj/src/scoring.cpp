#include "kgqa/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "kgqa/error.hpp"

namespace kgqa {

namespace {

const std::string kBos = "<s>";
const std::string kEos = "</s>";

double checked_log(double p, ScoreDiagnostics* diag) {
  if (p <= 0.0 || !std::isfinite(p)) {
    fail(ErrorCode::invalid_probability,
         "score: model returned a non-positive probability");
  }
  if (p < kProbabilityFloor) {
    if (diag != nullptr) ++diag->floored;
    p = kProbabilityFloor;
  }
  return std::log(p);
}

}  // namespace

void TokenSequence::validate() const {
  if (tokens.empty()) {
    fail(ErrorCode::contract, "TokenSequence: must hold at least one token");
  }
  for (const TokenSpan* span : {&option_span, &head_span, &tail_span}) {
    if (span->begin > span->end || span->end > tokens.size()) {
      fail(ErrorCode::contract, "TokenSequence: span out of bounds");
    }
  }
  if (head_span.length() > 0 && tail_span.length() > 0 &&
      head_span.begin < tail_span.end && tail_span.begin < head_span.end) {
    fail(ErrorCode::contract, "TokenSequence: head and tail spans overlap");
  }
}

SequenceScore score_causal(const TokenSequence& seq,
                           const ConditionalTokenModel& model,
                           ScoreDiagnostics* diag) {
  seq.validate();
  const auto& t = seq.tokens;
  double total = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    double p = model.causal_prob(t[i], std::span<const std::string>(t.data(), i));
    total += checked_log(p, diag);
  }
  return SequenceScore{-total / static_cast<double>(t.size()), t.size()};
}

SequenceScore score_masked(const TokenSequence& seq,
                           const ConditionalTokenModel& model,
                           ScoreDiagnostics* diag) {
  seq.validate();
  const auto& t = seq.tokens;
  double total = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    double p = model.masked_prob(
        t[i], std::span<const std::string>(t.data(), i),
        std::span<const std::string>(t.data() + i + 1, t.size() - i - 1));
    total += checked_log(p, diag);
  }
  return SequenceScore{-total / static_cast<double>(t.size()), t.size()};
}

size_t predict_option(std::span<const SequenceScore> scores) {
  if (scores.size() < 2) {
    fail(ErrorCode::contract, "predict_option: need at least two scores");
  }
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].value < scores[best].value) best = i;
  }
  return best;
}

TokenSequence convert_to_sequence(std::string_view context,
                                  std::string_view question,
                                  std::string_view option,
                                  const TemplateTable* conversion) {
  TokenSequence seq;
  std::vector<std::string> head_tokens;
  std::string question_str(question);

  if (conversion != nullptr && conversion->contains(question_str)) {
    // statement = template{head=context, tail=option}; tokenize the pieces
    // so the spans are exact
    const std::string& tmpl = conversion->text(question_str);
    size_t head_pos = tmpl.find("{head}");
    size_t tail_pos = tmpl.find("{tail}");
    std::string prefix = tmpl.substr(0, head_pos);
    std::string middle = tmpl.substr(head_pos + 6, tail_pos - head_pos - 6);
    for (auto& tok : tokenize(prefix)) seq.tokens.push_back(std::move(tok));
    seq.head_span.begin = seq.tokens.size();
    for (auto& tok : tokenize(context)) seq.tokens.push_back(std::move(tok));
    seq.head_span.end = seq.tokens.size();
    for (auto& tok : tokenize(middle)) seq.tokens.push_back(std::move(tok));
  } else {
    seq.head_span.begin = 0;
    for (auto& tok : tokenize(context)) seq.tokens.push_back(std::move(tok));
    for (auto& tok : tokenize(question)) seq.tokens.push_back(std::move(tok));
    seq.head_span.end = seq.tokens.size();
  }

  seq.option_span.begin = seq.tokens.size();
  for (auto& tok : tokenize(option)) seq.tokens.push_back(std::move(tok));
  seq.option_span.end = seq.tokens.size();
  seq.tail_span = seq.option_span;
  return seq;
}

BigramModel BigramModel::from_tokens(std::span<const std::string> corpus,
                                     double alpha) {
  if (corpus.empty()) {
    fail(ErrorCode::empty_input, "BigramModel: empty corpus");
  }
  if (alpha < 0.0) {
    fail(ErrorCode::config, "BigramModel: alpha must be non-negative");
  }
  BigramModel model;
  model.alpha_ = alpha;
  std::unordered_map<std::string, bool> seen;
  for (const auto& tok : corpus) {
    if (seen.emplace(tok, true).second) model.vocab_.push_back(tok);
  }
  std::sort(model.vocab_.begin(), model.vocab_.end());

  std::string prev = kBos;
  for (const auto& tok : corpus) {
    model.forward_[prev][tok]++;
    model.forward_totals_[prev]++;
    prev = tok;
  }
  model.forward_[prev][kEos]++;
  model.forward_totals_[prev]++;

  // Right-neighbor counts: backward_[next][token] = #(token, next) pairs.
  for (size_t i = 0; i < corpus.size(); ++i) {
    const std::string& tok = corpus[i];
    const std::string& next = (i + 1 < corpus.size()) ? corpus[i + 1] : kEos;
    model.backward_[next][tok]++;
    model.backward_totals_[next]++;
  }
  return model;
}

BigramModel BigramModel::from_text(std::string_view corpus, double alpha) {
  std::vector<std::string> tokens = tokenize(corpus);
  return from_tokens(tokens, alpha);
}

double BigramModel::left_estimate(const std::string& token,
                                  const std::string& prev) const {
  double v = static_cast<double>(vocab_.size());
  double num = alpha_;
  double den = alpha_ * v;
  auto pit = forward_.find(prev);
  if (pit != forward_.end()) {
    auto tit = pit->second.find(token);
    if (tit != pit->second.end()) num += static_cast<double>(tit->second);
  }
  auto totit = forward_totals_.find(prev);
  if (totit != forward_totals_.end()) den += static_cast<double>(totit->second);
  return den > 0.0 ? num / den : 0.0;
}

double BigramModel::right_estimate(const std::string& token,
                                   const std::string& next) const {
  double v = static_cast<double>(vocab_.size());
  double num = alpha_;
  double den = alpha_ * v;
  auto nit = backward_.find(next);
  if (nit != backward_.end()) {
    auto tit = nit->second.find(token);
    if (tit != nit->second.end()) num += static_cast<double>(tit->second);
  }
  auto totit = backward_totals_.find(next);
  if (totit != backward_totals_.end()) den += static_cast<double>(totit->second);
  return den > 0.0 ? num / den : 0.0;
}

double BigramModel::causal_prob(const std::string& token,
                                std::span<const std::string> left_context) const {
  const std::string& prev = left_context.empty() ? kBos : left_context.back();
  return left_estimate(token, prev);
}

double BigramModel::masked_prob(const std::string& token,
                                std::span<const std::string> left_context,
                                std::span<const std::string> right_context) const {
  const std::string& prev = left_context.empty() ? kBos : left_context.back();
  const std::string& next = right_context.empty() ? kEos : right_context.front();
  double numerator = std::sqrt(left_estimate(token, prev) *
                               right_estimate(token, next));
  double normalizer = 0.0;
  for (const auto& w : vocab_) {
    normalizer += std::sqrt(left_estimate(w, prev) * right_estimate(w, next));
  }
  if (normalizer <= 0.0) return 0.0;
  return numerator / normalizer;
}

std::vector<double> LmOptionScorer::score_options(const EvalItem& item) const {
  std::vector<double> out;
  out.reserve(item.options.size());
  for (const auto& option : item.options) {
    TokenSequence seq =
        convert_to_sequence(item.context, item.question, option, conversion_);
    SequenceScore s = mode_ == ScoreMode::causal ? score_causal(seq, model_)
                                                 : score_masked(seq, model_);
    out.push_back(s.value);
  }
  return out;
}

EvalResult evaluate(std::span<const EvalItem> items, const OptionScorer& scorer) {
  EvalResult result;
  for (const auto& item : items) {
    if (item.options.size() < 2) {
      fail(ErrorCode::contract,
           "evaluate: item '" + item.id + "' has fewer than two options");
    }
    std::vector<double> values = scorer.score_options(item);
    std::vector<SequenceScore> scores;
    scores.reserve(values.size());
    for (double v : values) scores.push_back(SequenceScore{v, 0});
    size_t predicted = predict_option(scores);
    result.predictions.push_back(predicted);
    result.scores.push_back(std::move(values));
    if (static_cast<int>(predicted) == item.answer_index) ++result.n_correct;
    ++result.n_items;
  }
  result.accuracy = result.n_items == 0
                        ? 0.0
                        : static_cast<double>(result.n_correct) /
                              static_cast<double>(result.n_items);
  return result;
}

size_t majority_index(std::span<const EvalItem> items) {
  std::vector<size_t> counts;
  for (const auto& item : items) {
    auto gold = static_cast<size_t>(item.answer_index);
    if (gold >= counts.size()) counts.resize(gold + 1, 0);
    counts[gold]++;
  }
  size_t best = 0;
  for (size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

double majority_accuracy(std::span<const EvalItem> items) {
  if (items.empty()) return 0.0;
  size_t maj = majority_index(items);
  size_t correct = 0;
  for (const auto& item : items) {
    if (static_cast<size_t>(item.answer_index) == maj) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

}  // namespace kgqa
