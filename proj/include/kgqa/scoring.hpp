#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgqa/templates.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;  // exclusive

  size_t length() const { return end > begin ? end - begin : 0; }
  bool contains(size_t i) const { return i >= begin && i < end; }
};

struct TokenSequence {
  std::vector<std::string> tokens;
  TokenSpan option_span;
  TokenSpan head_span;
  TokenSpan tail_span;

  void validate() const;
};

struct SequenceScore {
  double value = 0.0;  // average negative natural-log probability
  size_t n_tokens = 0;
};

// Pluggable token-probability source. Implementations must be safe for
// concurrent queries after construction.
class ConditionalTokenModel {
 public:
  virtual ~ConditionalTokenModel() = default;

  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual double causal_prob(const std::string& token,
                             std::span<const std::string> left_context) const = 0;
  virtual double masked_prob(const std::string& token,
                             std::span<const std::string> left_context,
                             std::span<const std::string> right_context) const = 0;
};

struct ScoreDiagnostics {
  size_t floored = 0;  // probabilities clamped up to the underflow floor
};

inline constexpr double kProbabilityFloor = 1e-12;

// value = -(1/n) sum_i ln P(t_i | t_1..t_{i-1})
SequenceScore score_causal(const TokenSequence& seq,
                           const ConditionalTokenModel& model,
                           ScoreDiagnostics* diag = nullptr);

// value = -(1/n) sum_i ln P(t_i | t_1..t_{i-1}, t_{i+1}..t_n), one mask at a
// time over every position.
SequenceScore score_masked(const TokenSequence& seq,
                           const ConditionalTokenModel& model,
                           ScoreDiagnostics* diag = nullptr);

// argmin of score values; ties resolve to the lowest index.
size_t predict_option(std::span<const SequenceScore> scores);

// Builds the scoring sequence for one option. When the conversion table has
// an entry whose key equals the question text, the statement is formed as
// template{head=context, tail=option}; otherwise context, question and
// option are concatenated. head_span covers the tokens contributed by the
// caller's context/question text, tail_span (= option_span) the option's.
TokenSequence convert_to_sequence(std::string_view context,
                                  std::string_view question,
                                  std::string_view option,
                                  const TemplateTable* conversion = nullptr);

// Laplace-smoothed bigram estimates over a token corpus. causal_prob
// conditions on the left neighbor; masked_prob takes the geometric mean of
// the left-bigram and right-bigram estimates, renormalized over the
// vocabulary.
class BigramModel : public ConditionalTokenModel {
 public:
  static BigramModel from_tokens(std::span<const std::string> corpus,
                                 double alpha);
  static BigramModel from_text(std::string_view corpus, double alpha);

  const std::vector<std::string>& vocabulary() const override {
    return vocab_;
  }
  double causal_prob(const std::string& token,
                     std::span<const std::string> left_context) const override;
  double masked_prob(const std::string& token,
                     std::span<const std::string> left_context,
                     std::span<const std::string> right_context) const override;

 private:
  double left_estimate(const std::string& token, const std::string& prev) const;
  double right_estimate(const std::string& token, const std::string& next) const;

  std::vector<std::string> vocab_;
  double alpha_ = 1.0;
  std::unordered_map<std::string, std::unordered_map<std::string, size_t>>
      forward_;  // prev -> token -> count
  std::unordered_map<std::string, std::unordered_map<std::string, size_t>>
      backward_;  // next -> token -> count
  std::unordered_map<std::string, size_t> forward_totals_;
  std::unordered_map<std::string, size_t> backward_totals_;
};

struct EvalItem {
  std::string id;
  std::string context;
  std::string question;
  std::vector<std::string> options;
  int answer_index = 0;
};

// Produces per-option scores in "lower is better" orientation.
class OptionScorer {
 public:
  virtual ~OptionScorer() = default;
  virtual std::vector<double> score_options(const EvalItem& item) const = 0;
};

enum class ScoreMode { causal, masked };

class LmOptionScorer : public OptionScorer {
 public:
  LmOptionScorer(const ConditionalTokenModel& model, ScoreMode mode,
                 const TemplateTable* conversion = nullptr)
      : model_(model), mode_(mode), conversion_(conversion) {}

  std::vector<double> score_options(const EvalItem& item) const override;

 private:
  const ConditionalTokenModel& model_;
  ScoreMode mode_;
  const TemplateTable* conversion_;
};

struct EvalResult {
  double accuracy = 0.0;
  size_t n_items = 0;
  size_t n_correct = 0;
  std::vector<size_t> predictions;
  std::vector<std::vector<double>> scores;
};

EvalResult evaluate(std::span<const EvalItem> items, const OptionScorer& scorer);

// Most frequent gold index (ties to the lowest index) and its accuracy.
size_t majority_index(std::span<const EvalItem> items);
double majority_accuracy(std::span<const EvalItem> items);

}  // namespace kgqa
