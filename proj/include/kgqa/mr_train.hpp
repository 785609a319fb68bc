#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kgqa/rng.hpp"
#include "kgqa/scoring.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

// Training-orientation scores: higher = better. The evaluation-side sequence
// scores are average negative log probabilities (lower = better), so a
// model's training score is the negation of its sequence score.
struct MrLossInput {
  std::vector<double> scores;
  size_t gold = 0;
  double margin = 1.0;

  void validate() const;
};

// (1/m) * sum_{i != gold} max(0, margin - S_gold + S_i)
double mr_loss(const MrLossInput& input);

using FeatureMap = std::map<std::string, double>;

// Trainable log-linear option scorer: bag-of-tokens over the option plus
// question-option keyword co-occurrence pairs.
class LogLinearScorer {
 public:
  explicit LogLinearScorer(const StopwordSet* stopwords = nullptr)
      : stopwords_(stopwords) {}

  static FeatureMap featurize(std::string_view question,
                              std::string_view option,
                              const StopwordSet* stopwords);

  double score(std::string_view question, std::string_view option) const;
  // Training orientation (higher = better) for every option of the item.
  std::vector<double> score_item(const EvalItem& item) const;
  // argmax of training scores; ties resolve to the lowest index.
  size_t predict(const EvalItem& item) const;
  double accuracy(std::span<const EvalItem> items) const;

  FeatureMap& weights() { return weights_; }
  const FeatureMap& weights() const { return weights_; }
  const StopwordSet* stopwords() const { return stopwords_; }

  void save(std::ostream& out, const std::string& metadata_json = "{}") const;
  static LogLinearScorer load(std::istream& in,
                              const StopwordSet* stopwords = nullptr,
                              std::string* metadata_json = nullptr);

 private:
  FeatureMap weights_;
  const StopwordSet* stopwords_;
};

// Subgradient of mr_loss with respect to the scorer weights, at the current
// scores. Active hinge terms contribute (1/m)(phi(option_i) - phi(gold));
// terms exactly at the hinge boundary contribute zero.
FeatureMap mr_gradient(const MrLossInput& input, const EvalItem& item,
                       const LogLinearScorer& scorer);

struct TrainConfig {
  double margin = 1.0;
  double learning_rate = 0.05;
  size_t batch_size = 32;
  size_t epochs = 1;
  double weight_decay = 0.01;
  double warmup_fraction = 0.0;
  size_t eval_every = 0;  // batches between dev evaluations; 0 = epoch end
  uint64_t seed = 0;
};

struct TrainHistoryRow {
  size_t step = 0;
  double loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainResult {
  LogLinearScorer scorer;
  std::vector<TrainHistoryRow> history;
  double best_dev_accuracy = 0.0;
  size_t best_step = 0;
  bool used_final_fallback = false;  // set when the dev set was empty
};

// Mini-batch gradient descent on mr_loss with weight decay; returns the
// checkpoint with the highest dev accuracy (the earliest one on ties).
TrainResult train_mr(std::span<const EvalItem> train_items,
                     std::span<const EvalItem> dev_items,
                     const TrainConfig& cfg, const StopwordSet& stopwords);

struct MlmMaskConfig {
  double mask_probability = 0.5;

  void validate() const;
};

// Positions eligible for masking are the non-stopword tokens inside the
// head and tail spans; each is masked independently with the configured
// probability. May return an empty list.
std::vector<size_t> select_mlm_masks(const TokenSequence& seq,
                                     const MlmMaskConfig& cfg,
                                     const StopwordSet& stopwords, Rng& rng);

}  // namespace kgqa
