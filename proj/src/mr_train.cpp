#include "kgqa/mr_train.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "kgqa/error.hpp"

namespace kgqa {

void MrLossInput::validate() const {
  if (scores.size() < 2) {
    fail(ErrorCode::contract, "mr_loss: need at least two scores");
  }
  if (gold >= scores.size()) {
    fail(ErrorCode::contract, "mr_loss: gold index out of range");
  }
  if (!(margin > 0.0)) {
    fail(ErrorCode::contract, "mr_loss: margin must be positive");
  }
}

double mr_loss(const MrLossInput& input) {
  input.validate();
  double m = static_cast<double>(input.scores.size());
  double gold_score = input.scores[input.gold];
  double total = 0.0;
  for (size_t i = 0; i < input.scores.size(); ++i) {
    if (i == input.gold) continue;
    total += std::max(0.0, input.margin - gold_score + input.scores[i]);
  }
  return total / m;
}

FeatureMap LogLinearScorer::featurize(std::string_view question,
                                      std::string_view option,
                                      const StopwordSet* stopwords) {
  FeatureMap features;
  std::vector<std::string> option_tokens = tokenize(option);
  for (const auto& tok : option_tokens) {
    features["o:" + tok] += 1.0;
  }
  if (stopwords != nullptr) {
    std::vector<std::string> q_keywords = keyword_tokens(question, *stopwords);
    std::vector<std::string> o_keywords = keyword_tokens(option, *stopwords);
    for (const auto& q : q_keywords) {
      for (const auto& o : o_keywords) {
        features["qo:" + q + "|" + o] += 1.0;
      }
    }
  }
  return features;
}

double LogLinearScorer::score(std::string_view question,
                              std::string_view option) const {
  double total = 0.0;
  for (const auto& [feature, count] : featurize(question, option, stopwords_)) {
    auto it = weights_.find(feature);
    if (it != weights_.end()) total += it->second * count;
  }
  return total;
}

std::vector<double> LogLinearScorer::score_item(const EvalItem& item) const {
  std::vector<double> out;
  out.reserve(item.options.size());
  std::string full_question =
      item.context.empty() ? item.question : item.context + " " + item.question;
  for (const auto& option : item.options) {
    out.push_back(score(full_question, option));
  }
  return out;
}

size_t LogLinearScorer::predict(const EvalItem& item) const {
  std::vector<double> scores = score_item(item);
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double LogLinearScorer::accuracy(std::span<const EvalItem> items) const {
  if (items.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& item : items) {
    if (static_cast<int>(predict(item)) == item.answer_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

void LogLinearScorer::save(std::ostream& out,
                           const std::string& metadata_json) const {
  nlohmann::json doc;
  doc["weights"] = nlohmann::json::object();
  for (const auto& [feature, weight] : weights_) {
    doc["weights"][feature] = weight;
  }
  doc["metadata"] = nlohmann::json::parse(metadata_json);
  out << doc.dump(2) << '\n';
}

LogLinearScorer LogLinearScorer::load(std::istream& in,
                                      const StopwordSet* stopwords,
                                      std::string* metadata_json) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("LogLinearScorer: invalid JSON: ") + e.what());
  }
  LogLinearScorer scorer(stopwords);
  if (!doc.contains("weights") || !doc["weights"].is_object()) {
    fail(ErrorCode::parse, "LogLinearScorer: checkpoint is missing 'weights'");
  }
  for (auto it = doc["weights"].begin(); it != doc["weights"].end(); ++it) {
    scorer.weights_[it.key()] = it.value().get<double>();
  }
  if (metadata_json != nullptr && doc.contains("metadata")) {
    *metadata_json = doc["metadata"].dump();
  }
  return scorer;
}

FeatureMap mr_gradient(const MrLossInput& input, const EvalItem& item,
                       const LogLinearScorer& scorer) {
  input.validate();
  if (input.scores.size() != item.options.size()) {
    fail(ErrorCode::contract, "mr_gradient: scores do not match options");
  }
  FeatureMap grad;
  double m = static_cast<double>(input.scores.size());
  double gold_score = input.scores[input.gold];
  std::string full_question =
      item.context.empty() ? item.question : item.context + " " + item.question;
  FeatureMap gold_features = LogLinearScorer::featurize(
      full_question, item.options[input.gold], scorer.stopwords());

  for (size_t i = 0; i < input.scores.size(); ++i) {
    if (i == input.gold) continue;
    if (input.margin - gold_score + input.scores[i] <= 0.0) continue;
    FeatureMap option_features = LogLinearScorer::featurize(
        full_question, item.options[i], scorer.stopwords());
    for (const auto& [feature, count] : option_features) {
      grad[feature] += count / m;
    }
    for (const auto& [feature, count] : gold_features) {
      grad[feature] -= count / m;
    }
  }
  return grad;
}

TrainResult train_mr(std::span<const EvalItem> train_items,
                     std::span<const EvalItem> dev_items,
                     const TrainConfig& cfg, const StopwordSet& stopwords) {
  if (train_items.empty()) {
    fail(ErrorCode::empty_input, "train_mr: no training items");
  }
  if (!(cfg.learning_rate >= 0.0) || cfg.batch_size == 0 || cfg.epochs == 0) {
    fail(ErrorCode::config, "train_mr: bad learning rate, batch size or epochs");
  }

  TrainResult result;
  result.scorer = LogLinearScorer(&stopwords);
  FeatureMap& weights = result.scorer.weights();

  Rng rng(derive_seed(cfg.seed, "mr-train"));
  std::vector<size_t> order(train_items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  size_t batches_per_epoch =
      (train_items.size() + cfg.batch_size - 1) / cfg.batch_size;
  size_t total_steps = batches_per_epoch * cfg.epochs;
  size_t warmup_steps =
      static_cast<size_t>(cfg.warmup_fraction * static_cast<double>(total_steps));

  FeatureMap best_weights;
  double best_acc = -1.0;
  size_t best_step = 0;
  size_t step = 0;
  double loss_accum = 0.0;
  size_t loss_count = 0;

  auto maybe_checkpoint = [&]() {
    double acc = dev_items.empty() ? 0.0 : result.scorer.accuracy(dev_items);
    double mean_loss = loss_count > 0 ? loss_accum / loss_count : 0.0;
    result.history.push_back(TrainHistoryRow{step, mean_loss, acc});
    loss_accum = 0.0;
    loss_count = 0;
    if (!dev_items.empty() && acc > best_acc) {
      best_acc = acc;
      best_step = step;
      best_weights = weights;
    }
  };

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      size_t end = std::min(start + cfg.batch_size, order.size());
      double batch_n = static_cast<double>(end - start);

      FeatureMap batch_grad;
      for (size_t i = start; i < end; ++i) {
        const EvalItem& item = train_items[order[i]];
        MrLossInput input;
        input.scores = result.scorer.score_item(item);
        input.gold = static_cast<size_t>(item.answer_index);
        input.margin = cfg.margin;
        loss_accum += mr_loss(input);
        ++loss_count;
        for (const auto& [feature, g] : mr_gradient(input, item, result.scorer)) {
          batch_grad[feature] += g;
        }
      }

      ++step;
      double lr = cfg.learning_rate;
      if (warmup_steps > 0 && step < warmup_steps) {
        lr *= static_cast<double>(step) / static_cast<double>(warmup_steps);
      }
      for (const auto& [feature, g] : batch_grad) {
        weights[feature] -= lr * (g / batch_n);
      }
      if (cfg.weight_decay > 0.0) {
        for (auto& [feature, w] : weights) {
          w -= lr * cfg.weight_decay * w;
        }
      }
      if (cfg.eval_every > 0 && step % cfg.eval_every == 0) maybe_checkpoint();
    }
    if (cfg.eval_every == 0) maybe_checkpoint();
  }
  if (result.history.empty() || result.history.back().step != step) {
    maybe_checkpoint();
  }

  if (dev_items.empty()) {
    result.used_final_fallback = true;
    result.best_dev_accuracy = 0.0;
    result.best_step = step;
  } else {
    result.scorer.weights() = best_weights;
    result.best_dev_accuracy = best_acc;
    result.best_step = best_step;
  }
  return result;
}

void MlmMaskConfig::validate() const {
  if (!(mask_probability > 0.0 && mask_probability <= 1.0)) {
    fail(ErrorCode::config, "MlmMaskConfig: mask probability must lie in (0, 1]");
  }
}

std::vector<size_t> select_mlm_masks(const TokenSequence& seq,
                                     const MlmMaskConfig& cfg,
                                     const StopwordSet& stopwords, Rng& rng) {
  cfg.validate();
  seq.validate();
  std::vector<size_t> masked;
  for (size_t i = 0; i < seq.tokens.size(); ++i) {
    if (!seq.head_span.contains(i) && !seq.tail_span.contains(i)) continue;
    if (stopwords.contains(seq.tokens[i])) continue;
    if (rng.bernoulli(cfg.mask_probability)) masked.push_back(i);
  }
  return masked;
}

}  // namespace kgqa
