#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgqa/rng.hpp"

namespace kgqa {

struct FeaturizedSample {
  std::string id;
  std::vector<float> features;
  int label = 0;
};

struct ClassifierConfig {
  double learning_rate = 0.1;
  size_t epochs = 50;
  double l2 = 1e-4;
  size_t batch_size = 32;
  // 0 = infer from the training data (requires >= 2 distinct labels).
  size_t n_classes = 0;
};

struct LinearClassifier {
  size_t n_classes = 0;
  size_t dim = 0;
  std::vector<double> weights;  // class-major: weights[c * dim + f]
  std::vector<double> bias;
};

// Multinomial logistic regression fit by mini-batch gradient descent.
//
// The update rule is pinned so independent re-implementations reproduce it
// bit for bit: weights start at zero; each epoch shuffles the sample order
// once through `rng` and walks consecutive batches; per batch B with summed
// gradients g the update is
//   w[c][f] = w[c][f] - lr * (g_w[c][f] / |B| + l2 * w[c][f])
//   b[c]    = b[c]    - lr * (g_b[c] / |B|)
// with softmax computed as exp(z - max(z)) accumulated in class order.
LinearClassifier train_linear(std::span<const FeaturizedSample* const> samples,
                              const ClassifierConfig& cfg, Rng& rng,
                              std::vector<double>* epoch_loss = nullptr);

LinearClassifier train_linear(std::span<const FeaturizedSample> samples,
                              const ClassifierConfig& cfg, Rng& rng,
                              std::vector<double>* epoch_loss = nullptr);

// argmax of class scores; ties resolve to the lowest class index.
int predict(const LinearClassifier& clf, std::span<const float> features);

// Mean cross-entropy over the samples (diagnostic).
double mean_log_loss(const LinearClassifier& clf,
                     std::span<const FeaturizedSample* const> samples);

struct AfliteConfig {
  size_t ensemble_size = 64;  // N
  double tau = 0.75;
  size_t cutoff_k1 = 1;
  size_t cutoff_k2 = 1;
  size_t target_size = 0;  // O
  uint64_t seed = 0;
  ClassifierConfig classifier;
};

struct AfliteIteration {
  size_t iter = 0;
  std::vector<std::string> removed_train_ids;
  std::vector<std::string> removed_dev_ids;
  std::vector<double> removed_train_acc;
  std::vector<double> removed_dev_acc;
  std::array<size_t, 10> acc_histogram{};  // bins [0,0.1) .. [0.9,1.0]
};

struct AfliteResult {
  std::vector<FeaturizedSample> train;
  std::vector<FeaturizedSample> dev;
  std::vector<AfliteIteration> log;
};

// Iterative adversarial filtering with an ensemble of linear classifiers.
//
// While |train| > target_size: predictions are reset; for each of the N
// ensemble passes the train set is randomly partitioned into U (|U| =
// target_size) and V, a classifier is trained on U and votes on V plus the
// whole dev set; per-sample predictability Acc(s) is the fraction of votes
// matching the gold label (samples with no votes are excluded). The top-k1
// train and top-k2 dev samples with Acc > tau (sorted by Acc descending,
// ties by id) are removed; the loop stops early when fewer than k1 train
// samples qualify.
//
// Seed discipline: ensemble pass i of outer iteration t partitions with
// derive_seed(seed, t, i) and trains with derive_seed(seed, "clf", i).
//
// When |train| <= target_size the inputs are returned unchanged with an
// empty log.
AfliteResult run_aflite(std::vector<FeaturizedSample> train,
                        std::vector<FeaturizedSample> dev,
                        const AfliteConfig& cfg);

}  // namespace kgqa
