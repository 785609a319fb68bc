#include "kgqa/aflite.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "kgqa/error.hpp"

namespace kgqa {

namespace {

size_t infer_classes(std::span<const FeaturizedSample* const> samples) {
  int max_label = -1;
  std::unordered_set<int> distinct;
  for (const auto* s : samples) {
    if (s->label < 0) {
      fail(ErrorCode::data, "train_linear: negative label for '" + s->id + "'");
    }
    max_label = std::max(max_label, s->label);
    distinct.insert(s->label);
  }
  if (distinct.size() < 2) {
    fail(ErrorCode::degenerate_training,
         "train_linear: training data contains a single class");
  }
  return static_cast<size_t>(max_label) + 1;
}

void softmax_inplace(std::vector<double>& z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void class_scores(const LinearClassifier& clf, std::span<const float> x,
                  std::vector<double>& z) {
  z.assign(clf.n_classes, 0.0);
  for (size_t c = 0; c < clf.n_classes; ++c) {
    double acc = clf.bias[c];
    const double* w = clf.weights.data() + c * clf.dim;
    for (size_t f = 0; f < clf.dim; ++f) {
      acc += w[f] * x[f];
    }
    z[c] = acc;
  }
}

}  // namespace

LinearClassifier train_linear(std::span<const FeaturizedSample* const> samples,
                              const ClassifierConfig& cfg, Rng& rng,
                              std::vector<double>* epoch_loss) {
  if (samples.size() < 2) {
    fail(ErrorCode::data, "train_linear: need at least two samples");
  }
  size_t dim = samples[0]->features.size();
  for (const auto* s : samples) {
    if (s->features.size() != dim) {
      fail(ErrorCode::shape, "train_linear: inconsistent feature length for '" +
                               s->id + "'");
    }
  }
  size_t n_classes = cfg.n_classes > 0 ? cfg.n_classes : infer_classes(samples);
  for (const auto* s : samples) {
    if (s->label < 0 || static_cast<size_t>(s->label) >= n_classes) {
      fail(ErrorCode::data, "train_linear: label out of range for '" + s->id + "'");
    }
  }

  LinearClassifier clf;
  clf.n_classes = n_classes;
  clf.dim = dim;
  clf.weights.assign(n_classes * dim, 0.0);
  clf.bias.assign(n_classes, 0.0);

  std::vector<size_t> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> z;
  std::vector<double> grad_w(n_classes * dim);
  std::vector<double> grad_b(n_classes);

  if (epoch_loss != nullptr) epoch_loss->clear();

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      size_t end = std::min(start + cfg.batch_size, order.size());
      double batch_n = static_cast<double>(end - start);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (size_t i = start; i < end; ++i) {
        const FeaturizedSample& s = *samples[order[i]];
        class_scores(clf, s.features, z);
        softmax_inplace(z);
        for (size_t c = 0; c < n_classes; ++c) {
          double d = z[c] - (static_cast<int>(c) == s.label ? 1.0 : 0.0);
          grad_b[c] += d;
          double* gw = grad_w.data() + c * dim;
          for (size_t f = 0; f < dim; ++f) {
            gw[f] += d * s.features[f];
          }
        }
      }
      for (size_t c = 0; c < n_classes; ++c) {
        double* w = clf.weights.data() + c * dim;
        const double* gw = grad_w.data() + c * dim;
        for (size_t f = 0; f < dim; ++f) {
          w[f] = w[f] - cfg.learning_rate * (gw[f] / batch_n + cfg.l2 * w[f]);
        }
        clf.bias[c] = clf.bias[c] - cfg.learning_rate * (grad_b[c] / batch_n);
      }
    }
    if (epoch_loss != nullptr) {
      epoch_loss->push_back(mean_log_loss(clf, samples));
    }
  }
  return clf;
}

LinearClassifier train_linear(std::span<const FeaturizedSample> samples,
                              const ClassifierConfig& cfg, Rng& rng,
                              std::vector<double>* epoch_loss) {
  std::vector<const FeaturizedSample*> ptrs;
  ptrs.reserve(samples.size());
  for (const auto& s : samples) ptrs.push_back(&s);
  return train_linear(std::span<const FeaturizedSample* const>(ptrs), cfg, rng,
                      epoch_loss);
}

int predict(const LinearClassifier& clf, std::span<const float> features) {
  if (features.size() != clf.dim) {
    fail(ErrorCode::shape, "predict: feature length " +
                               std::to_string(features.size()) +
                               " does not match classifier dim " +
                               std::to_string(clf.dim));
  }
  std::vector<double> z;
  class_scores(clf, features, z);
  size_t best = 0;
  for (size_t c = 1; c < z.size(); ++c) {
    if (z[c] > z[best]) best = c;
  }
  return static_cast<int>(best);
}

double mean_log_loss(const LinearClassifier& clf,
                     std::span<const FeaturizedSample* const> samples) {
  double total = 0.0;
  std::vector<double> z;
  for (const auto* s : samples) {
    class_scores(clf, s->features, z);
    softmax_inplace(z);
    total += -std::log(std::max(z[static_cast<size_t>(s->label)], 1e-300));
  }
  return total / static_cast<double>(samples.size());
}

namespace {

struct Tracked {
  const FeaturizedSample* sample;
  size_t votes = 0;
  size_t correct = 0;

  void reset() {
    votes = 0;
    correct = 0;
  }
  bool has_acc() const { return votes > 0; }
  double acc() const { return static_cast<double>(correct) / votes; }
};

// Qualifying samples sorted by Acc descending, ties by id ascending; at most
// k are returned.
std::vector<size_t> select_top(const std::vector<Tracked>& pool,
                               const std::vector<size_t>& live, double tau,
                               size_t k) {
  std::vector<size_t> qualifying;
  for (size_t idx : live) {
    const Tracked& t = pool[idx];
    if (t.has_acc() && t.acc() > tau) qualifying.push_back(idx);
  }
  std::sort(qualifying.begin(), qualifying.end(),
            [&pool](size_t a, size_t b) {
              double aa = pool[a].acc();
              double ab = pool[b].acc();
              if (aa != ab) return aa > ab;
              return pool[a].sample->id < pool[b].sample->id;
            });
  if (qualifying.size() > k) qualifying.resize(k);
  return qualifying;
}

}  // namespace

AfliteResult run_aflite(std::vector<FeaturizedSample> train,
                        std::vector<FeaturizedSample> dev,
                        const AfliteConfig& cfg) {
  if (cfg.ensemble_size == 0) {
    fail(ErrorCode::config, "run_aflite: ensemble_size must be >= 1");
  }
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) {
    fail(ErrorCode::config, "run_aflite: tau must lie in (0, 1]");
  }
  if (cfg.cutoff_k1 == 0) {
    fail(ErrorCode::config, "run_aflite: cutoff_k1 must be >= 1");
  }
  {
    std::unordered_set<std::string> ids;
    for (const auto& s : train) {
      if (!ids.insert(s.id).second) {
        fail(ErrorCode::data, "run_aflite: duplicate sample id '" + s.id + "'");
      }
    }
    for (const auto& s : dev) {
      if (!ids.insert(s.id).second) {
        fail(ErrorCode::data, "run_aflite: duplicate sample id '" + s.id + "'");
      }
    }
  }

  AfliteResult result;
  if (train.size() <= cfg.target_size) {
    result.train = std::move(train);
    result.dev = std::move(dev);
    return result;
  }

  ClassifierConfig clf_cfg = cfg.classifier;
  if (clf_cfg.n_classes == 0) {
    int max_label = 0;
    for (const auto& s : train) max_label = std::max(max_label, s.label);
    for (const auto& s : dev) max_label = std::max(max_label, s.label);
    clf_cfg.n_classes = static_cast<size_t>(max_label) + 1;
    if (clf_cfg.n_classes < 2) clf_cfg.n_classes = 2;
  }

  std::vector<Tracked> tracked;
  tracked.reserve(train.size() + dev.size());
  for (const auto& s : train) tracked.push_back(Tracked{&s});
  for (const auto& s : dev) tracked.push_back(Tracked{&s});
  std::vector<size_t> live_train(train.size());
  for (size_t i = 0; i < train.size(); ++i) live_train[i] = i;
  std::vector<size_t> live_dev(dev.size());
  for (size_t i = 0; i < dev.size(); ++i) live_dev[i] = train.size() + i;

  size_t iter = 0;
  while (live_train.size() > cfg.target_size) {
    ++iter;
    for (size_t idx : live_train) tracked[idx].reset();
    for (size_t idx : live_dev) tracked[idx].reset();

    for (size_t i = 1; i <= cfg.ensemble_size; ++i) {
      Rng part_rng(derive_seed(cfg.seed, static_cast<uint64_t>(iter),
                               static_cast<uint64_t>(i)));
      std::vector<size_t> perm = live_train;
      part_rng.shuffle(perm);

      std::vector<const FeaturizedSample*> subset_u;
      subset_u.reserve(cfg.target_size);
      for (size_t j = 0; j < cfg.target_size; ++j) {
        subset_u.push_back(tracked[perm[j]].sample);
      }

      Rng clf_rng(derive_seed(cfg.seed, "clf", static_cast<uint64_t>(i)));
      LinearClassifier clf = train_linear(
          std::span<const FeaturizedSample* const>(subset_u), clf_cfg, clf_rng);

      auto vote = [&tracked, &clf](size_t idx) {
        Tracked& t = tracked[idx];
        int p = predict(clf, t.sample->features);
        ++t.votes;
        if (p == t.sample->label) ++t.correct;
      };
      for (size_t j = cfg.target_size; j < perm.size(); ++j) vote(perm[j]);
      for (size_t idx : live_dev) vote(idx);
    }

    AfliteIteration record;
    record.iter = iter;
    for (size_t idx : live_train) {
      if (tracked[idx].has_acc()) {
        double a = tracked[idx].acc();
        record.acc_histogram[std::min<size_t>(9, static_cast<size_t>(a * 10.0))]++;
      }
    }
    for (size_t idx : live_dev) {
      if (tracked[idx].has_acc()) {
        double a = tracked[idx].acc();
        record.acc_histogram[std::min<size_t>(9, static_cast<size_t>(a * 10.0))]++;
      }
    }

    std::vector<size_t> s1 = select_top(tracked, live_train, cfg.tau, cfg.cutoff_k1);
    std::vector<size_t> s2 = select_top(tracked, live_dev, cfg.tau, cfg.cutoff_k2);

    std::unordered_set<size_t> removed(s1.begin(), s1.end());
    for (size_t idx : s1) {
      record.removed_train_ids.push_back(tracked[idx].sample->id);
      record.removed_train_acc.push_back(tracked[idx].acc());
    }
    for (size_t idx : s2) {
      removed.insert(idx);
      record.removed_dev_ids.push_back(tracked[idx].sample->id);
      record.removed_dev_acc.push_back(tracked[idx].acc());
    }
    auto prune = [&removed](std::vector<size_t>& live) {
      live.erase(std::remove_if(live.begin(), live.end(),
                                [&removed](size_t idx) {
                                  return removed.count(idx) > 0;
                                }),
                 live.end());
    };
    prune(live_train);
    prune(live_dev);
    result.log.push_back(std::move(record));

    if (s1.size() < cfg.cutoff_k1) break;
  }

  result.train.reserve(live_train.size());
  for (size_t idx : live_train) result.train.push_back(*tracked[idx].sample);
  result.dev.reserve(live_dev.size());
  for (size_t idx : live_dev) result.dev.push_back(*tracked[idx].sample);
  return result;
}

}  // namespace kgqa
