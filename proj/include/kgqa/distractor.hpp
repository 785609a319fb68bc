#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgqa/embedding.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/qa.hpp"
#include "kgqa/rng.hpp"

namespace kgqa {

enum class Strategy { random, adv_answer, adv_question, adv_filter };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct StrategyConfig {
  Strategy strategy = Strategy::random;
  size_t k = 2;
  double sim_upper_bound = 0.6;
  size_t pool_cap = 100;
  uint64_t seed = 0;
};

struct DistractorCandidate {
  std::string tail_id;
  std::string text;
  std::string origin_head_id;
  uint32_t tail_index = 0;
  uint32_t triple_index = 0;
};

struct QaItem {
  PartialQa partial;
  std::vector<DistractorCandidate> distractors;
  std::vector<std::string> options;  // answer + distractors, shuffled
  size_t answer_index = 0;
  Strategy strategy = Strategy::random;
  std::string relation;
  std::string source;
};

// Builds candidate pools and samples distractors over an immutable graph.
//
// A candidate triple (h', r', t') enters the pool for an item built from
// (h, r, t) only when all three rules hold:
//   (1) r' = r                      — same semantic role
//   (2) h' shares no non-stop token with h
//   (3) t' is not a known tail of (h, r) — never a correct answer
// Candidates are drawn by seeded sampling up to pool_cap and de-duplicated
// by option text.
class DistractorEngine {
 public:
  DistractorEngine(const KnowledgeGraph& kg, const StopwordSet& stopwords,
                   const NamePool& names,
                   const EmbeddingTable* embeddings = nullptr);

  std::vector<DistractorCandidate> build_pool(const PartialQa& item, Rng& rng,
                                              size_t pool_cap) const;

  // Audit helper: which rules exclude this candidate triple for this item.
  // Rule (1) screens first; rules (2) and (3) are reported together for
  // same-relation candidates. Empty result = admissible.
  std::vector<int> rules_violated(const PartialQa& item,
                                  uint32_t candidate_triple) const;

  // k distinct candidates, uniform without replacement.
  static std::vector<DistractorCandidate> sample_random(
      std::span<const DistractorCandidate> pool, size_t k, Rng& rng);

  // Top-k candidates by cosine similarity to the reference, restricted to
  // similarity < bound; ties broken by tail id so the result is independent
  // of pool order.
  std::vector<DistractorCandidate> sample_adv(
      std::span<const DistractorCandidate> pool, size_t k,
      std::span<const float> reference, double bound) const;

  static QaItem assemble_item(PartialQa partial,
                              std::vector<DistractorCandidate> distractors,
                              Rng& rng);

  // Full per-item path: pool, strategy sampling, option shuffling. Empty
  // optional (reason "insufficient_distractors") when the pool cannot
  // support k distractors under the strategy.
  std::optional<QaItem> make_item(const PartialQa& partial,
                                  const StrategyConfig& cfg,
                                  std::string* drop_reason = nullptr) const;

  const KnowledgeGraph& kg() const { return kg_; }

 private:
  std::string candidate_text(uint32_t tail_index,
                             const AgentNameMap& item_names) const;
  bool heads_share_keyword(uint32_t head_a, uint32_t head_b) const;

  const KnowledgeGraph& kg_;
  const StopwordSet& stopwords_;
  const NamePool& names_;
  const EmbeddingTable* embeddings_;
  // per-node sorted keyword-token hashes, for fast rule-2 checks
  std::vector<std::vector<uint64_t>> node_keyword_hashes_;
};

}  // namespace kgqa
