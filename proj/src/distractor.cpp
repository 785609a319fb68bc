#include "kgqa/distractor.hpp"

#include <algorithm>
#include <unordered_set>

namespace kgqa {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::adv_answer: return "adv-answer";
    case Strategy::adv_question: return "adv-question";
    case Strategy::adv_filter: return "adv-filter";
  }
  return "random";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "random") return Strategy::random;
  if (name == "adv-answer" || name == "adv_answer") return Strategy::adv_answer;
  if (name == "adv-question" || name == "adv_question") {
    return Strategy::adv_question;
  }
  if (name == "adv-filter" || name == "adv_filter") return Strategy::adv_filter;
  return std::nullopt;
}

DistractorEngine::DistractorEngine(const KnowledgeGraph& kg,
                                   const StopwordSet& stopwords,
                                   const NamePool& names,
                                   const EmbeddingTable* embeddings)
    : kg_(kg), stopwords_(stopwords), names_(names), embeddings_(embeddings) {
  node_keyword_hashes_.resize(kg.node_count());
  for (uint32_t i = 0; i < kg.node_count(); ++i) {
    auto tokens = keyword_tokens(strip_blanks(kg.node(i).label), stopwords_);
    auto& hashes = node_keyword_hashes_[i];
    hashes.reserve(tokens.size());
    for (const auto& tok : tokens) hashes.push_back(fnv1a64(tok));
    std::sort(hashes.begin(), hashes.end());
    hashes.erase(std::unique(hashes.begin(), hashes.end()), hashes.end());
  }
}

bool DistractorEngine::heads_share_keyword(uint32_t head_a,
                                           uint32_t head_b) const {
  const auto& a = node_keyword_hashes_[head_a];
  const auto& b = node_keyword_hashes_[head_b];
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

std::string DistractorEngine::candidate_text(
    uint32_t tail_index, const AgentNameMap& item_names) const {
  std::string text = strip_blanks(kg_.node(tail_index).label);
  std::vector<std::string> agents = find_agent_tokens(text);
  if (agents.empty()) return collapse_whitespace(text);

  // Agents already seen in the question keep their names; new ones take the
  // first unused names in pool order, so the text is a pure function of the
  // node and the item.
  AgentNameMap map = item_names;
  for (const auto& agent : agents) {
    bool mapped = false;
    for (const auto& [a, _] : map) {
      if (a == agent) {
        mapped = true;
        break;
      }
    }
    if (mapped) continue;
    for (const auto& name : names_.names) {
      bool used = false;
      for (const auto& [_, n] : map) {
        if (n == name) {
          used = true;
          break;
        }
      }
      if (!used) {
        map.emplace_back(agent, name);
        break;
      }
    }
  }
  return collapse_whitespace(replace_agent_tokens(text, map));
}

std::vector<DistractorCandidate> DistractorEngine::build_pool(
    const PartialQa& item, Rng& rng, size_t pool_cap) const {
  const Triple& triple = kg_.triples()[item.triple_index];
  const auto& same_relation = kg_.triples_with_relation(triple.relation);

  std::vector<DistractorCandidate> pool;
  std::unordered_set<std::string> seen_texts;
  seen_texts.insert(item.answer);

  LazyPermutation perm(same_relation.size(), rng);
  size_t pos = 0;
  while (pool.size() < pool_cap && perm.next(pos)) {
    uint32_t cand_index = same_relation[pos];
    if (cand_index == item.triple_index) continue;
    const Triple& cand = kg_.triples()[cand_index];
    if (heads_share_keyword(cand.head, triple.head)) continue;        // rule 2
    if (kg_.is_known_tail(triple.head, triple.relation, cand.tail)) { // rule 3
      continue;
    }
    std::string text = candidate_text(cand.tail, item.agent_names);
    if (text.empty() || !seen_texts.insert(text).second) continue;
    pool.push_back(DistractorCandidate{kg_.node(cand.tail).id, std::move(text),
                                       kg_.node(cand.head).id, cand.tail,
                                       cand_index});
  }
  return pool;
}

std::vector<int> DistractorEngine::rules_violated(
    const PartialQa& item, uint32_t candidate_triple) const {
  const Triple& triple = kg_.triples()[item.triple_index];
  const Triple& cand = kg_.triples()[candidate_triple];
  if (cand.relation != triple.relation) return {1};
  std::vector<int> violated;
  if (heads_share_keyword(cand.head, triple.head)) violated.push_back(2);
  if (kg_.is_known_tail(triple.head, triple.relation, cand.tail)) {
    violated.push_back(3);
  }
  return violated;
}

std::vector<DistractorCandidate> DistractorEngine::sample_random(
    std::span<const DistractorCandidate> pool, size_t k, Rng& rng) {
  if (pool.size() < k) {
    fail(ErrorCode::insufficient_distractors,
         "sample_random: pool holds " + std::to_string(pool.size()) +
             " candidates, need " + std::to_string(k));
  }
  std::vector<DistractorCandidate> out;
  out.reserve(k);
  for (size_t i : rng.pick_indices(pool.size(), k)) out.push_back(pool[i]);
  return out;
}

std::vector<DistractorCandidate> DistractorEngine::sample_adv(
    std::span<const DistractorCandidate> pool, size_t k,
    std::span<const float> reference, double bound) const {
  if (embeddings_ == nullptr) {
    fail(ErrorCode::config, "sample_adv: no embedding table configured");
  }
  struct Scored {
    double sim;
    size_t pool_index;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    double sim = cosine(embeddings_->vec(pool[i].tail_id), reference);
    scored.push_back({sim, i});
  }
  std::sort(scored.begin(), scored.end(), [&pool](const Scored& a, const Scored& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return pool[a.pool_index].tail_id < pool[b.pool_index].tail_id;
  });
  std::vector<DistractorCandidate> out;
  for (const Scored& s : scored) {
    if (out.size() == k) break;
    if (s.sim < bound) out.push_back(pool[s.pool_index]);
  }
  if (out.size() < k) {
    fail(ErrorCode::insufficient_distractors,
         "sample_adv: only " + std::to_string(out.size()) +
             " candidates under the similarity bound, need " +
             std::to_string(k));
  }
  return out;
}

QaItem DistractorEngine::assemble_item(
    PartialQa partial, std::vector<DistractorCandidate> distractors, Rng& rng) {
  std::unordered_set<std::string> texts;
  texts.insert(partial.answer);
  for (const auto& d : distractors) {
    if (!texts.insert(d.text).second) {
      fail(ErrorCode::data, "assemble_item: duplicate option text '" + d.text + "'");
    }
  }
  size_t n = distractors.size() + 1;
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  QaItem item;
  item.options.resize(n);
  for (size_t pos = 0; pos < n; ++pos) {
    size_t original = order[pos];
    if (original == 0) {
      item.options[pos] = partial.answer;
      item.answer_index = pos;
    } else {
      item.options[pos] = distractors[original - 1].text;
    }
  }
  item.partial = std::move(partial);
  item.distractors = std::move(distractors);
  return item;
}

std::optional<QaItem> DistractorEngine::make_item(
    const PartialQa& partial, const StrategyConfig& cfg,
    std::string* drop_reason) const {
  const Triple& triple = kg_.triples()[partial.triple_index];
  auto uid = static_cast<uint64_t>(partial.triple_index);

  Rng pool_rng(derive_seed(cfg.seed, "pool", uid));
  std::vector<DistractorCandidate> pool = build_pool(partial, pool_rng, cfg.pool_cap);

  if ((cfg.strategy == Strategy::adv_answer ||
       cfg.strategy == Strategy::adv_question) &&
      embeddings_ == nullptr) {
    fail(ErrorCode::config,
         "make_item: adversarial strategies require an embedding table");
  }

  std::vector<DistractorCandidate> chosen;
  try {
    switch (cfg.strategy) {
      case Strategy::random:
      case Strategy::adv_filter: {
        Rng rng(derive_seed(cfg.seed, "sample", uid));
        chosen = sample_random(pool, cfg.k, rng);
        break;
      }
      case Strategy::adv_answer: {
        std::span<const float> reference =
            embeddings_->vec(kg_.node(triple.tail).id);
        chosen = sample_adv(pool, cfg.k, reference, cfg.sim_upper_bound);
        break;
      }
      case Strategy::adv_question: {
        // nodes are the embedded unit; the question is a lexicalized head
        std::span<const float> reference =
            embeddings_->vec(kg_.node(triple.head).id);
        chosen = sample_adv(pool, cfg.k, reference, cfg.sim_upper_bound);
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::insufficient_distractors) {
      if (drop_reason != nullptr) *drop_reason = "insufficient_distractors";
      return std::nullopt;
    }
    throw;
  }

  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", uid));
  QaItem item = assemble_item(partial, std::move(chosen), shuffle_rng);
  item.strategy = cfg.strategy;
  item.relation = triple.relation;
  item.source = triple.source;
  return item;
}

}  // namespace kgqa
