#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgqa/error.hpp"

namespace kgqa {

struct Node {
  std::string id;
  std::string label;
  std::string source;
};

struct Triple {
  uint32_t head = 0;
  uint32_t tail = 0;
  std::string relation;
  std::string sentence;  // empty when the edge carries no lexicalization
  std::string source;
};

inline constexpr uint32_t kNoNode = UINT32_MAX;

// Immutable after construction; all lookups are read-only and safe to share
// across threads.
class KnowledgeGraph {
 public:
  uint32_t add_node(const std::string& id, const std::string& label,
                    const std::string& source = "");
  // Returns false (and adds nothing) when the edge would violate the triple
  // invariants (head == tail).
  bool add_triple(const std::string& head_id, const std::string& relation,
                  const std::string& tail_id, const std::string& sentence = "",
                  const std::string& source = "");

  size_t node_count() const { return nodes_.size(); }
  const Node& node(uint32_t index) const { return nodes_[index]; }
  uint32_t node_index(const std::string& id) const;

  const std::vector<Triple>& triples() const { return triples_; }
  const std::vector<uint32_t>& triples_with_relation(
      const std::string& relation) const;
  std::vector<std::string> relations() const;

  // answer set lookup: the tails t with (head, relation, t) present.
  bool is_known_tail(uint32_t head, const std::string& relation,
                     uint32_t tail) const;
  std::span<const uint32_t> known_tails(uint32_t head,
                                        const std::string& relation) const;

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, uint32_t> node_index_;
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::vector<uint32_t>> by_relation_;
  // relation -> head index -> sorted tail indices
  std::unordered_map<std::string,
                     std::unordered_map<uint32_t, std::vector<uint32_t>>>
      answer_sets_;
};

struct ColumnSpec {
  std::string node1 = "node1";
  std::string relation = "relation";
  std::string node2 = "node2";
  std::string node1_label = "node1;label";
  std::string node2_label = "node2;label";
  std::string sentence = "sentence";  // optional
  std::string source = "source";      // optional
};

struct ParseReport {
  size_t rows_total = 0;
  size_t rows_valid = 0;
  size_t rows_skipped = 0;
  bool header_detected = false;
};

// Parses tab-separated edge rows. A header row is auto-detected by exact
// column-name match against the spec; without one the columns are taken
// positionally as (node1, relation, node2, node1_label, node2_label,
// sentence, source). Malformed rows are counted and skipped.
KnowledgeGraph parse_edges(std::istream& in, const ColumnSpec& spec,
                           ParseReport* report = nullptr);

// Canonical serialization of a graph back to the edge TSV format; parsing
// the output yields an equal graph.
void write_edges(const KnowledgeGraph& kg, std::ostream& out,
                 const ColumnSpec& spec = {});

KnowledgeGraph filter_relations(const KnowledgeGraph& kg,
                                const std::vector<std::string>& allowlist);

enum class Split { train, dev, test };

const char* split_name(Split s);

struct Partition {
  Split name = Split::train;
  std::vector<uint32_t> triple_ids;
};

struct TrainDevSplit {
  Partition train;
  Partition dev;
};

struct TrainDevTestSplit {
  Partition train;
  Partition dev;
  Partition test;
};

// Uniformly samples round(dev_fraction * |triples|) triples into dev;
// train is the complement. Deterministic for a fixed seed.
TrainDevSplit partition_cwwv(const KnowledgeGraph& kg, double dev_fraction,
                             uint64_t seed);

enum class UnmappedHeadPolicy { drop, train };

// Routes each triple by its head node's split so no head id ever appears in
// two partitions.
TrainDevTestSplit partition_atomic(
    const KnowledgeGraph& kg,
    const std::unordered_map<std::string, Split>& head_splits,
    UnmappedHeadPolicy policy = UnmappedHeadPolicy::drop);

// TSV `head_id \t {train|dev|test}`. Conflicting duplicate heads are a
// config error.
std::unordered_map<std::string, Split> load_split_file(std::istream& in);

// One relation id per line; '#' starts a comment.
std::vector<std::string> load_relation_allowlist(std::istream& in);

}  // namespace kgqa
