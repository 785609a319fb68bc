#include "kgqa/kg.hpp"

#include <algorithm>
#include <cmath>

#include "kgqa/rng.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

uint32_t KnowledgeGraph::add_node(const std::string& id,
                                  const std::string& label,
                                  const std::string& source) {
  auto it = node_index_.find(id);
  if (it != node_index_.end()) return it->second;
  auto index = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(Node{id, label, source});
  node_index_.emplace(id, index);
  return index;
}

bool KnowledgeGraph::add_triple(const std::string& head_id,
                                const std::string& relation,
                                const std::string& tail_id,
                                const std::string& sentence,
                                const std::string& source) {
  if (head_id == tail_id) return false;
  auto head_it = node_index_.find(head_id);
  auto tail_it = node_index_.find(tail_id);
  if (head_it == node_index_.end() || tail_it == node_index_.end()) {
    return false;
  }
  uint32_t head = head_it->second;
  uint32_t tail = tail_it->second;
  auto triple_id = static_cast<uint32_t>(triples_.size());
  triples_.push_back(Triple{head, tail, relation, sentence, source});
  by_relation_[relation].push_back(triple_id);
  auto& tails = answer_sets_[relation][head];
  auto pos = std::lower_bound(tails.begin(), tails.end(), tail);
  if (pos == tails.end() || *pos != tail) tails.insert(pos, tail);
  return true;
}

uint32_t KnowledgeGraph::node_index(const std::string& id) const {
  auto it = node_index_.find(id);
  return it == node_index_.end() ? kNoNode : it->second;
}

const std::vector<uint32_t>& KnowledgeGraph::triples_with_relation(
    const std::string& relation) const {
  static const std::vector<uint32_t> kEmpty;
  auto it = by_relation_.find(relation);
  return it == by_relation_.end() ? kEmpty : it->second;
}

std::vector<std::string> KnowledgeGraph::relations() const {
  std::vector<std::string> out;
  out.reserve(by_relation_.size());
  for (const auto& [rel, _] : by_relation_) out.push_back(rel);
  std::sort(out.begin(), out.end());
  return out;
}

bool KnowledgeGraph::is_known_tail(uint32_t head, const std::string& relation,
                                   uint32_t tail) const {
  auto tails = known_tails(head, relation);
  return std::binary_search(tails.begin(), tails.end(), tail);
}

std::span<const uint32_t> KnowledgeGraph::known_tails(
    uint32_t head, const std::string& relation) const {
  auto rel_it = answer_sets_.find(relation);
  if (rel_it == answer_sets_.end()) return {};
  auto head_it = rel_it->second.find(head);
  if (head_it == rel_it->second.end()) return {};
  return head_it->second;
}

namespace {

struct ColumnIndices {
  size_t node1 = 0;
  size_t relation = 1;
  size_t node2 = 2;
  size_t node1_label = 3;
  size_t node2_label = 4;
  // npos means "column not present"
  size_t sentence = 5;
  size_t source = 6;
  size_t required_width = 5;
};

constexpr size_t kMissing = static_cast<size_t>(-1);

std::optional<ColumnIndices> match_header(const std::vector<std::string>& cells,
                                          const ColumnSpec& spec) {
  auto find = [&cells](const std::string& name) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] == name) return i;
    }
    return kMissing;
  };
  ColumnIndices idx;
  idx.node1 = find(spec.node1);
  idx.relation = find(spec.relation);
  idx.node2 = find(spec.node2);
  if (idx.node1 == kMissing || idx.relation == kMissing ||
      idx.node2 == kMissing) {
    return std::nullopt;
  }
  idx.node1_label = find(spec.node1_label);
  idx.node2_label = find(spec.node2_label);
  idx.sentence = find(spec.sentence);
  idx.source = find(spec.source);
  idx.required_width = 0;
  for (size_t col : {idx.node1, idx.relation, idx.node2, idx.node1_label,
                     idx.node2_label}) {
    if (col != kMissing) idx.required_width = std::max(idx.required_width, col + 1);
  }
  return idx;
}

std::string cell_at(const std::vector<std::string>& cells, size_t index) {
  if (index == kMissing || index >= cells.size()) return "";
  return cells[index];
}

}  // namespace

KnowledgeGraph parse_edges(std::istream& in, const ColumnSpec& spec,
                           ParseReport* report) {
  if (!in) fail(ErrorCode::io, "parse_edges: unreadable input stream");

  KnowledgeGraph kg;
  ParseReport local;
  ColumnIndices idx;
  bool first_line = true;

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line, '\t');
    if (first_line) {
      first_line = false;
      if (auto header = match_header(cells, spec)) {
        idx = *header;
        local.header_detected = true;
        continue;
      }
    }
    ++local.rows_total;

    if (cells.size() < idx.required_width) {
      ++local.rows_skipped;
      continue;
    }
    std::string head_id = collapse_whitespace(cell_at(cells, idx.node1));
    std::string relation = collapse_whitespace(cell_at(cells, idx.relation));
    std::string tail_id = collapse_whitespace(cell_at(cells, idx.node2));
    std::string head_label = collapse_whitespace(cell_at(cells, idx.node1_label));
    std::string tail_label = collapse_whitespace(cell_at(cells, idx.node2_label));
    if (head_label.empty()) head_label = head_id;
    if (tail_label.empty()) tail_label = tail_id;

    if (head_id.empty() || relation.empty() || tail_id.empty() ||
        head_label.empty() || tail_label.empty() || head_id == tail_id) {
      ++local.rows_skipped;
      continue;
    }
    std::string sentence = collapse_whitespace(cell_at(cells, idx.sentence));
    std::string source = collapse_whitespace(cell_at(cells, idx.source));
    kg.add_node(head_id, head_label, source);
    kg.add_node(tail_id, tail_label, source);
    kg.add_triple(head_id, relation, tail_id, sentence, source);
    ++local.rows_valid;
  }

  if (in.bad()) fail(ErrorCode::io, "parse_edges: read failure");
  if (local.rows_valid == 0) {
    fail(ErrorCode::empty_input, "parse_edges: no valid edge rows in input");
  }
  if (report != nullptr) *report = local;
  return kg;
}

void write_edges(const KnowledgeGraph& kg, std::ostream& out,
                 const ColumnSpec& spec) {
  out << spec.node1 << '\t' << spec.relation << '\t' << spec.node2 << '\t'
      << spec.node1_label << '\t' << spec.node2_label << '\t' << spec.sentence
      << '\t' << spec.source << '\n';
  for (const auto& t : kg.triples()) {
    const Node& head = kg.node(t.head);
    const Node& tail = kg.node(t.tail);
    out << head.id << '\t' << t.relation << '\t' << tail.id << '\t'
        << head.label << '\t' << tail.label << '\t' << t.sentence << '\t'
        << t.source << '\n';
  }
}

KnowledgeGraph filter_relations(const KnowledgeGraph& kg,
                                const std::vector<std::string>& allowlist) {
  if (allowlist.empty()) {
    fail(ErrorCode::config, "filter_relations: allowlist must be non-empty");
  }
  std::unordered_map<std::string, bool> allowed;
  for (const auto& rel : allowlist) allowed[rel] = true;

  KnowledgeGraph out;
  for (const auto& t : kg.triples()) {
    if (!allowed.count(t.relation)) continue;
    const Node& head = kg.node(t.head);
    const Node& tail = kg.node(t.tail);
    out.add_node(head.id, head.label, head.source);
    out.add_node(tail.id, tail.label, tail.source);
    out.add_triple(head.id, t.relation, tail.id, t.sentence, t.source);
  }
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

TrainDevSplit partition_cwwv(const KnowledgeGraph& kg, double dev_fraction,
                             uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    fail(ErrorCode::config,
         "partition_cwwv: dev_fraction must lie strictly between 0 and 1");
  }
  size_t n = kg.triples().size();
  auto dev_count = static_cast<size_t>(
      std::llround(dev_fraction * static_cast<double>(n)));

  Rng rng(seed);
  std::vector<size_t> chosen = rng.pick_indices(n, dev_count);
  std::vector<bool> in_dev(n, false);
  for (size_t i : chosen) in_dev[i] = true;

  TrainDevSplit out;
  out.train.name = Split::train;
  out.dev.name = Split::dev;
  for (uint32_t i = 0; i < n; ++i) {
    (in_dev[i] ? out.dev : out.train).triple_ids.push_back(i);
  }
  return out;
}

TrainDevTestSplit partition_atomic(
    const KnowledgeGraph& kg,
    const std::unordered_map<std::string, Split>& head_splits,
    UnmappedHeadPolicy policy) {
  TrainDevTestSplit out;
  out.train.name = Split::train;
  out.dev.name = Split::dev;
  out.test.name = Split::test;
  for (uint32_t i = 0; i < kg.triples().size(); ++i) {
    const Triple& t = kg.triples()[i];
    auto it = head_splits.find(kg.node(t.head).id);
    Split target;
    if (it != head_splits.end()) {
      target = it->second;
    } else if (policy == UnmappedHeadPolicy::train) {
      target = Split::train;
    } else {
      continue;  // drop
    }
    switch (target) {
      case Split::train: out.train.triple_ids.push_back(i); break;
      case Split::dev: out.dev.triple_ids.push_back(i); break;
      case Split::test: out.test.triple_ids.push_back(i); break;
    }
  }
  return out;
}

std::unordered_map<std::string, Split> load_split_file(std::istream& in) {
  if (!in) fail(ErrorCode::io, "load_split_file: unreadable input stream");
  std::unordered_map<std::string, Split> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split(line, '\t');
    if (cells.size() < 2) {
      fail(ErrorCode::parse, "load_split_file: line " + std::to_string(line_no) +
                                 " does not have two tab-separated columns");
    }
    std::string head = collapse_whitespace(cells[0]);
    std::string name = collapse_whitespace(cells[1]);
    Split s;
    if (name == "train") {
      s = Split::train;
    } else if (name == "dev") {
      s = Split::dev;
    } else if (name == "test") {
      s = Split::test;
    } else {
      fail(ErrorCode::parse,
           "load_split_file: unknown split '" + name + "' on line " +
               std::to_string(line_no));
    }
    auto [it, inserted] = out.emplace(head, s);
    if (!inserted && it->second != s) {
      fail(ErrorCode::config,
           "load_split_file: head '" + head + "' mapped to conflicting splits");
    }
  }
  return out;
}

std::vector<std::string> load_relation_allowlist(std::istream& in) {
  if (!in) fail(ErrorCode::io, "load_relation_allowlist: unreadable input");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string rel = collapse_whitespace(line);
    if (rel.empty()) continue;
    out.push_back(rel);
  }
  return out;
}

}  // namespace kgqa
