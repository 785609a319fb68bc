#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgqa/kg.hpp"

namespace kgqa {

double cosine(std::span<const float> u, std::span<const float> v);

// node-id -> dense float vector, all of one dimension, no NaN/Inf.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(size_t dim) : dim_(dim) {}

  size_t dim() const { return dim_; }
  size_t size() const { return index_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  std::span<const float> vec(const std::string& id) const;

  void add(const std::string& id, std::span<const float> values);

  // Text format: header `<count> <dim>`, then `id v1 ... vdim` per line.
  static EmbeddingTable load_text(std::istream& in);
  void save_text(std::ostream& out) const;

  // Binary format: little-endian float32 records; the index sidecar holds
  // `<count> <dim>` on the first line and one id per record line.
  static EmbeddingTable load_binary(std::istream& data, std::istream& index);
  void save_binary(std::ostream& data, std::ostream& index) const;

  // Deterministic fallback featurizer: signed feature hashing of the node
  // label tokens, L2-normalized.
  static EmbeddingTable hashed_bag_of_words(const KnowledgeGraph& kg,
                                            size_t dim);

  std::vector<std::string> ids() const;

 private:
  size_t dim_ = 0;
  std::unordered_map<std::string, size_t> index_;
  std::vector<std::string> order_;
  std::vector<float> data_;
};

// Signed feature hashing of arbitrary text, L2-normalized; shared by the
// fallback node featurizer and the QA-pair featurizer.
std::vector<float> hashed_text_vector(std::string_view text, size_t dim,
                                      std::string_view salt = "");

}  // namespace kgqa
