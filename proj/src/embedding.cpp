#include "kgqa/embedding.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "kgqa/rng.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    fail(ErrorCode::shape, "cosine: vectors have different lengths");
  }
  if (u.empty()) fail(ErrorCode::shape, "cosine: empty vectors");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    fail(ErrorCode::undefined_similarity, "cosine: zero-norm vector");
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::span<const float> EmbeddingTable::vec(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    fail(ErrorCode::missing_embedding, "no embedding for node '" + id + "'");
  }
  return {data_.data() + it->second * dim_, dim_};
}

void EmbeddingTable::add(const std::string& id, std::span<const float> values) {
  if (dim_ == 0) dim_ = values.size();
  if (values.size() != dim_) {
    fail(ErrorCode::shape, "EmbeddingTable: vector for '" + id + "' has length " +
                               std::to_string(values.size()) + ", expected " +
                               std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::data, "EmbeddingTable: non-finite component for '" + id + "'");
    }
  }
  auto [it, inserted] = index_.emplace(id, order_.size());
  if (!inserted) {
    fail(ErrorCode::data, "EmbeddingTable: duplicate id '" + id + "'");
  }
  order_.push_back(id);
  data_.insert(data_.end(), values.begin(), values.end());
}

EmbeddingTable EmbeddingTable::load_text(std::istream& in) {
  if (!in) fail(ErrorCode::io, "EmbeddingTable: unreadable input stream");
  size_t count = 0, dim = 0;
  std::string header;
  if (!std::getline(in, header)) {
    fail(ErrorCode::empty_input, "EmbeddingTable: empty input");
  }
  {
    std::istringstream hs(header);
    if (!(hs >> count >> dim) || dim == 0) {
      fail(ErrorCode::parse, "EmbeddingTable: header must be `<count> <dim>`");
    }
  }
  EmbeddingTable table(dim);
  std::string line;
  std::vector<float> row(dim);
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id)) continue;
    for (size_t i = 0; i < dim; ++i) {
      if (!(ls >> row[i])) {
        fail(ErrorCode::parse, "EmbeddingTable: truncated vector for '" + id + "'");
      }
    }
    table.add(id, row);
    ++rows;
  }
  if (rows != count) {
    fail(ErrorCode::parse, "EmbeddingTable: header announced " +
                               std::to_string(count) + " rows, found " +
                               std::to_string(rows));
  }
  return table;
}

void EmbeddingTable::save_text(std::ostream& out) const {
  out << order_.size() << ' ' << dim_ << '\n';
  for (size_t r = 0; r < order_.size(); ++r) {
    out << order_[r];
    for (size_t i = 0; i < dim_; ++i) {
      out << ' ' << data_[r * dim_ + i];
    }
    out << '\n';
  }
}

EmbeddingTable EmbeddingTable::load_binary(std::istream& data,
                                           std::istream& index) {
  if (!data || !index) {
    fail(ErrorCode::io, "EmbeddingTable: unreadable binary input");
  }
  size_t count = 0, dim = 0;
  std::string header;
  if (!std::getline(index, header)) {
    fail(ErrorCode::empty_input, "EmbeddingTable: empty index sidecar");
  }
  {
    std::istringstream hs(header);
    if (!(hs >> count >> dim) || dim == 0) {
      fail(ErrorCode::parse, "EmbeddingTable: sidecar header must be `<count> <dim>`");
    }
  }
  EmbeddingTable table(dim);
  std::vector<float> row(dim);
  std::string id;
  for (size_t r = 0; r < count; ++r) {
    if (!std::getline(index, id) || id.empty()) {
      fail(ErrorCode::parse, "EmbeddingTable: sidecar is missing record ids");
    }
    data.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(dim * sizeof(float)));
    if (data.gcount() != static_cast<std::streamsize>(dim * sizeof(float))) {
      fail(ErrorCode::parse, "EmbeddingTable: binary data truncated at record " +
                                 std::to_string(r));
    }
    table.add(id, row);
  }
  return table;
}

void EmbeddingTable::save_binary(std::ostream& data, std::ostream& index) const {
  index << order_.size() << ' ' << dim_ << '\n';
  for (size_t r = 0; r < order_.size(); ++r) {
    index << order_[r] << '\n';
    data.write(reinterpret_cast<const char*>(data_.data() + r * dim_),
               static_cast<std::streamsize>(dim_ * sizeof(float)));
  }
}

std::vector<float> hashed_text_vector(std::string_view text, size_t dim,
                                      std::string_view salt) {
  std::vector<float> v(dim, 0.0f);
  uint64_t salt_h = fnv1a64(salt);
  bool any = false;
  for (const auto& tok : tokenize(text)) {
    uint64_t h = fnv1a64(tok, salt_h);
    size_t bucket = static_cast<size_t>(h % dim);
    float sign = ((h >> 32) & 1u) ? 1.0f : -1.0f;
    v[bucket] += sign;
    any = true;
  }
  if (!any) {
    v[static_cast<size_t>(fnv1a64(text, salt_h) % dim)] = 1.0f;
  }
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  if (norm == 0.0) {
    // opposite-sign collisions cancelled everything; fall back to a unit axis
    v[static_cast<size_t>(fnv1a64(text, salt_h) % dim)] = 1.0f;
    norm = 1.0;
  }
  float inv = static_cast<float>(1.0 / std::sqrt(norm));
  for (float& x : v) x *= inv;
  return v;
}

EmbeddingTable EmbeddingTable::hashed_bag_of_words(const KnowledgeGraph& kg,
                                                   size_t dim) {
  if (dim == 0) fail(ErrorCode::config, "hashed_bag_of_words: dim must be positive");
  EmbeddingTable table(dim);
  for (uint32_t i = 0; i < kg.node_count(); ++i) {
    const Node& node = kg.node(i);
    table.add(node.id, hashed_text_vector(strip_blanks(node.label), dim));
  }
  return table;
}

std::vector<std::string> EmbeddingTable::ids() const { return order_; }

}  // namespace kgqa
