#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kgqa {

enum class ErrorCode {
  io,
  parse,
  empty_input,
  config,
  data,
  unsupported_relation,
  template_integrity,
  insufficient_distractors,
  missing_embedding,
  undefined_similarity,
  invalid_probability,
  degenerate_training,
  shape,
  contract,
  internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::config: return "config";
    case ErrorCode::data: return "data";
    case ErrorCode::unsupported_relation: return "unsupported-relation";
    case ErrorCode::template_integrity: return "template-integrity";
    case ErrorCode::insufficient_distractors: return "insufficient-distractors";
    case ErrorCode::missing_embedding: return "missing-embedding";
    case ErrorCode::undefined_similarity: return "undefined-similarity";
    case ErrorCode::invalid_probability: return "invalid-probability";
    case ErrorCode::degenerate_training: return "degenerate-training";
    case ErrorCode::shape: return "shape";
    case ErrorCode::contract: return "contract";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace kgqa
