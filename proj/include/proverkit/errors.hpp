#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proverkit {

// Parse failures carry the byte offset where the problem was detected.
enum class ParseErrc {
  UnbalancedDelimiters,
  MissingTheoremKeyword,
  MultipleTheoremDeclarations,
  BadIdentifier,
  BadBinder,
  DuplicateBinderName,
  EmptyGoal,
  DuplicateHaveLabel,
  NotATacticProof,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrc code, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        code_(code),
        offset_(offset) {}

  ParseErrc code() const { return code_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrc code_;
  std::size_t offset_;
};

enum class TransformErrc {
  StepIndexOutOfRange,
  LabelCollision,
  KindMismatch,
  MissingStepProof,
  MissingTrailingProof,
  UnexpectedTrailingProof,
  ProofContainsSorry,
  UnknownLabel,
};

class TransformError : public std::runtime_error {
 public:
  TransformError(TransformErrc code, const std::string& detail, const std::string& what)
      : std::runtime_error(what), code_(code), detail_(detail) {}

  TransformErrc code() const { return code_; }
  // The offending label, or the step index as text.
  const std::string& detail() const { return detail_; }

 private:
  TransformErrc code_;
  std::string detail_;
};

enum class BackendErrc {
  Unavailable,
  MalformedResponse,
  Timeout,
  NoSkeletonBlock,
  AllBackendsDown,
};

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  BackendErrc code() const { return code_; }

 private:
  BackendErrc code_;
};

}  // namespace proverkit
