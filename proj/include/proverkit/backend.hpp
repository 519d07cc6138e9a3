#pragma once

// Generation and verification seams. Everything the pipeline needs from a
// model or a proof checker goes through Generator/Verifier so runs can be
// driven by deterministic in-process stand-ins or by HTTP services.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proverkit/ast.hpp"
#include "proverkit/errors.hpp"

namespace proverkit::backend {

enum class GenMode { NonCot, Cot };

std::string to_string(GenMode mode);
std::optional<GenMode> mode_from_string(std::string_view s);

struct GenRequest {
  std::string statement_text;
  GenMode mode = GenMode::NonCot;
  int n = 1;
  int max_tokens = 32768;
  double temperature = 1.0;
  std::optional<std::uint64_t> seed;
};

struct GenCompletion {
  std::string full_text;
  std::optional<std::string> extracted_code;  // last fenced code block
  int token_count = 0;
};

enum class VerdictStatus { Pass, Fail, Timeout, LintReject };

std::string to_string(VerdictStatus status);

struct Verdict {
  VerdictStatus status = VerdictStatus::Fail;
  std::vector<std::string> messages;
  std::int64_t wall_time_ms = 0;
};

struct LintViolation {
  std::string rule;
  std::size_t offset;
};

struct LintReport {
  bool ok = true;
  std::vector<LintViolation> violations;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::vector<GenCompletion> generate(const GenRequest& req) = 0;
};

class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual Verdict verify_code(const std::string& theorem_text,
                              const std::string& code, double timeout_s) = 0;
};

// All complete fenced code blocks in a completion, in order.
std::vector<std::string> extract_code_blocks(std::string_view full_text);

// The last complete fenced code block, if any.
std::optional<std::string> extract_code(std::string_view full_text);

// Flags placeholder and search tactics (sorry, admit, apply?, exact?) as
// standalone words; comments and string literals never trigger.
LintReport lint(std::string_view code);

// Lint gate: violations short-circuit to LintReject without touching the
// verifier.
Verdict lint_then_verify(Verifier& verifier, const std::string& theorem_text,
                         const std::string& code, double timeout_s);

// Whitespace-delimited token count, the fallback when a backend reports none.
int count_proxy_tokens(std::string_view text);

// ---- deterministic in-process backends --------------------------------

// Proof table plus closure rules. The same oracle backs the mock generator
// and the mock verifier, so any proof the generator emits also verifies.
// Lookup ignores the theorem name and preamble (statement identity only).
class MockOracle {
 public:
  void add(const std::string& statement_text, const std::string& proof);
  static std::shared_ptr<MockOracle> from_jsonl(const std::string& path);

  const std::vector<std::string>* proofs_for(const std::string& key) const;

  // First proof the closure rules produce: exact <hypothesis>, trivial for
  // True, rfl for syntactic x = x, then the proof table.
  std::optional<std::string> closure_proof(const std::vector<ast::Binder>& binders,
                                           const std::string& goal_text) const;

  // Whether `tactics` is accepted as a proof of goal_text under binders.
  // Recurses into have-chains so composed proofs check end to end.
  bool tactic_proves(const std::vector<ast::Binder>& binders,
                     const std::string& goal_text, std::string_view tactics,
                     int depth = 0) const;

  bool sketch_proves(const ast::ProofSketch& sketch, std::string* message,
                     int depth = 0) const;

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Emits full-theorem completions for statements the oracle can solve and
// deterministic failing candidates otherwise. Pure function of
// (statement, mode, seed, candidate index).
class MockProver : public Generator {
 public:
  explicit MockProver(std::shared_ptr<const MockOracle> oracle);
  std::vector<GenCompletion> generate(const GenRequest& req) override;

 private:
  std::shared_ptr<const MockOracle> oracle_;
};

// Returns scripted chain-of-thought texts keyed by statement identity.
// Statements without a script produce prose with no code block.
class MockSketcher : public Generator {
 public:
  MockSketcher() = default;
  void add_sketch(const std::string& statement_text, const std::string& cot_text);
  static std::shared_ptr<MockSketcher> from_jsonl(const std::string& path);
  std::vector<GenCompletion> generate(const GenRequest& req) override;

 private:
  std::map<std::string, std::string> scripts_;
};

// Checks code against the oracle: parses it, matches the statement, then
// requires every step body and the trailing tactic to be derivable.
// Verdicts are pure functions of the inputs; wall_time_ms is always zero.
class MockVerifier : public Verifier {
 public:
  explicit MockVerifier(std::shared_ptr<const MockOracle> oracle);
  Verdict verify_code(const std::string& theorem_text, const std::string& code,
                      double timeout_s) override;

 private:
  std::shared_ptr<const MockOracle> oracle_;
};

}  // namespace proverkit::backend
