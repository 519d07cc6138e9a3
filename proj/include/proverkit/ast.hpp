#pragma once

// Structured view of single-theorem Lean files built around `have` step
// skeletons. The parser is deliberately shallow: binder types, goals and
// step statements stay opaque balanced-token spans; only declaration
// structure and top-level `have` steps are modeled. Whatever is parsed must
// reprint byte-stably: parse(canonical_print(x)) is structurally equal to x.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proverkit/errors.hpp"

namespace proverkit::ast {

// Half-open byte range into the original input buffer.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Unparsed term text. `text` is trimmed; `span` covers the trimmed region.
struct OpaqueTerm {
  std::string text;
  SourceSpan span;
};

enum class BinderKind { Explicit, Implicit, Instance };

// One binder group, e.g. "(p q r : ℤ)". Typeless groups like "(n)" carry
// no type; anonymous instance binders carry no names.
struct Binder {
  std::vector<std::string> names;
  std::optional<OpaqueTerm> type;
  BinderKind kind = BinderKind::Explicit;
};

struct TheoremStatement {
  std::string preamble;  // byte-exact text before the theorem keyword
  std::string name;
  std::vector<Binder> binders;
  OpaqueTerm goal;
};

// Body of a have step or the trailing tactic text of a proof block.
// `is_sorry` iff the body is exactly the token `sorry`. For non-sorry
// bodies, `by_form` records whether the source used `:= by <tactics>`
// rather than a plain `:= <term>`.
struct TacticBlock {
  bool is_sorry = true;
  std::string text;  // dedented, no trailing blank lines
  bool by_form = true;

  static TacticBlock sorry() { return TacticBlock{true, "sorry", true}; }
  static TacticBlock proof(std::string t, bool by = true) {
    return TacticBlock{false, std::move(t), by};
  }
};

struct HaveStep {
  std::string label;
  OpaqueTerm statement;
  TacticBlock body;
  SourceSpan span;     // from the have keyword through the end of the body
  std::string suffix;  // top-level text between this step and the next
};

struct ProofSketch {
  TheoremStatement theorem;
  std::string leading;  // top-level text before the first have step
  std::vector<HaveStep> steps;
  TacticBlock trailing;
};

// Structural equality ignores source spans.
bool operator==(const OpaqueTerm& a, const OpaqueTerm& b);
bool operator==(const Binder& a, const Binder& b);
bool operator==(const TheoremStatement& a, const TheoremStatement& b);
bool operator==(const TacticBlock& a, const TacticBlock& b);
bool operator==(const HaveStep& a, const HaveStep& b);
bool operator==(const ProofSketch& a, const ProofSketch& b);
inline bool operator!=(const TheoremStatement& a, const TheoremStatement& b) { return !(a == b); }
inline bool operator!=(const ProofSketch& a, const ProofSketch& b) { return !(a == b); }

// Parses the unique theorem declaration in `input`. Anything before the
// theorem keyword is kept verbatim as the preamble; any proof after `:=`
// is ignored apart from delimiter balance. Throws ParseError.
TheoremStatement parse_statement(std::string_view input);

// Parses a declaration whose proof is a `by` block, splitting the block
// into top-level have steps plus leading/trailing tactic text.
ProofSketch parse_sketch(std::string_view input);

// Preamble plus one-line declaration header ending in ":= by".
std::string print_statement_header(const TheoremStatement& stmt);

// Statement: preamble + one-line header ending in ":= by\n  sorry".
std::string canonical_print(const TheoremStatement& stmt);

// Sketch: preamble + one-line header + the proof block at two-space indent.
std::string canonical_print(const ProofSketch& sketch);

// The proof block alone, dedented to column `indent`.
std::string print_block(const ProofSketch& sketch, int indent = 0);

// Number of Sorry bodies, trailing included.
int count_sorries(const ProofSketch& sketch);

// Identity of a statement irrespective of the theorem's name: canonical
// binder groups plus the goal. Used for dedup and oracle lookup.
std::string statement_key(const TheoremStatement& stmt);

// Whitespace-insensitive comparison: runs of whitespace collapse to one
// space, ends trimmed.
std::string wsnorm(std::string_view text);
bool wsnorm_equal(std::string_view a, std::string_view b);

// True if `text` contains `token` as a standalone word outside line
// comments, block comments and string literals.
bool contains_token(std::string_view text, std::string_view token);

// Byte offsets of every standalone occurrence, same exclusion rules.
std::vector<std::size_t> token_offsets(std::string_view text, std::string_view token);

}  // namespace proverkit::ast
