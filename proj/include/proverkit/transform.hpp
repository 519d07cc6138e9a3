#pragma once

// Turns have steps of a proof sketch into standalone subgoal theorems and
// splices solved subgoal proofs back into a complete proof.
//
// Two subgoal flavors per step i:
//   type A keeps the origin binders and swaps the goal for step i's statement;
//   type B additionally binds every preceding step as an explicit premise.
// Premise order follows step order, so contexts grow monotonically with i.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proverkit/ast.hpp"
#include "proverkit/errors.hpp"

namespace proverkit::transform {

enum class SubgoalKind { TypeA, TypeB };

struct SubgoalStatement {
  SubgoalKind kind = SubgoalKind::TypeA;
  std::string origin_id;  // origin theorem name
  int step_index = 0;
  ast::TheoremStatement theorem;
};

struct ComposedProof {
  ast::TheoremStatement theorem;
  std::string code;  // complete theorem text, free of sorry tokens
  // one (step label, source attempt id) pair per sketch step
  std::vector<std::pair<std::string, std::string>> provenance;
};

// "<origin>_subgoal_<i>_a" / "..._b"
std::string subgoal_name(const std::string& origin, int step_index, SubgoalKind kind);

SubgoalStatement make_type_a(const ast::ProofSketch& sketch, int step_index);
SubgoalStatement make_type_b(const ast::ProofSketch& sketch, int step_index);

// Replaces every Sorry body with the proof supplied for its label and fills
// the trailing tactic. A missing trailing proof is tolerated only when the
// last step's statement byte-equals the theorem goal, in which case
// "exact <last label>" closes the proof.
ComposedProof compose_proof(
    const ast::ProofSketch& sketch,
    const std::map<std::string, std::string>& step_proofs,
    std::optional<std::string> trailing_proof = std::nullopt,
    const std::map<std::string, std::string>& attempt_ids = {});

// Tactic text of a solved subgoal, normalized for splicing. Accepts type B
// subgoals only; splice points expect proofs whose premises are the
// preceding step labels, which is exactly what type B binds.
std::string adapt_subgoal_proof(const SubgoalStatement& subgoal, std::string_view proof);

// Dedents to column zero and drops blank edge lines.
std::string normalize_tactics(std::string_view text);

}  // namespace proverkit::transform
