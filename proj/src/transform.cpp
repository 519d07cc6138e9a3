#include "proverkit/transform.hpp"

#include <algorithm>
#include <limits>

namespace proverkit::transform {

namespace {

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

const ast::HaveStep& step_at(const ast::ProofSketch& sketch, int step_index) {
  if (step_index < 0 || static_cast<std::size_t>(step_index) >= sketch.steps.size())
    throw TransformError(TransformErrc::StepIndexOutOfRange,
                         std::to_string(step_index),
                         "step index " + std::to_string(step_index) +
                             " out of range for sketch with " +
                             std::to_string(sketch.steps.size()) + " steps");
  return sketch.steps[static_cast<std::size_t>(step_index)];
}

bool binds_name(const ast::Binder& b, const std::string& name) {
  return std::find(b.names.begin(), b.names.end(), name) != b.names.end();
}

}  // namespace

std::string subgoal_name(const std::string& origin, int step_index, SubgoalKind kind) {
  return origin + "_subgoal_" + std::to_string(step_index) +
         (kind == SubgoalKind::TypeA ? "_a" : "_b");
}

SubgoalStatement make_type_a(const ast::ProofSketch& sketch, int step_index) {
  const ast::HaveStep& step = step_at(sketch, step_index);
  SubgoalStatement out;
  out.kind = SubgoalKind::TypeA;
  out.origin_id = sketch.theorem.name;
  out.step_index = step_index;
  out.theorem.preamble = sketch.theorem.preamble;
  out.theorem.name = subgoal_name(sketch.theorem.name, step_index, SubgoalKind::TypeA);
  out.theorem.binders = sketch.theorem.binders;
  out.theorem.goal = step.statement;
  return out;
}

SubgoalStatement make_type_b(const ast::ProofSketch& sketch, int step_index) {
  SubgoalStatement out = make_type_a(sketch, step_index);
  out.kind = SubgoalKind::TypeB;
  out.theorem.name = subgoal_name(sketch.theorem.name, step_index, SubgoalKind::TypeB);
  for (int j = 0; j < step_index; ++j) {
    const ast::HaveStep& prem = sketch.steps[static_cast<std::size_t>(j)];
    for (const ast::Binder& b : out.theorem.binders) {
      if (binds_name(b, prem.label))
        throw TransformError(TransformErrc::LabelCollision, prem.label,
                             "step label '" + prem.label +
                                 "' collides with an existing binder");
    }
    ast::Binder nb;
    nb.kind = ast::BinderKind::Explicit;
    nb.names = {prem.label};
    nb.type = prem.statement;
    out.theorem.binders.push_back(std::move(nb));
  }
  return out;
}

std::string normalize_tactics(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t i = 0;
  for (;;) {
    std::size_t nl = text.find('\n', i);
    std::string_view line =
        (nl == std::string_view::npos) ? text.substr(i) : text.substr(i, nl - i);
    std::size_t e = line.size();
    while (e > 0 && is_space_byte(line[e - 1])) --e;
    lines.emplace_back(line.substr(0, e));
    if (nl == std::string_view::npos) break;
    i = nl + 1;
  }
  std::size_t b = 0, e = lines.size();
  while (b < e && lines[b].empty()) ++b;
  while (e > b && lines[e - 1].empty()) --e;
  lines.assign(lines.begin() + b, lines.begin() + e);

  std::size_t min_indent = std::numeric_limits<std::size_t>::max();
  for (const auto& l : lines) {
    if (l.empty()) continue;
    std::size_t ind = 0;
    while (ind < l.size() && l[ind] == ' ') ++ind;
    min_indent = std::min(min_indent, ind);
  }
  std::string out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (k) out += '\n';
    if (!lines[k].empty()) out += lines[k].substr(std::min(min_indent, lines[k].size()));
  }
  return out;
}

ComposedProof compose_proof(const ast::ProofSketch& sketch,
                            const std::map<std::string, std::string>& step_proofs,
                            std::optional<std::string> trailing_proof,
                            const std::map<std::string, std::string>& attempt_ids) {
  for (const auto& [label, proof] : step_proofs) {
    bool known = std::any_of(sketch.steps.begin(), sketch.steps.end(),
                             [&](const ast::HaveStep& s) { return s.label == label; });
    if (!known)
      throw TransformError(TransformErrc::UnknownLabel, label,
                           "proof supplied for unknown label '" + label + "'");
  }

  ComposedProof out;
  out.theorem = sketch.theorem;
  ast::ProofSketch filled = sketch;

  for (ast::HaveStep& step : filled.steps) {
    std::string attempt = "sketch";
    if (step.body.is_sorry) {
      auto it = step_proofs.find(step.label);
      if (it == step_proofs.end())
        throw TransformError(TransformErrc::MissingStepProof, step.label,
                             "no proof supplied for step '" + step.label + "'");
      if (ast::contains_token(it->second, "sorry"))
        throw TransformError(TransformErrc::ProofContainsSorry, step.label,
                             "proof for step '" + step.label + "' contains sorry");
      step.body = ast::TacticBlock::proof(normalize_tactics(it->second));
      if (auto ai = attempt_ids.find(step.label); ai != attempt_ids.end())
        attempt = ai->second;
      else
        attempt = "supplied";
    } else if (ast::contains_token(step.body.text, "sorry")) {
      throw TransformError(TransformErrc::ProofContainsSorry, step.label,
                           "existing body of step '" + step.label + "' contains sorry");
    }
    out.provenance.emplace_back(step.label, attempt);
  }

  if (filled.trailing.is_sorry) {
    if (trailing_proof) {
      if (ast::contains_token(*trailing_proof, "sorry"))
        throw TransformError(TransformErrc::ProofContainsSorry, "<trailing>",
                             "trailing proof contains sorry");
      filled.trailing = ast::TacticBlock::proof(normalize_tactics(*trailing_proof));
    } else if (!filled.steps.empty() &&
               filled.steps.back().statement.text == filled.theorem.goal.text) {
      filled.trailing =
          ast::TacticBlock::proof("exact " + filled.steps.back().label);
    } else {
      throw TransformError(TransformErrc::MissingTrailingProof, "<trailing>",
                           "trailing tactic required: last step does not close the goal");
    }
  } else {
    if (trailing_proof)
      throw TransformError(TransformErrc::UnexpectedTrailingProof, "<trailing>",
                           "trailing proof supplied but the sketch already has one");
    if (ast::contains_token(filled.trailing.text, "sorry"))
      throw TransformError(TransformErrc::ProofContainsSorry, "<trailing>",
                           "existing trailing tactic contains sorry");
  }

  out.code = ast::canonical_print(filled);
  if (ast::contains_token(out.code, "sorry"))
    throw TransformError(TransformErrc::ProofContainsSorry, "<composed>",
                         "composed code still contains sorry");
  return out;
}

std::string adapt_subgoal_proof(const SubgoalStatement& subgoal, std::string_view proof) {
  if (subgoal.kind != SubgoalKind::TypeB)
    throw TransformError(TransformErrc::KindMismatch, subgoal.theorem.name,
                         "only type B subgoal proofs can be spliced");
  return normalize_tactics(proof);
}

}  // namespace proverkit::transform
