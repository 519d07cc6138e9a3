#include "proverkit/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include <json.hpp>

#include "proverkit/ast.hpp"
#include "proverkit/errors.hpp"
#include "proverkit/parallel.hpp"

namespace proverkit::orchestrator {

namespace {

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(Route route) {
  switch (route) {
    case Route::EndToEnd: return "end_to_end";
    case Route::Decomposed: return "decomposed";
    case Route::Unsolved: return "unsolved";
  }
  return "unsolved";
}

std::string AttemptRecord::to_jsonl_line() const {
  nlohmann::json j{{"problem_id", problem_id}, {"kind", kind},
                   {"depth", depth},           {"status", status},
                   {"wall_time_ms", wall_time_ms}, {"tokens", tokens},
                   {"mode", mode}};
  if (step_index) j["step_index"] = *step_index;
  if (candidate_index) j["candidate_index"] = *candidate_index;
  return j.dump();
}

std::string ColdStartRecord::to_jsonl_line() const {
  nlohmann::json j{{"problem_id", problem_id},
                   {"chain_of_thought", chain_of_thought},
                   {"composed_code", composed_code},
                   {"created_at", created_at}};
  return j.dump();
}

Orchestrator::Orchestrator(backend::Generator& prover,
                           backend::Generator& sketcher,
                           backend::Verifier& verifier, OrchestratorConfig cfg)
    : prover_(prover), sketcher_(sketcher), verifier_(verifier),
      cfg_(std::move(cfg)) {}

PipelineResult Orchestrator::solve(const Problem& problem) {
  Emit emit;
  auto result = solve_impl(problem, problem.id, 0, std::nullopt, emit);
  flush(emit);
  return result;
}

Decomposition Orchestrator::decompose(const Problem& problem) {
  Emit emit;
  auto dec = decompose_impl(problem, problem.id, 0, emit, nullptr);
  flush(emit);
  return dec;
}

std::vector<PipelineResult> Orchestrator::run_batch(
    const std::vector<Problem>& problems) {
  std::vector<PipelineResult> results(problems.size());
  std::vector<Emit> emits(problems.size());

  parallel_for(problems.size(), cfg_.parallelism, [&](std::size_t i) {
    results[i].problem_id = problems[i].id;
    if (cancel_ && cancel_()) {
      results[i].error = "cancelled";
      return;
    }
    try {
      results[i] = solve_impl(problems[i], problems[i].id, 0, std::nullopt,
                              emits[i]);
    } catch (const ParseError& e) {
      results[i].error = std::string("parse: ") + e.what();
    } catch (const BackendError& e) {
      results[i].error = std::string("backend: ") + e.what();
    }
  });

  // Sinks see records in problem order regardless of worker interleaving.
  for (auto& emit : emits) flush(emit);
  return results;
}

void Orchestrator::flush(Emit& emit) {
  if (attempt_sink_)
    for (const auto& a : emit.attempts) attempt_sink_(a);
  if (cold_sink_)
    for (const auto& c : emit.colds) cold_sink_(c);
  emit.attempts.clear();
  emit.colds.clear();
}

Decomposition Orchestrator::decompose_impl(const Problem& problem,
                                           const std::string& root_id,
                                           int depth, Emit& emit,
                                           int* generated) {
  auto target = ast::parse_statement(problem.statement_text);
  auto target_key = ast::statement_key(target);

  backend::GenRequest req;
  req.statement_text = problem.statement_text;
  req.mode = backend::GenMode::Cot;
  req.n = cfg_.budget.sketch_attempts;
  req.max_tokens = cfg_.max_tokens;
  req.temperature = cfg_.temperature;
  req.seed = cfg_.seed;

  auto completions = sketcher_.generate(req);
  if (generated) *generated += static_cast<int>(completions.size());

  std::optional<ParseError> first_parse_error;
  for (std::size_t ci = 0; ci < completions.size(); ++ci) {
    const auto& comp = completions[ci];
    auto blocks = backend::extract_code_blocks(comp.full_text);

    AttemptRecord rec;
    rec.problem_id = root_id;
    rec.kind = "sketch";
    rec.depth = depth;
    rec.candidate_index = static_cast<int>(ci);
    rec.tokens = comp.token_count;
    rec.mode = backend::to_string(backend::GenMode::Cot);

    // A CoT ends with its consolidated skeleton, so scan blocks last-first.
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      ast::ProofSketch sk;
      try {
        sk = ast::parse_sketch(*it);
      } catch (const ParseError& e) {
        if (!first_parse_error) first_parse_error = e;
        continue;
      }
      if (ast::count_sorries(sk) == 0) continue;  // complete proof, not a skeleton
      if (ast::statement_key(sk.theorem) != target_key) continue;
      rec.status = "ok";
      emit.attempts.push_back(std::move(rec));
      return Decomposition{std::move(sk), comp.full_text, comp.token_count};
    }
    rec.status = "no_skeleton";
    emit.attempts.push_back(std::move(rec));
  }

  if (first_parse_error) throw *first_parse_error;
  throw BackendError(BackendErrc::NoSkeletonBlock,
                     "no usable skeleton block for " + problem.id);
}

PipelineResult Orchestrator::solve_impl(const Problem& problem,
                                        const std::string& root_id, int depth,
                                        std::optional<int> step_index,
                                        Emit& emit) {
  PipelineResult result;
  result.problem_id = problem.id;
  result.depth_reached = depth;

  const bool root = depth == 0;
  // Nested statements are generated internally and always well formed; a
  // malformed root statement should fail before any budget is spent.
  if (root) ast::parse_statement(problem.statement_text);

  const auto mode = root ? cfg_.e2e_mode : cfg_.subgoal_mode;
  result.mode = backend::to_string(mode);

  backend::GenRequest req;
  req.statement_text = problem.statement_text;
  req.mode = mode;
  req.n = root ? cfg_.budget.end_to_end_samples : cfg_.budget.subgoal_samples;
  req.max_tokens = cfg_.max_tokens;
  req.temperature = cfg_.temperature;
  req.seed = cfg_.seed;

  auto completions = prover_.generate(req);
  result.generated += static_cast<int>(completions.size());

  for (std::size_t i = 0; i < completions.size(); ++i) {
    const auto& comp = completions[i];
    AttemptRecord rec;
    rec.problem_id = root_id;
    rec.kind = root ? "e2e" : "subgoal";
    rec.step_index = step_index;
    rec.depth = depth;
    rec.candidate_index = static_cast<int>(i);
    rec.tokens = comp.token_count;
    rec.mode = backend::to_string(mode);

    if (!comp.extracted_code) {
      rec.status = "no_code";
      emit.attempts.push_back(std::move(rec));
      continue;
    }
    auto verdict =
        backend::lint_then_verify(verifier_, problem.statement_text,
                                  *comp.extracted_code,
                                  cfg_.budget.verify_timeout_s);
    ++result.attempts_used;
    rec.status = backend::to_string(verdict.status);
    rec.wall_time_ms = verdict.wall_time_ms;
    emit.attempts.push_back(std::move(rec));

    if (verdict.status == backend::VerdictStatus::Pass) {
      result.solved = true;
      result.route = Route::EndToEnd;
      result.code = *comp.extracted_code;
      result.full_text = comp.full_text;
      result.candidate_index = static_cast<int>(i);
      return result;  // first pass wins
    }
  }

  if (depth >= cfg_.budget.max_depth) return result;

  Decomposition dec;
  try {
    dec = decompose_impl(problem, root_id, depth, emit, &result.generated);
  } catch (const ParseError& e) {
    result.error = std::string("skeleton parse: ") + e.what();
    return result;
  } catch (const BackendError& e) {
    if (e.code() == BackendErrc::NoSkeletonBlock) {
      result.error = "no_skeleton_block";
      return result;
    }
    throw;
  }

  result.chain_of_thought = dec.chain_of_thought;
  result.sketch = ast::canonical_print(dec.sketch);

  std::map<std::string, std::string> proofs;
  std::map<std::string, std::string> att_ids;
  bool all_steps_ok = true;

  auto solve_nested = [&](const Problem& sub_problem, int sub_step)
      -> PipelineResult {
    auto sub = solve_impl(sub_problem, root_id, depth + 1, sub_step, emit);
    result.attempts_used += sub.attempts_used;
    result.generated += sub.generated;
    result.depth_reached = std::max(result.depth_reached, sub.depth_reached);
    return sub;
  };

  for (std::size_t si = 0; si < dec.sketch.steps.size(); ++si) {
    const auto& step = dec.sketch.steps[si];
    if (!step.body.is_sorry) continue;

    transform::SubgoalStatement sub;
    try {
      sub = transform::make_type_b(dec.sketch, static_cast<int>(si));
    } catch (const TransformError& e) {
      result.error = std::string("transform: ") + e.what();
      return result;
    }

    Problem sub_problem{sub.theorem.name, ast::canonical_print(sub.theorem)};
    auto sub_result = solve_nested(sub_problem, static_cast<int>(si));

    if (!sub_result.solved) {
      all_steps_ok = false;
      if (!result.error) result.error = "subgoal_unsolved:" + step.label;
      if (!cfg_.continue_on_failed_step) break;
      continue;
    }

    std::string tactic;
    try {
      auto sub_sketch = ast::parse_sketch(*sub_result.code);
      tactic = ast::print_block(sub_sketch, 0);
    } catch (const ParseError& e) {
      all_steps_ok = false;
      if (!result.error)
        result.error = std::string("subgoal reparse: ") + e.what();
      if (!cfg_.continue_on_failed_step) break;
      continue;
    }

    proofs[step.label] = transform::adapt_subgoal_proof(sub, tactic);
    att_ids[step.label] =
        sub_problem.id + "#" +
        (sub_result.candidate_index
             ? std::to_string(*sub_result.candidate_index)
             : std::string("composed"));
    result.sub_solves.push_back({sub_problem.statement_text, *sub_result.code,
                                 sub_result.mode,
                                 sub_result.full_text.value_or("")});
    for (auto& nested : sub_result.sub_solves)
      result.sub_solves.push_back(std::move(nested));
  }

  if (!all_steps_ok) return result;

  // The default trailing tactic only applies when the last step literally
  // restates the goal; anything else becomes a residual subgoal carrying
  // every step label as a premise.
  std::optional<std::string> trailing_proof;
  if (dec.sketch.trailing.is_sorry) {
    bool default_ok = !dec.sketch.steps.empty() &&
                      dec.sketch.steps.back().statement.text ==
                          dec.sketch.theorem.goal.text;
    if (!default_ok) {
      ast::TheoremStatement residual = dec.sketch.theorem;
      residual.name += "_trailing";
      for (const auto& step : dec.sketch.steps) {
        for (const auto& b : residual.binders)
          for (const auto& n : b.names)
            if (n == step.label) {
              result.error = "trailing_binder_collision:" + step.label;
              return result;
            }
        residual.binders.push_back(ast::Binder{
            {step.label}, step.statement, ast::BinderKind::Explicit});
      }

      Problem res_problem{residual.name, ast::canonical_print(residual)};
      auto res_result = solve_nested(
          res_problem, static_cast<int>(dec.sketch.steps.size()));
      if (!res_result.solved) {
        result.error = "trailing_unsolved";
        return result;
      }
      std::string tactic;
      try {
        auto res_sketch = ast::parse_sketch(*res_result.code);
        tactic = ast::print_block(res_sketch, 0);
      } catch (const ParseError& e) {
        result.error = std::string("trailing reparse: ") + e.what();
        return result;
      }
      trailing_proof = transform::normalize_tactics(tactic);
      result.sub_solves.push_back({res_problem.statement_text,
                                   *res_result.code, res_result.mode,
                                   res_result.full_text.value_or("")});
      for (auto& nested : res_result.sub_solves)
        result.sub_solves.push_back(std::move(nested));
    }
  }

  transform::ComposedProof composed;
  try {
    composed = transform::compose_proof(dec.sketch, proofs, trailing_proof,
                                        att_ids);
  } catch (const TransformError& e) {
    result.error = std::string("compose: ") + e.what();
    return result;
  }

  auto verdict =
      backend::lint_then_verify(verifier_, problem.statement_text,
                                composed.code, cfg_.budget.verify_timeout_s);
  ++result.attempts_used;

  AttemptRecord rec;
  rec.problem_id = root_id;
  rec.kind = "composition";
  rec.step_index = step_index;
  rec.depth = depth;
  rec.status = backend::to_string(verdict.status);
  rec.wall_time_ms = verdict.wall_time_ms;
  emit.attempts.push_back(std::move(rec));

  if (verdict.status != backend::VerdictStatus::Pass) {
    result.error = "composition_" + backend::to_string(verdict.status);
    return result;
  }

  result.solved = true;
  result.route = Route::Decomposed;
  result.code = composed.code;
  result.composed_code = composed.code;
  result.full_text = dec.chain_of_thought + "\n\n" + composed.code;
  result.mode = backend::to_string(backend::GenMode::Cot);

  ColdStartRecord cold;
  cold.problem_id = problem.id;
  cold.chain_of_thought = dec.chain_of_thought;
  cold.composed_code = composed.code;
  cold.created_at = cfg_.deterministic ? "1970-01-01T00:00:00Z" : now_iso8601();
  emit.colds.push_back(std::move(cold));

  return result;
}

}  // namespace proverkit::orchestrator
