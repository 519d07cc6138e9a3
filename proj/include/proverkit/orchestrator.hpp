#pragma once

// Proof search pipeline. Each problem first gets direct end-to-end attempts;
// if those fail and the depth budget allows, a sketcher proposes a skeleton
// whose sorry steps are solved recursively as type-B subgoals and spliced
// back into a full proof. Every candidate that reaches the verifier produces
// an attempt record; every decomposed solve produces a cold-start record
// pairing the sketch reasoning with the verified composition.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proverkit/backend.hpp"
#include "proverkit/transform.hpp"

namespace proverkit::orchestrator {

struct Budget {
  int end_to_end_samples = 32;
  int subgoal_samples = 32;
  int max_depth = 1;       // how many decomposition levels may stack
  int sketch_attempts = 1;
  double verify_timeout_s = 30.0;
};

enum class Route { EndToEnd, Decomposed, Unsolved };
std::string to_string(Route route);

struct Problem {
  std::string id;
  std::string statement_text;
};

// One verifier-or-generator event, attributed to the root problem so logs
// from nested subgoal solves stay groupable.
struct AttemptRecord {
  std::string problem_id;
  std::string kind;  // "e2e" | "subgoal" | "composition" | "sketch"
  std::optional<int> step_index;
  int depth = 0;
  std::optional<int> candidate_index;
  std::string status;  // verdict string, "no_code", "ok", "no_skeleton"
  std::int64_t wall_time_ms = 0;
  int tokens = 0;
  std::string mode;  // generation mode, empty for compositions

  std::string to_jsonl_line() const;
};

struct ColdStartRecord {
  std::string problem_id;
  std::string chain_of_thought;
  std::string composed_code;
  std::string created_at;

  std::string to_jsonl_line() const;
};

struct SubSolve {
  std::string statement_text;
  std::string code;
  std::string mode;
  std::string full_text;
};

struct PipelineResult {
  std::string problem_id;
  bool solved = false;
  Route route = Route::Unsolved;
  std::optional<std::string> code;           // verified proof of the root goal
  std::optional<std::string> composed_code;  // set when route == Decomposed
  std::optional<std::string> chain_of_thought;
  std::optional<std::string> full_text;
  std::optional<int> candidate_index;
  std::string mode;
  int attempts_used = 0;   // candidates that reached lint+verify
  int generated = 0;       // completions produced by generators
  int depth_reached = 0;
  std::optional<std::string> error;
  std::vector<SubSolve> sub_solves;
  std::optional<std::string> sketch;  // canonical skeleton when decomposed
};

struct Decomposition {
  ast::ProofSketch sketch;
  std::string chain_of_thought;
  int tokens = 0;
};

struct OrchestratorConfig {
  Budget budget;
  backend::GenMode e2e_mode = backend::GenMode::NonCot;
  backend::GenMode subgoal_mode = backend::GenMode::NonCot;
  int parallelism = 1;
  bool deterministic = false;  // pins cold-start timestamps
  std::uint64_t seed = 0;
  bool continue_on_failed_step = false;
  int max_tokens = 32768;
  double temperature = 1.0;
};

class Orchestrator {
 public:
  using AttemptSink = std::function<void(const AttemptRecord&)>;
  using ColdStartSink = std::function<void(const ColdStartRecord&)>;
  using CancelCheck = std::function<bool()>;

  Orchestrator(backend::Generator& prover, backend::Generator& sketcher,
               backend::Verifier& verifier, OrchestratorConfig cfg);

  void set_attempt_sink(AttemptSink sink) { attempt_sink_ = std::move(sink); }
  void set_cold_start_sink(ColdStartSink sink) { cold_sink_ = std::move(sink); }
  void set_cancel_check(CancelCheck check) { cancel_ = std::move(check); }

  PipelineResult solve(const Problem& problem);

  // Runs problems on a worker pool; records are flushed per problem in input
  // order once all workers join, so logs are byte-identical at any
  // parallelism. A problem whose backend throws yields an unsolved result
  // carrying the error instead of aborting the batch.
  std::vector<PipelineResult> run_batch(const std::vector<Problem>& problems);

  // Exposed for tests: one sketch round, no subgoal solving.
  Decomposition decompose(const Problem& problem);

 private:
  struct Emit {
    std::vector<AttemptRecord> attempts;
    std::vector<ColdStartRecord> colds;
  };

  PipelineResult solve_impl(const Problem& problem, const std::string& root_id,
                            int depth, std::optional<int> step_index, Emit& emit);
  Decomposition decompose_impl(const Problem& problem, const std::string& root_id,
                               int depth, Emit& emit, int* generated);
  void flush(Emit& emit);

  backend::Generator& prover_;
  backend::Generator& sketcher_;
  backend::Verifier& verifier_;
  OrchestratorConfig cfg_;
  AttemptSink attempt_sink_;
  ColdStartSink cold_sink_;
  CancelCheck cancel_;
};

}  // namespace proverkit::orchestrator
