#pragma once

// Reward and advantage arithmetic a trainer would consume: binary
// verification reward, the structural-consistency penalty, group-relative
// advantage standardization, and the prompt-curation band filter. No policy
// or gradient lives here; rollouts export as JSONL.

#include <map>
#include <string>
#include <vector>

#include "proverkit/ast.hpp"
#include "proverkit/backend.hpp"

namespace proverkit::rl {

struct RewardConfig {
  bool consistency_enabled = true;   // early-training phase switch
  double consistency_weight = 0.1;   // in [0,1]
  int consistency_cutoff_step = 0;   // 0 = active whenever enabled
  int group_size = 32;
  int problems_per_step = 256;
};

// 1.0 iff the verdict is a pass; lint rejects and timeouts score 0.
double binary_reward(const backend::Verdict& verdict);

// True iff every sketch step's statement appears (whitespace-normalized,
// order-insensitive, labels ignored) among the final proof's top-level have
// statements. Unparsable final code is misaligned by definition.
bool consistency_check(const ast::ProofSketch& sketch,
                       const std::string& final_code);

bool consistency_active(const RewardConfig& cfg, int step);

// binary × (consistent ? 1 : 1 − weight) while enabled; plain binary after
// the consistency phase ends.
double combined_reward(const backend::Verdict& verdict, bool consistent,
                       const RewardConfig& cfg);

// Group-standardized advantages: (r − mean) / population std. A group whose
// population std is ≤ 1e-8 carries no signal and maps to all zeros.
std::vector<double> grpo_advantages(const std::vector<double>& rewards);

struct RolloutCandidate {
  std::string code;
  backend::Verdict verdict;
  backend::LintReport lint;
  bool consistent = true;
};

struct GroupRollout {
  std::string problem_id;
  std::vector<RolloutCandidate> candidates;
  int group_size = 0;  // == candidates.size()
};

// One line per candidate:
// {"problem_id","candidate_index","reward","advantage","consistent","status"}
void export_rollouts_jsonl(const std::vector<GroupRollout>& rollouts,
                           const RewardConfig& cfg, const std::string& path);

// Ids whose solve rate r satisfies lo < r ≤ hi, ordered by
// (rate ascending, id ascending). Requires 0 ≤ lo < hi ≤ 1.
std::vector<std::string> curate_prompts(
    const std::map<std::string, double>& solve_rates, double lo, double hi);

}  // namespace proverkit::rl
