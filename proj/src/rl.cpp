#include "proverkit/rl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proverkit/errors.hpp"
#include "proverkit/jsonl.hpp"

namespace proverkit::rl {

double binary_reward(const backend::Verdict& verdict) {
  return verdict.status == backend::VerdictStatus::Pass ? 1.0 : 0.0;
}

bool consistency_check(const ast::ProofSketch& sketch,
                       const std::string& final_code) {
  ast::ProofSketch final_sketch;
  try {
    final_sketch = ast::parse_sketch(final_code);
  } catch (const ParseError&) {
    return false;
  }
  for (const auto& step : sketch.steps) {
    bool present = false;
    for (const auto& candidate : final_sketch.steps)
      if (ast::wsnorm_equal(step.statement.text, candidate.statement.text)) {
        present = true;
        break;
      }
    if (!present) return false;
  }
  return true;
}

bool consistency_active(const RewardConfig& cfg, int step) {
  if (!cfg.consistency_enabled) return false;
  return cfg.consistency_cutoff_step <= 0 || step < cfg.consistency_cutoff_step;
}

double combined_reward(const backend::Verdict& verdict, bool consistent,
                       const RewardConfig& cfg) {
  double base = binary_reward(verdict);
  if (!cfg.consistency_enabled) return base;
  return base * (consistent ? 1.0 : 1.0 - cfg.consistency_weight);
}

std::vector<double> grpo_advantages(const std::vector<double>& rewards) {
  const auto n = rewards.size();
  if (n == 0) return {};
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n);
  double std_pop = std::sqrt(var);

  std::vector<double> out(n, 0.0);
  if (std_pop <= 1e-8) return out;  // uniform group carries no signal
  for (std::size_t i = 0; i < n; ++i) out[i] = (rewards[i] - mean) / std_pop;
  return out;
}

void export_rollouts_jsonl(const std::vector<GroupRollout>& rollouts,
                           const RewardConfig& cfg, const std::string& path) {
  jsonl::Writer out(path, /*truncate=*/true);
  for (const auto& group : rollouts) {
    std::vector<double> rewards;
    rewards.reserve(group.candidates.size());
    for (const auto& c : group.candidates)
      rewards.push_back(combined_reward(c.verdict, c.consistent, cfg));
    auto advantages = grpo_advantages(rewards);
    for (std::size_t i = 0; i < group.candidates.size(); ++i)
      out.write({{"problem_id", group.problem_id},
                 {"candidate_index", static_cast<int>(i)},
                 {"reward", rewards[i]},
                 {"advantage", advantages[i]},
                 {"consistent", group.candidates[i].consistent},
                 {"status", backend::to_string(group.candidates[i].verdict.status)}});
  }
}

std::vector<std::string> curate_prompts(
    const std::map<std::string, double>& solve_rates, double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0))
    throw std::invalid_argument("curation band must satisfy 0 <= lo < hi <= 1");

  std::vector<std::pair<double, std::string>> picked;
  for (const auto& [id, rate] : solve_rates)
    if (lo < rate && rate <= hi) picked.emplace_back(rate, id);
  std::sort(picked.begin(), picked.end());

  std::vector<std::string> out;
  out.reserve(picked.size());
  for (auto& [rate, id] : picked) out.push_back(std::move(id));
  return out;
}

}  // namespace proverkit::rl
