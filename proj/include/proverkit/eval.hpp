#pragma once

// Benchmark ingestion, the unbiased pass@k estimator, repetition-based
// mean/std reporting, token statistics from attempt logs, and the
// per-category breakdown table.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proverkit/backend.hpp"
#include "proverkit/orchestrator.hpp"

namespace proverkit::eval {

struct BenchmarkProblem {
  std::string id;
  std::string split;
  std::vector<std::string> tags;  // category tags, e.g. "IMO"
  std::string statement;
};

// JSONL lines {"id","split","tags":[...],"statement"}; malformed lines throw
// with path:line.
std::vector<BenchmarkProblem> load_benchmark_jsonl(const std::string& path);
void write_benchmark_jsonl(const std::vector<BenchmarkProblem>& problems,
                           const std::string& path);

// Each .lean file becomes one problem (id = theorem name), ordered by file
// name. Files that fail to parse throw.
std::vector<BenchmarkProblem> benchmark_from_lean_dir(const std::string& dir,
                                                      const std::string& split);

// Unbiased estimator 1 − C(n−c,k)/C(n,k), evaluated with log-gamma so
// n in the thousands stays exact to ~1e-12 relative error.
// Requires 0 ≤ c ≤ n and 1 ≤ k ≤ n.
double pass_at_k(int n, int c, int k);

struct ProblemCounts {
  int n = 0;  // candidates attempted
  int c = 0;  // verified passes
};

struct EvalReport {
  std::string benchmark;
  int k = 0;
  double mean = 0.0;
  std::optional<double> std_dev;  // only over ≥2 repetitions
  std::map<std::string, ProblemCounts> per_problem;
  std::map<std::string, std::string> errors;  // id -> backend error
  int solved_count = 0;
  int total = 0;

  nlohmann::json to_json() const;
};

struct EvalRunConfig {
  int n = 32;
  std::vector<int> ks = {32};
  int repetitions = 1;
  std::uint64_t seed = 0;
  backend::GenMode mode = backend::GenMode::NonCot;
  int parallelism = 1;
  double verify_timeout_s = 30.0;
  int max_tokens = 32768;
  double temperature = 1.0;
  std::string benchmark_name;
};

// Generates and verifies n candidates per problem per repetition; one report
// per k, mean/std across repetitions. Every repetition reuses the same seed,
// so deterministic backends make the std collapse to zero. Per-problem
// backend failures zero that problem's counts and are flagged in the report.
// Attempt records reach the sink in problem order regardless of parallelism.
std::vector<EvalReport> evaluate(
    const std::vector<BenchmarkProblem>& problems, backend::Generator& prover,
    backend::Verifier& verifier, const EvalRunConfig& cfg,
    const std::function<void(const orchestrator::AttemptRecord&)>& attempt_sink = {});

// Mean proxy-token count per generation mode; records without a mode
// (compositions) are skipped, empty groups are omitted.
std::map<std::string, double> token_stats(
    const std::vector<nlohmann::json>& attempt_log);
std::map<std::string, double> token_stats_file(const std::string& path);

// "tag solved/total=percent" rows (tag-sorted) plus an overall row; a
// problem counts once per tag it carries.
std::vector<std::string> category_table(
    const EvalReport& report,
    const std::map<std::string, std::vector<std::string>>& tags_by_id);

}  // namespace proverkit::eval
