#include "proverkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "proverkit/ast.hpp"
#include "proverkit/errors.hpp"
#include "proverkit/jsonl.hpp"
#include "proverkit/parallel.hpp"

namespace proverkit::eval {

namespace {

using nlohmann::json;

std::string ratio_row(const std::string& name, int solved, int total) {
  if (total == 0) return name + " 0/0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d/%d=%.1f%%", solved, total,
                100.0 * solved / total);
  return name + " " + buf;
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::vector<BenchmarkProblem> load_benchmark_jsonl(const std::string& path) {
  std::vector<BenchmarkProblem> out;
  auto lines = jsonl::read_file(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& j = lines[i];
    if (!j.contains("id") || !j.contains("statement"))
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": benchmark record needs id and statement");
    BenchmarkProblem p;
    p.id = j["id"].get<std::string>();
    p.split = j.value("split", "");
    for (const auto& t : j.value("tags", json::array()))
      p.tags.push_back(t.get<std::string>());
    p.statement = j["statement"].get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

void write_benchmark_jsonl(const std::vector<BenchmarkProblem>& problems,
                           const std::string& path) {
  jsonl::Writer out(path, /*truncate=*/true);
  for (const auto& p : problems)
    out.write({{"id", p.id},
               {"split", p.split},
               {"tags", p.tags},
               {"statement", p.statement}});
}

std::vector<BenchmarkProblem> benchmark_from_lean_dir(const std::string& dir,
                                                      const std::string& split) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".lean")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<BenchmarkProblem> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    std::ostringstream text;
    text << in.rdbuf();
    BenchmarkProblem p;
    p.statement = text.str();
    p.id = ast::parse_statement(p.statement).name;
    p.split = split;
    out.push_back(std::move(p));
  }
  return out;
}

double pass_at_k(int n, int c, int k) {
  if (c < 0 || c > n || k < 1 || k > n)
    throw std::invalid_argument("pass_at_k requires 0 <= c <= n and 1 <= k <= n");
  if (c == 0) return 0.0;
  if (k > n - c) return 1.0;  // every k-subset hits a success
  return 1.0 - std::exp(log_choose(n - c, k) - log_choose(n, k));
}

nlohmann::json EvalReport::to_json() const {
  json per = json::object();
  for (const auto& [id, counts] : per_problem)
    per[id] = {{"n", counts.n}, {"c", counts.c}};
  json j{{"benchmark", benchmark}, {"k", k},
         {"mean", mean},           {"solved_count", solved_count},
         {"total", total},         {"per_problem", std::move(per)}};
  if (std_dev) j["std"] = *std_dev;
  if (!errors.empty()) j["errors"] = errors;
  return j;
}

std::vector<EvalReport> evaluate(
    const std::vector<BenchmarkProblem>& problems, backend::Generator& prover,
    backend::Verifier& verifier, const EvalRunConfig& cfg,
    const std::function<void(const orchestrator::AttemptRecord&)>& attempt_sink) {
  if (cfg.repetitions < 1)
    throw std::invalid_argument("repetitions must be at least 1");
  for (int k : cfg.ks)
    if (k < 1 || k > cfg.n)
      throw std::invalid_argument("every k must satisfy 1 <= k <= n");

  struct RepOutcome {
    std::vector<ProblemCounts> counts;
    std::map<std::string, std::string> errors;
  };
  std::vector<RepOutcome> reps;
  // rep r's per-k mean over problems
  std::map<int, std::vector<double>> rep_means;

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    RepOutcome outcome;
    outcome.counts.resize(problems.size());
    std::vector<std::vector<orchestrator::AttemptRecord>> buffers(problems.size());
    std::vector<std::optional<std::string>> failures(problems.size());

    parallel_for(problems.size(), cfg.parallelism, [&](std::size_t i) {
      const auto& problem = problems[i];
      backend::GenRequest req;
      req.statement_text = problem.statement;
      req.mode = cfg.mode;
      req.n = cfg.n;
      req.max_tokens = cfg.max_tokens;
      req.temperature = cfg.temperature;
      req.seed = cfg.seed;  // identical across repetitions by design

      std::vector<backend::GenCompletion> completions;
      try {
        completions = prover.generate(req);
      } catch (const BackendError& e) {
        failures[i] = e.what();
        return;
      }

      auto& counts = outcome.counts[i];
      counts.n = static_cast<int>(completions.size());
      for (std::size_t ci = 0; ci < completions.size(); ++ci) {
        const auto& comp = completions[ci];
        orchestrator::AttemptRecord rec;
        rec.problem_id = problem.id;
        rec.kind = "e2e";
        rec.candidate_index = static_cast<int>(ci);
        rec.tokens = comp.token_count;
        rec.mode = backend::to_string(cfg.mode);
        if (!comp.extracted_code) {
          rec.status = "no_code";
          buffers[i].push_back(std::move(rec));
          continue;
        }
        auto verdict =
            backend::lint_then_verify(verifier, problem.statement,
                                      *comp.extracted_code,
                                      cfg.verify_timeout_s);
        rec.status = backend::to_string(verdict.status);
        rec.wall_time_ms = verdict.wall_time_ms;
        buffers[i].push_back(std::move(rec));
        if (verdict.status == backend::VerdictStatus::Pass) ++counts.c;
      }
    });

    if (attempt_sink)
      for (const auto& buffer : buffers)
        for (const auto& rec : buffer) attempt_sink(rec);
    for (std::size_t i = 0; i < problems.size(); ++i)
      if (failures[i]) outcome.errors[problems[i].id] = *failures[i];

    for (int k : cfg.ks) {
      double sum = 0.0;
      for (const auto& counts : outcome.counts)
        if (counts.n > 0) sum += pass_at_k(counts.n, counts.c, std::min(k, counts.n));
      rep_means[k].push_back(problems.empty()
                                 ? 0.0
                                 : sum / static_cast<double>(problems.size()));
    }
    reps.push_back(std::move(outcome));
  }

  std::vector<EvalReport> reports;
  for (int k : cfg.ks) {
    EvalReport report;
    report.benchmark = cfg.benchmark_name;
    report.k = k;
    report.total = static_cast<int>(problems.size());

    const auto& means = rep_means[k];
    double mean = 0.0;
    for (double m : means) mean += m;
    report.mean = means.empty() ? 0.0 : mean / static_cast<double>(means.size());
    if (cfg.repetitions >= 2) {
      double var = 0.0;
      for (double m : means) var += (m - report.mean) * (m - report.mean);
      report.std_dev = std::sqrt(var / static_cast<double>(means.size() - 1));
    }

    const auto& first = reps.front();
    for (std::size_t i = 0; i < problems.size(); ++i) {
      report.per_problem[problems[i].id] = first.counts[i];
      if (first.counts[i].c > 0) ++report.solved_count;
    }
    report.errors = first.errors;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::map<std::string, double> token_stats(
    const std::vector<nlohmann::json>& attempt_log) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& rec : attempt_log) {
    auto mode = rec.value("mode", "");
    if (mode.empty()) continue;
    sums[mode].first += rec.value("tokens", 0);
    sums[mode].second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [mode, acc] : sums) out[mode] = acc.first / acc.second;
  return out;
}

std::map<std::string, double> token_stats_file(const std::string& path) {
  return token_stats(jsonl::read_file(path));
}

std::vector<std::string> category_table(
    const EvalReport& report,
    const std::map<std::string, std::vector<std::string>>& tags_by_id) {
  struct Counts {
    int solved = 0;
    int total = 0;
  };
  std::map<std::string, Counts> by_tag;
  for (const auto& [id, counts] : report.per_problem) {
    auto it = tags_by_id.find(id);
    if (it == tags_by_id.end()) continue;
    for (const auto& tag : it->second) {
      ++by_tag[tag].total;
      if (counts.c > 0) ++by_tag[tag].solved;
    }
  }

  std::vector<std::string> rows;
  for (const auto& [tag, counts] : by_tag)
    rows.push_back(ratio_row(tag, counts.solved, counts.total));
  rows.push_back(ratio_row("overall", report.solved_count, report.total));
  return rows;
}

}  // namespace proverkit::eval
