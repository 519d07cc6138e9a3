// proverkit command-line front end. Configuration is layered: flags beat
// PROVERKIT_SECTION_KEY environment variables, which beat the INI config
// file. Human output goes to stdout; structured JSON logs go to stderr.
// Exit codes: 0 ok/solved, 1 unsolved or lint violations, 2 config or input
// error, 3 backend failure, 130 interrupted.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proverkit/ast.hpp"
#include "proverkit/backend.hpp"
#include "proverkit/curriculum.hpp"
#include "proverkit/errors.hpp"
#include "proverkit/eval.hpp"
#include "proverkit/http_backend.hpp"
#include "proverkit/jsonl.hpp"
#include "proverkit/orchestrator.hpp"
#include "proverkit/rl.hpp"
#include "proverkit/transform.hpp"

namespace {

using nlohmann::json;
using namespace proverkit;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

void log_event(json j) { std::cerr << j.dump() << "\n"; }

// CLI11 routes INI sections to subcommands, but our sections name option
// prefixes ([run] seed -> --run.seed). Flatten parents back into the key,
// then overlay set environment variables: CLI11 processes the file before
// the environment, and the contract here is flags > env > file.
struct SectionedConfig : CLI::ConfigTOML {
  struct EnvOverride {
    std::vector<std::string> keys;  // option long names, canonical first
    std::string envname;
  };
  std::vector<EnvOverride> env_overrides;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() || item.name == "++" || item.name == "--")
        continue;
      std::string flat;
      for (const auto& parent : item.parents) flat += parent + ".";
      item.name = flat + item.name;
      item.parents.clear();
    }
    for (const auto& ov : env_overrides) {
      const char* value = std::getenv(ov.envname.c_str());
      if (value == nullptr || *value == '\0') continue;
      std::erase_if(items, [&](const CLI::ConfigItem& item) {
        return std::find(ov.keys.begin(), ov.keys.end(), item.name) !=
               ov.keys.end();
      });
      CLI::ConfigItem item;
      item.name = ov.keys.front();
      item.inputs = {value};
      items.push_back(std::move(item));
    }
    return items;
  }
};

struct Config {
  // [run]
  std::uint64_t seed = 0;
  int parallelism = 1;
  bool deterministic = false;
  std::string mode = "non_cot";
  std::string subgoal_mode = "non_cot";
  int max_tokens = 32768;
  double temperature = 1.0;
  bool continue_on_failed_step = false;
  // [backends]
  std::string prover_kind = "mock";
  std::string prover_url;
  std::string sketcher_kind = "mock";
  std::string sketcher_url;
  std::string verifier_kind = "mock";
  std::string verifier_url;
  std::string mock_proofs;
  std::string mock_sketches;
  int max_retries = 3;
  int backoff_ms = 50;
  int max_inflight = 8;
  double request_timeout_s = 120.0;
  // [budget]
  orchestrator::Budget budget;
  // [reward]
  rl::RewardConfig reward;
  // [curation]
  double curation_lo = 0.0;
  double curation_hi = 1.0;
  // [paths]
  std::string pool_journal = "out/pool.jsonl";
  std::string attempt_log = "out/attempts.jsonl";
  std::string cold_start = "out/cold_start.jsonl";
  std::string sft_export = "out/sft.jsonl";
  std::string reports_dir = "out/reports";
};

std::optional<std::string> validate_config(const Config& cfg) {
  if (cfg.parallelism < 1) return "run.parallelism must be at least 1";
  if (!backend::mode_from_string(cfg.mode))
    return "run.mode must be cot or non_cot";
  if (!backend::mode_from_string(cfg.subgoal_mode))
    return "run.subgoal_mode must be cot or non_cot";
  for (const auto* kind :
       {&cfg.prover_kind, &cfg.sketcher_kind, &cfg.verifier_kind})
    if (*kind != "mock" && *kind != "http")
      return "backend kind must be mock or http";
  if (cfg.prover_kind == "http" && cfg.prover_url.empty())
    return "backends.prover_url required for http prover";
  if (cfg.sketcher_kind == "http" && cfg.sketcher_url.empty())
    return "backends.sketcher_url required for http sketcher";
  if (cfg.verifier_kind == "http" && cfg.verifier_url.empty())
    return "backends.verifier_url required for http verifier";
  if (!(0.0 <= cfg.curation_lo && cfg.curation_lo < cfg.curation_hi &&
        cfg.curation_hi <= 1.0))
    return "curation band must satisfy 0 <= lo < hi <= 1";

  std::set<std::string> seen;
  for (const auto* path : {&cfg.pool_journal, &cfg.attempt_log,
                           &cfg.cold_start, &cfg.sft_export, &cfg.reports_dir})
    if (!path->empty() && !seen.insert(*path).second)
      return "configured paths must be distinct: " + *path;
  return std::nullopt;
}

struct Backends {
  std::shared_ptr<backend::MockOracle> oracle;
  std::shared_ptr<backend::Generator> prover;
  std::shared_ptr<backend::Generator> sketcher;
  std::shared_ptr<backend::Verifier> verifier;
};

Backends make_backends(const Config& cfg) {
  Backends b;
  b.oracle = cfg.mock_proofs.empty()
                 ? std::make_shared<backend::MockOracle>()
                 : backend::MockOracle::from_jsonl(cfg.mock_proofs);

  auto http = [&](const std::string& url) {
    backend::HttpConfig h;
    h.base_url = url;
    h.max_retries = cfg.max_retries;
    h.backoff_initial_ms = cfg.backoff_ms;
    h.max_inflight = cfg.max_inflight;
    h.request_timeout_s = cfg.request_timeout_s;
    return h;
  };

  if (cfg.prover_kind == "http")
    b.prover = std::make_shared<backend::HttpGenerator>(http(cfg.prover_url));
  else
    b.prover = std::make_shared<backend::MockProver>(b.oracle);

  if (cfg.sketcher_kind == "http")
    b.sketcher = std::make_shared<backend::HttpGenerator>(http(cfg.sketcher_url));
  else
    b.sketcher = cfg.mock_sketches.empty()
                     ? std::make_shared<backend::MockSketcher>()
                     : backend::MockSketcher::from_jsonl(cfg.mock_sketches);

  if (cfg.verifier_kind == "http")
    b.verifier = std::make_shared<backend::HttpVerifier>(http(cfg.verifier_url));
  else
    b.verifier = std::make_shared<backend::MockVerifier>(b.oracle);
  return b;
}

orchestrator::OrchestratorConfig make_orch_config(const Config& cfg) {
  orchestrator::OrchestratorConfig oc;
  oc.budget = cfg.budget;
  oc.e2e_mode = *backend::mode_from_string(cfg.mode);
  oc.subgoal_mode = *backend::mode_from_string(cfg.subgoal_mode);
  oc.parallelism = cfg.parallelism;
  oc.deterministic = cfg.deterministic;
  oc.seed = cfg.seed;
  oc.continue_on_failed_step = cfg.continue_on_failed_step;
  oc.max_tokens = cfg.max_tokens;
  oc.temperature = cfg.temperature;
  return oc;
}

std::unique_ptr<jsonl::Writer> open_log(const std::string& path) {
  if (path.empty()) return nullptr;
  auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  return std::make_unique<jsonl::Writer>(path, /*truncate=*/true);
}

std::optional<std::string> read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream text;
    text << std::cin.rdbuf();
    return text.str();
  }
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json result_to_json(const orchestrator::PipelineResult& r) {
  json j{{"problem_id", r.problem_id},
         {"solved", r.solved},
         {"route", orchestrator::to_string(r.route)},
         {"mode", r.mode},
         {"attempts_used", r.attempts_used},
         {"generated", r.generated},
         {"depth_reached", r.depth_reached}};
  if (r.code) j["code"] = *r.code;
  if (r.chain_of_thought) j["chain_of_thought"] = *r.chain_of_thought;
  if (r.candidate_index) j["candidate_index"] = *r.candidate_index;
  if (r.error) j["error"] = *r.error;
  if (!r.sub_solves.empty()) {
    json subs = json::array();
    for (const auto& s : r.sub_solves)
      subs.push_back({{"statement", s.statement_text},
                      {"code", s.code},
                      {"mode", s.mode}});
    j["sub_solves"] = std::move(subs);
  }
  return j;
}

int finish(int code) { return g_interrupted.load() ? 130 : code; }

// ---- commands ----------------------------------------------------------

int cmd_prove(const Config& cfg, const std::string& file,
              const std::string& statement) {
  std::string text;
  if (!file.empty()) {
    auto content = read_input(file);
    if (!content) {
      log_event({{"event", "input_error"}, {"message", "cannot read " + file}});
      return 2;
    }
    text = *content;
  } else {
    text = statement;
  }

  ast::TheoremStatement stmt;
  try {
    stmt = ast::parse_statement(text);
  } catch (const ParseError& e) {
    log_event({{"event", "parse_error"}, {"message", e.what()}});
    return 2;
  }

  auto backends = make_backends(cfg);
  orchestrator::Orchestrator orch(*backends.prover, *backends.sketcher,
                                  *backends.verifier, make_orch_config(cfg));
  auto attempt_log = open_log(cfg.attempt_log);
  auto cold_log = open_log(cfg.cold_start);
  if (attempt_log)
    orch.set_attempt_sink([&](const orchestrator::AttemptRecord& r) {
      attempt_log->write_line(r.to_jsonl_line());
    });
  if (cold_log)
    orch.set_cold_start_sink([&](const orchestrator::ColdStartRecord& r) {
      cold_log->write_line(r.to_jsonl_line());
    });
  orch.set_cancel_check([] { return g_interrupted.load(); });

  orchestrator::PipelineResult result;
  try {
    result = orch.solve({stmt.name, text});
  } catch (const BackendError& e) {
    log_event({{"event", "backend_error"}, {"message", e.what()}});
    return finish(3);
  }

  std::cout << result_to_json(result).dump() << "\n";
  log_event({{"event", "prove_done"},
             {"problem_id", result.problem_id},
             {"solved", result.solved},
             {"route", orchestrator::to_string(result.route)}});
  return finish(result.solved ? 0 : 1);
}

int cmd_curriculum(const Config& cfg, int iterations, bool init,
                   const std::string& seed_problems,
                   const curriculum::ExpertIterationOptions& opts) {
  if (cfg.pool_journal.empty()) {
    log_event({{"event", "config_error"},
               {"message", "paths.pool_journal is required"}});
    return 2;
  }

  curriculum::Pool pool;
  if (init) {
    auto dir = std::filesystem::path(cfg.pool_journal).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    pool.attach_journal(cfg.pool_journal, /*truncate=*/true);
    if (!seed_problems.empty()) {
      std::vector<eval::BenchmarkProblem> seeds;
      try {
        seeds = eval::load_benchmark_jsonl(seed_problems);
      } catch (const std::exception& e) {
        log_event({{"event", "input_error"}, {"message", e.what()}});
        return 2;
      }
      for (const auto& p : seeds) {
        curriculum::CurriculumItem item;
        item.id = p.id;
        item.statement = p.statement;
        item.origin = curriculum::Origin::Seed;
        item.source_tag = p.tags.empty() ? "" : p.tags.front();
        try {
          pool.add(std::move(item));
        } catch (const ParseError& e) {
          log_event({{"event", "input_error"},
                     {"message", p.id + ": " + e.what()}});
          return 2;
        }
      }
    }
  } else {
    if (!std::filesystem::exists(cfg.pool_journal)) {
      log_event({{"event", "config_error"},
                 {"message", cfg.pool_journal +
                                 " does not exist; pass --init to create it"}});
      return 2;
    }
    try {
      pool = curriculum::Pool::load(cfg.pool_journal);
    } catch (const std::exception& e) {
      log_event({{"event", "input_error"}, {"message", e.what()}});
      return 2;
    }
    pool.attach_journal(cfg.pool_journal);
  }

  auto sft = cfg.sft_export.empty() ? curriculum::SftStore()
                                    : curriculum::SftStore::load(cfg.sft_export);

  auto backends = make_backends(cfg);
  orchestrator::Orchestrator orch(*backends.prover, *backends.sketcher,
                                  *backends.verifier, make_orch_config(cfg));
  auto attempt_log = open_log(cfg.attempt_log);
  auto cold_log = open_log(cfg.cold_start);
  if (attempt_log)
    orch.set_attempt_sink([&](const orchestrator::AttemptRecord& r) {
      attempt_log->write_line(r.to_jsonl_line());
    });
  if (cold_log)
    orch.set_cold_start_sink([&](const orchestrator::ColdStartRecord& r) {
      cold_log->write_line(r.to_jsonl_line());
    });
  orch.set_cancel_check([] { return g_interrupted.load(); });

  bool backends_down = false;
  for (int it = 1; it <= iterations && !g_interrupted.load(); ++it) {
    auto summary = curriculum::expert_iteration_step(pool, orch, sft, it, opts);
    json line{{"iteration", summary.iteration},
              {"attempted", summary.attempted},
              {"newly_solved", summary.newly_solved},
              {"sft_added", summary.sft_added},
              {"injected_subgoals", summary.injected_subgoals}};
    std::cout << line.dump() << "\n";
    log_event({{"event", "iteration_done"}, {"summary", line}});
    if (summary.backend_failures > 0 && summary.attempted == 0)
      backends_down = true;
  }

  if (iterations > 0) {
    if (!cfg.sft_export.empty()) {
      auto dir = std::filesystem::path(cfg.sft_export).parent_path();
      if (!dir.empty()) std::filesystem::create_directories(dir);
      sft.export_jsonl(cfg.sft_export);
    }
    pool.compact();
  }
  return finish(backends_down ? 3 : 0);
}

int cmd_eval(const Config& cfg, const std::string& benchmark_path, int n,
             std::vector<int> ks, int repetitions) {
  std::vector<eval::BenchmarkProblem> problems;
  try {
    problems = eval::load_benchmark_jsonl(benchmark_path);
  } catch (const std::exception& e) {
    log_event({{"event", "input_error"}, {"message", e.what()}});
    return 2;
  }
  if (ks.empty()) ks = {n};
  for (int k : ks)
    if (k < 1 || k > n) {
      log_event({{"event", "config_error"},
                 {"message", "k=" + std::to_string(k) +
                                 " must satisfy 1 <= k <= n"}});
      return 2;
    }
  if (repetitions < 1) {
    log_event({{"event", "config_error"},
               {"message", "repetitions must be at least 1"}});
    return 2;
  }

  auto backends = make_backends(cfg);
  auto attempt_log = open_log(cfg.attempt_log);
  std::vector<json> log_records;

  eval::EvalRunConfig run;
  run.n = n;
  run.ks = ks;
  run.repetitions = repetitions;
  run.seed = cfg.seed;
  run.mode = *backend::mode_from_string(cfg.mode);
  run.parallelism = cfg.parallelism;
  run.verify_timeout_s = cfg.budget.verify_timeout_s;
  run.max_tokens = cfg.max_tokens;
  run.temperature = cfg.temperature;
  run.benchmark_name = std::filesystem::path(benchmark_path).stem().string();

  std::vector<eval::EvalReport> reports;
  try {
    reports = eval::evaluate(problems, *backends.prover, *backends.verifier,
                             run, [&](const orchestrator::AttemptRecord& r) {
                               auto line = r.to_jsonl_line();
                               if (attempt_log) attempt_log->write_line(line);
                               log_records.push_back(json::parse(line));
                             });
  } catch (const std::invalid_argument& e) {
    log_event({{"event", "config_error"}, {"message", e.what()}});
    return 2;
  } catch (const BackendError& e) {
    log_event({{"event", "backend_error"}, {"message", e.what()}});
    return finish(3);
  }

  std::map<std::string, std::vector<std::string>> tags_by_id;
  for (const auto& p : problems) tags_by_id[p.id] = p.tags;
  auto categories = eval::category_table(reports.front(), tags_by_id);
  auto tokens = eval::token_stats(log_records);

  json out{{"benchmark", run.benchmark_name},
           {"config",
            {{"n", n},
             {"ks", ks},
             {"repetitions", repetitions},
             {"seed", cfg.seed},
             {"mode", cfg.mode}}},
           {"category_table", categories}};
  json report_array = json::array();
  for (const auto& r : reports) report_array.push_back(r.to_json());
  out["reports"] = std::move(report_array);
  json token_json = json::object();
  for (const auto& [mode, mean] : tokens) token_json[mode] = mean;
  out["token_stats"] = std::move(token_json);

  if (!cfg.reports_dir.empty()) {
    std::filesystem::create_directories(cfg.reports_dir);
    std::ofstream file(std::filesystem::path(cfg.reports_dir) /
                       "eval_report.json");
    file << out.dump(2) << "\n";
  }

  std::cout << "benchmark " << run.benchmark_name << ": " << problems.size()
            << " problems, n=" << n << ", repetitions=" << repetitions << "\n";
  for (const auto& r : reports) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", r.mean);
    std::cout << "pass@" << r.k << " mean=" << buf;
    if (r.std_dev) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.std_dev);
      std::cout << " std=" << buf;
    }
    std::cout << " solved=" << r.solved_count << "/" << r.total << "\n";
  }
  for (const auto& row : categories) std::cout << row << "\n";
  for (const auto& [mode, mean] : tokens) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", mean);
    std::cout << "tokens[" << mode << "] mean=" << buf << "\n";
  }
  return finish(0);
}

int cmd_lint(const std::string& file) {
  auto text = read_input(file);
  if (!text) {
    log_event({{"event", "input_error"}, {"message", "cannot read " + file}});
    return 2;
  }
  auto report = backend::lint(*text);
  for (const auto& v : report.violations)
    std::cout << "banned token '" << v.rule << "' at byte " << v.offset << "\n";
  return report.ok ? 0 : 1;
}

int cmd_transform(const std::string& file, const std::string& op, int step,
                  const std::string& proofs_path,
                  const std::optional<std::string>& trailing) {
  auto text = read_input(file);
  if (!text) {
    log_event({{"event", "input_error"}, {"message", "cannot read " + file}});
    return 2;
  }
  ast::ProofSketch sketch;
  try {
    sketch = ast::parse_sketch(*text);
  } catch (const ParseError& e) {
    log_event({{"event", "parse_error"}, {"message", e.what()}});
    return 2;
  }

  try {
    if (op == "type_a" || op == "type_b") {
      auto sub = op == "type_a" ? transform::make_type_a(sketch, step)
                                : transform::make_type_b(sketch, step);
      std::cout << ast::canonical_print(sub.theorem) << "\n";
      return 0;
    }
    if (op == "compose") {
      std::map<std::string, std::string> proofs;
      if (!proofs_path.empty())
        for (const auto& j : jsonl::read_file(proofs_path))
          proofs[j.at("label").get<std::string>()] =
              j.at("proof").get<std::string>();
      auto composed = transform::compose_proof(sketch, proofs, trailing);
      std::cout << composed.code << "\n";
      return 0;
    }
  } catch (const TransformError& e) {
    log_event({{"event", "transform_error"}, {"message", e.what()}});
    return 2;
  } catch (const std::exception& e) {
    log_event({{"event", "input_error"}, {"message", e.what()}});
    return 2;
  }
  log_event({{"event", "config_error"},
             {"message", "op must be type_a, type_b, or compose"}});
  return 2;
}

int cmd_report(const Config& cfg, const std::string& journal_arg) {
  auto path = journal_arg.empty() ? cfg.pool_journal : journal_arg;
  if (path.empty() || !std::filesystem::exists(path)) {
    log_event({{"event", "input_error"},
               {"message", "pool journal not found: " + path}});
    return 2;
  }
  curriculum::Pool pool;
  try {
    pool = curriculum::Pool::load(path);
  } catch (const std::exception& e) {
    log_event({{"event", "input_error"}, {"message", e.what()}});
    return 2;
  }
  for (const auto& row : curriculum::curriculum_report(pool))
    std::cout << row << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  CLI::App app{"proverkit: subgoal-decomposition proof orchestration"};
  app.require_subcommand(1);
  // Global options may appear after the subcommand too.
  app.fallthrough();
  app.set_config("--config", "", "INI config file with [run]/[backends]/... sections");
  auto config_fmt = std::make_shared<SectionedConfig>();
  app.config_formatter(config_fmt);

  Config cfg;
  app.add_option("--run.seed,--seed", cfg.seed, "generation seed")
      ->envname("PROVERKIT_RUN_SEED");
  app.add_option("--run.parallelism,--parallelism", cfg.parallelism,
                 "worker threads for batches")
      ->envname("PROVERKIT_RUN_PARALLELISM");
  app.add_flag("--run.deterministic,--deterministic", cfg.deterministic,
               "pin timestamps for reproducible artifacts")
      ->envname("PROVERKIT_RUN_DETERMINISTIC");
  app.add_option("--run.mode", cfg.mode, "generation mode: cot or non_cot")
      ->envname("PROVERKIT_RUN_MODE");
  app.add_option("--run.subgoal_mode", cfg.subgoal_mode,
                 "generation mode for subgoal solves")
      ->envname("PROVERKIT_RUN_SUBGOAL_MODE");
  app.add_option("--run.max_tokens", cfg.max_tokens, "per-request token cap")
      ->envname("PROVERKIT_RUN_MAX_TOKENS");
  app.add_option("--run.temperature", cfg.temperature, "sampling temperature")
      ->envname("PROVERKIT_RUN_TEMPERATURE");
  app.add_flag("--run.continue_on_failed_step", cfg.continue_on_failed_step,
               "keep solving later subgoals after one fails")
      ->envname("PROVERKIT_RUN_CONTINUE_ON_FAILED_STEP");

  app.add_option("--backends.prover", cfg.prover_kind, "mock or http")
      ->envname("PROVERKIT_BACKENDS_PROVER");
  app.add_option("--backends.prover_url", cfg.prover_url, "prover endpoint")
      ->envname("PROVERKIT_BACKENDS_PROVER_URL");
  app.add_option("--backends.sketcher", cfg.sketcher_kind, "mock or http")
      ->envname("PROVERKIT_BACKENDS_SKETCHER");
  app.add_option("--backends.sketcher_url", cfg.sketcher_url,
                 "sketcher endpoint")
      ->envname("PROVERKIT_BACKENDS_SKETCHER_URL");
  app.add_option("--backends.verifier", cfg.verifier_kind, "mock or http")
      ->envname("PROVERKIT_BACKENDS_VERIFIER");
  app.add_option("--backends.verifier_url", cfg.verifier_url,
                 "verifier endpoint")
      ->envname("PROVERKIT_BACKENDS_VERIFIER_URL");
  app.add_option("--backends.mock_proofs", cfg.mock_proofs,
                 "JSONL proof table for the mock oracle")
      ->envname("PROVERKIT_BACKENDS_MOCK_PROOFS");
  app.add_option("--backends.mock_sketches", cfg.mock_sketches,
                 "JSONL sketch scripts for the mock sketcher")
      ->envname("PROVERKIT_BACKENDS_MOCK_SKETCHES");
  app.add_option("--backends.max_retries", cfg.max_retries,
                 "transport retries per request")
      ->envname("PROVERKIT_BACKENDS_MAX_RETRIES");
  app.add_option("--backends.backoff_ms", cfg.backoff_ms,
                 "initial retry backoff, doubles per retry")
      ->envname("PROVERKIT_BACKENDS_BACKOFF_MS");
  app.add_option("--backends.max_inflight", cfg.max_inflight,
                 "concurrent requests per backend")
      ->envname("PROVERKIT_BACKENDS_MAX_INFLIGHT");
  app.add_option("--backends.request_timeout_s", cfg.request_timeout_s,
                 "generation request timeout")
      ->envname("PROVERKIT_BACKENDS_REQUEST_TIMEOUT_S");

  app.add_option("--budget.end_to_end_samples", cfg.budget.end_to_end_samples,
                 "candidates per direct attempt")
      ->envname("PROVERKIT_BUDGET_END_TO_END_SAMPLES");
  app.add_option("--budget.subgoal_samples", cfg.budget.subgoal_samples,
                 "candidates per subgoal attempt")
      ->envname("PROVERKIT_BUDGET_SUBGOAL_SAMPLES");
  app.add_option("--budget.max_depth", cfg.budget.max_depth,
                 "decomposition depth limit")
      ->envname("PROVERKIT_BUDGET_MAX_DEPTH");
  app.add_option("--budget.sketch_attempts", cfg.budget.sketch_attempts,
                 "sketch completions per decomposition")
      ->envname("PROVERKIT_BUDGET_SKETCH_ATTEMPTS");
  app.add_option("--budget.verify_timeout_s", cfg.budget.verify_timeout_s,
                 "verifier timeout per candidate")
      ->envname("PROVERKIT_BUDGET_VERIFY_TIMEOUT_S");

  app.add_flag("--reward.consistency_enabled", cfg.reward.consistency_enabled,
               "apply the consistency penalty")
      ->envname("PROVERKIT_REWARD_CONSISTENCY_ENABLED");
  app.add_option("--reward.consistency_weight", cfg.reward.consistency_weight,
                 "penalty weight in [0,1]")
      ->envname("PROVERKIT_REWARD_CONSISTENCY_WEIGHT");
  app.add_option("--reward.cutoff_step", cfg.reward.consistency_cutoff_step,
                 "training step after which the penalty stops; 0 = never")
      ->envname("PROVERKIT_REWARD_CUTOFF_STEP");
  app.add_option("--reward.group_size", cfg.reward.group_size,
                 "candidates per rollout group")
      ->envname("PROVERKIT_REWARD_GROUP_SIZE");
  app.add_option("--reward.problems_per_step", cfg.reward.problems_per_step,
                 "distinct problems per training step")
      ->envname("PROVERKIT_REWARD_PROBLEMS_PER_STEP");

  app.add_option("--curation.lo", cfg.curation_lo, "solve-rate band lower bound")
      ->envname("PROVERKIT_CURATION_LO");
  app.add_option("--curation.hi", cfg.curation_hi, "solve-rate band upper bound")
      ->envname("PROVERKIT_CURATION_HI");

  app.add_option("--paths.pool_journal", cfg.pool_journal,
                 "curriculum pool journal")
      ->envname("PROVERKIT_PATHS_POOL_JOURNAL");
  app.add_option("--paths.attempt_log", cfg.attempt_log,
                 "attempt record log, truncated per run")
      ->envname("PROVERKIT_PATHS_ATTEMPT_LOG");
  app.add_option("--paths.cold_start", cfg.cold_start,
                 "cold-start record store, truncated per run")
      ->envname("PROVERKIT_PATHS_COLD_START");
  app.add_option("--paths.sft_export", cfg.sft_export, "SFT dataset export")
      ->envname("PROVERKIT_PATHS_SFT_EXPORT");
  app.add_option("--paths.reports_dir", cfg.reports_dir,
                 "directory for eval reports")
      ->envname("PROVERKIT_PATHS_REPORTS_DIR");

  // prove
  auto* prove = app.add_subcommand("prove", "solve one theorem statement");
  std::string prove_file, prove_statement;
  prove->add_option("--file", prove_file, "Lean file with the statement");
  prove->add_option("--statement", prove_statement, "inline statement text");

  // curriculum
  auto* curr = app.add_subcommand("curriculum", "run expert iterations");
  int iterations = 1;
  bool init = false;
  std::string seed_problems;
  curriculum::ExpertIterationOptions iter_opts;
  bool no_inject = false;
  curr->add_option("--iterations", iterations, "expert-iteration rounds");
  curr->add_flag("--init", init, "start a fresh pool journal");
  curr->add_option("--seed-problems", seed_problems,
                   "benchmark JSONL to seed the pool (with --init)");
  curr->add_option("--max-problems", iter_opts.max_problems,
                   "cap problems per iteration; 0 = all unsolved");
  curr->add_option("--subgoal-ratio", iter_opts.subgoal_seed_ratio,
                   "subgoal items per seed item when capped");
  curr->add_flag("--no-inject", no_inject,
                 "do not pool subgoals from decomposed solves");

  // eval
  auto* evalc = app.add_subcommand("eval", "run a benchmark evaluation");
  std::string benchmark_path;
  int eval_n = 32;
  std::vector<int> eval_ks;
  int repetitions = 1;
  evalc->add_option("--benchmark", benchmark_path, "benchmark JSONL")
      ->required();
  evalc->add_option("--n", eval_n, "candidates per problem");
  evalc->add_option("--k", eval_ks, "pass@k values (repeatable)");
  evalc->add_option("--repetitions", repetitions, "independent repetitions");

  // lint
  auto* lintc = app.add_subcommand("lint", "scan Lean code for banned tokens");
  std::string lint_file;
  lintc->add_option("file", lint_file, "Lean file, or - for stdin")->required();

  // transform
  auto* trans = app.add_subcommand("transform",
                                   "derive subgoal statements or compose");
  std::string trans_file, trans_op, trans_proofs, trans_trailing;
  int trans_step = 0;
  trans->add_option("--file", trans_file, "sketch file")->required();
  trans->add_option("--op", trans_op, "type_a, type_b, or compose")->required();
  trans->add_option("--step", trans_step, "step index for type_a/type_b");
  trans->add_option("--proofs", trans_proofs,
                    "JSONL lines {\"label\",\"proof\"} for compose");
  auto* trailing_opt =
      trans->add_option("--trailing-proof", trans_trailing,
                        "trailing tactic text for compose");

  // report
  auto* reportc = app.add_subcommand("report", "print the curriculum report");
  std::string report_journal;
  reportc->add_option("--journal", report_journal,
                      "pool journal (defaults to paths.pool_journal)");

  for (const auto* op : app.get_options()) {
    if (op->get_envname().empty() || op->get_lnames().empty()) continue;
    config_fmt->env_overrides.push_back({op->get_lnames(), op->get_envname()});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (auto problem = validate_config(cfg)) {
    log_event({{"event", "config_error"}, {"message", *problem}});
    return 2;
  }
  if (no_inject) iter_opts.inject_subgoals = false;

  try {
    if (*prove) {
      if (prove_file.empty() == prove_statement.empty()) {
        log_event({{"event", "config_error"},
                   {"message", "pass exactly one of --file or --statement"}});
        return 2;
      }
      return cmd_prove(cfg, prove_file, prove_statement);
    }
    if (*curr)
      return cmd_curriculum(cfg, iterations, init, seed_problems, iter_opts);
    if (*evalc)
      return cmd_eval(cfg, benchmark_path, eval_n, eval_ks, repetitions);
    if (*lintc) return cmd_lint(lint_file);
    if (*trans)
      return cmd_transform(trans_file, trans_op, trans_step, trans_proofs,
                           trailing_opt->count() > 0
                               ? std::optional<std::string>(trans_trailing)
                               : std::nullopt);
    if (*reportc) return cmd_report(cfg, report_journal);
  } catch (const BackendError& e) {
    log_event({{"event", "backend_error"}, {"message", e.what()}});
    return finish(3);
  } catch (const std::exception& e) {
    log_event({{"event", "error"}, {"message", e.what()}});
    return 2;
  }
  return 2;
}
