#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "proverkit/ast.hpp"
#include "proverkit/backend.hpp"
#include "proverkit/jsonl.hpp"
#include "proverkit/transform.hpp"
#include "support.hpp"

using namespace proverkit;
using nlohmann::json;
using testsupport::corpus;
using testsupport::corpus_path;
using testsupport::slurp;
using testsupport::spit;
using testsupport::TempDir;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string cli_bin() { return PROVERKIT_CLI_BIN; }

// Runs a shell command with the temp dir as cwd, capturing both streams.
CliResult run_shell(const TempDir& tmp, const std::string& inner) {
  auto out_path = tmp.file("__stdout.txt");
  auto err_path = tmp.file("__stderr.txt");
  std::string cmd = "cd \"" + std::string(tmp.path()) + "\" && " + inner +
                    " >\"" + out_path + "\" 2>\"" + err_path + "\"";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

CliResult run_cli(const TempDir& tmp, const std::string& args,
                  const std::string& env = "") {
  return run_shell(tmp, env + (env.empty() ? "" : " ") + "\"" + cli_bin() +
                            "\" " + args);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

const std::string kSolvable =
    "theorem p (a : ℤ) (h : a > 2) : a > 1 := by\n  sorry";
const std::string kDecomposable =
    "theorem t (x : ℤ) (hx : x ≥ 1) : x ≥ -1 := by\n  sorry";
const std::string kStuck = "theorem s3 (k : ℕ) : k = 12 := by\n  sorry";

// Oracle and sketch tables for the standard scenario: p solves directly,
// t decomposes into two table-provable subgoals, s3 goes nowhere.
void write_mock_tables(const TempDir& tmp) {
  std::string proofs;
  proofs += json{{"statement", kSolvable}, {"proof", "omega"}}.dump() + "\n";
  proofs += json{{"statement",
                  "theorem b0 (x : ℤ) (hx : x ≥ 1) : x ≥ 0 := by sorry"},
                 {"proof", "positivity"}}
                .dump() +
            "\n";
  proofs +=
      json{{"statement",
            "theorem b1 (x : ℤ) (hx : x ≥ 1) (s₁ : x ≥ 0) : x ≥ -1 := by sorry"},
           {"proof", "linarith [s₁]"}}
          .dump() +
      "\n";
  spit(tmp.file("proofs.jsonl"), proofs);

  std::string cot =
      "Bound below by zero first.\n\n"
      "```lean4\n"
      "theorem t (x : ℤ) (hx : x ≥ 1) : x ≥ -1 := by\n"
      "  have s₁ : x ≥ 0 := by sorry\n"
      "  have s₂ : x ≥ -1 := by sorry\n"
      "  sorry\n"
      "```\n";
  spit(tmp.file("sketches.jsonl"),
       json{{"statement", kDecomposable}, {"cot", cot}}.dump() + "\n");
}

const std::string kMockArgs =
    "--backends.mock_proofs proofs.jsonl --backends.mock_sketches sketches.jsonl "
    "--budget.end_to_end_samples 2 --budget.subgoal_samples 2";

}  // namespace

TEST_CASE("cli prove solves directly and reports the route") {
  TempDir tmp;
  write_mock_tables(tmp);
  spit(tmp.file("p.lean"), kSolvable);

  auto r = run_cli(tmp, "prove --file p.lean " + kMockArgs);
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["problem_id"] == "p");
  CHECK(j["solved"] == true);
  CHECK(j["route"] == "end_to_end");
  CHECK(j["mode"] == "non_cot");
  CHECK(j["attempts_used"] == 1);
  CHECK(j["candidate_index"] == 0);
  CHECK(j["code"].get<std::string>().find("omega") != std::string::npos);
  CHECK(r.err.find("prove_done") != std::string::npos);

  // One verified attempt in the truncated-per-run log.
  auto attempts = jsonl::read_file(tmp.file("out/attempts.jsonl"));
  REQUIRE(attempts.size() == 1);
  CHECK(attempts[0]["status"] == "pass");
}

TEST_CASE("cli prove decomposes and persists cold-start data") {
  TempDir tmp;
  write_mock_tables(tmp);
  spit(tmp.file("t.lean"), kDecomposable);

  auto r = run_cli(tmp,
                   "prove --file t.lean --run.deterministic " + kMockArgs);
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["solved"] == true);
  CHECK(j["route"] == "decomposed");
  CHECK(j["mode"] == "cot");
  CHECK(j["attempts_used"] == 5);   // 2 failed e2e + 2 subgoals + composition
  CHECK(j["generated"] == 7);       // 2 e2e + 1 sketch + 2 per subgoal
  CHECK(j["depth_reached"] == 1);
  CHECK(j["chain_of_thought"].get<std::string>().find("Bound below") == 0);
  REQUIRE(j["sub_solves"].size() == 2);
  CHECK(j["sub_solves"][0]["statement"].get<std::string>().find(
            "t_subgoal_0_b") != std::string::npos);

  auto colds = jsonl::read_file(tmp.file("out/cold_start.jsonl"));
  REQUIRE(colds.size() == 1);
  CHECK(colds[0]["problem_id"] == "t");
  CHECK(colds[0]["created_at"] == "1970-01-01T00:00:00Z");
  CHECK(colds[0]["composed_code"] == j["code"]);

  auto attempts = jsonl::read_file(tmp.file("out/attempts.jsonl"));
  CHECK(attempts.size() == 6);  // 2 e2e, sketch, 2 subgoals, composition
}

TEST_CASE("cli prove exit codes cover unsolved and bad input") {
  TempDir tmp;
  write_mock_tables(tmp);
  spit(tmp.file("s3.lean"), kStuck);

  auto unsolved = run_cli(tmp, "prove --file s3.lean " + kMockArgs);
  CHECK(unsolved.code == 1);
  auto j = json::parse(unsolved.out);
  CHECK(j["solved"] == false);
  CHECK(j["route"] == "unsolved");
  CHECK(j["error"] == "no_skeleton_block");

  // Inline statements work; the trivial goal closes without any table.
  auto inline_ok =
      run_cli(tmp, "prove --statement 'theorem q : True := by sorry'");
  CHECK(inline_ok.code == 0);

  spit(tmp.file("broken.lean"), "theorem (]( : nonsense");
  auto malformed = run_cli(tmp, "prove --file broken.lean");
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find("parse_error") != std::string::npos);

  auto missing = run_cli(tmp, "prove --file does_not_exist.lean");
  CHECK(missing.code == 2);

  auto both = run_cli(
      tmp, "prove --file s3.lean --statement 'theorem q : True := by sorry'");
  CHECK(both.code == 2);
  auto neither = run_cli(tmp, "prove");
  CHECK(neither.code == 2);
}

TEST_CASE("cli lint prints byte-precise violations") {
  TempDir tmp;
  auto report = backend::lint(corpus("putnam_2005_a4.lean"));
  REQUIRE(report.violations.size() == 1);
  REQUIRE(report.violations[0].rule == "apply?");

  auto r = run_cli(tmp, "lint \"" + corpus_path("putnam_2005_a4.lean") + "\"");
  CHECK(r.code == 1);
  CHECK(r.out == "banned token 'apply?' at byte " +
                     std::to_string(report.violations[0].offset) + "\n");

  auto clean =
      run_cli(tmp, "lint \"" + corpus_path("imo_1992_p1_complete.lean") + "\"");
  CHECK(clean.code == 0);
  CHECK(clean.out.empty());

  auto piped = run_shell(tmp, "printf 'sorry' | \"" + cli_bin() + "\" lint -");
  CHECK(piped.code == 1);
  CHECK(piped.out == "banned token 'sorry' at byte 0\n");
}

TEST_CASE("cli transform emits subgoal statements and compositions") {
  TempDir tmp;
  auto skeleton_path = corpus_path("imo_1992_p1_skeleton.lean");
  auto skeleton = ast::parse_sketch(corpus("imo_1992_p1_skeleton.lean"));

  auto type_b = run_cli(
      tmp, "transform --file \"" + skeleton_path + "\" --op type_b --step 1");
  CHECK(type_b.code == 0);
  CHECK(type_b.out ==
        ast::canonical_print(transform::make_type_b(skeleton, 1).theorem) +
            "\n");

  auto type_a = run_cli(
      tmp, "transform --file \"" + skeleton_path + "\" --op type_a --step 0");
  CHECK(type_a.code == 0);
  CHECK(type_a.out ==
        ast::canonical_print(transform::make_type_a(skeleton, 0).theorem) +
            "\n");

  // Compose with the known-good step proofs; expect the library's output.
  auto complete = ast::parse_sketch(corpus("imo_1992_p1_complete.lean"));
  std::string proof_lines;
  std::map<std::string, std::string> proofs;
  for (const auto& step : complete.steps) {
    proofs[step.label] = step.body.text;
    proof_lines +=
        json{{"label", step.label}, {"proof", step.body.text}}.dump() + "\n";
  }
  spit(tmp.file("proofs.jsonl"), proof_lines);
  auto composed = transform::compose_proof(skeleton, proofs, std::nullopt);

  auto compose = run_cli(tmp, "transform --file \"" + skeleton_path +
                                  "\" --op compose --proofs proofs.jsonl");
  CHECK(compose.code == 0);
  CHECK(compose.out == composed.code + "\n");

  auto bad_op = run_cli(
      tmp, "transform --file \"" + skeleton_path + "\" --op shuffle");
  CHECK(bad_op.code == 2);
  auto bad_step = run_cli(
      tmp, "transform --file \"" + skeleton_path + "\" --op type_b --step 9");
  CHECK(bad_step.code == 2);
  CHECK(bad_step.err.find("transform_error") != std::string::npos);
}

TEST_CASE("cli curriculum iterates, compacts, and reports") {
  TempDir tmp;
  write_mock_tables(tmp);

  std::string seeds;
  seeds += json{{"id", "p"},
                {"split", "train"},
                {"tags", {"IMO"}},
                {"statement", kSolvable}}
               .dump() +
           "\n";
  seeds += json{{"id", "t"}, {"split", "train"}, {"statement", kDecomposable}}
               .dump() +
           "\n";
  seeds += json{{"id", "s3"}, {"split", "train"}, {"statement", kStuck}}.dump() +
           "\n";
  spit(tmp.file("seeds.jsonl"), seeds);

  auto r = run_cli(tmp,
                   "curriculum --init --seed-problems seeds.jsonl "
                   "--iterations 2 " +
                       kMockArgs);
  CHECK(r.code == 0);
  auto out_lines = lines_of(r.out);
  REQUIRE(out_lines.size() == 2);

  auto one = json::parse(out_lines[0]);
  CHECK(one["iteration"] == 1);
  CHECK(one["attempted"] == 3);
  CHECK(one["newly_solved"] == 2);
  CHECK(one["sft_added"] == 4);
  CHECK(one["injected_subgoals"] == 2);

  auto two = json::parse(out_lines[1]);
  CHECK(two["iteration"] == 2);
  CHECK(two["attempted"] == 3);
  CHECK(two["newly_solved"] == 2);
  CHECK(two["sft_added"] == 1);
  CHECK(two["injected_subgoals"] == 0);

  // The run ends with a compacted journal and the SFT export on disk.
  auto journal = jsonl::read_file(tmp.file("out/pool.jsonl"));
  REQUIRE(journal.size() == 5);
  for (const auto& op : journal) CHECK(op["op"] == "add");
  CHECK(jsonl::read_file(tmp.file("out/sft.jsonl")).size() == 5);

  auto report = run_cli(tmp, "report");
  CHECK(report.code == 0);
  auto rows = lines_of(report.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "seed 2/3=66.7%");
  CHECK(rows[1] == "subgoal_a 1/1=100.0%");
  CHECK(rows[2] == "subgoal_b 1/1=100.0%");
  CHECK(rows[3] == "IMO 1/1=100.0%");
  CHECK(rows[4] == "overall 4/5=80.0%");
}

TEST_CASE("cli curriculum guards its journal") {
  TempDir tmp;
  write_mock_tables(tmp);

  // No journal and no --init is a configuration error.
  auto no_init = run_cli(tmp, "curriculum --iterations 1");
  CHECK(no_init.code == 2);
  CHECK(no_init.err.find("--init") != std::string::npos);

  // Zero iterations with --init seeds the pool and stops.
  std::string seeds =
      json{{"id", "p"}, {"split", "train"}, {"statement", kSolvable}}.dump() +
      "\n";
  spit(tmp.file("seeds.jsonl"), seeds);
  auto zero = run_cli(
      tmp, "curriculum --init --seed-problems seeds.jsonl --iterations 0");
  CHECK(zero.code == 0);
  CHECK(zero.out.empty());
  CHECK(jsonl::read_file(tmp.file("out/pool.jsonl")).size() == 1);

  // A later run picks the journal up without --init.
  auto next = run_cli(tmp, "curriculum --iterations 1 " + kMockArgs);
  CHECK(next.code == 0);
  auto summary = json::parse(lines_of(next.out).at(0));
  CHECK(summary["attempted"] == 1);
  CHECK(summary["newly_solved"] == 1);
}

TEST_CASE("cli eval writes a stable report") {
  TempDir tmp;
  write_mock_tables(tmp);

  std::string bench;
  bench += json{{"id", "p0"},
                {"split", "test"},
                {"tags", {"IMO"}},
                {"statement", kSolvable}}
               .dump() +
           "\n";
  bench += json{{"id", "p1"},
                {"split", "test"},
                {"tags", {"IMO"}},
                {"statement",
                 "theorem p1 (x : ℤ) (hx : x ≥ 1) : x ≥ 0 := by\n  sorry"}}
               .dump() +
           "\n";
  bench += json{{"id", "p2"},
                {"split", "test"},
                {"tags", {"AIME"}},
                {"statement", "theorem p2 : True := by\n  sorry"}}
               .dump() +
           "\n";
  bench +=
      json{{"id", "p3"}, {"split", "test"}, {"statement", kStuck}}.dump() +
      "\n";
  spit(tmp.file("bench.jsonl"), bench);

  const std::string args =
      "eval --benchmark bench.jsonl --n 1 --k 1 "
      "--backends.mock_proofs proofs.jsonl";
  auto r = run_cli(tmp, args);
  CHECK(r.code == 0);
  CHECK(r.out.find("benchmark bench: 4 problems, n=1, repetitions=1") == 0);
  CHECK(r.out.find("pass@1 mean=0.7500 solved=3/4\n") != std::string::npos);
  CHECK(r.out.find("AIME 1/1=100.0%\n") != std::string::npos);
  CHECK(r.out.find("IMO 2/2=100.0%\n") != std::string::npos);
  CHECK(r.out.find("overall 3/4=75.0%\n") != std::string::npos);
  CHECK(r.out.find("tokens[non_cot] mean=") != std::string::npos);

  auto report_path = tmp.file("out/reports/eval_report.json");
  auto first_bytes = slurp(report_path);
  auto report = json::parse(first_bytes);
  CHECK(report["benchmark"] == "bench");
  CHECK(report["config"]["seed"] == 0);
  CHECK(report["reports"][0]["mean"] == doctest::Approx(0.75));
  CHECK(report["reports"][0]["per_problem"]["p2"]["c"] == 1);

  // Same inputs, same bytes: nothing volatile leaks into the artifact.
  auto again = run_cli(tmp, args);
  CHECK(again.code == 0);
  CHECK(slurp(report_path) == first_bytes);

  auto bad_k = run_cli(tmp, "eval --benchmark bench.jsonl --n 1 --k 2");
  CHECK(bad_k.code == 2);
  CHECK(bad_k.err.find("config_error") != std::string::npos);
}

TEST_CASE("cli config layering: flags beat env beats file") {
  TempDir tmp;
  write_mock_tables(tmp);
  spit(tmp.file("bench.jsonl"),
       json{{"id", "p0"}, {"split", "test"}, {"statement", kSolvable}}.dump() +
           "\n");
  spit(tmp.file("run.ini"), "[run]\nseed=7\n");

  const std::string base =
      "eval --benchmark bench.jsonl --n 1 --k 1 "
      "--backends.mock_proofs proofs.jsonl --config run.ini";
  auto report_seed = [&]() {
    return json::parse(slurp(tmp.file("out/reports/eval_report.json")))
        .at("config")
        .at("seed")
        .get<int>();
  };

  CHECK(run_cli(tmp, base).code == 0);
  CHECK(report_seed() == 7);

  CHECK(run_cli(tmp, base, "PROVERKIT_RUN_SEED=9").code == 0);
  CHECK(report_seed() == 9);

  CHECK(run_cli(tmp, base + " --run.seed 11", "PROVERKIT_RUN_SEED=9").code == 0);
  CHECK(report_seed() == 11);
}

TEST_CASE("cli surfaces backend and configuration failures") {
  TempDir tmp;

  // Nothing listens on port 1; the transport error maps to exit 3.
  auto down = run_cli(tmp,
                      "prove --statement 'theorem q : True := by sorry' "
                      "--backends.prover http "
                      "--backends.prover_url http://127.0.0.1:1 "
                      "--backends.max_retries 0");
  CHECK(down.code == 3);
  CHECK(down.err.find("backend_error") != std::string::npos);

  auto bad_kind = run_cli(
      tmp, "prove --statement 'theorem q : True := by sorry' "
           "--backends.prover carrier");
  CHECK(bad_kind.code == 2);

  auto url_missing = run_cli(
      tmp, "prove --statement 'theorem q : True := by sorry' "
           "--backends.verifier http");
  CHECK(url_missing.code == 2);

  auto report_missing = run_cli(tmp, "report");
  CHECK(report_missing.code == 2);
  CHECK(report_missing.err.find("pool journal not found") != std::string::npos);
}
