#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "proverkit/backend.hpp"
#include "proverkit/errors.hpp"
#include "proverkit/eval.hpp"
#include "support.hpp"

using namespace proverkit;
using testsupport::TempDir;

namespace {

// Brute-force pass@k: fraction of k-subsets of n candidates that contain at
// least one of the first c. Exact for small n, independent of the lgamma
// implementation under test.
double pass_at_k_exhaustive(int n, int c, int k) {
  std::uint64_t total = 0, hit = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    ++total;
    if ((mask & ((1u << c) - 1)) != 0) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

// Prover that is down for statements mentioning a needle.
struct FlakyProver : backend::Generator {
  backend::MockProver inner;
  std::string needle;
  FlakyProver(std::shared_ptr<const backend::MockOracle> oracle,
              std::string marker)
      : inner(std::move(oracle)), needle(std::move(marker)) {}
  std::vector<backend::GenCompletion> generate(
      const backend::GenRequest& req) override {
    if (req.statement_text.find(needle) != std::string::npos)
      throw BackendError(BackendErrc::Unavailable, "prover offline");
    return inner.generate(req);
  }
};

std::vector<eval::BenchmarkProblem> numbered_problems(int count) {
  std::vector<eval::BenchmarkProblem> out;
  for (int i = 0; i < count; ++i) {
    eval::BenchmarkProblem p;
    p.id = "p" + std::to_string(i);
    p.statement = "theorem p" + std::to_string(i) +
                  " (a : ℕ) : a = " + std::to_string(i) + " := by\n  sorry";
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("pass@k matches exhaustive subset enumeration") {
  for (int n = 1; n <= 12; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        CAPTURE(n);
        CAPTURE(c);
        CAPTURE(k);
        CHECK(std::abs(eval::pass_at_k(n, c, k) -
                       pass_at_k_exhaustive(n, c, k)) < 1e-12);
      }
  // Spot value: choosing 2 of 4 with 2 passes misses only one pair.
  CHECK(std::abs(eval::pass_at_k(4, 2, 2) - 5.0 / 6.0) < 1e-12);
}

TEST_CASE("pass@k matches Monte-Carlo sampling at larger n") {
  std::mt19937 rng(20260818);
  const int trials = 100000;
  for (int round = 0; round < 20; ++round) {
    int n = std::uniform_int_distribution<int>(2, 64)(rng);
    int c = std::uniform_int_distribution<int>(0, n)(rng);
    int k = std::uniform_int_distribution<int>(1, n)(rng);

    int hits = 0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int t = 0; t < trials; ++t) {
      std::iota(idx.begin(), idx.end(), 0);
      bool hit = false;
      for (int j = 0; j < k; ++j) {  // partial Fisher-Yates draw of size k
        int swap_with =
            j + std::uniform_int_distribution<int>(0, n - 1 - j)(rng);
        std::swap(idx[static_cast<std::size_t>(j)],
                  idx[static_cast<std::size_t>(swap_with)]);
        if (idx[static_cast<std::size_t>(j)] < c) {
          hit = true;
          break;
        }
      }
      if (hit) ++hits;
    }
    CAPTURE(n);
    CAPTURE(c);
    CAPTURE(k);
    CHECK(std::abs(eval::pass_at_k(n, c, k) -
                   static_cast<double>(hits) / trials) < 0.01);
  }
}

TEST_CASE("pass@k is monotone and hits its boundary values") {
  for (int n : {8, 50}) {
    for (int c = 0; c <= n; c += n / 4) {
      double prev = 0.0;
      for (int k = 1; k <= n; ++k) {
        double cur = eval::pass_at_k(n, c, k);
        CHECK(cur >= prev - 1e-15);  // nondecreasing in k
        prev = cur;
      }
    }
    for (int k : {1, n / 2, n}) {
      double prev = 0.0;
      for (int c = 0; c <= n; ++c) {
        double cur = eval::pass_at_k(n, c, k);
        CHECK(cur >= prev - 1e-15);  // nondecreasing in c
        prev = cur;
      }
      CHECK(eval::pass_at_k(n, n, k) == 1.0);
      CHECK(eval::pass_at_k(n, 0, k) == 0.0);
    }
    for (int c = 1; c <= n; ++c) CHECK(eval::pass_at_k(n, c, n) == 1.0);
  }

  CHECK_THROWS_AS(eval::pass_at_k(4, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(eval::pass_at_k(4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(eval::pass_at_k(4, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(eval::pass_at_k(4, 2, 5), std::invalid_argument);
}

TEST_CASE("evaluate scores a benchmark with a deterministic backend") {
  auto oracle = std::make_shared<backend::MockOracle>();
  auto problems = numbered_problems(4);
  for (int i = 0; i < 3; ++i)
    oracle->add(problems[static_cast<std::size_t>(i)].statement, "decide");
  backend::MockProver prover(oracle);
  backend::MockVerifier verifier(oracle);

  eval::EvalRunConfig cfg;
  cfg.n = 1;
  cfg.ks = {1};
  cfg.benchmark_name = "mini";

  auto reports = eval::evaluate(problems, prover, verifier, cfg);
  REQUIRE(reports.size() == 1);
  const auto& rep = reports[0];
  CHECK(rep.benchmark == "mini");
  CHECK(rep.k == 1);
  CHECK(rep.mean == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_FALSE(rep.std_dev.has_value());  // one repetition, no spread
  CHECK(rep.solved_count == 3);
  CHECK(rep.total == 4);
  CHECK(rep.errors.empty());
  REQUIRE(rep.per_problem.size() == 4);
  CHECK(rep.per_problem.at("p0").n == 1);
  CHECK(rep.per_problem.at("p0").c == 1);
  CHECK(rep.per_problem.at("p3").c == 0);

  auto j = rep.to_json();
  CHECK(j["mean"] == doctest::Approx(0.75));
  CHECK(j["per_problem"]["p1"]["c"] == 1);
  CHECK_FALSE(j.contains("std"));
  CHECK_FALSE(j.contains("errors"));
}

TEST_CASE("repetitions reuse the seed, so a pure backend has zero spread") {
  auto oracle = std::make_shared<backend::MockOracle>();
  auto problems = numbered_problems(3);
  oracle->add(problems[0].statement, "decide");
  backend::MockProver prover(oracle);
  backend::MockVerifier verifier(oracle);

  eval::EvalRunConfig cfg;
  cfg.n = 4;
  cfg.ks = {1, 4};
  cfg.repetitions = 3;
  cfg.seed = 7;

  auto reports = eval::evaluate(problems, prover, verifier, cfg);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].k == 1);
  CHECK(reports[1].k == 4);
  for (const auto& rep : reports) {
    REQUIRE(rep.std_dev.has_value());
    CHECK(*rep.std_dev == 0.0);
    CHECK(rep.mean == doctest::Approx(1.0 / 3.0));
    CHECK(rep.to_json()["std"] == 0.0);
  }
  // Both k-reports describe the same candidate counts.
  CHECK(reports[0].per_problem.at("p0").n == 4);
  CHECK(reports[0].per_problem.at("p0").c == 4);
  CHECK(reports[0].per_problem.at("p1").c == 0);
  CHECK(reports[1].per_problem.at("p0").c ==
        reports[0].per_problem.at("p0").c);
  CHECK(reports[0].solved_count == reports[1].solved_count);
}

TEST_CASE("evaluate validates k against the sample budget") {
  auto oracle = std::make_shared<backend::MockOracle>();
  backend::MockProver prover(oracle);
  backend::MockVerifier verifier(oracle);
  auto problems = numbered_problems(1);

  eval::EvalRunConfig cfg;
  cfg.n = 32;
  cfg.ks = {33};
  CHECK_THROWS_AS(eval::evaluate(problems, prover, verifier, cfg),
                  std::invalid_argument);
  cfg.ks = {0};
  CHECK_THROWS_AS(eval::evaluate(problems, prover, verifier, cfg),
                  std::invalid_argument);
  cfg.ks = {32};
  cfg.repetitions = 0;
  CHECK_THROWS_AS(eval::evaluate(problems, prover, verifier, cfg),
                  std::invalid_argument);
}

TEST_CASE("a backend failure flags the problem instead of killing the run") {
  auto oracle = std::make_shared<backend::MockOracle>();
  auto problems = numbered_problems(2);
  oracle->add(problems[0].statement, "decide");
  FlakyProver prover(oracle, "p1");
  backend::MockVerifier verifier(oracle);

  eval::EvalRunConfig cfg;
  cfg.n = 2;
  cfg.ks = {1};

  auto reports = eval::evaluate(problems, prover, verifier, cfg);
  REQUIRE(reports.size() == 1);
  const auto& rep = reports[0];
  CHECK(rep.per_problem.at("p0").c == 2);
  CHECK(rep.per_problem.at("p1").n == 0);
  CHECK(rep.per_problem.at("p1").c == 0);
  REQUIRE(rep.errors.count("p1") == 1);
  CHECK(rep.errors.at("p1").find("prover offline") != std::string::npos);
  CHECK(rep.solved_count == 1);
  // The dead problem still counts in the denominator.
  CHECK(rep.mean == doctest::Approx(0.5));
  CHECK(rep.to_json()["errors"]["p1"] == rep.errors.at("p1"));
}

TEST_CASE("attempt records reach the sink in problem order") {
  auto oracle = std::make_shared<backend::MockOracle>();
  auto problems = numbered_problems(8);
  backend::MockProver prover(oracle);
  backend::MockVerifier verifier(oracle);

  eval::EvalRunConfig cfg;
  cfg.n = 2;
  cfg.ks = {1};
  cfg.parallelism = 4;

  std::vector<orchestrator::AttemptRecord> seen;
  eval::evaluate(problems, prover, verifier, cfg,
                 [&](const orchestrator::AttemptRecord& r) {
                   seen.push_back(r);
                 });
  REQUIRE(seen.size() == 16);
  for (int i = 0; i < 8; ++i)
    for (int ci = 0; ci < 2; ++ci) {
      const auto& rec = seen[static_cast<std::size_t>(i * 2 + ci)];
      CHECK(rec.problem_id == "p" + std::to_string(i));
      CHECK(rec.candidate_index == ci);
      CHECK(rec.kind == "e2e");
      CHECK(rec.mode == "non_cot");
      CHECK(rec.status == "fail");
    }
}

TEST_CASE("token stats average per generation mode") {
  std::vector<nlohmann::json> log{
      {{"mode", "cot"}, {"tokens", 150}},
      {{"mode", "cot"}, {"tokens", 250}},
      {{"mode", "non_cot"}, {"tokens", 10}},
      {{"mode", ""}, {"tokens", 999}},  // compositions carry no mode
  };
  auto stats = eval::token_stats(log);
  REQUIRE(stats.size() == 2);
  CHECK(stats.at("cot") == doctest::Approx(200.0));
  CHECK(stats.at("non_cot") == doctest::Approx(10.0));
  CHECK(eval::token_stats({}).empty());

  TempDir tmp;
  auto path = tmp.file("attempts.jsonl");
  testsupport::spit(path,
                    "{\"mode\":\"cot\",\"tokens\":100}\n"
                    "\n"
                    "{\"mode\":\"cot\",\"tokens\":300}\n");
  auto from_file = eval::token_stats_file(path);
  CHECK(from_file.at("cot") == doctest::Approx(200.0));
}

TEST_CASE("category table groups per tag with an overall row") {
  eval::EvalReport report;
  report.total = 244;
  report.solved_count = 217;
  std::map<std::string, std::vector<std::string>> tags;
  for (int i = 0; i < 20; ++i) {
    auto id = "imo" + std::to_string(i);
    report.per_problem[id] = {8, i < 10 ? 1 : 0};
    tags[id] = {"IMO"};
  }
  for (int i = 0; i < 5; ++i) {
    auto id = "aime" + std::to_string(i);
    report.per_problem[id] = {8, 2};
    tags[id] = {"AIME", "shortlist"};
  }
  report.per_problem["untagged"] = {8, 1};

  auto rows = eval::category_table(report, tags);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "AIME 5/5=100.0%");
  CHECK(rows[1] == "IMO 10/20=50.0%");
  CHECK(rows[2] == "shortlist 5/5=100.0%");
  CHECK(rows[3] == "overall 217/244=88.9%");
}

TEST_CASE("benchmark files round-trip and reject malformed lines") {
  TempDir tmp;
  auto path = tmp.file("bench.jsonl");

  std::vector<eval::BenchmarkProblem> problems{
      {"p0", "test", {"IMO", "hard"},
       "theorem p0 (a : ℕ) : a = 0 := by\n  sorry"},
      {"p1", "test", {}, "theorem p1 (a : ℕ) : a = 1 := by\n  sorry"},
  };
  eval::write_benchmark_jsonl(problems, path);
  auto loaded = eval::load_benchmark_jsonl(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == "p0");
  CHECK(loaded[0].split == "test");
  CHECK(loaded[0].tags == std::vector<std::string>{"IMO", "hard"});
  CHECK(loaded[0].statement == problems[0].statement);
  CHECK(loaded[1].tags.empty());

  auto bad = tmp.file("bad.jsonl");
  testsupport::spit(bad,
                    "{\"id\":\"ok\",\"statement\":\"theorem t : True := by sorry\"}\n"
                    "{\"id\":\"broken\"}\n");
  try {
    eval::load_benchmark_jsonl(bad);
    FAIL("expected runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(bad + ":2") != std::string::npos);
  }
}

TEST_CASE("a directory of lean files becomes a benchmark") {
  TempDir tmp;
  testsupport::spit(tmp.file("b_second.lean"),
                    "theorem second (a : ℕ) : a = 2 := by\n  sorry\n");
  testsupport::spit(tmp.file("a_first.lean"),
                    "import Mathlib\n\ntheorem first (a : ℕ) : a = 1 := by\n  sorry\n");
  testsupport::spit(tmp.file("notes.txt"), "not a problem\n");

  auto problems = eval::benchmark_from_lean_dir(tmp.path(), "valid");
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].id == "first");  // file-name order, not write order
  CHECK(problems[1].id == "second");
  CHECK(problems[0].split == "valid");
  CHECK(problems[0].statement.find("import Mathlib") == 0);

  testsupport::spit(tmp.file("c_bad.lean"), "theorem (((\n");
  CHECK_THROWS_AS(eval::benchmark_from_lean_dir(tmp.path(), "valid"),
                  ParseError);
}
