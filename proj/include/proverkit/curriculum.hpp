#pragma once

// Training-problem pool. Items are deduplicated by statement identity and
// persisted to an append-only JSONL journal that replays into the same pool
// state; subgoal injection and the expert-iteration loop feed it, and the
// SFT store collects verified (statement, proof) pairs.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "proverkit/ast.hpp"
#include "proverkit/jsonl.hpp"
#include "proverkit/orchestrator.hpp"

namespace proverkit::curriculum {

enum class Origin { Seed, SubgoalA, SubgoalB, External };
std::string to_string(Origin origin);
std::optional<Origin> origin_from_string(std::string_view s);

struct SolveHistoryEntry {
  int iteration = 0;
  int attempts = 0;
  int successes = 0;
};

struct CurriculumItem {
  std::string id;
  std::string statement;  // canonical theorem text
  Origin origin = Origin::Seed;
  std::optional<std::string> origin_id;  // required for subgoal origins
  std::optional<int> step_index;
  bool solved = false;
  std::vector<SolveHistoryEntry> solve_history;
  std::string source_tag;
};

class Pool {
 public:
  Pool() = default;

  // Replays a journal; a missing file yields an empty pool. Replay does not
  // attach, so loading for inspection never touches the file.
  static Pool load(const std::string& journal_path);

  // Subsequent mutations append ops to this journal.
  void attach_journal(const std::string& path, bool truncate = false);

  // False when a structurally equal statement is already pooled. Ids are
  // uniquified on collision.
  bool add(CurriculumItem item);

  // Adds the type-A and type-B statement of every step, skipping duplicates
  // (step 0's two forms coincide) and steps whose type-B construction fails.
  // Returns the number of items added.
  int inject_subgoals(const ast::ProofSketch& sketch, const std::string& origin_id);

  bool mark_solved(const std::string& id);  // false if unknown or already solved
  void record_history(const std::string& id, SolveHistoryEntry entry);

  // Rewrites the attached journal as one add op per item, current state
  // included, so long-running loops can bound replay cost.
  void compact();

  const std::vector<CurriculumItem>& items() const { return items_; }
  const CurriculumItem* find(const std::string& id) const;
  std::vector<const CurriculumItem*> unsolved() const;

 private:
  void apply_add(CurriculumItem item);
  void journal_add(const CurriculumItem& item);

  std::vector<CurriculumItem> items_;
  std::map<std::string, std::size_t> by_key_;  // statement identity -> index
  std::map<std::string, std::size_t> by_id_;
  std::unique_ptr<jsonl::Writer> journal_;
  std::string journal_path_;
};

struct SftRecord {
  std::string statement;
  std::string proof;
  std::string mode;
  std::string full_text;
  int iteration = 0;
};

// Deduplicates on (statement, proof); mode and reasoning text of a
// duplicate pair are not worth a second record.
class SftStore {
 public:
  SftStore() = default;
  static SftStore load(const std::string& path);  // missing file -> empty store

  bool add(const SftRecord& record);
  const std::vector<SftRecord>& records() const { return records_; }
  void export_jsonl(const std::string& path) const;

 private:
  std::vector<SftRecord> records_;
  std::set<std::pair<std::string, std::string>> seen_;
};

struct ExpertIterationOptions {
  bool inject_subgoals = true;      // decomposed solves seed new pool items
  int max_problems = 0;             // 0 = attempt every unsolved item
  double subgoal_seed_ratio = 1.0;  // subgoal items per seed item when capped
};

struct IterationSummary {
  int iteration = 0;
  int attempted = 0;  // problems run, minus those lost to backend failures
  int newly_solved = 0;
  int sft_added = 0;
  int injected_subgoals = 0;
  int backend_failures = 0;
};

// One expert-iteration round: run the orchestrator over unsolved items,
// record history, mark solves, collect SFT records (root proof plus every
// verified subgoal proof), and optionally inject subgoals from sketches
// that led to a decomposed solve.
IterationSummary expert_iteration_step(Pool& pool,
                                       orchestrator::Orchestrator& orch,
                                       SftStore& sft, int iteration,
                                       const ExpertIterationOptions& opts = {});

// Per-origin and per-tag "name solved/total=percent" rows, overall row
// last. Empty groups are omitted; an empty pool reports "overall 0/0".
std::vector<std::string> curriculum_report(const Pool& pool);

}  // namespace proverkit::curriculum
