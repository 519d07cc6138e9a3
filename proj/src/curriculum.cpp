#include "proverkit/curriculum.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "proverkit/errors.hpp"
#include "proverkit/transform.hpp"

namespace proverkit::curriculum {

namespace {

using nlohmann::json;

std::string ratio_row(const std::string& name, int solved, int total) {
  if (total == 0) return name + " 0/0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d/%d=%.1f%%", solved, total,
                100.0 * solved / total);
  return name + " " + buf;
}

json item_to_json(const CurriculumItem& item) {
  json j{{"op", "add"},
         {"id", item.id},
         {"statement", item.statement},
         {"origin", to_string(item.origin)},
         {"source_tag", item.source_tag},
         {"solved", item.solved}};
  if (item.origin_id) j["origin_id"] = *item.origin_id;
  if (item.step_index) j["step_index"] = *item.step_index;
  json hist = json::array();
  for (const auto& h : item.solve_history)
    hist.push_back({{"iteration", h.iteration},
                    {"attempts", h.attempts},
                    {"successes", h.successes}});
  j["history"] = std::move(hist);
  return j;
}

CurriculumItem item_from_json(const json& j) {
  CurriculumItem item;
  item.id = j.at("id").get<std::string>();
  item.statement = j.at("statement").get<std::string>();
  if (auto o = origin_from_string(j.value("origin", "seed"))) item.origin = *o;
  if (j.contains("origin_id")) item.origin_id = j["origin_id"].get<std::string>();
  if (j.contains("step_index")) item.step_index = j["step_index"].get<int>();
  item.solved = j.value("solved", false);
  item.source_tag = j.value("source_tag", "");
  for (const auto& h : j.value("history", json::array()))
    item.solve_history.push_back({h.value("iteration", 0), h.value("attempts", 0),
                                  h.value("successes", 0)});
  return item;
}

}  // namespace

std::string to_string(Origin origin) {
  switch (origin) {
    case Origin::Seed: return "seed";
    case Origin::SubgoalA: return "subgoal_a";
    case Origin::SubgoalB: return "subgoal_b";
    case Origin::External: return "external";
  }
  return "seed";
}

std::optional<Origin> origin_from_string(std::string_view s) {
  if (s == "seed") return Origin::Seed;
  if (s == "subgoal_a") return Origin::SubgoalA;
  if (s == "subgoal_b") return Origin::SubgoalB;
  if (s == "external") return Origin::External;
  return std::nullopt;
}

Pool Pool::load(const std::string& journal_path) {
  Pool pool;
  if (!std::filesystem::exists(journal_path)) return pool;
  for (const auto& j : jsonl::read_file(journal_path)) {
    auto op = j.value("op", "");
    if (op == "add") {
      pool.apply_add(item_from_json(j));
    } else if (op == "solve") {
      if (auto it = pool.by_id_.find(j.at("id").get<std::string>());
          it != pool.by_id_.end())
        pool.items_[it->second].solved = true;
    } else if (op == "history") {
      if (auto it = pool.by_id_.find(j.at("id").get<std::string>());
          it != pool.by_id_.end())
        pool.items_[it->second].solve_history.push_back(
            {j.value("iteration", 0), j.value("attempts", 0),
             j.value("successes", 0)});
    } else {
      throw std::runtime_error(journal_path + ": unknown journal op '" + op + "'");
    }
  }
  return pool;
}

void Pool::attach_journal(const std::string& path, bool truncate) {
  journal_ = std::make_unique<jsonl::Writer>(path, truncate);
  journal_path_ = path;
}

void Pool::apply_add(CurriculumItem item) {
  auto key = ast::statement_key(ast::parse_statement(item.statement));
  if (by_key_.count(key)) return;  // journal replay tolerates duplicates
  for (int suffix = 2; by_id_.count(item.id); ++suffix)
    item.id = item.id + "_" + std::to_string(suffix);
  by_key_[key] = items_.size();
  by_id_[item.id] = items_.size();
  items_.push_back(std::move(item));
}

bool Pool::add(CurriculumItem item) {
  auto key = ast::statement_key(ast::parse_statement(item.statement));
  if (by_key_.count(key)) return false;
  for (int suffix = 2; by_id_.count(item.id); ++suffix)
    item.id = item.id + "_" + std::to_string(suffix);
  by_key_[key] = items_.size();
  by_id_[item.id] = items_.size();
  items_.push_back(std::move(item));
  journal_add(items_.back());
  return true;
}

int Pool::inject_subgoals(const ast::ProofSketch& sketch,
                          const std::string& origin_id) {
  const auto* origin_item = find(origin_id);
  const std::string tag = origin_item ? origin_item->source_tag : "";

  int added = 0;
  for (std::size_t i = 0; i < sketch.steps.size(); ++i) {
    auto push = [&](transform::SubgoalStatement sub, Origin origin) {
      CurriculumItem item;
      item.id = sub.theorem.name;
      item.statement = ast::canonical_print(sub.theorem);
      item.origin = origin;
      item.origin_id = origin_id;
      item.step_index = static_cast<int>(i);
      item.source_tag = tag;
      if (add(std::move(item))) ++added;
    };
    push(transform::make_type_a(sketch, static_cast<int>(i)), Origin::SubgoalA);
    try {
      push(transform::make_type_b(sketch, static_cast<int>(i)), Origin::SubgoalB);
    } catch (const TransformError&) {
      // a label colliding with a binder name leaves only the type-A form
    }
  }
  return added;
}

bool Pool::mark_solved(const std::string& id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end() || items_[it->second].solved) return false;
  items_[it->second].solved = true;
  if (journal_) journal_->write({{"op", "solve"}, {"id", id}});
  return true;
}

void Pool::record_history(const std::string& id, SolveHistoryEntry entry) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return;
  items_[it->second].solve_history.push_back(entry);
  if (journal_)
    journal_->write({{"op", "history"},
                     {"id", id},
                     {"iteration", entry.iteration},
                     {"attempts", entry.attempts},
                     {"successes", entry.successes}});
}

void Pool::compact() {
  if (journal_path_.empty()) return;
  journal_.reset();
  journal_ = std::make_unique<jsonl::Writer>(journal_path_, /*truncate=*/true);
  for (const auto& item : items_) journal_->write(item_to_json(item));
}

const CurriculumItem* Pool::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

std::vector<const CurriculumItem*> Pool::unsolved() const {
  std::vector<const CurriculumItem*> out;
  for (const auto& item : items_)
    if (!item.solved) out.push_back(&item);
  return out;
}

void Pool::journal_add(const CurriculumItem& item) {
  if (journal_) journal_->write(item_to_json(item));
}

SftStore SftStore::load(const std::string& path) {
  SftStore store;
  if (!std::filesystem::exists(path)) return store;
  for (const auto& j : jsonl::read_file(path))
    store.add({j.at("statement").get<std::string>(),
               j.at("proof").get<std::string>(), j.value("mode", ""),
               j.value("full_text", ""), j.value("iteration", 0)});
  return store;
}

bool SftStore::add(const SftRecord& record) {
  if (!seen_.emplace(record.statement, record.proof).second) return false;
  records_.push_back(record);
  return true;
}

void SftStore::export_jsonl(const std::string& path) const {
  jsonl::Writer out(path, /*truncate=*/true);
  for (const auto& r : records_)
    out.write({{"statement", r.statement},
               {"proof", r.proof},
               {"mode", r.mode},
               {"full_text", r.full_text},
               {"iteration", r.iteration}});
}

IterationSummary expert_iteration_step(Pool& pool,
                                       orchestrator::Orchestrator& orch,
                                       SftStore& sft, int iteration,
                                       const ExpertIterationOptions& opts) {
  IterationSummary summary;
  summary.iteration = iteration;

  auto todo = pool.unsolved();
  std::vector<const CurriculumItem*> selected;
  if (opts.max_problems <= 0 ||
      todo.size() <= static_cast<std::size_t>(opts.max_problems)) {
    selected = std::move(todo);
  } else {
    // Interleave seed-like and subgoal items at the configured ratio.
    std::vector<const CurriculumItem*> seeds, subs;
    for (const auto* item : todo)
      (item->origin == Origin::SubgoalA || item->origin == Origin::SubgoalB
           ? subs
           : seeds)
          .push_back(item);
    double credit = 0.0;
    std::size_t si = 0, bi = 0;
    while (selected.size() < static_cast<std::size_t>(opts.max_problems) &&
           (si < seeds.size() || bi < subs.size())) {
      if (si < seeds.size()) {
        selected.push_back(seeds[si++]);
        credit += opts.subgoal_seed_ratio;
      } else {
        credit = 1.0;  // seeds exhausted: drain subgoals
      }
      while (credit >= 1.0 && bi < subs.size() &&
             selected.size() < static_cast<std::size_t>(opts.max_problems)) {
        selected.push_back(subs[bi++]);
        credit -= 1.0;
      }
    }
  }

  std::vector<orchestrator::Problem> problems;
  problems.reserve(selected.size());
  for (const auto* item : selected)
    problems.push_back({item->id, item->statement});
  summary.attempted = static_cast<int>(problems.size());

  auto results = orch.run_batch(problems);
  for (const auto& r : results) {
    if (r.error && r.error->rfind("backend:", 0) == 0) {
      --summary.attempted;
      ++summary.backend_failures;
    }
    pool.record_history(r.problem_id,
                        {iteration, r.attempts_used, r.solved ? 1 : 0});
    if (!r.solved) continue;
    if (pool.mark_solved(r.problem_id)) ++summary.newly_solved;

    const auto* item = pool.find(r.problem_id);
    if (item && r.code &&
        sft.add({item->statement, *r.code, r.mode, r.full_text.value_or(""),
                 iteration}))
      ++summary.sft_added;
    for (const auto& s : r.sub_solves)
      if (sft.add({s.statement_text, s.code, s.mode, s.full_text, iteration}))
        ++summary.sft_added;

    if (opts.inject_subgoals && r.sketch) {
      // canonical sketch text from the orchestrator always reparses
      auto sk = ast::parse_sketch(*r.sketch);
      summary.injected_subgoals += pool.inject_subgoals(sk, r.problem_id);
    }
  }
  return summary;
}

std::vector<std::string> curriculum_report(const Pool& pool) {
  struct Counts {
    int solved = 0;
    int total = 0;
  };
  std::map<std::string, Counts> by_origin;
  std::map<std::string, Counts> by_tag;
  Counts overall;

  for (const auto& item : pool.items()) {
    ++overall.total;
    ++by_origin[to_string(item.origin)].total;
    if (!item.source_tag.empty()) ++by_tag[item.source_tag].total;
    if (item.solved) {
      ++overall.solved;
      ++by_origin[to_string(item.origin)].solved;
      if (!item.source_tag.empty()) ++by_tag[item.source_tag].solved;
    }
  }

  std::vector<std::string> rows;
  for (auto origin : {Origin::Seed, Origin::SubgoalA, Origin::SubgoalB,
                      Origin::External}) {
    auto it = by_origin.find(to_string(origin));
    if (it != by_origin.end())
      rows.push_back(ratio_row(it->first, it->second.solved, it->second.total));
  }
  for (const auto& [tag, counts] : by_tag)
    rows.push_back(ratio_row(tag, counts.solved, counts.total));
  rows.push_back(ratio_row("overall", overall.solved, overall.total));
  return rows;
}

}  // namespace proverkit::curriculum
