#include "proverkit/backend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace proverkit::backend {

namespace {

using nlohmann::json;

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space_byte(s[b])) ++b;
  while (e > b && is_space_byte(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (;;) {
    std::size_t nl = text.find('\n', i);
    if (nl == std::string_view::npos) {
      out.emplace_back(text.substr(i));
      break;
    }
    out.emplace_back(text.substr(i, nl - i));
    i = nl + 1;
  }
  return out;
}

std::string indent_lines(std::string_view text, int cols) {
  std::string padding(static_cast<std::size_t>(cols), ' ');
  std::string out;
  for (auto& line : split_lines(text)) {
    if (!out.empty()) out += '\n';
    if (!line.empty()) out += padding + line;
  }
  return out;
}

// Tactic lines with comments and blanks dropped.
std::vector<std::string> effective_lines(std::string_view tactics) {
  std::vector<std::string> out;
  for (auto& line : split_lines(tactics)) {
    std::string t = trim_copy(line);
    if (t.empty() || t.rfind("--", 0) == 0) continue;
    out.push_back(std::move(t));
  }
  return out;
}

// Syntactic reflexivity: the goal splits at a top-level '=' into
// whitespace-equal halves.
bool rfl_shaped(std::string_view goal) {
  int depth = 0;
  for (std::size_t i = 0; i < goal.size(); ++i) {
    char c = goal[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (c == '=' && depth == 0) {
      if (i + 1 < goal.size() && (goal[i + 1] == '=' || goal[i + 1] == '>')) {
        ++i;
        continue;
      }
      if (i > 0 && (goal[i - 1] == '<' || goal[i - 1] == '>' || goal[i - 1] == '!' ||
                    goal[i - 1] == ':' || goal[i - 1] == '='))
        continue;
      std::string lhs = ast::wsnorm(goal.substr(0, i));
      std::string rhs = ast::wsnorm(goal.substr(i + 1));
      return !lhs.empty() && lhs == rhs;
    }
  }
  return false;
}

std::string key_of(const std::vector<ast::Binder>& binders, const std::string& goal) {
  ast::TheoremStatement st;
  st.name = "g";
  st.binders = binders;
  st.goal = ast::OpaqueTerm{goal, {}};
  return ast::statement_key(st);
}

const char* kLintRules[] = {"sorry", "admit", "apply?", "exact?"};

}  // namespace

std::string to_string(GenMode mode) {
  return mode == GenMode::Cot ? "cot" : "non_cot";
}

std::optional<GenMode> mode_from_string(std::string_view s) {
  if (s == "cot") return GenMode::Cot;
  if (s == "non_cot") return GenMode::NonCot;
  return std::nullopt;
}

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Timeout: return "timeout";
    case VerdictStatus::LintReject: return "lint_reject";
  }
  return "fail";
}

std::vector<std::string> extract_code_blocks(std::string_view full_text) {
  std::vector<std::string> blocks;
  std::vector<std::string> current;
  bool in_block = false;
  for (auto& line : split_lines(full_text)) {
    std::string t = trim_copy(line);
    if (t.rfind("```", 0) == 0) {
      if (!in_block) {
        in_block = true;
        current.clear();
      } else {
        std::string joined;
        for (std::size_t i = 0; i < current.size(); ++i) {
          if (i) joined += '\n';
          joined += current[i];
        }
        blocks.push_back(std::move(joined));
        in_block = false;
      }
      continue;
    }
    if (in_block) current.push_back(line);
  }
  return blocks;  // an unterminated fence contributes nothing
}

std::optional<std::string> extract_code(std::string_view full_text) {
  auto blocks = extract_code_blocks(full_text);
  if (blocks.empty()) return std::nullopt;
  return blocks.back();
}

LintReport lint(std::string_view code) {
  LintReport report;
  for (const char* rule : kLintRules) {
    for (std::size_t off : ast::token_offsets(code, rule))
      report.violations.push_back({rule, off});
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const LintViolation& a, const LintViolation& b) {
              return a.offset < b.offset;
            });
  report.ok = report.violations.empty();
  return report;
}

Verdict lint_then_verify(Verifier& verifier, const std::string& theorem_text,
                         const std::string& code, double timeout_s) {
  LintReport report = lint(code);
  if (!report.ok) {
    Verdict v;
    v.status = VerdictStatus::LintReject;
    for (const auto& viol : report.violations)
      v.messages.push_back("lint: banned token '" + viol.rule + "' at byte " +
                           std::to_string(viol.offset));
    return v;
  }
  return verifier.verify_code(theorem_text, code, timeout_s);
}

int count_proxy_tokens(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space_byte(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

// ---- MockOracle --------------------------------------------------------

void MockOracle::add(const std::string& statement_text, const std::string& proof) {
  ast::TheoremStatement st = ast::parse_statement(statement_text);
  table_[ast::statement_key(st)].push_back(proof);
}

std::shared_ptr<MockOracle> MockOracle::from_jsonl(const std::string& path) {
  auto oracle = std::make_shared<MockOracle>();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle table: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_copy(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("statement") || !j.contains("proof"))
      throw std::runtime_error("malformed oracle entry at " + path + ":" +
                               std::to_string(lineno));
    oracle->add(j["statement"].get<std::string>(), j["proof"].get<std::string>());
  }
  return oracle;
}

const std::vector<std::string>* MockOracle::proofs_for(const std::string& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

std::optional<std::string> MockOracle::closure_proof(
    const std::vector<ast::Binder>& binders, const std::string& goal_text) const {
  for (const auto& b : binders) {
    if (!b.type) continue;
    if (ast::wsnorm_equal(b.type->text, goal_text) && !b.names.empty())
      return "exact " + b.names.front();
  }
  if (ast::wsnorm(goal_text) == "True") return "trivial";
  if (rfl_shaped(goal_text)) return "rfl";
  if (const auto* proofs = proofs_for(key_of(binders, goal_text)); proofs && !proofs->empty())
    return proofs->front();
  return std::nullopt;
}

bool MockOracle::tactic_proves(const std::vector<ast::Binder>& binders,
                               const std::string& goal_text,
                               std::string_view tactics, int depth) const {
  if (depth > 8) return false;
  auto lines = effective_lines(tactics);
  if (lines.empty()) return false;

  if (lines.size() == 1) {
    const std::string& t = lines.front();
    if (t.rfind("exact ", 0) == 0) {
      std::string ident = trim_copy(std::string_view(t).substr(6));
      for (const auto& b : binders) {
        if (!b.type) continue;
        if (std::find(b.names.begin(), b.names.end(), ident) != b.names.end() &&
            ast::wsnorm_equal(b.type->text, goal_text))
          return true;
      }
    }
    if (t == "trivial" && ast::wsnorm(goal_text) == "True") return true;
    if (t == "rfl" && rfl_shaped(goal_text)) return true;
  }

  if (const auto* proofs = proofs_for(key_of(binders, goal_text))) {
    for (const auto& p : *proofs)
      if (ast::wsnorm_equal(p, tactics)) return true;
  }

  // have-chains check recursively: rebuild a theorem around the block
  if (ast::contains_token(tactics, "have")) {
    ast::TheoremStatement st;
    st.name = "sub";
    st.binders = binders;
    st.goal = ast::OpaqueTerm{goal_text, {}};
    std::string pseudo =
        ast::print_statement_header(st) + "\n" + indent_lines(tactics, 2);
    try {
      ast::ProofSketch sk = ast::parse_sketch(pseudo);
      if (!sk.steps.empty()) return sketch_proves(sk, nullptr, depth + 1);
    } catch (const ParseError&) {
      return false;
    }
  }
  return false;
}

bool MockOracle::sketch_proves(const ast::ProofSketch& sketch, std::string* message,
                               int depth) const {
  auto fail = [&](const std::string& why) {
    if (message) *message = why;
    return false;
  };
  if (depth > 8) return fail("recursion limit");

  // whole-block hit in the proof table counts as derivable
  if (const auto* proofs = proofs_for(ast::statement_key(sketch.theorem))) {
    std::string whole = ast::print_block(sketch, 0);
    for (const auto& p : *proofs)
      if (ast::wsnorm_equal(p, whole)) return true;
  }

  if (!effective_lines(sketch.leading).empty())
    return fail("tactic text before the first have is not derivable");

  std::vector<ast::Binder> hyps = sketch.theorem.binders;
  for (const auto& step : sketch.steps) {
    if (step.body.is_sorry) return fail("step '" + step.label + "' is sorry");
    if (!tactic_proves(hyps, step.statement.text, step.body.text, depth))
      return fail("step '" + step.label + "' not derivable");
    if (!effective_lines(step.suffix).empty())
      return fail("tactic text between steps is not derivable");
    ast::Binder b;
    b.kind = ast::BinderKind::Explicit;
    b.names = {step.label};
    b.type = step.statement;
    hyps.push_back(std::move(b));
  }

  if (sketch.trailing.is_sorry) return fail("trailing tactic is sorry");
  if (effective_lines(sketch.trailing.text).empty())
    return fail("proof block leaves the goal open");
  if (!tactic_proves(hyps, sketch.theorem.goal.text, sketch.trailing.text, depth))
    return fail("trailing tactic not derivable");
  return true;
}

// ---- MockProver --------------------------------------------------------

MockProver::MockProver(std::shared_ptr<const MockOracle> oracle)
    : oracle_(std::move(oracle)) {}

std::vector<GenCompletion> MockProver::generate(const GenRequest& req) {
  std::vector<GenCompletion> out;
  out.reserve(static_cast<std::size_t>(std::max(req.n, 0)));

  bool parsed = true;
  ast::TheoremStatement stmt;
  try {
    stmt = ast::parse_statement(req.statement_text);
  } catch (const ParseError&) {
    parsed = false;
  }

  const std::vector<std::string>* table = nullptr;
  std::optional<std::string> closure;
  if (parsed) {
    table = oracle_->proofs_for(ast::statement_key(stmt));
    if (table && table->empty()) table = nullptr;
    if (!table) closure = oracle_->closure_proof(stmt.binders, stmt.goal.text);
  }

  std::uint64_t seed = req.seed.value_or(0);
  std::string reasoning_prefix =
      req.mode == GenMode::Cot
          ? "Let us analyze the hypotheses, identify the intermediate facts the "
            "goal needs, and only then commit to a proof term.\n\n"
          : "";

  for (int idx = 0; idx < req.n; ++idx) {
    GenCompletion c;
    if (!parsed) {
      c.full_text = reasoning_prefix + "The statement did not parse; no candidate.";
    } else if (table || closure) {
      const std::string& proof =
          table ? (*table)[static_cast<std::size_t>(idx) % table->size()] : *closure;
      std::string code =
          ast::print_statement_header(stmt) + "\n" + indent_lines(proof, 2);
      c.full_text = reasoning_prefix + "Direct attempt.\n\n```lean4\n" + code + "\n```\n";
    } else {
      std::string code = ast::print_statement_header(stmt) + "\n  -- candidate " +
                         std::to_string(idx) + ", seed " + std::to_string(seed) +
                         "\n  simp_all";
      c.full_text = reasoning_prefix +
                    "No decisive line of attack; submitting a guess.\n\n```lean4\n" +
                    code + "\n```\n";
    }
    c.extracted_code = extract_code(c.full_text);
    c.token_count = count_proxy_tokens(c.full_text);
    out.push_back(std::move(c));
  }
  return out;
}

// ---- MockSketcher ------------------------------------------------------

void MockSketcher::add_sketch(const std::string& statement_text,
                              const std::string& cot_text) {
  ast::TheoremStatement st = ast::parse_statement(statement_text);
  scripts_[ast::statement_key(st)] = cot_text;
}

std::shared_ptr<MockSketcher> MockSketcher::from_jsonl(const std::string& path) {
  auto sketcher = std::make_shared<MockSketcher>();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sketch table: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_copy(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("statement") || !j.contains("cot"))
      throw std::runtime_error("malformed sketch entry at " + path + ":" +
                               std::to_string(lineno));
    sketcher->add_sketch(j["statement"].get<std::string>(), j["cot"].get<std::string>());
  }
  return sketcher;
}

std::vector<GenCompletion> MockSketcher::generate(const GenRequest& req) {
  std::vector<GenCompletion> out;
  std::string text;
  try {
    ast::TheoremStatement st = ast::parse_statement(req.statement_text);
    auto it = scripts_.find(ast::statement_key(st));
    text = (it != scripts_.end())
               ? it->second
               : "I examined the statement from several angles but found no "
                 "decomposition into simpler intermediate facts.";
  } catch (const ParseError&) {
    text = "The statement did not parse; nothing to decompose.";
  }
  for (int idx = 0; idx < req.n; ++idx) {
    GenCompletion c;
    c.full_text = text;
    c.extracted_code = extract_code(c.full_text);
    c.token_count = count_proxy_tokens(c.full_text);
    out.push_back(std::move(c));
  }
  return out;
}

// ---- MockVerifier ------------------------------------------------------

MockVerifier::MockVerifier(std::shared_ptr<const MockOracle> oracle)
    : oracle_(std::move(oracle)) {}

Verdict MockVerifier::verify_code(const std::string& theorem_text,
                                  const std::string& code, double /*timeout_s*/) {
  Verdict v;
  v.wall_time_ms = 0;

  ast::TheoremStatement target;
  try {
    target = ast::parse_statement(theorem_text);
  } catch (const ParseError& e) {
    v.messages.push_back(std::string("target statement malformed: ") + e.what());
    return v;
  }

  ast::ProofSketch sk;
  try {
    sk = ast::parse_sketch(code);
  } catch (const ParseError& e) {
    v.messages.push_back(std::string("code does not parse: ") + e.what());
    return v;
  }

  if (ast::statement_key(sk.theorem) != ast::statement_key(target)) {
    v.messages.push_back("code proves a different statement");
    return v;
  }

  std::string why;
  if (oracle_->sketch_proves(sk, &why)) {
    v.status = VerdictStatus::Pass;
  } else {
    v.messages.push_back(why);
  }
  return v;
}

}  // namespace proverkit::backend
