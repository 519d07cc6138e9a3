#include "proverkit/ast.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace proverkit::ast {

namespace {

constexpr std::size_t npos = std::string_view::npos;

struct Cp {
  char32_t cp;
  std::size_t len;
};

// Lenient UTF-8 decode: malformed bytes decode as themselves, length 1.
Cp decode(std::string_view s, std::size_t i) {
  unsigned char b = static_cast<unsigned char>(s[i]);
  if (b < 0x80) return {b, 1};
  std::size_t len = (b >= 0xF0) ? 4 : (b >= 0xE0) ? 3 : (b >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) return {b, 1};
  char32_t cp = b & (0xFFu >> (len + 1));
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char c = static_cast<unsigned char>(s[i + k]);
    if ((c & 0xC0) != 0x80) return {b, 1};
    cp = (cp << 6) | (c & 0x3F);
  }
  return {cp, len};
}

bool is_ident_start(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

// Identifier tail: ASCII alnum, underscore, prime, subscript digits.
bool is_ident_cont(char32_t c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'' ||
         (c >= 0x2080 && c <= 0x2089);
}

// True if the three bytes ending at i-1 encode a subscript digit.
bool subscript_ends_at(std::string_view s, std::size_t i) {
  if (i < 3) return false;
  unsigned char a = static_cast<unsigned char>(s[i - 3]);
  unsigned char b = static_cast<unsigned char>(s[i - 2]);
  unsigned char c = static_cast<unsigned char>(s[i - 1]);
  return a == 0xE2 && b == 0x82 && c >= 0x80 && c <= 0x89;
}

// Skips a line comment, nested block comment or string literal starting at
// i. Returns false (i untouched) when i points at none of those.
bool skip_inert(std::string_view s, std::size_t& i) {
  if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '-') {
    i = s.find('\n', i);
    if (i == npos) i = s.size();
    return true;
  }
  if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '-') {
    int depth = 1;
    i += 2;
    while (i < s.size() && depth > 0) {
      if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '-') {
        ++depth;
        i += 2;
      } else if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '/') {
        --depth;
        i += 2;
      } else {
        ++i;
      }
    }
    return true;
  }
  if (s[i] == '"') {
    ++i;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      ++i;
    }
    if (i < s.size()) ++i;
    return true;
  }
  return false;
}

int open_delim(char32_t c) {
  switch (c) {
    case '(': return 0;
    case '[': return 1;
    case '{': return 2;
    case 0x27E8: return 3;  // mathematical left angle bracket
    default: return -1;
  }
}

int close_delim(char32_t c) {
  switch (c) {
    case ')': return 0;
    case ']': return 1;
    case '}': return 2;
    case 0x27E9: return 3;
    default: return -1;
  }
}

void check_balanced(std::string_view s) {
  std::vector<std::pair<int, std::size_t>> stack;
  std::size_t i = 0;
  while (i < s.size()) {
    if (skip_inert(s, i)) continue;
    auto [cp, len] = decode(s, i);
    if (int d = open_delim(cp); d >= 0) {
      stack.emplace_back(d, i);
    } else if (int d2 = close_delim(cp); d2 >= 0) {
      if (stack.empty() || stack.back().first != d2)
        throw ParseError(ParseErrc::UnbalancedDelimiters, i, "mismatched closing delimiter");
      stack.pop_back();
    }
    i += len;
  }
  if (!stack.empty())
    throw ParseError(ParseErrc::UnbalancedDelimiters, stack.front().second,
                     "unclosed delimiter");
}

void skip_ws_comments(std::string_view s, std::size_t& i) {
  for (;;) {
    while (i < s.size() &&
           (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r'))
      ++i;
    if (i < s.size() &&
        ((s[i] == '-' && i + 1 < s.size() && s[i + 1] == '-') ||
         (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '-'))) {
      skip_inert(s, i);
      continue;
    }
    break;
  }
}

bool word_boundary_before(std::string_view s, std::size_t i) {
  if (i == 0) return true;
  unsigned char p = static_cast<unsigned char>(s[i - 1]);
  if (p == '.') return false;
  if (p < 0x80) return !is_ident_cont(p);
  return !subscript_ends_at(s, i);
}

bool word_boundary_after(std::string_view s, std::size_t i) {
  if (i >= s.size()) return true;
  return !is_ident_cont(decode(s, i).cp);
}

bool word_at(std::string_view s, std::size_t i, std::string_view word) {
  return s.compare(i, word.size(), word) == 0 &&
         word_boundary_before(s, i) && word_boundary_after(s, i + word.size());
}

std::size_t find_keyword(std::string_view s, std::size_t from, std::string_view word) {
  std::size_t i = from;
  while (i < s.size()) {
    if (skip_inert(s, i)) continue;
    if (s[i] == word[0] && word_at(s, i, word)) return i;
    ++i;
  }
  return npos;
}

// Matching close delimiter for the opener at open_pos; nested delimiters,
// comments and strings are skipped.
std::size_t find_matching(std::string_view s, std::size_t open_pos) {
  std::vector<int> stack;
  std::size_t i = open_pos;
  while (i < s.size()) {
    if (skip_inert(s, i)) continue;
    auto [cp, len] = decode(s, i);
    if (int d = open_delim(cp); d >= 0) {
      stack.push_back(d);
    } else if (int d2 = close_delim(cp); d2 >= 0) {
      if (stack.empty() || stack.back() != d2)
        throw ParseError(ParseErrc::UnbalancedDelimiters, i, "mismatched closing delimiter");
      stack.pop_back();
      if (stack.empty()) return i;
    }
    i += len;
  }
  throw ParseError(ParseErrc::UnbalancedDelimiters, open_pos, "unclosed delimiter");
}

// First ":=" at delimiter depth zero, from `from` up to `limit`.
std::size_t find_assign(std::string_view s, std::size_t from, std::size_t limit = npos) {
  std::size_t end = std::min(limit, s.size());
  int depth = 0;
  std::size_t i = from;
  while (i < end) {
    if (skip_inert(s, i)) continue;
    auto [cp, len] = decode(s, i);
    if (open_delim(cp) >= 0) ++depth;
    else if (close_delim(cp) >= 0) --depth;
    else if (depth == 0 && cp == ':' && i + 1 < end && s[i + 1] == '=')
      return i;
    i += len;
  }
  return npos;
}

// First ':' not part of ":=" at delimiter depth zero.
std::size_t find_colon(std::string_view s, std::size_t from, std::size_t limit) {
  std::size_t end = std::min(limit, s.size());
  int depth = 0;
  std::size_t i = from;
  while (i < end) {
    if (skip_inert(s, i)) continue;
    auto [cp, len] = decode(s, i);
    if (open_delim(cp) >= 0) ++depth;
    else if (close_delim(cp) >= 0) --depth;
    else if (depth == 0 && cp == ':' && !(i + 1 < end && s[i + 1] == '='))
      return i;
    i += len;
  }
  return npos;
}

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::pair<std::size_t, std::size_t> trim_range(std::string_view s, std::size_t b,
                                               std::size_t e) {
  while (b < e && is_space_byte(s[b])) ++b;
  while (e > b && is_space_byte(s[e - 1])) --e;
  return {b, e};
}

std::string trim_copy(std::string_view s) {
  auto [b, e] = trim_range(s, 0, s.size());
  return std::string(s.substr(b, e - b));
}

std::string rtrim_copy(std::string_view s) {
  std::size_t e = s.size();
  while (e > 0 && is_space_byte(s[e - 1])) --e;
  return std::string(s.substr(0, e));
}

// Identifier starting at i; returns end offset or npos.
std::size_t scan_ident(std::string_view s, std::size_t i) {
  if (i >= s.size()) return npos;
  auto [cp, len] = decode(s, i);
  if (!is_ident_start(cp)) return npos;
  std::size_t j = i + len;
  while (j < s.size()) {
    auto [c2, l2] = decode(s, j);
    if (!is_ident_cont(c2)) break;
    j += l2;
  }
  return j;
}

struct HeaderExtra {
  TheoremStatement stmt;
  std::optional<std::size_t> after_assign;  // offset just past ":="
};

void parse_binder_group(std::string_view s, std::size_t open, std::size_t close,
                        BinderKind kind, TheoremStatement& st) {
  Binder b;
  b.kind = kind;
  std::size_t colon = find_colon(s, open + 1, close);
  std::size_t names_end = (colon == npos) ? close : colon;

  if (colon == npos && kind == BinderKind::Instance) {
    // anonymous instance binder: the whole group is the type
    auto [tb, te] = trim_range(s, open + 1, close);
    if (tb == te)
      throw ParseError(ParseErrc::BadBinder, open, "empty instance binder");
    b.type = OpaqueTerm{std::string(s.substr(tb, te - tb)), {tb, te}};
    st.binders.push_back(std::move(b));
    return;
  }

  std::size_t i = open + 1;
  while (i < names_end) {
    skip_ws_comments(s, i);
    if (i >= names_end) break;
    std::size_t e = scan_ident(s, i);
    if (e == npos || e > names_end)
      throw ParseError(ParseErrc::BadIdentifier, i, "invalid binder name");
    std::string name(s.substr(i, e - i));
    if (std::find(b.names.begin(), b.names.end(), name) != b.names.end())
      throw ParseError(ParseErrc::DuplicateBinderName, i,
                       "duplicate binder name '" + name + "'");
    b.names.push_back(std::move(name));
    i = e;
  }
  if (b.names.empty())
    throw ParseError(ParseErrc::BadBinder, open, "binder group without names");

  if (colon != npos) {
    auto [tb, te] = trim_range(s, colon + 1, close);
    if (tb == te)
      throw ParseError(ParseErrc::BadBinder, colon, "binder group without a type");
    b.type = OpaqueTerm{std::string(s.substr(tb, te - tb)), {tb, te}};
  }
  st.binders.push_back(std::move(b));
}

HeaderExtra parse_header(std::string_view s) {
  check_balanced(s);
  std::size_t kw = find_keyword(s, 0, "theorem");
  if (kw == npos)
    throw ParseError(ParseErrc::MissingTheoremKeyword, 0, "no theorem declaration");
  if (std::size_t dup = find_keyword(s, kw + 7, "theorem"); dup != npos)
    throw ParseError(ParseErrc::MultipleTheoremDeclarations, dup,
                     "more than one theorem declaration");

  HeaderExtra out;
  TheoremStatement& st = out.stmt;
  st.preamble = std::string(s.substr(0, kw));

  std::size_t i = kw + 7;
  skip_ws_comments(s, i);
  std::size_t ne = scan_ident(s, i);
  if (ne == npos)
    throw ParseError(ParseErrc::BadIdentifier, i, "missing theorem name");
  st.name = std::string(s.substr(i, ne - i));
  i = ne;

  for (;;) {
    skip_ws_comments(s, i);
    if (i >= s.size())
      throw ParseError(ParseErrc::EmptyGoal, i, "declaration ends before goal");
    char c = s[i];
    BinderKind kind;
    if (c == '(') kind = BinderKind::Explicit;
    else if (c == '{') kind = BinderKind::Implicit;
    else if (c == '[') kind = BinderKind::Instance;
    else break;
    std::size_t close = find_matching(s, i);
    parse_binder_group(s, i, close, kind, st);
    i = close + 1;
  }

  if (s[i] != ':' || (i + 1 < s.size() && s[i + 1] == '='))
    throw ParseError(ParseErrc::EmptyGoal, i, "expected ':' before goal");
  ++i;

  std::size_t assign = find_assign(s, i);
  std::size_t goal_end = (assign == npos) ? s.size() : assign;
  auto [gb, ge] = trim_range(s, i, goal_end);
  if (gb == ge)
    throw ParseError(ParseErrc::EmptyGoal, i, "empty goal");
  st.goal = OpaqueTerm{std::string(s.substr(gb, ge - gb)), {gb, ge}};
  if (assign != npos) out.after_assign = assign + 2;
  return out;
}

struct Line {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive of the newline
  std::size_t indent = 0;
  bool blank = true;
};

std::vector<Line> split_lines(std::string_view s, std::size_t from) {
  std::vector<Line> lines;
  std::size_t i = from;
  while (i <= s.size()) {
    if (i == s.size()) {
      break;
    }
    Line l;
    l.begin = i;
    std::size_t nl = s.find('\n', i);
    l.end = (nl == npos) ? s.size() : nl;
    std::size_t j = i;
    while (j < l.end && (s[j] == ' ' || s[j] == '\t')) ++j;
    l.indent = j - i;
    l.blank = (j == l.end) || (trim_copy(s.substr(i, l.end - i)).empty());
    lines.push_back(l);
    if (nl == npos) break;
    i = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_text_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (;;) {
    std::size_t nl = text.find('\n', i);
    if (nl == npos) {
      out.emplace_back(text.substr(i));
      break;
    }
    out.emplace_back(text.substr(i, nl - i));
    i = nl + 1;
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

// Drops leading/trailing blank entries, keeps interior ones.
void strip_blank_ends(std::vector<std::string>& lines) {
  std::size_t b = 0, e = lines.size();
  while (b < e && trim_copy(lines[b]).empty()) ++b;
  while (e > b && trim_copy(lines[e - 1]).empty()) --e;
  lines.assign(lines.begin() + b, lines.begin() + e);
}

struct ParsedHave {
  HaveStep step;
  std::size_t next_line;
};

std::size_t line_of(const std::vector<Line>& lines, std::size_t pos) {
  std::size_t lo = 0, hi = lines.size();
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (lines[mid].begin <= pos) lo = mid;
    else hi = mid;
  }
  return lo;
}

std::optional<ParsedHave> try_parse_have(std::string_view s,
                                         const std::vector<Line>& lines,
                                         std::size_t li) {
  const Line& L = lines[li];
  std::size_t have_pos = L.begin + L.indent;
  std::size_t i = have_pos + 4;

  while (i < L.end && (s[i] == ' ' || s[i] == '\t')) ++i;
  std::size_t le = scan_ident(s, i);
  if (le == npos) return std::nullopt;
  std::string label(s.substr(i, le - i));
  i = le;

  skip_ws_comments(s, i);
  if (i >= s.size() || s[i] != ':' || (i + 1 < s.size() && s[i + 1] == '='))
    return std::nullopt;
  ++i;
  std::size_t assign = find_assign(s, i);
  if (assign == npos) return std::nullopt;
  auto [sb, se] = trim_range(s, i, assign);
  if (sb == se) return std::nullopt;
  OpaqueTerm stmt{std::string(s.substr(sb, se - sb)), {sb, se}};

  std::size_t b = assign + 2;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  bool by_form = false;
  if (word_at(s, b, "by")) {
    by_form = true;
    b += 2;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  }

  std::size_t bline = line_of(lines, b);
  std::string inline_rest =
      (b <= lines[bline].end) ? rtrim_copy(s.substr(b, lines[bline].end - b)) : "";
  std::size_t span_end = inline_rest.empty() ? b : lines[bline].end;

  std::vector<std::pair<std::string, bool>> raw;  // line text, blank flag
  std::size_t j = bline + 1;
  std::size_t min_indent = std::numeric_limits<std::size_t>::max();
  while (j < lines.size() && (lines[j].blank || lines[j].indent > L.indent)) {
    const Line& C = lines[j];
    if (C.blank) {
      raw.emplace_back("", true);
    } else {
      raw.emplace_back(rtrim_copy(s.substr(C.begin, C.end - C.begin)), false);
      min_indent = std::min(min_indent, C.indent);
      span_end = C.end;
    }
    ++j;
  }

  std::vector<std::string> body_lines;
  if (!inline_rest.empty()) body_lines.push_back(inline_rest);
  for (auto& [text, blank] : raw) {
    if (blank) body_lines.emplace_back("");
    else body_lines.push_back(text.substr(std::min(min_indent, text.size())));
  }
  strip_blank_ends(body_lines);

  std::string body_text = join_lines(body_lines);
  TacticBlock body;
  if (trim_copy(body_text) == "sorry") {
    body = TacticBlock::sorry();
  } else {
    body = TacticBlock::proof(std::move(body_text), by_form);
  }

  ParsedHave out;
  out.step.label = std::move(label);
  out.step.statement = std::move(stmt);
  out.step.body = std::move(body);
  out.step.span = {have_pos, span_end};
  out.next_line = j;
  return out;
}

std::string pad(std::size_t n) { return std::string(n, ' '); }

void emit_chunk(std::vector<std::string>& out, const std::string& text,
                std::size_t indent) {
  if (text.empty()) return;
  for (auto& line : split_text_lines(text))
    out.push_back(line.empty() ? std::string() : pad(indent) + line);
}

std::string print_binder(const Binder& b) {
  const char* open = "(";
  const char* close = ")";
  if (b.kind == BinderKind::Implicit) { open = "{"; close = "}"; }
  if (b.kind == BinderKind::Instance) { open = "["; close = "]"; }
  std::string out = open;
  for (std::size_t i = 0; i < b.names.size(); ++i) {
    if (i) out += ' ';
    out += b.names[i];
  }
  if (b.type) {
    if (!b.names.empty()) out += " : ";
    out += b.type->text;
  }
  out += close;
  return out;
}

std::string print_header(const TheoremStatement& st) {
  std::string out = st.preamble;
  out += "theorem ";
  out += st.name;
  for (const auto& b : st.binders) {
    out += ' ';
    out += print_binder(b);
  }
  out += " : ";
  out += st.goal.text;
  out += " := by";
  return out;
}

}  // namespace

bool operator==(const OpaqueTerm& a, const OpaqueTerm& b) { return a.text == b.text; }

bool operator==(const Binder& a, const Binder& b) {
  if (a.kind != b.kind || a.names != b.names) return false;
  if (a.type.has_value() != b.type.has_value()) return false;
  return !a.type || *a.type == *b.type;
}

bool operator==(const TheoremStatement& a, const TheoremStatement& b) {
  return a.preamble == b.preamble && a.name == b.name && a.binders == b.binders &&
         a.goal == b.goal;
}

bool operator==(const TacticBlock& a, const TacticBlock& b) {
  if (a.is_sorry != b.is_sorry) return false;
  if (a.is_sorry) return true;
  return a.text == b.text && a.by_form == b.by_form;
}

bool operator==(const HaveStep& a, const HaveStep& b) {
  return a.label == b.label && a.statement == b.statement && a.body == b.body &&
         a.suffix == b.suffix;
}

bool operator==(const ProofSketch& a, const ProofSketch& b) {
  return a.theorem == b.theorem && a.leading == b.leading && a.steps == b.steps &&
         a.trailing == b.trailing;
}

TheoremStatement parse_statement(std::string_view input) {
  return parse_header(input).stmt;
}

std::string print_statement_header(const TheoremStatement& stmt) {
  return print_header(stmt);
}

ProofSketch parse_sketch(std::string_view input) {
  HeaderExtra hdr = parse_header(input);
  if (!hdr.after_assign)
    throw ParseError(ParseErrc::NotATacticProof, input.size(),
                     "declaration has no proof");
  std::size_t i = *hdr.after_assign;
  skip_ws_comments(input, i);
  if (!word_at(input, i, "by"))
    throw ParseError(ParseErrc::NotATacticProof, i, "proof is not a by block");
  i += 2;

  ProofSketch sk;
  sk.theorem = std::move(hdr.stmt);

  std::size_t eol = input.find('\n', i);
  std::size_t inline_end = (eol == npos) ? input.size() : eol;
  std::string inline_rest = trim_copy(input.substr(i, inline_end - i));
  std::vector<Line> lines =
      split_lines(input, (eol == npos) ? input.size() : eol + 1);

  std::size_t block_indent = 0;
  for (const Line& l : lines) {
    if (!l.blank) {
      block_indent = l.indent;
      break;
    }
  }

  std::vector<std::string> chunk;
  if (!inline_rest.empty()) chunk.push_back(inline_rest);

  auto flush_chunk = [&]() {
    strip_blank_ends(chunk);
    if (!chunk.empty()) {
      std::string text = join_lines(chunk);
      if (sk.steps.empty()) sk.leading = std::move(text);
      else sk.steps.back().suffix = std::move(text);
    }
    chunk.clear();
  };

  std::size_t li = 0;
  while (li < lines.size()) {
    const Line& L = lines[li];
    if (L.blank) {
      chunk.emplace_back("");
      ++li;
      continue;
    }
    if (L.indent == block_indent &&
        word_at(input, L.begin + L.indent, "have")) {
      if (auto parsed = try_parse_have(input, lines, li)) {
        for (const auto& st : sk.steps)
          if (st.label == parsed->step.label)
            throw ParseError(ParseErrc::DuplicateHaveLabel, parsed->step.span.begin,
                             "duplicate have label '" + parsed->step.label + "'");
        flush_chunk();
        sk.steps.push_back(std::move(parsed->step));
        li = parsed->next_line;
        continue;
      }
    }
    std::size_t strip = std::min(block_indent, L.indent);
    chunk.push_back(rtrim_copy(input.substr(L.begin + strip, L.end - L.begin - strip)));
    ++li;
  }

  strip_blank_ends(chunk);
  std::string trailing_text = join_lines(chunk);
  if (trim_copy(trailing_text) == "sorry") sk.trailing = TacticBlock::sorry();
  else sk.trailing = TacticBlock::proof(std::move(trailing_text));
  return sk;
}

std::string canonical_print(const TheoremStatement& stmt) {
  return print_header(stmt) + "\n  sorry";
}

std::string print_block(const ProofSketch& sk, int indent) {
  std::size_t ind = static_cast<std::size_t>(indent);
  std::vector<std::string> out;
  emit_chunk(out, sk.leading, ind);
  for (const auto& step : sk.steps) {
    std::string head =
        pad(ind) + "have " + step.label + " : " + step.statement.text + " := ";
    if (step.body.is_sorry) {
      out.push_back(head + "by sorry");
    } else if (step.body.by_form) {
      out.push_back(head + "by");
      emit_chunk(out, step.body.text, ind + 2);
    } else {
      auto lines = split_text_lines(step.body.text);
      if (lines.size() <= 1) {
        out.push_back(head + step.body.text);
      } else {
        // multi-line term: body goes on its own lines so the relative
        // indentation survives a reparse
        out.push_back(head.substr(0, head.size() - 1));
        emit_chunk(out, step.body.text, ind + 2);
      }
    }
    emit_chunk(out, step.suffix, ind);
  }
  if (sk.trailing.is_sorry) out.push_back(pad(ind) + "sorry");
  else emit_chunk(out, sk.trailing.text, ind);
  return join_lines(out);
}

std::string canonical_print(const ProofSketch& sketch) {
  std::string block = print_block(sketch, 2);
  std::string out = print_header(sketch.theorem);
  if (!block.empty()) {
    out += '\n';
    out += block;
  }
  return out;
}

int count_sorries(const ProofSketch& sketch) {
  int n = 0;
  for (const auto& s : sketch.steps)
    if (s.body.is_sorry) ++n;
  if (sketch.trailing.is_sorry) ++n;
  return n;
}

std::string statement_key(const TheoremStatement& stmt) {
  std::string out;
  for (const auto& b : stmt.binders) {
    out += print_binder(b);
    out += ' ';
  }
  out += ": ";
  out += stmt.goal.text;
  return out;
}

std::string wsnorm(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_ws = false;
  for (char c : text) {
    if (is_space_byte(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

bool wsnorm_equal(std::string_view a, std::string_view b) {
  return wsnorm(a) == wsnorm(b);
}

std::vector<std::size_t> token_offsets(std::string_view text, std::string_view token) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (skip_inert(text, i)) continue;
    if (text[i] == token[0] && text.compare(i, token.size(), token) == 0 &&
        word_boundary_before(text, i)) {
      std::size_t j = i + token.size();
      if (j >= text.size() || !is_ident_cont(decode(text, j).cp)) out.push_back(i);
    }
    ++i;
  }
  return out;
}

bool contains_token(std::string_view text, std::string_view token) {
  return !token_offsets(text, token).empty();
}

}  // namespace proverkit::ast
