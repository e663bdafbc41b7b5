#pragma once

// Dependency trees: CoNLL ingestion, the candidate span heuristic (single
// tokens plus contiguous full subtrees), and alignment of character spans to
// token intervals.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "framekit/core.hpp"
#include "framekit/fndata.hpp"

namespace framekit::deptree {

struct token {
  int index = 0;  // 1-based
  std::string form, lemma, pos, deprel;
  int head = 0;  // 0 = root
  int64_t char_start = 0, char_end = 0;  // inclusive, scalar values
};

struct span {
  int start = 0, end = 0;  // 1-based inclusive token indexes

  bool operator==(const span&) const = default;
  auto operator<=>(const span&) const = default;

  bool overlaps(const span& o) const { return start <= o.end && o.start <= end; }
};

struct dep_tree {
  int64_t sentence_id = 0;
  std::vector<token> tokens;

  const token& at(int index) const { return tokens[static_cast<size_t>(index - 1)]; }

  std::string text() const {
    std::vector<std::string> forms;
    forms.reserve(tokens.size());
    for (const auto& t : tokens) forms.push_back(t.form);
    return join(forms, " ");
  }
};

inline void check_tree(const dep_tree& t) {
  const int n = static_cast<int>(t.tokens.size());
  int roots = 0;
  for (const auto& tok : t.tokens) {
    if (tok.head < 0 || tok.head > n)
      throw not_a_tree_error("token " + std::to_string(tok.index) + ": head out of range");
    if (tok.head == 0) ++roots;
    if (tok.head == tok.index)
      throw not_a_tree_error("token " + std::to_string(tok.index) + " is its own head");
  }
  if (roots != 1) throw not_a_tree_error("expected exactly one root, found " + std::to_string(roots));
  for (const auto& tok : t.tokens) {
    int cur = tok.index, steps = 0;
    while (cur != 0) {
      cur = t.tokens[static_cast<size_t>(cur - 1)].head;
      if (++steps > n) throw not_a_tree_error("cycle through token " + std::to_string(tok.index));
    }
  }
}

// Reads CoNLL-X rows: ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL and
// optionally PHEAD PDEPREL (10 columns). Sentences are separated by blank
// lines; "# sent_id = N" comments pair a tree with a corpus sentence id,
// otherwise trees are numbered sequentially from 1. Character offsets are
// assigned by joining forms with single spaces.
inline std::vector<dep_tree> ingest_conll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  std::vector<dep_tree> trees;
  dep_tree cur;
  std::optional<int64_t> pending_id;
  int64_t seq = 0;
  std::string line;
  size_t lineno = 0;

  auto flush = [&]() {
    if (cur.tokens.empty()) return;
    check_tree(cur);
    cur.sentence_id = pending_id.value_or(++seq);
    if (pending_id) seq = std::max(seq, *pending_id);
    int64_t off = 0;
    for (auto& tok : cur.tokens) {
      const int64_t len = utf8_length(tok.form);
      tok.char_start = off;
      tok.char_end = off + len - 1;
      off += len + 1;
    }
    trees.push_back(std::move(cur));
    cur = dep_tree{};
    pending_id.reset();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (line.find("sent_id") != std::string::npos && eq != std::string::npos) {
        try {
          pending_id = std::stoll(line.substr(eq + 1));
        } catch (...) {
          throw parse_error(path + ":" + std::to_string(lineno) + ": bad sent_id comment");
        }
      }
      continue;
    }
    auto cols = split_char(line, '\t');
    if (cols.size() == 1) cols = split_ws(line);
    if (cols.size() != 8 && cols.size() != 10)
      throw parse_error(path + ":" + std::to_string(lineno) + ": expected 8 or 10 columns, got " +
                        std::to_string(cols.size()));
    token tok;
    try {
      tok.index = std::stoi(cols[0]);
      tok.head = std::stoi(cols[6]);
    } catch (...) {
      throw parse_error(path + ":" + std::to_string(lineno) + ": bad index or head");
    }
    tok.form = cols[1];
    tok.lemma = cols[2] == "_" ? cols[1] : cols[2];
    tok.pos = cols[4] == "_" ? cols[3] : cols[4];
    tok.deprel = cols[7];
    if (tok.index != static_cast<int>(cur.tokens.size()) + 1)
      throw parse_error(path + ":" + std::to_string(lineno) + ": non-sequential token index");
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  return trees;
}

// ---------------------------------------------------------------------------

// Descendant index set of a token, including the token itself.
inline std::vector<int> descendants(const dep_tree& t, int index) {
  const int n = static_cast<int>(t.tokens.size());
  std::vector<std::vector<int>> children(static_cast<size_t>(n) + 1);
  for (const auto& tok : t.tokens)
    if (tok.head != 0) children[static_cast<size_t>(tok.head)].push_back(tok.index);
  std::vector<int> out, stack{index};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    for (int ch : children[static_cast<size_t>(cur)]) stack.push_back(ch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Candidate argument spans: every single token, plus the span of every token
// whose descendant set forms a contiguous interval.
inline std::set<span> candidate_spans(const dep_tree& t) {
  std::set<span> out;
  for (const auto& tok : t.tokens) out.insert({tok.index, tok.index});
  for (const auto& tok : t.tokens) {
    auto desc = descendants(t, tok.index);
    const int lo = desc.front(), hi = desc.back();
    if (hi - lo + 1 == static_cast<int>(desc.size())) out.insert({lo, hi});
  }
  return out;
}

// Minimal token interval covering an inclusive character span. The exact
// flag reports whether the label lands precisely on token boundaries.
struct alignment {
  span tokens;
  bool exact = false;
};

inline std::optional<alignment> align_char_span(const dep_tree& t, int64_t cs, int64_t ce) {
  int first = 0, last = 0;
  for (const auto& tok : t.tokens) {
    if (tok.char_start <= ce && cs <= tok.char_end) {
      if (first == 0) first = tok.index;
      last = tok.index;
    }
  }
  if (first == 0) return std::nullopt;
  alignment a;
  a.tokens = {first, last};
  a.exact = t.at(first).char_start == cs && t.at(last).char_end == ce;
  return a;
}

struct oracle_recall_result {
  size_t n_gold = 0;
  size_t n_covered = 0;
  size_t n_misaligned = 0;  // labels that do not land on token boundaries
  double recall = 0;
};

// Fraction of gold overt argument spans reachable by the candidate span
// heuristic.
inline oracle_recall_result span_oracle_recall(const fndata::corpus& c,
                                               const std::map<int64_t, const dep_tree*>& trees) {
  oracle_recall_result r;
  for (const auto& a : c.annotation_sets) {
    auto it = trees.find(a.sentence_id);
    if (it == trees.end()) continue;
    const dep_tree& t = *it->second;
    auto cands = candidate_spans(t);
    for (const auto& l : a.labels) {
      if (!l.is_overt() || !l.start || !l.end) continue;
      ++r.n_gold;
      auto al = align_char_span(t, *l.start, *l.end);
      if (!al) continue;
      if (!al->exact) ++r.n_misaligned;
      if (cands.count(al->tokens)) ++r.n_covered;
    }
  }
  r.recall = r.n_gold ? static_cast<double>(r.n_covered) / static_cast<double>(r.n_gold) : 0.0;
  return r;
}

}  // namespace framekit::deptree
