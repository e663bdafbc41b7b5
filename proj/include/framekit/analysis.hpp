#pragma once

// Corpus and result analysis: per-frame-element scores, the ratio of labels
// coinciding with their own target, breakdowns by syntactic realization,
// lexical coverage between corpora, and rank-frequency profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "framekit/core.hpp"
#include "framekit/eval.hpp"
#include "framekit/fndata.hpp"
#include "framekit/valence.hpp"

namespace framekit::analysis {

using predictions_by_annoset = std::unordered_map<int64_t, std::vector<eval::prediction>>;

struct fe_report {
  std::string fe_name;
  size_t train_count = 0;
  size_t eval_count = 0;
  eval::score_tally tally;
  eval::prf scores;
};

// Per-frame-element micro tallies. Matching is the same exact (fe, span)
// joint match as global scoring with frame credit off, so the per-element
// tallies sum to the global ones.
inline std::vector<fe_report> per_fe_scores(const fndata::corpus& gold,
                                            const predictions_by_annoset& preds,
                                            const fndata::corpus* train = nullptr,
                                            const eval::eval_config& cfg = {}) {
  std::map<std::string, fe_report> by_fe;
  auto slot = [&by_fe](const std::string& fe) -> fe_report& {
    auto& r = by_fe[fe];
    r.fe_name = fe;
    return r;
  };

  for (const auto& a : gold.annotation_sets) {
    const fndata::frame* f = gold.frame_by_id(a.frame_id);
    if (!f) continue;
    std::vector<const fndata::label_span*> overt;
    for (const auto& l : a.labels) {
      auto& r = slot(l.fe_name);
      ++r.eval_count;
      if (!l.is_overt() || !l.start || !l.end) continue;
      overt.push_back(&l);
      r.tally.gold += eval::fe_weight(*f, l.fe_name, cfg);
    }
    auto it = preds.find(a.id);
    if (it == preds.end()) continue;
    std::vector<bool> used(overt.size(), false);
    for (const auto& p : it->second) {
      auto& r = slot(p.fe);
      const double w = eval::fe_weight(*f, p.fe, cfg);
      r.tally.sys += w;
      for (size_t i = 0; i < overt.size(); ++i) {
        if (used[i]) continue;
        const auto& g = *overt[i];
        if (g.fe_name == p.fe && *g.start == p.start && *g.end == p.end) {
          used[i] = true;
          r.tally.match += w;
          break;
        }
      }
    }
  }
  if (train) {
    for (const auto& a : train->annotation_sets)
      for (const auto& l : a.labels) {
        auto it = by_fe.find(l.fe_name);
        if (it != by_fe.end()) ++it->second.train_count;
      }
  }
  std::vector<fe_report> out;
  for (auto& [_, r] : by_fe) {
    r.scores = eval::aggregate({r.tally});
    out.push_back(std::move(r));
  }
  return out;
}

// Fraction of the frame element's labels whose span is exactly the target
// span of their own annotation set.
inline double febar_ratio(const fndata::corpus& c, const std::string& fe_name) {
  size_t n_configs = 0, n_coincide = 0;
  for (const auto& a : c.annotation_sets) {
    for (const auto& l : a.labels) {
      if (l.fe_name != fe_name) continue;
      ++n_configs;
      if (!l.is_overt() || !l.start || !l.end) continue;
      for (const auto& [ts, te] : a.target_spans) {
        if (*l.start == ts && *l.end == te) {
          ++n_coincide;
          break;
        }
      }
    }
  }
  if (n_configs == 0) throw no_occurrences_error("frame element " + fe_name + " never occurs");
  return static_cast<double>(n_coincide) / static_cast<double>(n_configs);
}

// ---------------------------------------------------------------------------

struct ptgf_report {
  std::string pt, gf;        // catch-all group has both empty
  size_t eval_count = 0;     // gold labels in the group
  eval::score_tally tally;
  eval::prf scores;
  bool precision_undefined = false;  // no predictions landed in the group
};

// Scores grouped by the gold label's syntactic realization. Matched
// predictions join their gold label's group; an unmatched prediction joins
// the group of a gold label sharing its span when one exists, otherwise the
// catch-all group.
inline std::vector<ptgf_report> ptgf_breakdown(const fndata::corpus& gold,
                                               const predictions_by_annoset& preds,
                                               const eval::eval_config& cfg = {}) {
  std::map<std::pair<std::string, std::string>, ptgf_report> groups;
  auto slot = [&groups](const std::string& pt, const std::string& gf) -> ptgf_report& {
    auto& g = groups[{pt, gf}];
    g.pt = pt;
    g.gf = gf;
    return g;
  };

  for (const auto& a : gold.annotation_sets) {
    const fndata::frame* f = gold.frame_by_id(a.frame_id);
    if (!f) continue;
    std::vector<const fndata::label_span*> overt;
    for (const auto& l : a.labels) {
      if (!l.is_overt() || !l.start || !l.end) continue;
      overt.push_back(&l);
      auto& g = slot(l.pt, l.gf);
      ++g.eval_count;
      g.tally.gold += eval::fe_weight(*f, l.fe_name, cfg);
    }
    auto it = preds.find(a.id);
    if (it == preds.end()) continue;
    std::vector<bool> used(overt.size(), false);
    for (const auto& p : it->second) {
      const double w = eval::fe_weight(*f, p.fe, cfg);
      int match = -1, aligned = -1;
      for (size_t i = 0; i < overt.size(); ++i) {
        const auto& g = *overt[i];
        if (*g.start == p.start && *g.end == p.end) {
          if (aligned < 0) aligned = static_cast<int>(i);
          if (!used[i] && g.fe_name == p.fe) {
            match = static_cast<int>(i);
            break;
          }
        }
      }
      if (match >= 0) {
        used[static_cast<size_t>(match)] = true;
        auto& g = slot(overt[static_cast<size_t>(match)]->pt, overt[static_cast<size_t>(match)]->gf);
        g.tally.sys += w;
        g.tally.match += w;
      } else if (aligned >= 0) {
        slot(overt[static_cast<size_t>(aligned)]->pt, overt[static_cast<size_t>(aligned)]->gf)
            .tally.sys += w;
      } else {
        slot("", "").tally.sys += w;
      }
    }
  }
  std::vector<ptgf_report> out;
  for (auto& [_, g] : groups) {
    g.precision_undefined = g.tally.sys == 0;
    g.scores = eval::aggregate({g.tally});
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coverage of evaluation material by the training corpus, per item kind.

enum class item_kind { lexical_unit, frame_element, valence_unit, valence_pattern };

inline std::string to_string(item_kind k) {
  switch (k) {
    case item_kind::lexical_unit: return "lu";
    case item_kind::frame_element: return "fe";
    case item_kind::valence_unit: return "vu";
    default: return "vp";
  }
}

// Distinct item keys attested by a corpus's annotation sets.
inline std::set<std::string> attested_items(const fndata::corpus& c, item_kind kind) {
  std::set<std::string> out;
  for (const auto& a : c.annotation_sets) {
    const fndata::frame* f = c.frame_by_id(a.frame_id);
    const fndata::lexical_unit* u = c.lu_by_id(a.lu_id);
    if (!f || !u) continue;
    switch (kind) {
      case item_kind::lexical_unit:
        out.insert(u->lemma + "|" + fndata::to_string(u->pos) + "|" + f->name);
        break;
      case item_kind::frame_element:
        for (const auto& l : a.labels) out.insert(f->name + "|" + l.fe_name);
        break;
      case item_kind::valence_unit:
        for (const auto& l : a.labels) {
          if (!l.is_overt() || l.pt.empty() || l.gf.empty()) continue;
          out.insert(f->name + "|" + l.fe_name + "|" + l.pt + "|" + l.gf);
        }
        break;
      case item_kind::valence_pattern: {
        std::vector<valence::valence_unit> units;
        for (const auto& l : a.labels) {
          if (!l.is_overt() || l.pt.empty() || l.gf.empty()) continue;
          units.push_back({l.fe_name, l.pt, l.gf});
        }
        if (units.empty()) break;
        std::sort(units.begin(), units.end());
        out.insert(valence::signature_string(units));
        break;
      }
    }
  }
  return out;
}

struct coverage_report {
  item_kind kind = item_kind::lexical_unit;
  size_t n_train = 0, n_eval = 0, n_shared = 0;
  double pct = 0;  // 100 * |eval ∩ train| / |eval|, one decimal
  bool eval_empty = false;
};

inline coverage_report coverage_overlap(const fndata::corpus& train, const fndata::corpus& eval_c,
                                        item_kind kind) {
  coverage_report r;
  r.kind = kind;
  auto tr = attested_items(train, kind);
  auto ev = attested_items(eval_c, kind);
  r.n_train = tr.size();
  r.n_eval = ev.size();
  for (const auto& k : ev)
    if (tr.count(k)) ++r.n_shared;
  if (ev.empty()) {
    r.eval_empty = true;
    r.pct = 0;
  } else {
    r.pct = std::round(1000.0 * static_cast<double>(r.n_shared) / static_cast<double>(ev.size())) / 10.0;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct rank_entry {
  size_t rank = 0;  // 1-based
  std::string key;
  size_t count = 0;
};

// Occurrence counts per item key, ranked by descending count with
// lexicographic tie-breaks.
inline std::vector<rank_entry> rank_frequency(const fndata::corpus& c, item_kind kind) {
  std::map<std::string, size_t> counts;
  for (const auto& a : c.annotation_sets) {
    const fndata::frame* f = c.frame_by_id(a.frame_id);
    const fndata::lexical_unit* u = c.lu_by_id(a.lu_id);
    if (!f || !u) continue;
    switch (kind) {
      case item_kind::lexical_unit:
        ++counts[u->lemma + "|" + fndata::to_string(u->pos) + "|" + f->name];
        break;
      case item_kind::frame_element:
        for (const auto& l : a.labels) ++counts[f->name + "|" + l.fe_name];
        break;
      case item_kind::valence_unit:
        for (const auto& l : a.labels) {
          if (!l.is_overt() || l.pt.empty() || l.gf.empty()) continue;
          ++counts[f->name + "|" + l.fe_name + "|" + l.pt + "|" + l.gf];
        }
        break;
      case item_kind::valence_pattern: {
        std::vector<valence::valence_unit> units;
        for (const auto& l : a.labels) {
          if (!l.is_overt() || l.pt.empty() || l.gf.empty()) continue;
          units.push_back({l.fe_name, l.pt, l.gf});
        }
        if (units.empty()) break;
        std::sort(units.begin(), units.end());
        ++counts[valence::signature_string(units)];
        break;
      }
    }
  }
  std::vector<std::pair<std::string, size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<rank_entry> out;
  out.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) out.push_back({i + 1, items[i].first, items[i].second});
  return out;
}

// ---------------------------------------------------------------------------
// Emitters.

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

inline std::string fe_scores_csv(const std::vector<fe_report>& reports) {
  std::ostringstream o;
  o << "fe,train_count,eval_count,precision,recall,f1\n";
  o.setf(std::ios::fixed);
  o.precision(4);
  for (const auto& r : reports)
    o << csv_escape(r.fe_name) << "," << r.train_count << "," << r.eval_count << ","
      << r.scores.precision << "," << r.scores.recall << "," << r.scores.f1 << "\n";
  return o.str();
}

inline std::string ptgf_csv(const std::vector<ptgf_report>& reports) {
  std::ostringstream o;
  o << "pt,gf,eval_count,precision,recall,f1,precision_undefined\n";
  o.setf(std::ios::fixed);
  o.precision(4);
  for (const auto& r : reports)
    o << csv_escape(r.pt.empty() ? "<other>" : r.pt) << ","
      << csv_escape(r.gf.empty() ? "<other>" : r.gf) << "," << r.eval_count << ","
      << r.scores.precision << "," << r.scores.recall << "," << r.scores.f1 << ","
      << (r.precision_undefined ? 1 : 0) << "\n";
  return o.str();
}

// Two-column "rank count" rows, one per line, gnuplot friendly.
inline std::string rank_frequency_plot(const std::vector<rank_entry>& entries) {
  std::ostringstream o;
  for (const auto& e : entries) o << e.rank << " " << e.count << "\n";
  return o.str();
}

}  // namespace framekit::analysis
