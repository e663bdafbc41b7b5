#pragma once

// Scoring: weighted match/system/gold tallies per annotation set, micro
// aggregation to precision/recall/F1, and the paired bootstrap significance
// test over per-item tallies.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "framekit/core.hpp"
#include "framekit/fndata.hpp"

namespace framekit::eval {

struct score_tally {
  double match = 0, sys = 0, gold = 0;  // M, S, G

  score_tally& operator+=(const score_tally& o) {
    match += o.match;
    sys += o.sys;
    gold += o.gold;
    return *this;
  }
};

struct eval_config {
  double core_weight = 1.0;
  double noncore_weight = 0.5;
  // When set, each annotation set contributes one extra point to M, S and G
  // for the frame itself (gold frames are taken as given here, so the point
  // always matches).
  bool frame_credit = false;
};

struct prediction {
  std::string fe;
  int64_t start = 0, end = 0;  // inclusive character span
};

inline double fe_weight(const fndata::frame& f, const std::string& fe, const eval_config& cfg) {
  const fndata::frame_element* e = f.element(fe);
  if (!e) throw unknown_frame_element_error("unknown frame element " + fe + " in frame " + f.name);
  return e->is_core() ? cfg.core_weight : cfg.noncore_weight;
}

// Exact-match scoring of one annotation set. A prediction matches a gold
// label when (fe, start, end) agree; each gold label is creditable once.
// Null-instantiated gold labels do not enter G, so predictions on those
// roles count against precision only.
inline score_tally score_annoset(const fndata::annotation_set& gold,
                                 const std::vector<prediction>& preds,
                                 const fndata::frame& frame, const eval_config& cfg) {
  score_tally t;
  std::vector<const fndata::label_span*> gold_overt;
  for (const auto& l : gold.labels) {
    if (!l.is_overt() || !l.start || !l.end) continue;
    gold_overt.push_back(&l);
    t.gold += fe_weight(frame, l.fe_name, cfg);
  }
  std::vector<bool> used(gold_overt.size(), false);
  for (const auto& p : preds) {
    const double w = fe_weight(frame, p.fe, cfg);
    t.sys += w;
    for (size_t i = 0; i < gold_overt.size(); ++i) {
      if (used[i]) continue;
      const auto& g = *gold_overt[i];
      if (g.fe_name == p.fe && *g.start == p.start && *g.end == p.end) {
        used[i] = true;
        t.match += w;
        break;
      }
    }
  }
  if (cfg.frame_credit) {
    t.match += 1.0;
    t.sys += 1.0;
    t.gold += 1.0;
  }
  return t;
}

struct prf {
  double precision = 0, recall = 0, f1 = 0;
};

inline prf aggregate(const std::vector<score_tally>& tallies) {
  score_tally sum;
  for (const auto& t : tallies) sum += t;
  prf r;
  r.precision = sum.sys > 0 ? sum.match / sum.sys : 0.0;
  r.recall = sum.gold > 0 ? sum.match / sum.gold : 0.0;
  r.f1 = (sum.sys + sum.gold) > 0 ? 2 * sum.match / (sum.sys + sum.gold) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Paired bootstrap: resample test items with replacement, recompute the F1
// difference between systems A and B from the resampled tallies, and count
// how often it exceeds twice the full-set difference.

struct tally_pair {
  score_tally a, b;
};

inline double f1_delta(const std::vector<tally_pair>& items, const std::vector<size_t>& idx) {
  score_tally sa, sb;
  for (size_t i : idx) {
    sa += items[i].a;
    sb += items[i].b;
  }
  auto f1 = [](const score_tally& s) {
    const double p = s.sys > 0 ? s.match / s.sys : 0.0;
    const double r = s.gold > 0 ? s.match / s.gold : 0.0;
    return (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  };
  return f1(sa) - f1(sb);
}

// Indices for one resample, derived deterministically from (seed, resample)
// so the draw order is stable and resamples are independent streams.
inline std::vector<size_t> resample_indices(size_t n, uint64_t seed, uint64_t resample) {
  std::mt19937_64 rng(mix64(seed ^ mix64(resample + 1)));
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = static_cast<size_t>(uniform_index(rng, n));
  return idx;
}

struct bootstrap_result {
  double p = 0;
  double delta_full = 0;
  size_t exceed_count = 0;
  size_t n_resamples = 0;
};

inline bootstrap_result bootstrap_p(const std::vector<tally_pair>& items, size_t b,
                                    uint64_t seed) {
  if (items.empty()) throw empty_test_set_error("bootstrap over empty test set");
  if (b == 0) throw error("bootstrap needs at least one resample");
  std::vector<size_t> all(items.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  bootstrap_result r;
  r.delta_full = f1_delta(items, all);
  r.n_resamples = b;
  for (size_t i = 0; i < b; ++i) {
    const double d = f1_delta(items, resample_indices(items.size(), seed, i));
    if (d > 2 * r.delta_full) ++r.exceed_count;
  }
  r.p = static_cast<double>(r.exceed_count) / static_cast<double>(b);
  return r;
}

}  // namespace framekit::eval
