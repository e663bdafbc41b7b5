#pragma once

// Argument identification: sparse hashed features over (role, span) pairs,
// squared structured hinge loss with cost-augmented inference, AdaDelta
// training, beam-search decoding under span constraints, and frame element
// hierarchy expansion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "framekit/core.hpp"
#include "framekit/deptree.hpp"
#include "framekit/fndata.hpp"

namespace framekit::argid {

using maybe_span = std::optional<deptree::span>;

struct role {
  std::optional<std::string> fe;  // nullopt is the null role

  bool is_null() const { return !fe.has_value(); }
};

// Sparse binary-ish feature vector keyed by 64-bit hashes. Duplicate ids
// collapse to one entry; hash collisions are accepted.
struct feature_vector {
  std::vector<std::pair<uint64_t, double>> items;  // sorted by id, unique

  void finalize() {
    std::sort(items.begin(), items.end());
    std::vector<std::pair<uint64_t, double>> merged;
    for (const auto& [id, v] : items) {
      if (!merged.empty() && merged.back().first == id) continue;
      merged.emplace_back(id, v);
    }
    items = std::move(merged);
  }
};

struct template_config {
  bool hierarchy = false;  // ancestor-conjoined role variants
  size_t path_cap = 6;     // dependency path length cap

  bool operator==(const template_config&) const = default;
};

struct model {
  std::unordered_map<uint64_t, double> weights;
  std::unordered_map<uint64_t, double> grad_accum;    // E[g^2]
  std::unordered_map<uint64_t, double> update_accum;  // E[dx^2]
  double lambda = 1e-6;
  double rho = 0.95;
  double epsilon = 1e-6;
  template_config templates;

  double weight(uint64_t id) const {
    auto it = weights.find(id);
    return it == weights.end() ? 0.0 : it->second;
  }
};

inline double score(const model& m, const feature_vector& fv) {
  double s = 0;
  for (const auto& [id, v] : fv.items) s += m.weight(id) * v;
  return s;
}

// ---------------------------------------------------------------------------
// Frame element hierarchy: transitive closure of the fe mappings along
// inheritance and subframe relations, the element itself first.

inline std::vector<std::pair<std::string, std::string>> hierarchy_expand(
    const fndata::corpus& c, int64_t frame_id, const std::string& fe_name) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::pair<int64_t, std::string>> on_path, seen;
  auto dfs = [&](auto&& self, int64_t fid, const std::string& fe) -> void {
    const fndata::frame* f = c.frame_by_id(fid);
    if (!f) return;
    if (on_path.count({fid, fe}))
      throw cycle_error("frame element hierarchy cycle through " + f->name + "." + fe);
    if (!seen.insert({fid, fe}).second) return;
    on_path.insert({fid, fe});
    out.emplace_back(f->name, fe);
    for (const auto& r : c.relations) {
      if (r.kind != fndata::relation_kind::inheritance &&
          r.kind != fndata::relation_kind::subframe)
        continue;
      if (r.child_frame_id != fid) continue;
      for (const auto& [cfe, pfe] : r.fe_mappings)
        if (cfe == fe) self(self, r.parent_frame_id, pfe);
    }
    on_path.erase({fid, fe});
  };
  dfs(dfs, frame_id, fe_name);
  return out;
}

using hierarchy_index =
    std::map<std::pair<int64_t, std::string>, std::vector<std::pair<std::string, std::string>>>;

inline hierarchy_index build_hierarchy_index(const fndata::corpus& c) {
  hierarchy_index idx;
  for (const auto& f : c.frames)
    for (const auto& e : f.elements) idx[{f.id, e.name}] = hierarchy_expand(c, f.id, e.name);
  return idx;
}

// ---------------------------------------------------------------------------
// Feature templates.

namespace detail {

// Leftmost token of the span whose head lies outside it.
inline const deptree::token& span_head(const deptree::dep_tree& t, const deptree::span& s) {
  for (int i = s.start; i <= s.end; ++i) {
    const auto& tok = t.at(i);
    if (tok.head < s.start || tok.head > s.end) return tok;
  }
  return t.at(s.start);
}

inline std::string length_bucket(int len) {
  if (len <= 4) return std::to_string(len);
  if (len <= 6) return "5-6";
  if (len <= 10) return "7-10";
  return "11+";
}

// Direction-marked dependency path between two tokens, capped.
inline std::string dep_path(const deptree::dep_tree& t, int from, int to, size_t cap) {
  auto ancestors = [&t](int node) {
    std::vector<int> up{node};
    int cur = node;
    while (t.at(cur).head != 0) {
      cur = t.at(cur).head;
      up.push_back(cur);
    }
    return up;
  };
  auto fa = ancestors(from), ta = ancestors(to);
  std::set<int> fset(fa.begin(), fa.end());
  int lca = -1;
  for (int node : ta) {
    if (fset.count(node)) {
      lca = node;
      break;
    }
  }
  if (lca < 0) return "LONG";  // disconnected, cannot happen in a checked tree
  std::vector<std::string> steps;
  for (int node : fa) {
    if (node == lca) break;
    steps.push_back("U:" + t.at(node).deprel);
  }
  std::vector<std::string> down;
  for (int node : ta) {
    if (node == lca) break;
    down.push_back("D:" + t.at(node).deprel);
  }
  std::reverse(down.begin(), down.end());
  for (auto& s : down) steps.push_back(std::move(s));
  if (steps.empty()) return "SELF";
  if (steps.size() > cap) return "LONG";
  return join(steps, "|");
}

inline bool passive_target(const deptree::dep_tree& t, int target_head) {
  for (const auto& tok : t.tokens)
    if (tok.head == target_head && tok.deprel.find("subjpass") != std::string::npos) return true;
  return false;
}

}  // namespace detail

// Raw template strings for one (role, span) decision. Each base template is
// emitted three ways: bare, conjoined with the role, and conjoined with the
// role and frame. With hierarchy enabled, ancestor elements contribute extra
// role-conjoined variants.
inline std::vector<std::string> extract_feature_strings(
    const deptree::dep_tree& tree, const deptree::span& target, const std::string& frame_name,
    const role& r, const maybe_span& span, const template_config& cfg,
    const std::vector<std::pair<std::string, std::string>>* ancestors = nullptr) {
  const auto& thead = detail::span_head(tree, target);

  std::vector<std::string> base;
  if (!span) {
    base.push_back("null");
    base.push_back("null~tl=" + thead.lemma);
    base.push_back("null~tp=" + thead.pos);
  } else {
    const auto& shead = detail::span_head(tree, *span);
    base.push_back("shl=" + shead.lemma);
    base.push_back("shp=" + shead.pos);
    base.push_back("sfw=" + tree.at(span->start).form);
    base.push_back("slw=" + tree.at(span->end).form);
    base.push_back("slen=" + detail::length_bucket(span->end - span->start + 1));
    base.push_back("tl=" + thead.lemma);
    base.push_back("tp=" + thead.pos);
    base.push_back("path=" + detail::dep_path(tree, thead.index, shead.index, cfg.path_cap));
    std::string pos = span->end < target.start ? "before"
                      : span->start > target.end ? "after"
                                                 : "overlap";
    base.push_back("pos=" + pos);
    base.push_back(std::string("voice=") +
                   (detail::passive_target(tree, thead.index) ? "pass" : "act"));
    base.push_back("tl_shl=" + thead.lemma + "~" + shead.lemma);
  }

  std::vector<std::string> out;
  out.reserve(base.size() * 3);
  for (const auto& b : base) out.push_back(b);
  if (r.fe) {
    for (const auto& b : base) out.push_back(b + "|fe=" + *r.fe);
    for (const auto& b : base) out.push_back(b + "|fe=" + *r.fe + "|fr=" + frame_name);
    if (cfg.hierarchy && ancestors) {
      for (size_t i = 1; i < ancestors->size(); ++i) {  // skip self
        const auto& [afr, afe] = (*ancestors)[i];
        for (const auto& b : base) {
          out.push_back(b + "|fe=" + afe);
          out.push_back(b + "|fe=" + afe + "|fr=" + afr);
        }
      }
    }
  }
  return out;
}

inline feature_vector extract_features(
    const deptree::dep_tree& tree, const deptree::span& target, const std::string& frame_name,
    const role& r, const maybe_span& span, const template_config& cfg,
    const std::vector<std::pair<std::string, std::string>>* ancestors = nullptr) {
  feature_vector fv;
  for (const auto& s : extract_feature_strings(tree, target, frame_name, r, span, cfg, ancestors))
    fv.items.emplace_back(fnv1a64(s), 1.0);
  fv.finalize();
  return fv;
}

// ---------------------------------------------------------------------------
// Training instances and the squared structured hinge loss.

struct train_instance {
  int64_t annoset_id = 0;
  std::string fe;                      // the role this instance decides
  std::vector<maybe_span> candidates;  // null option first, then sorted spans
  std::vector<feature_vector> features;  // parallel to candidates
  size_t gold_index = 0;               // index into candidates
};

struct loss_result {
  double loss = 0;
  size_t argmax = 0;
  std::vector<std::pair<uint64_t, double>> gradient;  // sparse, sorted by id
};

// Cost-augmented argmax over the instance's candidates (the gold option
// competes at cost 0), squared hinge on the margin, and its gradient
// 2*inner*(phi(h) - phi(g)). Zero loss and empty gradient when the gold
// option wins outright.
inline loss_result instance_loss(const model& m, const train_instance& inst) {
  loss_result r;
  double best = -1e300;
  for (size_t i = 0; i < inst.candidates.size(); ++i) {
    const double s = score(m, inst.features[i]) + (i == inst.gold_index ? 0.0 : 1.0);
    if (s > best) {
      best = s;
      r.argmax = i;
    }
  }
  const double inner = best - score(m, inst.features[inst.gold_index]);
  if (r.argmax == inst.gold_index) return r;  // margin satisfied
  r.loss = inner * inner;
  std::map<uint64_t, double> grad;
  for (const auto& [id, v] : inst.features[r.argmax].items) grad[id] += 2 * inner * v;
  for (const auto& [id, v] : inst.features[inst.gold_index].items) grad[id] -= 2 * inner * v;
  for (const auto& [id, v] : grad)
    if (v != 0) r.gradient.emplace_back(id, v);
  return r;
}

// One AdaDelta update. The supplied gradient is augmented with lambda * w on
// exactly the touched coordinates.
inline void sgd_step(model& m, const std::vector<std::pair<uint64_t, double>>& loss_gradient,
                     const std::vector<uint64_t>& touched) {
  std::map<uint64_t, double> grad;
  for (const auto& [id, v] : loss_gradient) grad[id] += v;
  for (uint64_t id : touched) grad[id] += m.lambda * m.weight(id);
  for (const auto& [id, g] : grad) {
    if (g == 0) continue;
    double& eg = m.grad_accum[id];
    double& eu = m.update_accum[id];
    eg = m.rho * eg + (1 - m.rho) * g * g;
    const double dx = -std::sqrt(eu + m.epsilon) / std::sqrt(eg + m.epsilon) * g;
    eu = m.rho * eu + (1 - m.rho) * dx * dx;
    m.weights[id] += dx;
  }
}

inline double objective(const model& m, const std::vector<train_instance>& instances) {
  double total = 0;
  for (const auto& inst : instances) total += instance_loss(m, inst).loss;
  double norm2 = 0;
  for (const auto& [_, w] : m.weights) norm2 += w * w;
  return total / static_cast<double>(instances.size()) + 0.5 * m.lambda * norm2;
}

struct train_log {
  std::vector<double> epoch_objectives;  // regularized average loss per epoch
};

// Online training: per epoch, visit the instances in a seed-determined
// shuffle and apply one cost-augmented update each. The epoch objective is
// the regularized average loss over all instances after the epoch.
inline train_log train(model& m, const std::vector<train_instance>& instances, size_t epochs,
                       uint64_t seed) {
  train_log log;
  if (instances.empty()) return log;
  std::mt19937_64 rng(seed);
  std::vector<size_t> order(instances.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    fisher_yates(order, rng);
    for (size_t i : order) {
      const auto& inst = instances[i];
      loss_result lr = instance_loss(m, inst);
      std::vector<uint64_t> touched;
      for (const auto& [id, _] : inst.features[lr.argmax].items) touched.push_back(id);
      for (const auto& [id, _] : inst.features[inst.gold_index].items) touched.push_back(id);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      sgd_step(m, lr.gradient, touched);
    }
    log.epoch_objectives.push_back(objective(m, instances));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Decoding.

struct assignment {
  // (fe name, chosen span) in role processing order; null spans mean the
  // role is unfilled.
  std::vector<std::pair<std::string, maybe_span>> roles;
  double total = 0;
};

// Frame elements in decoding order: core elements first, alphabetical within
// each class.
inline std::vector<std::string> role_order(const fndata::frame& f) {
  std::vector<std::string> core, rest;
  for (const auto& e : f.elements) (e.is_core() ? core : rest).push_back(e.name);
  std::sort(core.begin(), core.end());
  std::sort(rest.begin(), rest.end());
  core.insert(core.end(), rest.begin(), rest.end());
  return core;
}

// Beam search over role-by-role span assignment. Constraints: one span per
// role (structural) and pairwise non-overlapping overt spans. Hypotheses are
// ranked by score with a lexicographic tie-break on option indexes, so the
// result is deterministic.
inline std::vector<assignment> decode(const model& m, const deptree::dep_tree& tree,
                                      const deptree::span& target, const fndata::frame& frame,
                                      size_t beam,
                                      const hierarchy_index* hier = nullptr) {
  const auto roles = role_order(frame);
  std::vector<deptree::span> spans;
  for (const auto& s : deptree::candidate_spans(tree)) spans.push_back(s);

  // options[r][o]: o == 0 is the null span
  std::vector<std::vector<double>> opt_score(roles.size());
  for (size_t r = 0; r < roles.size(); ++r) {
    const std::vector<std::pair<std::string, std::string>>* anc = nullptr;
    if (hier) {
      auto it = hier->find({frame.id, roles[r]});
      if (it != hier->end()) anc = &it->second;
    }
    role ro{roles[r]};
    opt_score[r].push_back(score(m, extract_features(tree, target, frame.name, ro, std::nullopt,
                                                     m.templates, anc)));
    for (const auto& s : spans)
      opt_score[r].push_back(score(m, extract_features(tree, target, frame.name, ro, s,
                                                       m.templates, anc)));
  }

  struct hypothesis {
    double total = 0;
    std::vector<size_t> opts;  // option index per processed role
  };
  auto better = [](const hypothesis& a, const hypothesis& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.opts < b.opts;
  };

  std::vector<hypothesis> frontier{{}};
  for (size_t r = 0; r < roles.size(); ++r) {
    std::vector<hypothesis> next;
    next.reserve(frontier.size() * (spans.size() + 1));
    for (const auto& h : frontier) {
      for (size_t o = 0; o <= spans.size(); ++o) {
        if (o > 0) {
          const auto& s = spans[o - 1];
          bool clash = false;
          for (size_t pr = 0; pr < h.opts.size() && !clash; ++pr)
            if (h.opts[pr] > 0 && spans[h.opts[pr] - 1].overlaps(s)) clash = true;
          if (clash) continue;
        }
        hypothesis ext = h;
        ext.total += opt_score[r][o];
        ext.opts.push_back(o);
        next.push_back(std::move(ext));
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > beam) next.resize(beam);
    frontier = std::move(next);
  }

  std::vector<assignment> out;
  out.reserve(frontier.size());
  for (const auto& h : frontier) {
    assignment a;
    a.total = h.total;
    for (size_t r = 0; r < roles.size(); ++r) {
      maybe_span s;
      if (h.opts[r] > 0) s = spans[h.opts[r] - 1];
      a.roles.emplace_back(roles[r], s);
    }
    out.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance construction from an annotated corpus plus dependency trees.

struct instance_build_report {
  size_t n_instances = 0;
  size_t n_annosets_skipped = 0;  // no tree or no usable target
  size_t n_gold_added = 0;        // gold spans outside the candidate heuristic
  size_t n_misaligned = 0;        // labels not on token boundaries
};

inline std::vector<train_instance> build_instances(
    const fndata::corpus& c, const std::map<int64_t, const deptree::dep_tree*>& trees,
    const template_config& cfg, const hierarchy_index* hier,
    instance_build_report* rep = nullptr) {
  std::vector<train_instance> out;
  instance_build_report local;
  for (const auto& a : c.annotation_sets) {
    auto it = trees.find(a.sentence_id);
    const fndata::frame* f = c.frame_by_id(a.frame_id);
    if (it == trees.end() || !f || a.target_spans.empty()) {
      ++local.n_annosets_skipped;
      continue;
    }
    const deptree::dep_tree& tree = *it->second;
    int64_t tcs = a.target_spans.front().first, tce = a.target_spans.front().second;
    for (const auto& [s, e] : a.target_spans) {
      tcs = std::min(tcs, s);
      tce = std::max(tce, e);
    }
    auto talign = deptree::align_char_span(tree, tcs, tce);
    if (!talign) {
      ++local.n_annosets_skipped;
      continue;
    }
    const deptree::span target = talign->tokens;

    auto cand_set = deptree::candidate_spans(tree);
    std::vector<deptree::span> base_spans(cand_set.begin(), cand_set.end());

    for (const auto& name : role_order(*f)) {
      maybe_span gold;
      for (const auto& l : a.labels) {
        if (l.fe_name != name || !l.is_overt() || !l.start || !l.end) continue;
        auto al = deptree::align_char_span(tree, *l.start, *l.end);
        if (!al) continue;
        if (!al->exact) ++local.n_misaligned;
        gold = al->tokens;
        break;
      }
      train_instance inst;
      inst.annoset_id = a.id;
      inst.fe = name;
      inst.candidates.push_back(std::nullopt);
      std::vector<deptree::span> spans = base_spans;
      if (gold && !cand_set.count(*gold)) {
        spans.push_back(*gold);  // keep the gold option reachable
        std::sort(spans.begin(), spans.end());
        ++local.n_gold_added;
      }
      for (const auto& s : spans) inst.candidates.push_back(s);
      inst.gold_index = 0;
      if (gold) {
        for (size_t i = 1; i < inst.candidates.size(); ++i)
          if (*inst.candidates[i] == *gold) {
            inst.gold_index = i;
            break;
          }
      }
      const std::vector<std::pair<std::string, std::string>>* anc = nullptr;
      if (hier) {
        auto hit = hier->find({f->id, name});
        if (hit != hier->end()) anc = &hit->second;
      }
      role ro{name};
      for (const auto& cand : inst.candidates)
        inst.features.push_back(
            extract_features(tree, target, f->name, ro, cand, cfg, anc));
      ++local.n_instances;
      out.push_back(std::move(inst));
    }
  }
  if (rep) *rep = local;
  return out;
}

// ---------------------------------------------------------------------------
// Model file: versioned JSON with weights keyed by decimal feature ids.

inline void save_model(const model& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "framekit-model";
  j["version"] = 1;
  j["templates"] = {{"hierarchy", m.templates.hierarchy}, {"path_cap", m.templates.path_cap}};
  j["hyper"] = {{"lambda", m.lambda}, {"rho", m.rho}, {"epsilon", m.epsilon}};
  std::vector<std::pair<uint64_t, double>> ws(m.weights.begin(), m.weights.end());
  std::sort(ws.begin(), ws.end());
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [id, w] : ws)
    if (w != 0) arr.push_back(nlohmann::ordered_json::array({std::to_string(id), w}));
  j["weights"] = arr;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  out << j.dump() << "\n";
}

inline model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(path + ": " + e.what());
  }
  if (j.value("format", "") != "framekit-model")
    throw parse_error(path + ": not a model file");
  if (j.value("version", 0) != 1)
    throw parse_error(path + ": unsupported model version");
  model m;
  m.templates.hierarchy = j.at("templates").at("hierarchy").get<bool>();
  m.templates.path_cap = j.at("templates").at("path_cap").get<size_t>();
  m.lambda = j.at("hyper").at("lambda").get<double>();
  m.rho = j.at("hyper").at("rho").get<double>();
  m.epsilon = j.at("hyper").at("epsilon").get<double>();
  for (const auto& entry : j.at("weights"))
    m.weights[std::stoull(entry.at(0).get<std::string>())] = entry.at(1).get<double>();
  return m;
}

}  // namespace framekit::argid
