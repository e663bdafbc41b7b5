#pragma once

// Shared test utilities: corpus builders, random fixture generators, and
// independent reference implementations used to cross-check the library.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "framekit/argid.hpp"
#include "framekit/deptree.hpp"
#include "framekit/eval.hpp"
#include "framekit/fndata.hpp"
#include "framekit/valence.hpp"

namespace th {

namespace fk = framekit;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files.

struct temp_dir {
  fs::path path;

  explicit temp_dir(const std::string& tag) {
    path = fs::temp_directory_path() / ("framekit_" + tag + "_" + std::to_string(::getpid()) +
                                        "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~temp_dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Corpus construction.

inline fk::fndata::label_span overt(const std::string& fe, int64_t s, int64_t e,
                                    const std::string& pt = "NP", const std::string& gf = "Ext") {
  fk::fndata::label_span l;
  l.fe_name = fe;
  l.start = s;
  l.end = e;
  l.pt = pt;
  l.gf = gf;
  return l;
}

inline fk::fndata::label_span ni(const std::string& fe, fk::fndata::ni_kind k) {
  fk::fndata::label_span l;
  l.fe_name = fe;
  l.ni = k;
  return l;
}

struct corpus_builder {
  fk::fndata::corpus c;
  int64_t next_frame = 1, next_lu = 100, next_sent = 1000, next_anno = 10000;

  int64_t add_frame(const std::string& name,
                    const std::vector<std::pair<std::string, fk::fndata::core_type>>& fes) {
    fk::fndata::frame f;
    f.id = next_frame++;
    f.name = name;
    for (const auto& [fe, ct] : fes) f.elements.push_back({fe, ct});
    c.frames.push_back(std::move(f));
    return c.frames.back().id;
  }

  int64_t add_lu(const std::string& lemma, fk::fndata::pos_tag pos, int64_t frame_id) {
    fk::fndata::lexical_unit u;
    u.id = next_lu++;
    u.lemma = lemma;
    u.pos = pos;
    u.frame_id = frame_id;
    c.lexical_units.push_back(std::move(u));
    return c.lexical_units.back().id;
  }

  int64_t add_sentence(const std::string& doc, const std::string& text) {
    fk::fndata::sentence s;
    s.id = next_sent++;
    s.document = doc;
    s.text = text;
    c.sentences.push_back(std::move(s));
    return c.sentences.back().id;
  }

  int64_t add_annoset(int64_t sent, int64_t lu, int64_t frame,
                      std::vector<std::pair<int64_t, int64_t>> targets,
                      std::vector<fk::fndata::label_span> labels) {
    fk::fndata::annotation_set a;
    a.id = next_anno++;
    a.sentence_id = sent;
    a.lu_id = lu;
    a.frame_id = frame;
    a.target_spans = std::move(targets);
    a.labels = std::move(labels);
    c.annotation_sets.push_back(std::move(a));
    return c.annotation_sets.back().id;
  }

  void add_relation(fk::fndata::relation_kind kind, int64_t parent, int64_t child,
                    std::vector<std::pair<std::string, std::string>> maps) {
    fk::fndata::frame_relation r;
    r.kind = kind;
    r.parent_frame_id = parent;
    r.child_frame_id = child;
    r.fe_mappings = std::move(maps);
    c.relations.push_back(std::move(r));
  }

  fk::fndata::corpus build() {
    c.rebuild_index();
    return c;
  }
};

// Randomized corpus over a small closed vocabulary. Deterministic by seed.
inline fk::fndata::corpus random_corpus(uint64_t seed, size_t n_frames = 3, size_t n_sents = 8,
                                        size_t n_annos = 20) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](size_t n) { return static_cast<size_t>(fk::uniform_index(rng, n)); };
  corpus_builder b;
  const std::vector<std::string> fe_pool = {"Agent", "Theme", "Goal", "Time", "Place", "Manner"};
  const std::vector<std::string> pt_pool = {"NP", "PP", "AVP", "Poss", "Sfin"};
  const std::vector<std::string> gf_pool = {"Ext", "Obj", "Dep", "Gen"};
  const std::vector<std::string> lemma_pool = {"alpha", "beta", "gamma", "delta", "epsilon",
                                               "zeta", "eta", "theta"};

  std::vector<int64_t> frames;
  std::vector<std::vector<std::string>> frame_fes;
  for (size_t i = 0; i < n_frames; ++i) {
    std::vector<std::pair<std::string, fk::fndata::core_type>> fes;
    std::vector<std::string> names;
    const size_t nfe = 2 + pick(3);
    for (size_t k = 0; k < nfe; ++k) {
      const std::string fe = fe_pool[k];
      const auto ct = k < 2 ? fk::fndata::core_type::core
                            : (pick(2) ? fk::fndata::core_type::peripheral
                                       : fk::fndata::core_type::extra_thematic);
      fes.emplace_back(fe, ct);
      names.push_back(fe);
    }
    frames.push_back(b.add_frame("Frame_" + std::to_string(i), fes));
    frame_fes.push_back(names);
  }
  std::vector<std::vector<int64_t>> frame_lus(n_frames);
  for (size_t i = 0; i < n_frames; ++i) {
    const size_t nlu = 1 + pick(4);
    for (size_t k = 0; k < nlu; ++k)
      frame_lus[i].push_back(b.add_lu(lemma_pool[pick(lemma_pool.size())],
                                      pick(2) ? fk::fndata::pos_tag::v : fk::fndata::pos_tag::n,
                                      frames[i]));
  }
  std::vector<int64_t> sents;
  for (size_t i = 0; i < n_sents; ++i) {
    std::string text;
    const size_t words = 4 + pick(6);
    for (size_t w = 0; w < words; ++w) {
      if (w) text += " ";
      text += lemma_pool[pick(lemma_pool.size())];
    }
    sents.push_back(b.add_sentence("doc_" + std::to_string(pick(3)), text));
  }
  for (size_t i = 0; i < n_annos; ++i) {
    const size_t fi = pick(n_frames);
    const int64_t sent = sents[pick(sents.size())];
    const auto& text = b.c.sentences[static_cast<size_t>(
        sent - b.c.sentences.front().id)].text;
    const int64_t len = fk::utf8_length(text);
    auto rand_span = [&]() {
      int64_t s = static_cast<int64_t>(pick(static_cast<size_t>(len)));
      int64_t e = s + static_cast<int64_t>(pick(static_cast<size_t>(len - s)));
      return std::make_pair(s, e);
    };
    std::vector<fk::fndata::label_span> labels;
    const size_t nl = 1 + pick(3);
    for (size_t k = 0; k < nl; ++k) {
      const auto& fe = frame_fes[fi][pick(frame_fes[fi].size())];
      if (pick(5) == 0) {
        labels.push_back(ni(fe, static_cast<fk::fndata::ni_kind>(pick(3))));
      } else {
        auto [s, e] = rand_span();
        labels.push_back(overt(fe, s, e, pt_pool[pick(pt_pool.size())],
                               gf_pool[pick(gf_pool.size())]));
      }
    }
    auto [ts, te] = rand_span();
    b.add_annoset(sent, frame_lus[fi][pick(frame_lus[fi].size())], frames[fi], {{ts, te}},
                  labels);
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Dependency trees.

inline fk::deptree::dep_tree make_tree(
    const std::vector<std::tuple<std::string, std::string, std::string, int, std::string>>& rows,
    int64_t sentence_id = 1) {
  // rows: (form, lemma, pos, head, deprel)
  fk::deptree::dep_tree t;
  t.sentence_id = sentence_id;
  int64_t off = 0;
  int idx = 0;
  for (const auto& [form, lemma, pos, head, deprel] : rows) {
    fk::deptree::token tok;
    tok.index = ++idx;
    tok.form = form;
    tok.lemma = lemma;
    tok.pos = pos;
    tok.head = head;
    tok.deprel = deprel;
    tok.char_start = off;
    tok.char_end = off + fk::utf8_length(form) - 1;
    off += fk::utf8_length(form) + 1;
    t.tokens.push_back(std::move(tok));
  }
  fk::deptree::check_tree(t);
  return t;
}

// Random tree over n tokens: token 1..n, each non-root node attaches to a
// uniformly random other node, subject to acyclicity (attach to a node
// earlier in a random permutation).
inline fk::deptree::dep_tree random_tree(uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i + 1;
  fk::fisher_yates(perm, rng);
  std::vector<int> heads(static_cast<size_t>(n) + 1, 0);
  for (size_t pos = 1; pos < perm.size(); ++pos) {
    const size_t j = static_cast<size_t>(fk::uniform_index(rng, pos));
    heads[static_cast<size_t>(perm[pos])] = perm[j];
  }
  std::vector<std::tuple<std::string, std::string, std::string, int, std::string>> rows;
  const std::vector<std::string> rels = {"nsubj", "obj", "nmod", "det", "amod", "advmod"};
  for (int i = 1; i <= n; ++i) {
    rows.emplace_back("w" + std::to_string(i), "l" + std::to_string(i), "P",
                      heads[static_cast<size_t>(i)],
                      heads[static_cast<size_t>(i)] == 0
                          ? "root"
                          : rels[static_cast<size_t>(fk::uniform_index(rng, rels.size()))]);
  }
  return make_tree(rows);
}

// Independent span oracle: walks up from every node to find descendant sets,
// rather than down through child lists.
inline std::set<fk::deptree::span> brute_force_spans(const fk::deptree::dep_tree& t) {
  const int n = static_cast<int>(t.tokens.size());
  std::set<fk::deptree::span> out;
  for (int i = 1; i <= n; ++i) out.insert({i, i});
  for (int w = 1; w <= n; ++w) {
    std::set<int> desc;
    for (int v = 1; v <= n; ++v) {
      int cur = v;
      while (cur != 0) {
        if (cur == w) {
          desc.insert(v);
          break;
        }
        cur = t.at(cur).head;
      }
    }
    const int lo = *desc.begin(), hi = *desc.rbegin();
    if (hi - lo + 1 == static_cast<int>(desc.size())) out.insert({lo, hi});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive constrained decoder, independent of the beam implementation.

struct exhaustive_best {
  double total = -1e300;
  std::vector<size_t> opts;
};

inline void exhaustive_rec(const std::vector<std::vector<double>>& opt_score,
                           const std::vector<fk::deptree::span>& spans, size_t r,
                           std::vector<size_t>& opts, double running, exhaustive_best& best) {
  if (r == opt_score.size()) {
    if (running > best.total || (running == best.total && opts < best.opts)) {
      best.total = running;
      best.opts = opts;
    }
    return;
  }
  for (size_t o = 0; o < opt_score[r].size(); ++o) {
    if (o > 0) {
      bool clash = false;
      for (size_t pr = 0; pr < r && !clash; ++pr)
        if (opts[pr] > 0 && spans[opts[pr] - 1].overlaps(spans[o - 1])) clash = true;
      if (clash) continue;
    }
    opts.push_back(o);
    exhaustive_rec(opt_score, spans, r + 1, opts, running + opt_score[r][o], best);
    opts.pop_back();
  }
}

// Scores every constraint-satisfying assignment. opt_score[r][0] is the null
// option for role r; opt_score[r][1 + k] corresponds to spans[k].
inline exhaustive_best exhaustive_decode(const std::vector<std::vector<double>>& opt_score,
                                         const std::vector<fk::deptree::span>& spans) {
  exhaustive_best best;
  std::vector<size_t> opts;
  exhaustive_rec(opt_score, spans, 0, opts, 0.0, best);
  return best;
}

// ---------------------------------------------------------------------------
// Central finite differences for the instance loss, as a gradient oracle.

inline double loss_at(fk::argid::model m, const fk::argid::train_instance& inst) {
  return fk::argid::instance_loss(m, inst).loss;
}

inline std::vector<std::pair<uint64_t, double>> numeric_gradient(
    const fk::argid::model& m, const fk::argid::train_instance& inst, double h) {
  std::set<uint64_t> ids;
  for (const auto& fv : inst.features)
    for (const auto& [id, _] : fv.items) ids.insert(id);
  std::vector<std::pair<uint64_t, double>> grad;
  for (uint64_t id : ids) {
    fk::argid::model mp = m, mm = m;
    mp.weights[id] = m.weight(id) + h;
    mm.weights[id] = m.weight(id) - h;
    const double g = (loss_at(mp, inst) - loss_at(mm, inst)) / (2 * h);
    grad.emplace_back(id, g);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Second bootstrap implementation: same resample index stream, independent
// accumulation and comparison code.

inline double reference_bootstrap_p(const std::vector<fk::eval::tally_pair>& items, size_t b,
                                    uint64_t seed) {
  auto f1_of = [](double m, double s, double g) {
    const double p = s > 0 ? m / s : 0.0;
    const double r = g > 0 ? m / g : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  };
  double ma = 0, sa = 0, ga = 0, mb = 0, sb = 0, gb = 0;
  for (const auto& it : items) {
    ma += it.a.match; sa += it.a.sys; ga += it.a.gold;
    mb += it.b.match; sb += it.b.sys; gb += it.b.gold;
  }
  const double delta_full = f1_of(ma, sa, ga) - f1_of(mb, sb, gb);
  size_t exceed = 0;
  for (size_t i = 0; i < b; ++i) {
    auto idx = fk::eval::resample_indices(items.size(), seed, i);
    double rma = 0, rsa = 0, rga = 0, rmb = 0, rsb = 0, rgb = 0;
    for (size_t k : idx) {
      rma += items[k].a.match; rsa += items[k].a.sys; rga += items[k].a.gold;
      rmb += items[k].b.match; rsb += items[k].b.sys; rgb += items[k].b.gold;
    }
    if (f1_of(rma, rsa, rga) - f1_of(rmb, rsb, rgb) > 2 * delta_full) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(b);
}

}  // namespace th
