#pragma once

// Paraphrastic sentence generation: candidate substitutes per annotation
// set, per-sentence candidate lattices, combination counting, and projection
// of annotations onto the rewritten text.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "framekit/core.hpp"
#include "framekit/embeddings.hpp"
#include "framekit/fndata.hpp"
#include "framekit/valence.hpp"

namespace framekit::paraphrase {

struct candidate {
  int64_t lu_id = 0;
  std::string lemma;
};

struct candidate_set {
  int64_t annoset_id = 0;
  int64_t source_lu_id = 0;
  std::pair<int64_t, int64_t> target{0, 0};  // character span of the target
  std::vector<candidate> candidates;         // lemma-lexicographic, deduplicated
};

struct candidate_lattice {
  int64_t sentence_id = 0;
  std::vector<candidate_set> sets;  // ordered by target start, non-overlapping
};

struct generation_config {
  std::optional<std::set<fndata::pos_tag>> pos_filter;
  bool mwe_filter = false;
  embeddings::semantic_filter_spec sem;
  const embeddings::embedding_table* table = nullptr;
  std::optional<uint64_t> max_sentences_per_source;
};

struct generation_note {
  int64_t annoset_id = 0;
  std::string note;
};

// ---------------------------------------------------------------------------

// Candidate substitutes for one annotation set: lexical units of the same
// frame attested with a loosely matching pattern, minus the source unit,
// subject to the configured part-of-speech, multiword and semantic filters.
inline candidate_set candidates_for_annoset(const fndata::corpus& c,
                                            const valence::valence_index& idx,
                                            const fndata::annotation_set& a,
                                            const generation_config& cfg,
                                            std::vector<generation_note>* notes = nullptr) {
  auto note = [&](const std::string& msg) {
    if (notes) notes->push_back({a.id, msg});
  };
  candidate_set out;
  out.annoset_id = a.id;
  out.source_lu_id = a.lu_id;
  if (!a.target_spans.empty()) out.target = a.target_spans.front();

  const fndata::lexical_unit* src = c.lu_by_id(a.lu_id);
  const fndata::frame* f = c.frame_by_id(a.frame_id);
  if (!src || !f) {
    note("dangling lu or frame reference");
    return out;
  }
  if (cfg.pos_filter && !cfg.pos_filter->count(src->pos)) {
    note("source pos " + fndata::to_string(src->pos) + " filtered");
    return out;
  }
  if (a.target_spans.size() != 1) {
    note("discontinuous or missing target unsupported");
    return out;
  }
  if (cfg.mwe_filter && split_ws(src->lemma).size() > 1) {
    note("multiword source filtered");
    return out;
  }

  valence::valence_pattern p;
  try {
    p = valence::extract_valence_pattern(a);
  } catch (const empty_pattern_error&) {
    note("all labels null-instantiated, not a paraphrase source");
    return out;
  } catch (const missing_layer_error&) {
    note("missing pt/gf layer");
    return out;
  }

  std::map<std::string, int64_t> by_lemma;  // dedup, lemma-lexicographic
  for (int64_t lu_id : valence::compatible_lexical_units(idx, p, *f)) {
    if (lu_id == a.lu_id) continue;
    const fndata::lexical_unit* u = c.lu_by_id(lu_id);
    if (!u) continue;
    if (cfg.mwe_filter && split_ws(u->lemma).size() > 1) continue;
    auto [it, inserted] = by_lemma.emplace(u->lemma, lu_id);
    if (!inserted && lu_id < it->second) it->second = lu_id;
  }

  if (cfg.sem.mode != embeddings::filter_mode::none && cfg.table) {
    std::vector<std::string> lemmas;
    for (const auto& [lemma, _] : by_lemma) lemmas.push_back(lemma);
    auto fo = embeddings::semantic_filter(src->lemma, lemmas, cfg.sem, *cfg.table);
    if (fo.source_missing) note("source lemma not in embedding table, semantic filter skipped");
    std::set<std::string> kept(fo.kept.begin(), fo.kept.end());
    for (auto it = by_lemma.begin(); it != by_lemma.end();)
      it = kept.count(it->first) ? std::next(it) : by_lemma.erase(it);
  }

  for (const auto& [lemma, lu_id] : by_lemma) out.candidates.push_back({lu_id, lemma});
  return out;
}

// Builds the lattice for one sentence: candidate sets for its annotation
// sets, ordered by target start. Overlapping targets keep the earliest and
// drop the rest with a note.
inline candidate_lattice build_lattice(const fndata::corpus& c, const valence::valence_index& idx,
                                       int64_t sentence_id, const generation_config& cfg,
                                       std::vector<generation_note>* notes = nullptr) {
  candidate_lattice lat;
  lat.sentence_id = sentence_id;
  std::vector<const fndata::annotation_set*> annos;
  for (const auto& a : c.annotation_sets)
    if (a.sentence_id == sentence_id) annos.push_back(&a);
  std::sort(annos.begin(), annos.end(), [](auto* x, auto* y) {
    auto xs = x->target_spans.empty() ? std::make_pair<int64_t, int64_t>(-1, -1) : x->target_spans.front();
    auto ys = y->target_spans.empty() ? std::make_pair<int64_t, int64_t>(-1, -1) : y->target_spans.front();
    return std::tie(xs, x->id) < std::tie(ys, y->id);
  });
  int64_t last_end = -1;
  for (const auto* a : annos) {
    candidate_set cs = candidates_for_annoset(c, idx, *a, cfg, notes);
    if (!a->target_spans.empty()) {
      if (cs.target.first <= last_end) {
        if (notes) notes->push_back({a->id, "target overlaps an earlier target, dropped"});
        continue;
      }
      last_end = std::max(last_end, cs.target.second);
    }
    lat.sets.push_back(std::move(cs));
  }
  return lat;
}

// Number of paraphrases the lattice licenses: every combination of keeping
// or substituting each target, minus the all-original combination.
inline uint64_t count_paraphrases(const candidate_lattice& lat) {
  uint64_t prod = 1;
  for (const auto& cs : lat.sets) {
    const uint64_t factor = static_cast<uint64_t>(cs.candidates.size()) + 1;
    if (prod > UINT64_MAX / factor) throw error("paraphrase count overflow");
    prod *= factor;
  }
  return prod - 1;
}

// ---------------------------------------------------------------------------

struct generated_sentence {
  fndata::sentence sent;                          // origin generated, id unset
  std::vector<fndata::annotation_set> annosets;   // projected, ids unset
  int64_t source_sentence_id = 0;
  size_t flagged_labels = 0;  // labels whose interior covered a substitution
};

namespace detail {

struct substitution {
  int64_t start = 0, end = 0;  // original span
  std::u32string replacement;
  int64_t annoset_id = 0;      // annoset whose target is substituted
};

// Shift of a position caused by substitutions that end strictly before it.
inline int64_t shift_before(const std::vector<substitution>& subs, int64_t pos) {
  int64_t d = 0;
  for (const auto& s : subs)
    if (s.end < pos) d += static_cast<int64_t>(s.replacement.size()) - (s.end - s.start + 1);
  return d;
}

// Projects an inclusive span through the substitution list. Returns the new
// span; sets flagged when the span covered a substitution in its interior.
inline std::pair<int64_t, int64_t> project_span(const std::vector<substitution>& subs,
                                                int64_t ls, int64_t le, bool* flagged) {
  for (const auto& s : subs) {
    if (ls == s.start && le == s.end) {
      const int64_t ns = ls + shift_before(subs, ls);
      return {ns, ns + static_cast<int64_t>(s.replacement.size()) - 1};
    }
  }
  bool covers_any = false;
  for (const auto& s : subs) {
    const bool intersects = ls <= s.end && s.start <= le;
    if (!intersects) continue;
    if (ls <= s.start && s.end <= le) {
      covers_any = true;
      continue;
    }
    throw projection_error("substitution [" + std::to_string(s.start) + "," +
                           std::to_string(s.end) + "] crosses label boundary [" +
                           std::to_string(ls) + "," + std::to_string(le) + "]");
  }
  if (covers_any && flagged) *flagged = true;
  int64_t d_end = 0;
  for (const auto& s : subs)
    if (s.end <= le) d_end += static_cast<int64_t>(s.replacement.size()) - (s.end - s.start + 1);
  return {ls + shift_before(subs, ls), le + d_end};
}

}  // namespace detail

// Generates one sentence per combination licensed by the lattice, in
// odometer order over the candidate sets (last set varies fastest, each
// set's candidates in lemma-lexicographic order). All annotation sets of
// the source sentence are projected onto the rewritten text.
inline std::vector<generated_sentence> generate_sentences(const fndata::corpus& c,
                                                          const candidate_lattice& lat,
                                                          const generation_config& cfg) {
  const fndata::sentence* src = c.sentence_by_id(lat.sentence_id);
  if (!src) throw error("unknown sentence " + std::to_string(lat.sentence_id));
  const std::u32string text = utf8_decode(src->text);

  std::vector<const fndata::annotation_set*> annos;
  for (const auto& a : c.annotation_sets)
    if (a.sentence_id == lat.sentence_id) annos.push_back(&a);
  std::sort(annos.begin(), annos.end(), [](auto* x, auto* y) { return x->id < y->id; });

  const uint64_t total = count_paraphrases(lat);
  const uint64_t cap = cfg.max_sentences_per_source
                           ? std::min(total, *cfg.max_sentences_per_source)
                           : total;

  std::vector<generated_sentence> out;
  out.reserve(static_cast<size_t>(std::min<uint64_t>(cap, 1 << 20)));

  std::vector<size_t> choice(lat.sets.size(), 0);  // 0 = keep original
  auto advance = [&]() {
    for (size_t i = lat.sets.size(); i-- > 0;) {
      if (choice[i] < lat.sets[i].candidates.size()) {
        ++choice[i];
        return true;
      }
      choice[i] = 0;
    }
    return false;
  };

  while (out.size() < cap && advance()) {
    std::vector<detail::substitution> subs;
    for (size_t i = 0; i < lat.sets.size(); ++i) {
      if (choice[i] == 0) continue;
      const auto& cs = lat.sets[i];
      const auto& cand = cs.candidates[choice[i] - 1];
      subs.push_back({cs.target.first, cs.target.second, utf8_decode(cand.lemma), cs.annoset_id});
    }
    std::sort(subs.begin(), subs.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });

    std::u32string new_text;
    int64_t cursor = 0;
    for (const auto& s : subs) {
      new_text.append(text, static_cast<size_t>(cursor), static_cast<size_t>(s.start - cursor));
      new_text.append(s.replacement);
      cursor = s.end + 1;
    }
    new_text.append(text, static_cast<size_t>(cursor));

    generated_sentence g;
    g.source_sentence_id = src->id;
    g.sent.document = src->document;
    g.sent.text = utf8_encode(new_text);
    g.sent.origin = fndata::corpus_origin::generated;

    for (const auto* a : annos) {
      fndata::annotation_set pa = *a;
      for (auto& [ts, te] : pa.target_spans) {
        bool fl = false;
        std::tie(ts, te) = detail::project_span(subs, ts, te, &fl);
      }
      for (auto& l : pa.labels) {
        if (!l.is_overt() || !l.start || !l.end) continue;
        bool fl = false;
        auto [ns, ne] = detail::project_span(subs, *l.start, *l.end, &fl);
        l.start = ns;
        l.end = ne;
        if (fl) ++g.flagged_labels;
      }
      auto v = fndata::validate_annotation_set(pa, g.sent);
      if (!v.valid)
        throw projection_error("projected annoset " + std::to_string(pa.id) +
                               " fails validation on generated text");
      g.annosets.push_back(std::move(pa));
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct augment_result {
  fndata::corpus corpus;  // original plus generated, fresh ids, origin generated
  size_t n_generated_sentences = 0;
  size_t n_generated_annosets = 0;
  size_t n_flagged_labels = 0;
  std::vector<std::pair<int64_t, uint64_t>> per_sentence;  // (source sentence, count)
  std::vector<generation_note> notes;
};

// Concatenates the training corpus with generated sentences, assigning fresh
// sentence and annotation set ids above the existing maxima.
inline augment_result export_augmented(const fndata::corpus& train,
                                       const std::vector<generated_sentence>& generated) {
  augment_result r;
  r.corpus = train;
  r.corpus.origin = fndata::corpus_origin::generated;
  int64_t next_sent = 0, next_anno = 0;
  for (const auto& s : train.sentences) next_sent = std::max(next_sent, s.id);
  for (const auto& a : train.annotation_sets) next_anno = std::max(next_anno, a.id);
  for (const auto& g : generated) {
    fndata::sentence s = g.sent;
    s.id = ++next_sent;
    r.corpus.sentences.push_back(s);
    for (fndata::annotation_set a : g.annosets) {
      a.id = ++next_anno;
      a.sentence_id = s.id;
      r.corpus.annotation_sets.push_back(std::move(a));
      ++r.n_generated_annosets;
    }
    r.n_flagged_labels += g.flagged_labels;
    ++r.n_generated_sentences;
  }
  r.corpus.rebuild_index();
  return r;
}

// Whole-corpus driver: one lattice per sentence in id order, every licensed
// combination generated subject to the per-source cap. Work is independent
// per sentence, so it can run on several threads; results are merged in
// sentence order either way.
inline augment_result augment_corpus(const fndata::corpus& train, const generation_config& cfg,
                                     unsigned jobs = 1) {
  const valence::valence_index idx = valence::build_index(train);
  std::vector<const fndata::sentence*> sents;
  for (const auto& s : train.sentences) sents.push_back(&s);
  std::sort(sents.begin(), sents.end(), [](auto* a, auto* b) { return a->id < b->id; });

  struct slot {
    std::vector<generation_note> notes;
    uint64_t count = 0;
    std::vector<generated_sentence> generated;
    std::exception_ptr failure;
  };
  std::vector<slot> slots(sents.size());
  auto work = [&](size_t i) {
    slot& sl = slots[i];
    try {
      candidate_lattice lat = build_lattice(train, idx, sents[i]->id, cfg, &sl.notes);
      sl.count = count_paraphrases(lat);
      if (sl.count > 0) sl.generated = generate_sentences(train, lat, cfg);
    } catch (...) {
      sl.failure = std::current_exception();
    }
  };
  if (jobs <= 1) {
    for (size_t i = 0; i < slots.size(); ++i) work(i);
  } else {
    std::atomic<size_t> cursor{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < slots.size(); i = cursor.fetch_add(1)) work(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<generated_sentence> generated;
  std::vector<generation_note> notes;
  std::vector<std::pair<int64_t, uint64_t>> per_sentence;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].failure) std::rethrow_exception(slots[i].failure);
    per_sentence.emplace_back(sents[i]->id, slots[i].count);
    for (auto& n : slots[i].notes) notes.push_back(std::move(n));
    for (auto& g : slots[i].generated) generated.push_back(std::move(g));
  }
  augment_result r = export_augmented(train, generated);
  r.per_sentence = std::move(per_sentence);
  r.notes = std::move(notes);
  return r;
}

}  // namespace framekit::paraphrase
