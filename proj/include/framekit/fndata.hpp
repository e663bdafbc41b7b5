#pragma once

// Frame-semantic data model: frames, lexical units, sentences, annotation
// sets, and the native JSONL serialization. Character offsets are inclusive
// and count Unicode scalar values.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "framekit/core.hpp"

namespace framekit::fndata {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

enum class pos_tag { n, v, a, adv, prep, other };
enum class core_type { core, peripheral, extra_thematic, core_unexpressed };
enum class ni_kind { ini, dni, cni };
enum class relation_kind { inheritance, subframe, other };
enum class corpus_origin { fulltext, exemplar, generated };

inline std::string to_string(pos_tag p) {
  switch (p) {
    case pos_tag::n: return "N";
    case pos_tag::v: return "V";
    case pos_tag::a: return "A";
    case pos_tag::adv: return "ADV";
    case pos_tag::prep: return "PREP";
    default: return "Other";
  }
}

inline pos_tag pos_from_string(const std::string& s) {
  if (s == "N") return pos_tag::n;
  if (s == "V") return pos_tag::v;
  if (s == "A") return pos_tag::a;
  if (s == "ADV") return pos_tag::adv;
  if (s == "PREP") return pos_tag::prep;
  return pos_tag::other;
}

inline std::string to_string(core_type c) {
  switch (c) {
    case core_type::core: return "Core";
    case core_type::peripheral: return "Peripheral";
    case core_type::extra_thematic: return "ExtraThematic";
    default: return "CoreUnexpressed";
  }
}

inline core_type core_type_from_string(const std::string& s) {
  if (s == "Core") return core_type::core;
  if (s == "Peripheral") return core_type::peripheral;
  if (s == "ExtraThematic" || s == "Extra-Thematic") return core_type::extra_thematic;
  if (s == "CoreUnexpressed" || s == "Core-Unexpressed") return core_type::core_unexpressed;
  throw parse_error("unknown core type: " + s);
}

inline std::string to_string(ni_kind k) {
  switch (k) {
    case ni_kind::ini: return "INI";
    case ni_kind::dni: return "DNI";
    default: return "CNI";
  }
}

inline ni_kind ni_from_string(const std::string& s) {
  if (s == "INI") return ni_kind::ini;
  if (s == "DNI") return ni_kind::dni;
  if (s == "CNI") return ni_kind::cni;
  throw parse_error("unknown null instantiation kind: " + s);
}

inline std::string to_string(relation_kind k) {
  switch (k) {
    case relation_kind::inheritance: return "Inheritance";
    case relation_kind::subframe: return "SubFrame";
    default: return "Other";
  }
}

inline relation_kind relation_from_string(const std::string& s) {
  if (s == "Inheritance") return relation_kind::inheritance;
  if (s == "SubFrame" || s == "Subframe") return relation_kind::subframe;
  return relation_kind::other;
}

inline std::string to_string(corpus_origin o) {
  switch (o) {
    case corpus_origin::fulltext: return "fulltext";
    case corpus_origin::exemplar: return "exemplar";
    default: return "generated";
  }
}

inline corpus_origin origin_from_string(const std::string& s) {
  if (s == "fulltext") return corpus_origin::fulltext;
  if (s == "exemplar") return corpus_origin::exemplar;
  if (s == "generated") return corpus_origin::generated;
  throw parse_error("unknown corpus origin: " + s);
}

// ---------------------------------------------------------------------------

struct frame_element {
  std::string name;
  core_type ct = core_type::core;

  bool is_core() const { return ct == core_type::core || ct == core_type::core_unexpressed; }
};

struct frame_relation {
  relation_kind kind = relation_kind::other;
  int64_t parent_frame_id = 0;
  int64_t child_frame_id = 0;
  // Pairs of (child fe name, parent fe name).
  std::vector<std::pair<std::string, std::string>> fe_mappings;
};

struct frame {
  int64_t id = 0;
  std::string name;
  std::vector<frame_element> elements;
  std::vector<int64_t> lexical_units;       // derived from lu records
  std::vector<frame_relation> relations;    // derived: relations touching this frame

  const frame_element* element(const std::string& fe) const {
    for (const auto& e : elements)
      if (e.name == fe) return &e;
    return nullptr;
  }
};

struct lexical_unit {
  int64_t id = 0;
  std::string lemma;
  pos_tag pos = pos_tag::other;
  int64_t frame_id = 0;
};

struct sentence {
  int64_t id = 0;
  std::string document;
  std::string text;
  corpus_origin origin = corpus_origin::fulltext;

  int64_t length() const { return utf8_length(text); }
};

// One frame element label. Overt labels carry an inclusive character span
// plus phrase type and grammatical function; null-instantiated labels carry
// only the ni kind.
struct label_span {
  std::string fe_name;
  std::optional<int64_t> start;
  std::optional<int64_t> end;
  std::string pt;
  std::string gf;
  std::optional<ni_kind> ni;

  bool is_ni() const { return ni.has_value(); }
  bool is_overt() const { return !ni.has_value(); }
};

struct annotation_set {
  int64_t id = 0;
  int64_t sentence_id = 0;
  int64_t lu_id = 0;
  int64_t frame_id = 0;
  std::vector<std::pair<int64_t, int64_t>> target_spans;
  std::vector<label_span> labels;
};

struct corpus {
  corpus_origin origin = corpus_origin::fulltext;
  std::vector<frame> frames;
  std::vector<lexical_unit> lexical_units;
  std::vector<frame_relation> relations;
  std::vector<sentence> sentences;
  std::vector<annotation_set> annotation_sets;

  std::unordered_map<int64_t, size_t> frame_idx, lu_idx, sent_idx, anno_idx;

  void rebuild_index() {
    frame_idx.clear(); lu_idx.clear(); sent_idx.clear(); anno_idx.clear();
    for (size_t i = 0; i < frames.size(); ++i) frame_idx[frames[i].id] = i;
    for (size_t i = 0; i < lexical_units.size(); ++i) lu_idx[lexical_units[i].id] = i;
    for (size_t i = 0; i < sentences.size(); ++i) sent_idx[sentences[i].id] = i;
    for (size_t i = 0; i < annotation_sets.size(); ++i) anno_idx[annotation_sets[i].id] = i;
    for (auto& f : frames) {
      f.lexical_units.clear();
      f.relations.clear();
    }
    for (const auto& lu : lexical_units) {
      auto it = frame_idx.find(lu.frame_id);
      if (it != frame_idx.end()) frames[it->second].lexical_units.push_back(lu.id);
    }
    for (const auto& r : relations) {
      auto p = frame_idx.find(r.parent_frame_id);
      auto c = frame_idx.find(r.child_frame_id);
      if (p != frame_idx.end()) frames[p->second].relations.push_back(r);
      if (c != frame_idx.end() && c != p) frames[c->second].relations.push_back(r);
    }
  }

  const frame* frame_by_id(int64_t id) const {
    auto it = frame_idx.find(id);
    return it == frame_idx.end() ? nullptr : &frames[it->second];
  }
  const lexical_unit* lu_by_id(int64_t id) const {
    auto it = lu_idx.find(id);
    return it == lu_idx.end() ? nullptr : &lexical_units[it->second];
  }
  const sentence* sentence_by_id(int64_t id) const {
    auto it = sent_idx.find(id);
    return it == sent_idx.end() ? nullptr : &sentences[it->second];
  }
  const annotation_set* annoset_by_id(int64_t id) const {
    auto it = anno_idx.find(id);
    return it == anno_idx.end() ? nullptr : &annotation_sets[it->second];
  }
};

// ---------------------------------------------------------------------------
// Validation of annotation set indexes against the sentence text.

enum class reject_reason { missing_index, negative_start, end_out_of_range, inverted_span };

inline std::string to_string(reject_reason r) {
  switch (r) {
    case reject_reason::missing_index: return "missing_index";
    case reject_reason::negative_start: return "negative_start";
    case reject_reason::end_out_of_range: return "end_out_of_range";
    default: return "inverted_span";
  }
}

struct validation_result {
  bool valid = true;
  std::vector<reject_reason> reasons;
};

// Checks every overt label's character span against the sentence length.
// Null-instantiated labels are exempt.
inline validation_result validate_annotation_set(const annotation_set& a, const sentence& s) {
  validation_result r;
  const int64_t len = s.length();
  for (const auto& l : a.labels) {
    if (l.is_ni()) continue;
    if (!l.start.has_value() || !l.end.has_value()) {
      r.reasons.push_back(reject_reason::missing_index);
      continue;
    }
    if (*l.start < 0) r.reasons.push_back(reject_reason::negative_start);
    if (*l.end >= len) r.reasons.push_back(reject_reason::end_out_of_range);
    if (*l.start > *l.end) r.reasons.push_back(reject_reason::inverted_span);
  }
  r.valid = r.reasons.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Native JSONL serialization. Canonical form: one meta record, then frames,
// lexical units, relations, sentences and annotation sets, each sorted by id,
// with a fixed key order and no insignificant whitespace.

inline ojson label_to_json(const label_span& l) {
  ojson j;
  j["fe"] = l.fe_name;
  if (l.is_ni()) {
    j["ni"] = to_string(*l.ni);
  } else {
    if (l.start) j["start"] = *l.start;
    if (l.end) j["end"] = *l.end;
    if (!l.pt.empty()) j["pt"] = l.pt;
    if (!l.gf.empty()) j["gf"] = l.gf;
  }
  return j;
}

inline label_span label_from_json(const json& j) {
  label_span l;
  l.fe_name = j.at("fe").get<std::string>();
  if (j.contains("ni")) {
    l.ni = ni_from_string(j.at("ni").get<std::string>());
  } else {
    if (j.contains("start")) l.start = j.at("start").get<int64_t>();
    if (j.contains("end")) l.end = j.at("end").get<int64_t>();
    if (j.contains("pt")) l.pt = j.at("pt").get<std::string>();
    if (j.contains("gf")) l.gf = j.at("gf").get<std::string>();
  }
  return l;
}

inline std::string export_jsonl(const corpus& c) {
  std::ostringstream out;
  auto emit = [&out](const ojson& j) { out << j.dump() << "\n"; };

  {
    ojson j;
    j["kind"] = "meta";
    j["origin"] = to_string(c.origin);
    emit(j);
  }

  std::vector<const frame*> frames;
  for (const auto& f : c.frames) frames.push_back(&f);
  std::sort(frames.begin(), frames.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const frame* f : frames) {
    ojson j;
    j["kind"] = "frame";
    j["id"] = f->id;
    j["name"] = f->name;
    ojson els = ojson::array();
    for (const auto& e : f->elements) {
      ojson ej;
      ej["name"] = e.name;
      ej["core_type"] = to_string(e.ct);
      els.push_back(ej);
    }
    j["elements"] = els;
    emit(j);
  }

  std::vector<const lexical_unit*> lus;
  for (const auto& u : c.lexical_units) lus.push_back(&u);
  std::sort(lus.begin(), lus.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const lexical_unit* u : lus) {
    ojson j;
    j["kind"] = "lu";
    j["id"] = u->id;
    j["lemma"] = u->lemma;
    j["pos"] = to_string(u->pos);
    j["frame"] = u->frame_id;
    emit(j);
  }

  std::vector<const frame_relation*> rels;
  for (const auto& r : c.relations) rels.push_back(&r);
  std::sort(rels.begin(), rels.end(), [](auto* a, auto* b) {
    return std::tie(a->parent_frame_id, a->child_frame_id, a->kind) <
           std::tie(b->parent_frame_id, b->child_frame_id, b->kind);
  });
  for (const frame_relation* r : rels) {
    ojson j;
    j["kind"] = "relation";
    j["rel"] = to_string(r->kind);
    j["parent"] = r->parent_frame_id;
    j["child"] = r->child_frame_id;
    ojson maps = ojson::array();
    for (const auto& [cf, pf] : r->fe_mappings) maps.push_back(ojson::array({cf, pf}));
    j["fe_map"] = maps;
    emit(j);
  }

  std::vector<const sentence*> sents;
  for (const auto& s : c.sentences) sents.push_back(&s);
  std::sort(sents.begin(), sents.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const sentence* s : sents) {
    ojson j;
    j["kind"] = "sentence";
    j["id"] = s->id;
    j["doc"] = s->document;
    j["text"] = s->text;
    if (s->origin != c.origin) j["origin"] = to_string(s->origin);
    emit(j);
  }

  std::vector<const annotation_set*> annos;
  for (const auto& a : c.annotation_sets) annos.push_back(&a);
  std::sort(annos.begin(), annos.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const annotation_set* a : annos) {
    ojson j;
    j["kind"] = "annoset";
    j["id"] = a->id;
    j["sentence"] = a->sentence_id;
    j["lu"] = a->lu_id;
    j["frame"] = a->frame_id;
    ojson tg = ojson::array();
    for (const auto& [s, e] : a->target_spans) tg.push_back(ojson::array({s, e}));
    j["targets"] = tg;
    ojson ls = ojson::array();
    for (const auto& l : a->labels) ls.push_back(label_to_json(l));
    j["labels"] = ls;
    emit(j);
  }

  return out.str();
}

struct ingest_report {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string summary() const {
    std::ostringstream o;
    for (const auto& e : errors) o << "error: " << e << "\n";
    for (const auto& w : warnings) o << "warning: " << w << "\n";
    return o.str();
  }
};

// Integrity pass: duplicate ids, dangling references, labels naming unknown
// frame elements. Offending records are dropped and reported.
inline void check_integrity(corpus& c, ingest_report& rep) {
  std::unordered_set<int64_t> seen;
  auto dedup_ids = [&seen, &rep](auto& vec, const char* what) {
    seen.clear();
    std::remove_reference_t<decltype(vec)> keep;
    for (auto& item : vec) {
      if (!seen.insert(item.id).second) {
        rep.errors.push_back(std::string("duplicate ") + what + " id " + std::to_string(item.id));
        continue;
      }
      keep.push_back(std::move(item));
    }
    vec = std::move(keep);
  };
  dedup_ids(c.frames, "frame");
  dedup_ids(c.lexical_units, "lu");
  dedup_ids(c.sentences, "sentence");
  dedup_ids(c.annotation_sets, "annoset");
  c.rebuild_index();

  {
    std::vector<lexical_unit> keep;
    for (auto& u : c.lexical_units) {
      if (!c.frame_by_id(u.frame_id)) {
        rep.errors.push_back("lu " + std::to_string(u.id) + " references unknown frame " +
                             std::to_string(u.frame_id));
        continue;
      }
      keep.push_back(std::move(u));
    }
    c.lexical_units = std::move(keep);
  }
  {
    std::vector<frame_relation> keep;
    for (auto& r : c.relations) {
      if (!c.frame_by_id(r.parent_frame_id) || !c.frame_by_id(r.child_frame_id)) {
        rep.errors.push_back("relation references unknown frame");
        continue;
      }
      const frame* pf = c.frame_by_id(r.parent_frame_id);
      const frame* cf = c.frame_by_id(r.child_frame_id);
      bool ok = true;
      for (const auto& [cfe, pfe] : r.fe_mappings) {
        if (!cf->element(cfe) || !pf->element(pfe)) {
          rep.errors.push_back("relation " + cf->name + " -> " + pf->name +
                               " maps unknown frame element " + cfe + "/" + pfe);
          ok = false;
          break;
        }
      }
      if (ok) keep.push_back(std::move(r));
    }
    c.relations = std::move(keep);
  }
  c.rebuild_index();
  {
    std::vector<annotation_set> keep;
    for (auto& a : c.annotation_sets) {
      std::string why;
      const frame* f = c.frame_by_id(a.frame_id);
      if (!c.sentence_by_id(a.sentence_id)) why = "unknown sentence " + std::to_string(a.sentence_id);
      else if (!c.lu_by_id(a.lu_id)) why = "unknown lu " + std::to_string(a.lu_id);
      else if (!f) why = "unknown frame " + std::to_string(a.frame_id);
      else if (c.lu_by_id(a.lu_id)->frame_id != a.frame_id) why = "lu/frame mismatch";
      else {
        for (const auto& l : a.labels) {
          if (!f->element(l.fe_name)) {
            why = "label names unknown frame element " + l.fe_name;
            break;
          }
        }
      }
      if (!why.empty()) {
        rep.errors.push_back("annoset " + std::to_string(a.id) + ": " + why);
        continue;
      }
      keep.push_back(std::move(a));
    }
    c.annotation_sets = std::move(keep);
  }
  c.rebuild_index();
}

inline corpus ingest_jsonl(const std::string& path, ingest_report& rep, bool strict = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  corpus c;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "meta") {
        c.origin = origin_from_string(j.at("origin").get<std::string>());
      } else if (kind == "frame") {
        frame f;
        f.id = j.at("id").get<int64_t>();
        f.name = j.at("name").get<std::string>();
        for (const auto& ej : j.at("elements")) {
          frame_element e;
          e.name = ej.at("name").get<std::string>();
          e.ct = core_type_from_string(ej.at("core_type").get<std::string>());
          f.elements.push_back(std::move(e));
        }
        c.frames.push_back(std::move(f));
      } else if (kind == "lu") {
        lexical_unit u;
        u.id = j.at("id").get<int64_t>();
        u.lemma = j.at("lemma").get<std::string>();
        u.pos = pos_from_string(j.at("pos").get<std::string>());
        u.frame_id = j.at("frame").get<int64_t>();
        c.lexical_units.push_back(std::move(u));
      } else if (kind == "relation") {
        frame_relation r;
        r.kind = relation_from_string(j.at("rel").get<std::string>());
        r.parent_frame_id = j.at("parent").get<int64_t>();
        r.child_frame_id = j.at("child").get<int64_t>();
        for (const auto& m : j.at("fe_map"))
          r.fe_mappings.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
        c.relations.push_back(std::move(r));
      } else if (kind == "sentence") {
        sentence s;
        s.id = j.at("id").get<int64_t>();
        s.document = j.value("doc", std::string());
        s.text = j.at("text").get<std::string>();
        s.origin = j.contains("origin") ? origin_from_string(j.at("origin").get<std::string>())
                                        : c.origin;
        c.sentences.push_back(std::move(s));
      } else if (kind == "annoset") {
        annotation_set a;
        a.id = j.at("id").get<int64_t>();
        a.sentence_id = j.at("sentence").get<int64_t>();
        a.lu_id = j.at("lu").get<int64_t>();
        a.frame_id = j.at("frame").get<int64_t>();
        for (const auto& t : j.at("targets"))
          a.target_spans.emplace_back(t.at(0).get<int64_t>(), t.at(1).get<int64_t>());
        for (const auto& lj : j.at("labels")) a.labels.push_back(label_from_json(lj));
        c.annotation_sets.push_back(std::move(a));
      } else {
        rep.errors.push_back(path + ":" + std::to_string(lineno) + ": unknown kind " + kind);
      }
    } catch (const json::exception& e) {
      rep.errors.push_back(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const parse_error& e) {
      rep.errors.push_back(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  check_integrity(c, rep);
  if (strict && !rep.ok()) throw integrity_error("ingest failed:\n" + rep.summary());
  return c;
}

inline void write_jsonl(const corpus& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  out << export_jsonl(c);
}

inline uint64_t corpus_fingerprint(const corpus& c) { return fnv1a64(export_jsonl(c)); }

// ---------------------------------------------------------------------------
// Train / dev / test splitting.

struct split_result {
  corpus train, dev, test;
  size_t test_duplicates_removed = 0;
  size_t incomplete_removed_from_train = 0;
};

// Signature of a sentence's annotation, independent of record ids. Used to
// deduplicate repeated sentences in the test split.
inline std::string annotation_signature(const corpus& c, const sentence& s,
                                        const std::vector<const annotation_set*>& annos) {
  std::vector<std::string> parts;
  for (const annotation_set* a : annos) {
    const frame* f = c.frame_by_id(a->frame_id);
    const lexical_unit* u = c.lu_by_id(a->lu_id);
    std::ostringstream o;
    o << (f ? f->name : "?") << "|" << (u ? u->lemma + "." + to_string(u->pos) : "?") << "|";
    for (const auto& [ts, te] : a->target_spans) o << ts << "-" << te << ",";
    o << "|";
    for (const auto& l : a->labels) {
      o << l.fe_name << ":";
      if (l.is_ni()) o << to_string(*l.ni);
      else o << l.start.value_or(-1) << "-" << l.end.value_or(-1) << ":" << l.pt << ":" << l.gf;
      o << ";";
    }
    parts.push_back(o.str());
  }
  std::sort(parts.begin(), parts.end());
  return s.text + "\x1f" + join(parts, "\x1e");
}

inline split_result split_corpus(const corpus& c, const std::set<std::string>& test_docs,
                                 const std::set<std::string>& dev_docs) {
  std::set<std::string> known;
  for (const auto& s : c.sentences) known.insert(s.document);
  for (const auto& d : test_docs)
    if (!known.count(d)) throw unknown_document_error("unknown document: " + d);
  for (const auto& d : dev_docs) {
    if (!known.count(d)) throw unknown_document_error("unknown document: " + d);
    if (test_docs.count(d)) throw integrity_error("document in both dev and test: " + d);
  }

  split_result r;
  for (corpus* part : {&r.train, &r.dev, &r.test}) {
    part->origin = c.origin;
    part->frames = c.frames;
    part->lexical_units = c.lexical_units;
    part->relations = c.relations;
  }

  std::unordered_map<int64_t, std::vector<const annotation_set*>> by_sentence;
  for (const auto& a : c.annotation_sets) by_sentence[a.sentence_id].push_back(&a);

  std::vector<const sentence*> sents;
  for (const auto& s : c.sentences) sents.push_back(&s);
  std::sort(sents.begin(), sents.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::unordered_set<std::string> seen_test_signatures;
  for (const sentence* s : sents) {
    auto& annos = by_sentence[s->id];
    if (test_docs.count(s->document)) {
      std::string sig = annotation_signature(c, *s, annos);
      if (!seen_test_signatures.insert(sig).second) {
        ++r.test_duplicates_removed;
        continue;
      }
      r.test.sentences.push_back(*s);
      for (auto* a : annos) r.test.annotation_sets.push_back(*a);
    } else if (dev_docs.count(s->document)) {
      r.dev.sentences.push_back(*s);
      for (auto* a : annos) r.dev.annotation_sets.push_back(*a);
    } else {
      r.train.sentences.push_back(*s);
      for (auto* a : annos) {
        if (a->labels.empty()) {
          ++r.incomplete_removed_from_train;
          continue;
        }
        r.train.annotation_sets.push_back(*a);
      }
    }
  }
  r.train.rebuild_index();
  r.dev.rebuild_index();
  r.test.rebuild_index();
  return r;
}

// ---------------------------------------------------------------------------

struct corpus_stats_result {
  size_t n_sentences = 0;
  size_t n_annotation_sets = 0;
  size_t n_frames = 0;
  size_t n_lexical_units = 0;
  std::map<std::string, size_t> lu_counts_by_pos;
};

inline corpus_stats_result corpus_stats(const corpus& c) {
  corpus_stats_result r;
  r.n_sentences = c.sentences.size();
  r.n_annotation_sets = c.annotation_sets.size();
  r.n_frames = c.frames.size();
  r.n_lexical_units = c.lexical_units.size();
  for (const auto& u : c.lexical_units) ++r.lu_counts_by_pos[to_string(u.pos)];
  return r;
}

// Drops annotation sets whose overt labels fail index validation. Used as a
// preprocessing step before pattern extraction and training.
inline corpus filter_invalid(const corpus& c, ingest_report& rep) {
  corpus out = c;
  out.annotation_sets.clear();
  for (const auto& a : c.annotation_sets) {
    const sentence* s = c.sentence_by_id(a.sentence_id);
    if (!s) continue;
    auto v = validate_annotation_set(a, *s);
    if (!v.valid) {
      std::string reasons;
      for (auto rr : v.reasons) reasons += to_string(rr) + std::string(" ");
      rep.warnings.push_back("annoset " + std::to_string(a.id) + " dropped: " + reasons);
      continue;
    }
    out.annotation_sets.push_back(a);
  }
  out.rebuild_index();
  return out;
}

}  // namespace framekit::fndata
