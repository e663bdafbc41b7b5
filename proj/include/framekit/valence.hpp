#pragma once

// Valence patterns: per-annotation-set sequences of FE.PT.GF units, their
// core signatures, loose matching, and the corpus-wide index that answers
// "which lexical units realize this pattern".

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "framekit/core.hpp"
#include "framekit/fndata.hpp"

namespace framekit::valence {

struct valence_unit {
  std::string fe, pt, gf;

  bool operator==(const valence_unit&) const = default;
  auto operator<=>(const valence_unit&) const = default;

  std::string str() const { return fe + "." + pt + "." + gf; }
};

struct valence_pattern {
  int64_t frame_id = 0;
  std::vector<valence_unit> units;  // label order, overt labels only
};

// One valence unit per overt label, in label order. Null instantiations are
// skipped. An overt label without phrase type or grammatical function has no
// usable layer triplet.
inline valence_pattern extract_valence_pattern(const fndata::annotation_set& a) {
  valence_pattern p;
  p.frame_id = a.frame_id;
  for (const auto& l : a.labels) {
    if (l.is_ni()) continue;
    if (l.pt.empty() || l.gf.empty())
      throw missing_layer_error("annoset " + std::to_string(a.id) + ": label " + l.fe_name +
                                " lacks pt/gf layer");
    p.units.push_back({l.fe_name, l.pt, l.gf});
  }
  if (p.units.empty())
    throw empty_pattern_error("annoset " + std::to_string(a.id) + ": no overt labels");
  return p;
}

// Canonical multiset of the pattern's core units: core and core-unexpressed
// elements only, sorted by (fe, pt, gf). Peripheral and extra-thematic units
// do not participate.
inline std::vector<valence_unit> core_signature(const valence_pattern& p, const fndata::frame& f) {
  std::vector<valence_unit> sig;
  for (const auto& u : p.units) {
    const fndata::frame_element* e = f.element(u.fe);
    if (e && e->is_core()) sig.push_back(u);
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

inline std::string signature_string(const std::vector<valence_unit>& sig) {
  std::string out;
  for (size_t i = 0; i < sig.size(); ++i) {
    if (i) out += " ";
    out += sig[i].str();
  }
  return out;
}

// Two patterns of the same frame match loosely when their core signatures
// are equal as multisets.
inline bool loose_match(const valence_pattern& a, const valence_pattern& b,
                        const fndata::frame& f) {
  return core_signature(a, f) == core_signature(b, f);
}

// ---------------------------------------------------------------------------

struct index_entry {
  int64_t lu_id = 0;
  int64_t annoset_id = 0;
  valence_pattern pattern;
};

struct index_key {
  int64_t frame_id = 0;
  std::string signature;

  auto operator<=>(const index_key&) const = default;
};

struct valence_index {
  std::map<index_key, std::vector<index_entry>> buckets;
  size_t n_indexed = 0;
  size_t n_skipped = 0;
  std::vector<std::string> skipped;  // one note per skipped annoset

  const std::vector<index_entry>* lookup(const index_key& k) const {
    auto it = buckets.find(k);
    return it == buckets.end() ? nullptr : &it->second;
  }
};

inline valence_index build_index(const fndata::corpus& c) {
  valence_index idx;
  for (const auto& a : c.annotation_sets) {
    const fndata::sentence* s = c.sentence_by_id(a.sentence_id);
    const fndata::frame* f = c.frame_by_id(a.frame_id);
    if (!s || !f) {
      ++idx.n_skipped;
      idx.skipped.push_back("annoset " + std::to_string(a.id) + ": dangling reference");
      continue;
    }
    if (!fndata::validate_annotation_set(a, *s).valid) {
      ++idx.n_skipped;
      idx.skipped.push_back("annoset " + std::to_string(a.id) + ": invalid label indexes");
      continue;
    }
    valence_pattern p;
    p.frame_id = a.frame_id;
    try {
      p = extract_valence_pattern(a);
    } catch (const empty_pattern_error&) {
      // all labels null-instantiated: indexed under the empty signature
    } catch (const missing_layer_error& e) {
      ++idx.n_skipped;
      idx.skipped.push_back(e.what());
      continue;
    }
    index_key k{a.frame_id, signature_string(core_signature(p, *f))};
    idx.buckets[k].push_back({a.lu_id, a.id, std::move(p)});
    ++idx.n_indexed;
  }
  return idx;
}

// Lexical units of the pattern's frame with at least one indexed annotation
// set loosely matching p. Sorted by lu id.
inline std::vector<int64_t> compatible_lexical_units(const valence_index& idx,
                                                     const valence_pattern& p,
                                                     const fndata::frame& f) {
  index_key k{p.frame_id, signature_string(core_signature(p, f))};
  std::set<int64_t> lus;
  if (const auto* entries = idx.lookup(k))
    for (const auto& e : *entries) lus.insert(e.lu_id);
  return std::vector<int64_t>(lus.begin(), lus.end());
}

// Parses the textual query grammar: whitespace-separated FE.PT.GF triplets.
inline std::vector<valence_unit> parse_pattern_query(const std::string& q) {
  std::vector<valence_unit> units;
  for (const auto& tok : split_ws(q)) {
    auto fields = split_char(tok, '.');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw parse_error("malformed valence unit: " + tok);
    units.push_back({fields[0], fields[1], fields[2]});
  }
  if (units.empty()) throw parse_error("empty pattern query");
  return units;
}

}  // namespace framekit::valence
