#pragma once

// Word embedding tables, cosine similarity, and the semantic candidate
// filters (random sample, top-n by similarity, similarity threshold).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "framekit/core.hpp"

namespace framekit::embeddings {

struct embedding_table {
  size_t dimension = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;
  std::vector<std::string> warnings;

  bool contains(const std::string& key) const { return vectors.count(key) != 0; }

  const std::vector<float>* find(const std::string& key) const {
    auto it = vectors.find(key);
    return it == vectors.end() ? nullptr : &it->second;
  }

  // Multi-lexeme lemmas are looked up as an underscore-joined key first,
  // then as the mean of the per-token vectors that are present.
  std::optional<std::vector<float>> lookup(const std::string& lemma) const {
    auto ws = split_ws(lemma);
    if (ws.size() <= 1) {
      const auto* v = find(lemma);
      if (!v) return std::nullopt;
      return *v;
    }
    const auto* joined = find(join(ws, "_"));
    if (joined) return *joined;
    std::vector<float> mean(dimension, 0.0f);
    size_t found = 0;
    for (const auto& w : ws) {
      if (const auto* v = find(w)) {
        for (size_t i = 0; i < dimension; ++i) mean[i] += (*v)[i];
        ++found;
      }
    }
    if (found == 0) return std::nullopt;
    for (auto& x : mean) x /= static_cast<float>(found);
    return mean;
  }
};

enum class table_format { text_vec, binary_vec };

// Text format: optional "count dim" header, then one "word v1 .. vd" line per
// entry. Duplicate words keep the first vector and log a warning.
inline embedding_table load_table_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  embedding_table t;
  std::string line;
  size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (first) {
      first = false;
      if (fields.size() == 2) {
        try {
          (void)std::stoull(fields[0]);
          t.dimension = std::stoull(fields[1]);
          continue;  // header line
        } catch (...) {
          // fall through: a two-field data line (word + 1-dim vector)
        }
      }
    }
    if (fields.size() < 2)
      throw parse_error(path + ":" + std::to_string(lineno) + ": malformed vector line");
    const std::string& word = fields[0];
    std::vector<float> vec;
    vec.reserve(fields.size() - 1);
    for (size_t i = 1; i < fields.size(); ++i) {
      try {
        vec.push_back(std::stof(fields[i]));
      } catch (...) {
        throw parse_error(path + ":" + std::to_string(lineno) + ": bad float " + fields[i]);
      }
    }
    if (t.dimension == 0) t.dimension = vec.size();
    if (vec.size() != t.dimension)
      throw dimension_mismatch_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.dimension) + " dims, got " +
                                     std::to_string(vec.size()));
    if (!t.vectors.emplace(word, std::move(vec)).second)
      t.warnings.push_back("duplicate entry for " + word + ", keeping first");
  }
  return t;
}

// word2vec-style binary format: "count dim\n", then per entry the word, a
// space, and dim little-endian 4-byte floats.
inline embedding_table load_table_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  embedding_table t;
  size_t count = 0;
  {
    std::string header;
    if (!std::getline(in, header)) throw parse_error(path + ": missing header");
    std::istringstream hs(header);
    if (!(hs >> count >> t.dimension)) throw parse_error(path + ": malformed header");
  }
  for (size_t n = 0; n < count; ++n) {
    std::string word;
    char ch;
    while (in.get(ch)) {
      if (ch == ' ') break;
      if (ch == '\n') continue;  // stray newline between entries
      word.push_back(ch);
    }
    if (!in) throw parse_error(path + ": truncated at entry " + std::to_string(n));
    std::vector<float> vec(t.dimension);
    in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(t.dimension * sizeof(float)));
    if (!in) throw parse_error(path + ": truncated vector for " + word);
    if (!t.vectors.emplace(word, std::move(vec)).second)
      t.warnings.push_back("duplicate entry for " + word + ", keeping first");
  }
  return t;
}

inline embedding_table load_table(const std::string& path, table_format fmt) {
  return fmt == table_format::text_vec ? load_table_text(path) : load_table_binary(path);
}

// ---------------------------------------------------------------------------

inline double cosine(const std::vector<float>& u, const std::vector<float>& v) {
  if (u.size() != v.size())
    throw dimension_mismatch_error("cosine: " + std::to_string(u.size()) + " vs " +
                                   std::to_string(v.size()) + " dims");
  double dot = 0, nu = 0, nv = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0 || nv == 0) throw zero_vector_error("cosine of zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// ---------------------------------------------------------------------------

enum class filter_mode { none, random, top, threshold };

struct semantic_filter_spec {
  filter_mode mode = filter_mode::none;
  size_t n = 0;         // random / top
  double threshold = 0; // threshold, inclusive
  uint64_t seed = 0;    // random
};

struct filter_outcome {
  std::vector<std::string> kept;  // deterministic order
  bool source_missing = false;    // source lemma not in table: filter disabled
  std::vector<std::string> oov;   // candidates absent from the table
};

// Applies the configured filter to candidate lemmas. Similarity modes score
// each candidate by cosine to the source lemma; candidates without a vector
// are excluded from those modes, and a missing source vector disables the
// filter entirely (reported, candidates returned unchanged).
inline filter_outcome semantic_filter(const std::string& source_lemma,
                                      const std::vector<std::string>& candidates,
                                      const semantic_filter_spec& spec,
                                      const embedding_table& table) {
  filter_outcome out;
  if (spec.mode == filter_mode::none) {
    out.kept = candidates;
    return out;
  }
  if (spec.mode == filter_mode::random) {
    std::vector<std::string> pool = candidates;
    std::mt19937_64 rng(spec.seed);
    fisher_yates(pool, rng);
    size_t take = std::min(spec.n, pool.size());
    out.kept.assign(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(take));
    std::sort(out.kept.begin(), out.kept.end());
    return out;
  }

  auto src = table.lookup(source_lemma);
  if (!src) {
    out.source_missing = true;
    out.kept = candidates;
    return out;
  }
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& cand : candidates) {
    auto v = table.lookup(cand);
    if (!v) {
      out.oov.push_back(cand);
      continue;
    }
    scored.emplace_back(cosine(*src, *v), cand);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (spec.mode == filter_mode::top) {
    size_t take = std::min(spec.n, scored.size());
    for (size_t i = 0; i < take; ++i) out.kept.push_back(scored[i].second);
  } else {  // threshold, inclusive
    for (const auto& [sim, cand] : scored)
      if (sim >= spec.threshold) out.kept.push_back(cand);
  }
  return out;
}

}  // namespace framekit::embeddings
