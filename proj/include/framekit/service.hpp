#pragma once

// Read-only HTTP façade over a corpus and its valence index. Handlers are
// plain functions from query parameters to (status, body) so the exact same
// serialization is reachable from tests and from the wire.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "framekit/core.hpp"
#include "framekit/fndata.hpp"
#include "framekit/valence.hpp"

namespace framekit::service {

using ojson = nlohmann::ordered_json;

struct state {
  fndata::corpus corpus;
  valence::valence_index index;
  uint64_t corpus_fingerprint = 0;
};

inline std::shared_ptr<const state> make_state(fndata::corpus c) {
  auto st = std::make_shared<state>();
  st->corpus = std::move(c);
  st->corpus.rebuild_index();
  st->index = valence::build_index(st->corpus);
  st->corpus_fingerprint = fndata::corpus_fingerprint(st->corpus);
  return st;
}

struct reply {
  int status = 200;
  std::string body;
};

inline std::string to_hex(uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[x & 0xf];
    x >>= 4;
  }
  return out;
}

inline reply error_reply(int status, const std::string& message) {
  ojson j;
  j["api_version"] = api_version;
  j["error"] = {{"code", status}, {"message", message}};
  return {status, j.dump() + "\n"};
}

// ---------------------------------------------------------------------------

inline reply handle_health(const state& st) {
  ojson j;
  j["api_version"] = api_version;
  j["status"] = "ok";
  j["n_frames"] = st.corpus.frames.size();
  j["n_lexical_units"] = st.corpus.lexical_units.size();
  j["n_sentences"] = st.corpus.sentences.size();
  j["n_annotation_sets"] = st.corpus.annotation_sets.size();
  j["corpus_fingerprint"] = to_hex(st.corpus_fingerprint);
  uint64_t entries = 0;
  for (const auto& [_, v] : st.index.buckets) entries += v.size();
  j["index_buckets"] = st.index.buckets.size();
  j["index_entries"] = entries;
  return {200, j.dump() + "\n"};
}

struct page {
  size_t limit = 50;
  size_t offset = 0;
};

inline std::optional<page> parse_page(const std::string& limit_s, const std::string& offset_s) {
  page p;
  try {
    if (!limit_s.empty()) p.limit = std::stoull(limit_s);
    if (!offset_s.empty()) p.offset = std::stoull(offset_s);
  } catch (...) {
    return std::nullopt;
  }
  return p;
}

// The /vp answer for a resolved frame and parsed pattern. This function is
// the single source of the response bytes.
inline std::string vp_response(const state& st, const fndata::frame& frame,
                               const std::vector<valence::valence_unit>& units, const page& pg) {
  valence::valence_pattern p;
  p.frame_id = frame.id;
  p.units = units;

  valence::index_key key{frame.id,
                         valence::signature_string(valence::core_signature(p, frame))};
  struct row {
    const fndata::lexical_unit* lu;
    std::vector<int64_t> annosets;
  };
  std::vector<row> rows;
  if (const auto* entries = st.index.lookup(key)) {
    std::map<int64_t, std::vector<int64_t>> by_lu;
    for (const auto& e : *entries) by_lu[e.lu_id].push_back(e.annoset_id);
    for (auto& [lu_id, annos] : by_lu) {
      const fndata::lexical_unit* u = st.corpus.lu_by_id(lu_id);
      if (!u) continue;
      std::sort(annos.begin(), annos.end());
      rows.push_back({u, annos});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const row& a, const row& b) {
    if (a.lu->lemma != b.lu->lemma) return a.lu->lemma < b.lu->lemma;
    return a.lu->id < b.lu->id;
  });

  ojson j;
  j["api_version"] = api_version;
  j["frame"] = frame.name;
  std::vector<std::string> unit_strs;
  for (const auto& u : units) unit_strs.push_back(u.str());
  j["pattern"] = join(unit_strs, " ");
  j["total"] = rows.size();
  j["limit"] = pg.limit;
  j["offset"] = pg.offset;
  ojson arr = ojson::array();
  for (size_t i = pg.offset; i < rows.size() && i < pg.offset + pg.limit; ++i) {
    ojson lu;
    lu["id"] = rows[i].lu->id;
    lu["lemma"] = rows[i].lu->lemma;
    lu["pos"] = fndata::to_string(rows[i].lu->pos);
    lu["annosets"] = rows[i].annosets;
    arr.push_back(lu);
  }
  j["lexical_units"] = arr;
  return j.dump() + "\n";
}

inline reply handle_vp(const state& st, const std::string& vp_param,
                       const std::string& frame_param, const std::string& limit_s,
                       const std::string& offset_s) {
  if (vp_param.empty()) return error_reply(400, "missing vp parameter");
  auto pg = parse_page(limit_s, offset_s);
  if (!pg) return error_reply(400, "malformed limit/offset");
  std::vector<valence::valence_unit> units;
  try {
    units = valence::parse_pattern_query(vp_param);
  } catch (const parse_error& e) {
    return error_reply(400, e.what());
  }

  const fndata::frame* frame = nullptr;
  if (!frame_param.empty()) {
    for (const auto& f : st.corpus.frames)
      if (f.name == frame_param) frame = &f;
    if (!frame) return error_reply(404, "unknown frame " + frame_param);
    for (const auto& u : units)
      if (!frame->element(u.fe))
        return error_reply(404, "frame element " + u.fe + " not in frame " + frame->name);
  } else {
    std::vector<const fndata::frame*> owners;
    for (const auto& f : st.corpus.frames) {
      bool all = true;
      for (const auto& u : units)
        if (!f.element(u.fe)) {
          all = false;
          break;
        }
      if (all) owners.push_back(&f);
    }
    if (owners.empty()) return error_reply(404, "no frame defines all requested frame elements");
    if (owners.size() > 1) {
      std::vector<std::string> names;
      for (const auto* f : owners) names.push_back(f->name);
      std::sort(names.begin(), names.end());
      return error_reply(422, "ambiguous frame, specify frame=: " + join(names, ", "));
    }
    frame = owners.front();
  }
  return {200, vp_response(st, *frame, units, *pg)};
}

inline reply handle_lu(const state& st, const std::string& id_s, const std::string& limit_s,
                       const std::string& offset_s) {
  int64_t id = 0;
  try {
    id = std::stoll(id_s);
  } catch (...) {
    return error_reply(400, "malformed lexical unit id");
  }
  auto pg = parse_page(limit_s, offset_s);
  if (!pg) return error_reply(400, "malformed limit/offset");
  const fndata::lexical_unit* u = st.corpus.lu_by_id(id);
  if (!u) return error_reply(404, "unknown lexical unit " + id_s);
  const fndata::frame* f = st.corpus.frame_by_id(u->frame_id);
  std::vector<int64_t> annosets;
  for (const auto& a : st.corpus.annotation_sets)
    if (a.lu_id == id) annosets.push_back(a.id);
  std::sort(annosets.begin(), annosets.end());
  ojson j;
  j["api_version"] = api_version;
  j["id"] = u->id;
  j["lemma"] = u->lemma;
  j["pos"] = fndata::to_string(u->pos);
  j["frame"] = f ? f->name : "";
  j["total_annosets"] = annosets.size();
  j["limit"] = pg->limit;
  j["offset"] = pg->offset;
  ojson arr = ojson::array();
  for (size_t i = pg->offset; i < annosets.size() && i < pg->offset + pg->limit; ++i)
    arr.push_back(annosets[i]);
  j["annosets"] = arr;
  return {200, j.dump() + "\n"};
}

inline reply handle_annoset(const state& st, const std::string& id_s) {
  int64_t id = 0;
  try {
    id = std::stoll(id_s);
  } catch (...) {
    return error_reply(400, "malformed annotation set id");
  }
  const fndata::annotation_set* a = st.corpus.annoset_by_id(id);
  if (!a) return error_reply(404, "unknown annotation set " + id_s);
  const fndata::sentence* s = st.corpus.sentence_by_id(a->sentence_id);
  const fndata::frame* f = st.corpus.frame_by_id(a->frame_id);
  const fndata::lexical_unit* u = st.corpus.lu_by_id(a->lu_id);
  ojson j;
  j["api_version"] = api_version;
  j["id"] = a->id;
  j["sentence"] = a->sentence_id;
  j["text"] = s ? s->text : "";
  j["frame"] = f ? f->name : "";
  j["lu"] = u ? u->lemma + "." + fndata::to_string(u->pos) : "";
  ojson tg = ojson::array();
  for (const auto& [ts, te] : a->target_spans) tg.push_back(ojson::array({ts, te}));
  j["targets"] = tg;
  ojson ls = ojson::array();
  for (const auto& l : a->labels) ls.push_back(fndata::label_to_json(l));
  j["labels"] = ls;
  return {200, j.dump() + "\n"};
}

// ---------------------------------------------------------------------------

class server {
 public:
  explicit server(fndata::corpus c) { load(std::move(c)); }

  // Swaps in a freshly indexed corpus; in-flight requests keep the old state.
  void load(fndata::corpus c) {
    auto st = make_state(std::move(c));
    std::lock_guard<std::mutex> lock(mu_);
    state_ = std::move(st);
  }

  std::shared_ptr<const state> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return state_;
  }

  // Blocking listen. Returns false if the port cannot be bound.
  bool listen(const std::string& host, int port) {
    wire();
    return http_.listen(host, port);
  }

  // For tests: bind to an ephemeral port and serve on a caller-owned thread.
  int bind_any(const std::string& host) {
    wire();
    return http_.bind_to_any_port(host);
  }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  void stop() { http_.stop(); }

 private:
  void wire() {
    if (wired_) return;
    wired_ = true;
    auto send = [](httplib::Response& res, const reply& r) {
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    http_.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, handle_health(*snapshot()));
    });
    http_.Get("/vp", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, handle_vp(*snapshot(), req.get_param_value("vp"), req.get_param_value("frame"),
                          req.get_param_value("limit"), req.get_param_value("offset")));
    });
    http_.Get(R"(/lu/(.+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, handle_lu(*snapshot(), req.matches[1], req.get_param_value("limit"),
                          req.get_param_value("offset")));
    });
    http_.Get(R"(/annoset/(.+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, handle_annoset(*snapshot(), req.matches[1]));
    });
  }

  mutable std::mutex mu_;
  std::shared_ptr<const state> state_;
  httplib::Server http_;
  bool wired_ = false;
};

}  // namespace framekit::service
