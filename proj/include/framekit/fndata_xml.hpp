#pragma once

// Adapter for the FrameNet 1.5/1.7 release layout: frame/*.xml for the frame
// and lexical unit catalog, frRelation.xml for frame relations, fulltext/*.xml
// for document annotation, lu/*.xml for exemplar annotation.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "framekit/core.hpp"
#include "framekit/fndata.hpp"

namespace framekit::fndata_xml {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

namespace detail {

inline ptree read_xml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  ptree pt;
  try {
    boost::property_tree::read_xml(in, pt);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw parse_error(path + ": " + e.what());
  }
  return pt;
}

inline std::string attr(const ptree& node, const std::string& name, const std::string& dflt = "") {
  return node.get<std::string>("<xmlattr>." + name, dflt);
}

inline std::optional<int64_t> attr_int(const ptree& node, const std::string& name) {
  auto v = node.get_optional<int64_t>("<xmlattr>." + name);
  if (!v) return std::nullopt;
  return *v;
}

// "buy.v" -> "buy"
inline std::string strip_pos_suffix(const std::string& name) {
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

struct layer_label {
  std::string name;
  std::optional<int64_t> start, end;
  std::string itype;
};

inline std::vector<layer_label> labels_of_layer(const ptree& aset, const std::string& layer_name) {
  std::vector<layer_label> out;
  for (const auto& [tag, layer] : aset) {
    if (tag != "layer" || attr(layer, "name") != layer_name) continue;
    for (const auto& [ltag, label] : layer) {
      if (ltag != "label") continue;
      layer_label l;
      l.name = attr(label, "name");
      l.start = attr_int(label, "start");
      l.end = attr_int(label, "end");
      l.itype = attr(label, "itype");
      out.push_back(std::move(l));
    }
  }
  return out;
}

// Builds one annotation set from its XML node: target spans from the Target
// layer, labels from the FE layer joined with PT and GF labels on the same
// character span.
inline void parse_annotation_set(const ptree& aset, int64_t sentence_id, fndata::corpus& c,
                                 fndata::ingest_report& rep, int64_t lu_id, int64_t frame_id) {
  fndata::annotation_set a;
  auto id = attr_int(aset, "ID");
  if (!id) {
    rep.errors.push_back("annotationSet without ID in sentence " + std::to_string(sentence_id));
    return;
  }
  a.id = *id;
  a.sentence_id = sentence_id;
  a.lu_id = lu_id;
  a.frame_id = frame_id;

  for (const auto& t : labels_of_layer(aset, "Target")) {
    if (t.start && t.end) a.target_spans.emplace_back(*t.start, *t.end);
  }
  std::sort(a.target_spans.begin(), a.target_spans.end());

  auto pts = labels_of_layer(aset, "PT");
  auto gfs = labels_of_layer(aset, "GF");
  auto find_by_span = [](const std::vector<layer_label>& v, int64_t s, int64_t e) -> std::string {
    for (const auto& l : v)
      if (l.start && l.end && *l.start == s && *l.end == e) return l.name;
    return "";
  };
  for (const auto& fe : labels_of_layer(aset, "FE")) {
    fndata::label_span l;
    l.fe_name = fe.name;
    if (!fe.itype.empty()) {
      try {
        l.ni = fndata::ni_from_string(fe.itype);
      } catch (const parse_error&) {
        rep.errors.push_back("annotationSet " + std::to_string(a.id) + ": unknown itype " +
                             fe.itype);
        continue;
      }
    } else {
      l.start = fe.start;
      l.end = fe.end;
      if (fe.start && fe.end) {
        l.pt = find_by_span(pts, *fe.start, *fe.end);
        l.gf = find_by_span(gfs, *fe.start, *fe.end);
      }
    }
    a.labels.push_back(std::move(l));
  }
  c.annotation_sets.push_back(std::move(a));
}

inline void parse_frame_file(const std::string& path, fndata::corpus& c,
                             fndata::ingest_report& rep) {
  ptree pt = read_xml_file(path);
  auto frame_node = pt.get_child_optional("frame");
  if (!frame_node) {
    rep.errors.push_back(path + ": no frame element");
    return;
  }
  fndata::frame f;
  auto id = attr_int(*frame_node, "ID");
  if (!id) {
    rep.errors.push_back(path + ": frame without ID");
    return;
  }
  f.id = *id;
  f.name = attr(*frame_node, "name");
  for (const auto& [tag, node] : *frame_node) {
    if (tag == "FE") {
      fndata::frame_element e;
      e.name = attr(node, "name");
      try {
        e.ct = fndata::core_type_from_string(attr(node, "coreType", "Core"));
      } catch (const parse_error& ex) {
        rep.errors.push_back(path + ": " + ex.what());
        continue;
      }
      f.elements.push_back(std::move(e));
    } else if (tag == "lexUnit") {
      fndata::lexical_unit u;
      auto lu_id = attr_int(node, "ID");
      if (!lu_id) {
        rep.errors.push_back(path + ": lexUnit without ID");
        continue;
      }
      u.id = *lu_id;
      u.lemma = strip_pos_suffix(attr(node, "name"));
      u.pos = fndata::pos_from_string(attr(node, "POS"));
      u.frame_id = f.id;
      c.lexical_units.push_back(std::move(u));
    }
  }
  c.frames.push_back(std::move(f));
}

inline void parse_relations_file(const std::string& path, fndata::corpus& c,
                                 fndata::ingest_report&) {
  ptree pt = read_xml_file(path);
  auto root = pt.get_child_optional("frameRelations");
  if (!root) return;
  for (const auto& [tag, type_node] : *root) {
    if (tag != "frameRelationType") continue;
    const fndata::relation_kind kind = fndata::relation_from_string(attr(type_node, "name"));
    for (const auto& [rtag, rel_node] : type_node) {
      if (rtag != "frameRelation") continue;
      fndata::frame_relation r;
      r.kind = kind;
      auto sup = attr_int(rel_node, "supID");
      auto sub = attr_int(rel_node, "subID");
      if (!sup || !sub) continue;
      r.parent_frame_id = *sup;
      r.child_frame_id = *sub;
      for (const auto& [ftag, fe_node] : rel_node) {
        if (ftag != "FERelation") continue;
        r.fe_mappings.emplace_back(attr(fe_node, "subFEName"), attr(fe_node, "superFEName"));
      }
      c.relations.push_back(std::move(r));
    }
  }
}

inline void parse_fulltext_file(const std::string& path, fndata::corpus& c,
                                fndata::ingest_report& rep) {
  ptree pt = read_xml_file(path);
  auto root = pt.get_child_optional("fullTextAnnotation");
  if (!root) {
    rep.errors.push_back(path + ": no fullTextAnnotation element");
    return;
  }
  std::string doc_name = fs::path(path).stem().string();
  if (auto header = root->get_child_optional("header")) {
    if (auto corpus_node = header->get_child_optional("corpus")) {
      if (auto doc_node = corpus_node->get_child_optional("document")) {
        std::string cn = attr(*corpus_node, "name");
        std::string dn = attr(*doc_node, "name");
        if (!cn.empty() && !dn.empty()) doc_name = cn + "__" + dn;
      }
    }
  }
  for (const auto& [tag, sent_node] : *root) {
    if (tag != "sentence") continue;
    auto sid = attr_int(sent_node, "ID");
    auto text = sent_node.get_optional<std::string>("text");
    if (!sid || !text) {
      rep.errors.push_back(path + ": sentence without ID or text");
      continue;
    }
    fndata::sentence s;
    s.id = *sid;
    s.document = doc_name;
    s.text = *text;
    s.origin = fndata::corpus_origin::fulltext;
    c.sentences.push_back(std::move(s));
    for (const auto& [atag, aset] : sent_node) {
      if (atag != "annotationSet") continue;
      auto lu_id = attr_int(aset, "luID");
      auto frame_id = attr_int(aset, "frameID");
      if (!lu_id || !frame_id) continue;  // POS/NER layers, not frame annotation
      parse_annotation_set(aset, *sid, c, rep, *lu_id, *frame_id);
    }
  }
}

inline void parse_lu_file(const std::string& path, fndata::corpus& c, fndata::ingest_report& rep) {
  ptree pt = read_xml_file(path);
  auto root = pt.get_child_optional("lexUnit");
  if (!root) {
    rep.errors.push_back(path + ": no lexUnit element");
    return;
  }
  auto lu_id = attr_int(*root, "ID");
  auto frame_id = attr_int(*root, "frameID");
  if (!lu_id || !frame_id) {
    rep.errors.push_back(path + ": lexUnit without ID or frameID");
    return;
  }
  const std::string doc_name = fs::path(path).stem().string();
  for (const auto& [tag, sub] : *root) {
    if (tag != "subCorpus") continue;
    for (const auto& [stag, sent_node] : sub) {
      if (stag != "sentence") continue;
      auto sid = attr_int(sent_node, "ID");
      auto text = sent_node.get_optional<std::string>("text");
      if (!sid || !text) {
        rep.errors.push_back(path + ": sentence without ID or text");
        continue;
      }
      fndata::sentence s;
      s.id = *sid;
      s.document = doc_name;
      s.text = *text;
      s.origin = fndata::corpus_origin::exemplar;
      c.sentences.push_back(std::move(s));
      for (const auto& [atag, aset] : sent_node) {
        if (atag != "annotationSet") continue;
        parse_annotation_set(aset, *sid, c, rep, *lu_id, *frame_id);
      }
    }
  }
}

}  // namespace detail

// Ingests a release directory. Reads frame/, frRelation.xml, fulltext/ and
// lu/ when present. Files are visited in sorted order so ingestion is
// deterministic.
inline fndata::corpus ingest_framenet_xml(const std::string& dir, fndata::ingest_report& rep,
                                          bool strict = false) {
  if (!fs::is_directory(dir)) throw parse_error(dir + " is not a directory");
  fndata::corpus c;

  auto sorted_xml = [](const fs::path& p) {
    std::vector<std::string> files;
    if (fs::is_directory(p))
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".xml") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    return files;
  };

  for (const auto& f : sorted_xml(fs::path(dir) / "frame")) {
    try {
      detail::parse_frame_file(f, c, rep);
    } catch (const parse_error& e) {
      rep.errors.push_back(e.what());
    }
  }
  const fs::path rel = fs::path(dir) / "frRelation.xml";
  if (fs::exists(rel)) {
    try {
      detail::parse_relations_file(rel.string(), c, rep);
    } catch (const parse_error& e) {
      rep.errors.push_back(e.what());
    }
  }
  bool any_fulltext = false;
  for (const auto& f : sorted_xml(fs::path(dir) / "fulltext")) {
    any_fulltext = true;
    try {
      detail::parse_fulltext_file(f, c, rep);
    } catch (const parse_error& e) {
      rep.errors.push_back(e.what());
    }
  }
  for (const auto& f : sorted_xml(fs::path(dir) / "lu")) {
    try {
      detail::parse_lu_file(f, c, rep);
    } catch (const parse_error& e) {
      rep.errors.push_back(e.what());
    }
  }
  c.origin = any_fulltext ? fndata::corpus_origin::fulltext : fndata::corpus_origin::exemplar;

  fndata::check_integrity(c, rep);
  if (strict && !rep.ok()) throw integrity_error("ingest failed:\n" + rep.summary());
  return c;
}

enum class corpus_format { native_jsonl, framenet_xml };

inline fndata::corpus ingest_corpus(const std::string& path, corpus_format fmt,
                                    fndata::ingest_report& rep, bool strict = false) {
  return fmt == corpus_format::native_jsonl ? fndata::ingest_jsonl(path, rep, strict)
                                            : ingest_framenet_xml(path, rep, strict);
}

}  // namespace framekit::fndata_xml
