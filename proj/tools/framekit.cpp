// Command line front end: corpus ingestion and splitting, statistics,
// paraphrase augmentation, argument identification training and decoding,
// scoring with significance tests, analysis reports, and the HTTP service.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "framekit/analysis.hpp"
#include "framekit/argid.hpp"
#include "framekit/deptree.hpp"
#include "framekit/embeddings.hpp"
#include "framekit/eval.hpp"
#include "framekit/fndata.hpp"
#include "framekit/fndata_xml.hpp"
#include "framekit/paraphrase.hpp"
#include "framekit/service.hpp"
#include "framekit/valence.hpp"

namespace fs = std::filesystem;
namespace fk = framekit;
namespace fd = framekit::fndata;
using ojson = nlohmann::ordered_json;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fk::error("cannot write " + path);
  out << content;
}

fd::corpus load_corpus(const std::string& path, const std::string& format, bool strict,
                       fd::ingest_report& rep) {
  if (format == "xml") return fk::fndata_xml::ingest_framenet_xml(path, rep, strict);
  return fd::ingest_jsonl(path, rep, strict);
}

std::map<int64_t, const fk::deptree::dep_tree*> tree_index(
    const std::vector<fk::deptree::dep_tree>& trees) {
  std::map<int64_t, const fk::deptree::dep_tree*> by_sent;
  for (const auto& t : trees) by_sent[t.sentence_id] = &t;
  return by_sent;
}

ojson report_json(const fd::ingest_report& rep) {
  ojson j;
  j["errors"] = rep.errors;
  j["warnings"] = rep.warnings;
  return j;
}

fk::embeddings::semantic_filter_spec parse_sem_filter(const std::string& s, uint64_t seed) {
  fk::embeddings::semantic_filter_spec spec;
  spec.seed = seed;
  if (s.empty() || s == "none") return spec;
  try {
    if (s.rfind("random-", 0) == 0) {
      spec.mode = fk::embeddings::filter_mode::random;
      spec.n = std::stoull(s.substr(7));
      return spec;
    }
    if (s.rfind("top-", 0) == 0) {
      spec.mode = fk::embeddings::filter_mode::top;
      spec.n = std::stoull(s.substr(4));
      return spec;
    }
    if (s.rfind("threshold-", 0) == 0) {
      spec.mode = fk::embeddings::filter_mode::threshold;
      spec.threshold = std::stod(s.substr(10));
      return spec;
    }
  } catch (const std::exception&) {
    throw fk::parse_error("malformed semantic filter value: " + s);
  }
  throw fk::parse_error("unrecognized semantic filter: " + s +
                        " (expected random-N, top-N or threshold-T)");
}

struct prediction_file {
  // annoset id -> predictions with character spans
  std::map<int64_t, std::vector<fk::eval::prediction>> by_annoset;
};

prediction_file read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fk::parse_error("cannot open " + path);
  prediction_file pf;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson row;
    try {
      row = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fk::parse_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    auto& preds = pf.by_annoset[row.at("annoset").get<int64_t>()];
    for (const auto& r : row.value("roles", ojson::array())) {
      if (!r.contains("char_start") || !r.contains("char_end")) continue;
      preds.push_back({r.at("fe").get<std::string>(), r.at("char_start").get<int64_t>(),
                       r.at("char_end").get<int64_t>()});
    }
  }
  return pf;
}

std::vector<fk::eval::score_tally> per_annoset_tallies(const fd::corpus& gold,
                                                       const prediction_file& pf,
                                                       const fk::eval::eval_config& cfg) {
  std::vector<fk::eval::score_tally> out;
  static const std::vector<fk::eval::prediction> none;
  for (const auto& a : gold.annotation_sets) {
    const fd::frame* f = gold.frame_by_id(a.frame_id);
    if (!f) continue;
    auto it = pf.by_annoset.find(a.id);
    out.push_back(fk::eval::score_annoset(a, it == pf.by_annoset.end() ? none : it->second, *f,
                                          cfg));
  }
  return out;
}

ojson prf_json(const fk::eval::prf& p, const fk::eval::score_tally& t) {
  ojson j;
  j["precision"] = p.precision;
  j["recall"] = p.recall;
  j["f1"] = p.f1;
  j["match"] = t.match;
  j["sys"] = t.sys;
  j["gold"] = t.gold;
  return j;
}

// ---------------------------------------------------------------------------

int run_ingest(const std::string& corpus_path, const std::string& format, bool strict,
               const std::vector<std::string>& test_docs, const std::vector<std::string>& dev_docs,
               const std::string& out_dir) {
  fd::ingest_report rep;
  fd::corpus c = load_corpus(corpus_path, format, strict, rep);
  fd::split_result split = fd::split_corpus(c, {test_docs.begin(), test_docs.end()},
                                            {dev_docs.begin(), dev_docs.end()});
  fs::create_directories(out_dir);
  write_text(out_dir + "/train.jsonl", fd::export_jsonl(split.train));
  write_text(out_dir + "/dev.jsonl", fd::export_jsonl(split.dev));
  write_text(out_dir + "/test.jsonl", fd::export_jsonl(split.test));

  ojson j;
  j["report"] = report_json(rep);
  for (const auto& [name, part] :
       {std::pair<const char*, const fd::corpus*>{"train", &split.train},
        {"dev", &split.dev},
        {"test", &split.test}}) {
    ojson p;
    p["sentences"] = part->sentences.size();
    p["annotation_sets"] = part->annotation_sets.size();
    p["fingerprint"] = fk::service::to_hex(fd::corpus_fingerprint(*part));
    j[name] = p;
  }
  j["test_duplicates_removed"] = split.test_duplicates_removed;
  j["incomplete_removed_from_train"] = split.incomplete_removed_from_train;
  std::cout << j.dump() << "\n";
  return rep.ok() || !strict ? 0 : 1;
}

int run_stats(const std::string& corpus_path, const std::string& format) {
  fd::ingest_report rep;
  fd::corpus c = load_corpus(corpus_path, format, false, rep);
  fd::corpus_stats_result s = fd::corpus_stats(c);
  ojson j;
  j["sentences"] = s.n_sentences;
  j["annotation_sets"] = s.n_annotation_sets;
  j["frames"] = s.n_frames;
  j["lexical_units"] = s.n_lexical_units;
  j["lexical_units_by_pos"] = s.lu_counts_by_pos;
  j["fingerprint"] = fk::service::to_hex(fd::corpus_fingerprint(c));
  j["report"] = report_json(rep);
  std::cout << j.dump() << "\n";
  return 0;
}

int run_augment(const std::string& corpus_path, const std::string& out_path,
                const std::string& embeddings_path, const std::string& embeddings_format,
                const std::vector<std::string>& pos_filter, bool mwe_filter,
                const std::string& sem_filter, uint64_t max_per_source, uint64_t seed,
                unsigned jobs) {
  fd::ingest_report rep;
  fd::corpus raw = fd::ingest_jsonl(corpus_path, rep, false);
  fd::ingest_report filter_rep;
  fd::corpus train = fd::filter_invalid(raw, filter_rep);

  fk::paraphrase::generation_config cfg;
  if (!pos_filter.empty()) {
    std::set<fd::pos_tag> tags;
    for (const auto& p : pos_filter) tags.insert(fd::pos_from_string(p));
    cfg.pos_filter = tags;
  }
  cfg.mwe_filter = mwe_filter;
  cfg.sem = parse_sem_filter(sem_filter, seed);
  fk::embeddings::embedding_table table;
  if (!embeddings_path.empty()) {
    table = fk::embeddings::load_table(embeddings_path,
                                       embeddings_format == "binary"
                                           ? fk::embeddings::table_format::binary_vec
                                           : fk::embeddings::table_format::text_vec);
    cfg.table = &table;
  } else if (cfg.sem.mode != fk::embeddings::filter_mode::none) {
    throw fk::error("--sem-filter requires --embeddings");
  }
  if (max_per_source > 0) cfg.max_sentences_per_source = max_per_source;

  fk::paraphrase::augment_result res = fk::paraphrase::augment_corpus(train, cfg, jobs);
  write_text(out_path, fd::export_jsonl(res.corpus));

  ojson j;
  j["generated_sentences"] = res.n_generated_sentences;
  j["generated_annotation_sets"] = res.n_generated_annosets;
  j["flagged_labels"] = res.n_flagged_labels;
  ojson rows = ojson::array();
  for (const auto& [sid, count] : res.per_sentence)
    rows.push_back(ojson{{"sentence", sid}, {"generated", count}});
  j["per_sentence"] = rows;
  ojson notes = ojson::array();
  for (const auto& n : res.notes)
    notes.push_back(ojson{{"annoset", n.annoset_id}, {"note", n.note}});
  j["notes"] = notes;
  j["dropped_invalid"] = raw.annotation_sets.size() - train.annotation_sets.size();
  j["out"] = out_path;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_train(const std::string& corpus_path, const std::string& conll_path,
              const std::string& model_path, double lambda, double rho, double epsilon,
              size_t epochs, uint64_t seed, bool hierarchy) {
  fd::ingest_report rep;
  fd::corpus c = fd::ingest_jsonl(corpus_path, rep, false);
  auto trees = fk::deptree::ingest_conll(conll_path);
  auto by_sent = tree_index(trees);

  fk::argid::model m;
  m.lambda = lambda;
  m.rho = rho;
  m.epsilon = epsilon;
  m.templates.hierarchy = hierarchy;

  fk::argid::hierarchy_index hier;
  if (hierarchy) hier = fk::argid::build_hierarchy_index(c);
  fk::argid::instance_build_report birep;
  auto instances = fk::argid::build_instances(c, by_sent, m.templates,
                                              hierarchy ? &hier : nullptr, &birep);

  fk::argid::train_log log = fk::argid::train(m, instances, epochs, seed);
  for (size_t i = 0; i < log.epoch_objectives.size(); ++i)
    std::cerr << ojson{{"epoch", i + 1}, {"objective", log.epoch_objectives[i]}}.dump() << "\n";
  fk::argid::save_model(m, model_path);

  ojson j;
  j["instances"] = birep.n_instances;
  j["annosets_skipped"] = birep.n_annosets_skipped;
  j["gold_spans_added"] = birep.n_gold_added;
  j["misaligned_labels"] = birep.n_misaligned;
  j["epochs"] = log.epoch_objectives.size();
  j["final_objective"] = log.epoch_objectives.empty() ? 0.0 : log.epoch_objectives.back();
  j["nonzero_weights"] = m.weights.size();
  j["model"] = model_path;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_predict(const std::string& corpus_path, const std::string& conll_path,
                const std::string& model_path, const std::string& out_path, size_t beam) {
  fd::ingest_report rep;
  fd::corpus c = fd::ingest_jsonl(corpus_path, rep, false);
  auto trees = fk::deptree::ingest_conll(conll_path);
  auto by_sent = tree_index(trees);
  fk::argid::model m = fk::argid::load_model(model_path);
  fk::argid::hierarchy_index hier;
  if (m.templates.hierarchy) hier = fk::argid::build_hierarchy_index(c);

  std::vector<const fd::annotation_set*> annosets;
  for (const auto& a : c.annotation_sets) annosets.push_back(&a);
  std::sort(annosets.begin(), annosets.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::ostringstream out;
  size_t n_predicted = 0, n_skipped = 0;
  for (const auto* a : annosets) {
    ojson row;
    row["annoset"] = a->id;
    const fd::frame* f = c.frame_by_id(a->frame_id);
    auto it = by_sent.find(a->sentence_id);
    if (!f || it == by_sent.end() || a->target_spans.empty()) {
      row["roles"] = ojson::array();
      row["skipped"] = "no tree or frame for this annotation set";
      ++n_skipped;
      out << row.dump() << "\n";
      continue;
    }
    const fk::deptree::dep_tree& tree = *it->second;
    int64_t tcs = a->target_spans.front().first, tce = a->target_spans.front().second;
    for (const auto& [s, e] : a->target_spans) {
      tcs = std::min(tcs, s);
      tce = std::max(tce, e);
    }
    auto talign = fk::deptree::align_char_span(tree, tcs, tce);
    if (!talign) {
      row["roles"] = ojson::array();
      row["skipped"] = "target is not alignable to the tree";
      ++n_skipped;
      out << row.dump() << "\n";
      continue;
    }
    row["frame"] = f->name;
    auto assignments = fk::argid::decode(m, tree, talign->tokens, *f, beam,
                                         m.templates.hierarchy ? &hier : nullptr);
    ojson roles = ojson::array();
    if (!assignments.empty()) {
      row["total"] = assignments[0].total;
      for (const auto& [fe, span] : assignments[0].roles) {
        if (!span) continue;
        const std::vector<std::pair<std::string, std::string>>* anc = nullptr;
        if (m.templates.hierarchy) {
          auto hit = hier.find({f->id, fe});
          if (hit != hier.end()) anc = &hit->second;
        }
        const double s = fk::argid::score(
            m, fk::argid::extract_features(tree, talign->tokens, f->name, fk::argid::role{fe},
                                           *span, m.templates, anc));
        ojson r;
        r["fe"] = fe;
        r["start"] = span->start;
        r["end"] = span->end;
        r["char_start"] = tree.at(span->start).char_start;
        r["char_end"] = tree.at(span->end).char_end;
        r["score"] = s;
        roles.push_back(r);
      }
    }
    row["roles"] = roles;
    ++n_predicted;
    out << row.dump() << "\n";
  }
  write_text(out_path, out.str());

  ojson j;
  j["predicted"] = n_predicted;
  j["skipped"] = n_skipped;
  j["beam"] = beam;
  j["out"] = out_path;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_score(const std::string& corpus_path, const std::string& pred_path,
              const std::string& pred2_path, size_t bootstrap, uint64_t seed, bool frame_credit,
              double core_weight, double noncore_weight) {
  fd::ingest_report rep;
  fd::corpus gold = fd::ingest_jsonl(corpus_path, rep, false);
  fk::eval::eval_config cfg;
  cfg.frame_credit = frame_credit;
  cfg.core_weight = core_weight;
  cfg.noncore_weight = noncore_weight;

  prediction_file pa = read_predictions(pred_path);
  auto ta = per_annoset_tallies(gold, pa, cfg);
  fk::eval::score_tally sum_a;
  for (const auto& t : ta) sum_a += t;

  ojson j;
  j["system_a"] = prf_json(fk::eval::aggregate(ta), sum_a);
  if (!pred2_path.empty()) {
    prediction_file pb = read_predictions(pred2_path);
    auto tb = per_annoset_tallies(gold, pb, cfg);
    fk::eval::score_tally sum_b;
    for (const auto& t : tb) sum_b += t;
    j["system_b"] = prf_json(fk::eval::aggregate(tb), sum_b);

    std::vector<fk::eval::tally_pair> items;
    for (size_t i = 0; i < ta.size(); ++i) items.push_back({ta[i], tb[i]});
    if (bootstrap > 0) {
      fk::eval::bootstrap_result br = fk::eval::bootstrap_p(items, bootstrap, seed);
      ojson b;
      b["delta_f1"] = br.delta_full;
      b["p"] = br.p;
      b["resamples"] = br.n_resamples;
      b["exceed"] = br.exceed_count;
      j["bootstrap"] = b;
    }
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_analyze(const std::string& corpus_path, const std::string& pred_path,
                const std::string& train_path, const std::string& out_dir, bool frame_credit) {
  fd::ingest_report rep;
  fd::corpus c = fd::ingest_jsonl(corpus_path, rep, false);
  std::optional<fd::corpus> train;
  if (!train_path.empty()) {
    fd::ingest_report trep;
    train = fd::ingest_jsonl(train_path, trep, false);
  }
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto lu_ranks = fk::analysis::rank_frequency(c, fk::analysis::item_kind::lexical_unit);
  write_text(out_dir + "/rank_lu.txt", fk::analysis::rank_frequency_plot(lu_ranks));
  written.push_back(out_dir + "/rank_lu.txt");

  std::set<std::string> fe_names;
  for (const auto& a : c.annotation_sets)
    for (const auto& l : a.labels) fe_names.insert(l.fe_name);
  std::ostringstream febar;
  febar << "fe,ratio\n";
  febar.setf(std::ios::fixed);
  febar.precision(4);
  for (const auto& fe : fe_names)
    febar << fk::analysis::csv_escape(fe) << "," << fk::analysis::febar_ratio(c, fe) << "\n";
  write_text(out_dir + "/febar.csv", febar.str());
  written.push_back(out_dir + "/febar.csv");

  fk::eval::eval_config cfg;
  cfg.frame_credit = frame_credit;
  if (!pred_path.empty()) {
    prediction_file pf = read_predictions(pred_path);
    fk::analysis::predictions_by_annoset preds(pf.by_annoset.begin(), pf.by_annoset.end());
    auto fe_rs = fk::analysis::per_fe_scores(c, preds, train ? &*train : nullptr, cfg);
    write_text(out_dir + "/fe_scores.csv", fk::analysis::fe_scores_csv(fe_rs));
    written.push_back(out_dir + "/fe_scores.csv");
    auto pt_rs = fk::analysis::ptgf_breakdown(c, preds, cfg);
    write_text(out_dir + "/ptgf.csv", fk::analysis::ptgf_csv(pt_rs));
    written.push_back(out_dir + "/ptgf.csv");
  }

  if (train) {
    ojson cov;
    for (auto kind : {fk::analysis::item_kind::lexical_unit, fk::analysis::item_kind::frame_element,
                      fk::analysis::item_kind::valence_unit,
                      fk::analysis::item_kind::valence_pattern}) {
      auto r = fk::analysis::coverage_overlap(*train, c, kind);
      ojson k;
      k["train"] = r.n_train;
      k["eval"] = r.n_eval;
      k["shared"] = r.n_shared;
      k["pct"] = r.pct;
      k["eval_empty"] = r.eval_empty;
      cov[fk::analysis::to_string(kind)] = k;
    }
    write_text(out_dir + "/coverage.json", cov.dump() + "\n");
    written.push_back(out_dir + "/coverage.json");
  }

  ojson j;
  j["written"] = written;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_serve(const std::string& corpus_path, const std::string& host, int port) {
  fd::ingest_report rep;
  fd::corpus c = fd::ingest_jsonl(corpus_path, rep, false);
  if (const char* env = std::getenv("FRAMEKIT_PORT")) {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      throw fk::error(std::string("malformed FRAMEKIT_PORT value: ") + env);
    }
  }
  fk::service::server srv(std::move(c));
  ojson j;
  j["host"] = host;
  if (port == 0) {
    const int bound = srv.bind_any(host);
    if (bound <= 0) throw fk::error("cannot bind to an ephemeral port on " + host);
    j["port"] = bound;
    std::cout << j.dump() << "\n" << std::flush;
    srv.listen_after_bind();
    return 0;
  }
  j["port"] = port;
  std::cout << j.dump() << "\n" << std::flush;
  if (!srv.listen(host, port)) throw fk::error("cannot listen on " + host + ":" +
                                               std::to_string(port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FrameNet corpus tooling"};
  app.set_config("--config", "", "Read options from an INI file; command line values win");
  app.require_subcommand(1);

  // ingest
  auto* ing = app.add_subcommand("ingest", "Validate a corpus and write train/dev/test splits");
  std::string ing_corpus, ing_format = "jsonl", ing_out;
  std::vector<std::string> ing_test, ing_dev;
  bool ing_strict = false;
  ing->add_option("--corpus", ing_corpus, "Corpus file or release directory")->required();
  ing->add_option("--format", ing_format)->check(CLI::IsMember({"jsonl", "xml"}));
  ing->add_option("--out", ing_out, "Output directory")->required();
  ing->add_option("--test-docs", ing_test, "Documents for the test split")->delimiter(',');
  ing->add_option("--dev-docs", ing_dev, "Documents for the dev split")->delimiter(',');
  ing->add_flag("--strict", ing_strict, "Abort on the first ingestion error");

  // stats
  auto* sta = app.add_subcommand("stats", "Corpus summary counts");
  std::string sta_corpus, sta_format = "jsonl";
  sta->add_option("--corpus", sta_corpus)->required();
  sta->add_option("--format", sta_format)->check(CLI::IsMember({"jsonl", "xml"}));

  // augment
  auto* aug = app.add_subcommand("augment", "Generate paraphrased sentences");
  std::string aug_corpus, aug_out, aug_emb, aug_emb_format = "text", aug_sem;
  std::vector<std::string> aug_pos;
  bool aug_mwe = false;
  uint64_t aug_max = 0, aug_seed = 1;
  unsigned aug_jobs = 1;
  aug->add_option("--corpus", aug_corpus)->required();
  aug->add_option("--out", aug_out, "Augmented corpus file")->required();
  aug->add_option("--embeddings", aug_emb, "Embedding table for semantic filtering");
  aug->add_option("--embeddings-format", aug_emb_format)
      ->check(CLI::IsMember({"text", "binary"}));
  aug->add_option("--pos-filter", aug_pos, "Keep only these parts of speech")->delimiter(',');
  aug->add_flag("--mwe-filter", aug_mwe, "Drop multiword substitution candidates");
  aug->add_option("--sem-filter", aug_sem, "random-N, top-N or threshold-T");
  aug->add_option("--max-per-source", aug_max, "Cap generated sentences per source");
  aug->add_option("--seed", aug_seed);
  aug->add_option("--jobs", aug_jobs, "Worker threads");

  // train
  auto* trn = app.add_subcommand("train", "Train an argument identification model");
  std::string trn_corpus, trn_conll, trn_model;
  double trn_lambda = 1e-6, trn_rho = 0.95, trn_epsilon = 1e-6;
  size_t trn_epochs = 10;
  uint64_t trn_seed = 1;
  bool trn_hier = false;
  trn->add_option("--corpus", trn_corpus)->required();
  trn->add_option("--conll", trn_conll, "Dependency trees")->required();
  trn->add_option("--model", trn_model, "Model output file")->required();
  trn->add_option("--lambda", trn_lambda, "L2 regularization strength");
  trn->add_option("--rho", trn_rho, "AdaDelta decay");
  trn->add_option("--epsilon", trn_epsilon, "AdaDelta smoothing");
  trn->add_option("--epochs", trn_epochs);
  trn->add_option("--seed", trn_seed);
  trn->add_flag("--hierarchy", trn_hier, "Ancestor-conjoined role features");

  // predict
  auto* prd = app.add_subcommand("predict", "Decode role spans for a corpus");
  std::string prd_corpus, prd_conll, prd_model, prd_out;
  size_t prd_beam = 100;
  prd->add_option("--corpus", prd_corpus)->required();
  prd->add_option("--conll", prd_conll)->required();
  prd->add_option("--model", prd_model)->required();
  prd->add_option("--out", prd_out, "Predictions file")->required();
  prd->add_option("--beam", prd_beam, "Beam width");

  // score
  auto* sco = app.add_subcommand("score", "Score predictions against gold annotation");
  std::string sco_corpus, sco_pred, sco_pred2;
  size_t sco_bootstrap = 0;
  uint64_t sco_seed = 1;
  bool sco_frame_credit = false;
  double sco_core = 1.0, sco_noncore = 0.5;
  sco->add_option("--corpus", sco_corpus, "Gold corpus")->required();
  sco->add_option("--pred", sco_pred, "Predictions file")->required();
  sco->add_option("--pred2", sco_pred2, "Second system for the paired test");
  sco->add_option("--bootstrap", sco_bootstrap, "Bootstrap resamples");
  sco->add_option("--seed", sco_seed);
  sco->add_flag("--frame-credit", sco_frame_credit, "Credit the frame itself per annotation set");
  sco->add_option("--core-weight", sco_core);
  sco->add_option("--noncore-weight", sco_noncore);

  // analyze
  auto* ana = app.add_subcommand("analyze", "Write per-element, realization and coverage reports");
  std::string ana_corpus, ana_pred, ana_train, ana_out;
  bool ana_frame_credit = false;
  ana->add_option("--corpus", ana_corpus, "Evaluation corpus")->required();
  ana->add_option("--pred", ana_pred, "Predictions file");
  ana->add_option("--train", ana_train, "Training corpus for attestation counts");
  ana->add_option("--out", ana_out, "Output directory")->required();
  ana->add_flag("--frame-credit", ana_frame_credit);

  // serve
  auto* srv = app.add_subcommand("serve", "Serve the corpus over HTTP");
  std::string srv_corpus, srv_host = "127.0.0.1";
  int srv_port = 8080;
  srv->add_option("--corpus", srv_corpus)->required();
  srv->add_option("--host", srv_host);
  srv->add_option("--port", srv_port, "Port; 0 picks an ephemeral one. FRAMEKIT_PORT overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ojson j;
    j["error"] = {{"kind", "usage"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  }

  try {
    if (ing->parsed())
      return run_ingest(ing_corpus, ing_format, ing_strict, ing_test, ing_dev, ing_out);
    if (sta->parsed()) return run_stats(sta_corpus, sta_format);
    if (aug->parsed())
      return run_augment(aug_corpus, aug_out, aug_emb, aug_emb_format, aug_pos, aug_mwe, aug_sem,
                         aug_max, aug_seed, aug_jobs);
    if (trn->parsed())
      return run_train(trn_corpus, trn_conll, trn_model, trn_lambda, trn_rho, trn_epsilon,
                       trn_epochs, trn_seed, trn_hier);
    if (prd->parsed()) return run_predict(prd_corpus, prd_conll, prd_model, prd_out, prd_beam);
    if (sco->parsed())
      return run_score(sco_corpus, sco_pred, sco_pred2, sco_bootstrap, sco_seed, sco_frame_credit,
                       sco_core, sco_noncore);
    if (ana->parsed()) return run_analyze(ana_corpus, ana_pred, ana_train, ana_out,
                                          ana_frame_credit);
    if (srv->parsed()) return run_serve(srv_corpus, srv_host, srv_port);
  } catch (const fk::error& e) {
    ojson j;
    j["error"] = {{"kind", "runtime"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ojson j;
    j["error"] = {{"kind", "internal"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}
