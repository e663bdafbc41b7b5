#include <catch2/catch_amalgamated.hpp>

#include "framekit/deptree.hpp"
#include "helpers.hpp"

using namespace framekit;
namespace dt = framekit::deptree;
namespace fd = framekit::fndata;

TEST_CASE("conll ingestion, ten-column tab-separated") {
  th::temp_dir tmp("conll10");
  th::write_file(tmp.file("t.conll"),
                 "# sent_id = 7\n"
                 "1\tJohn\tJohn\tNNP\tNNP\t_\t2\tnsubj\t_\t_\n"
                 "2\tslept\tsleep\tVBD\tVBD\t_\t0\troot\t_\t_\n"
                 "\n"
                 "1\tGo\tgo\tVB\tVB\t_\t0\troot\t_\t_\n");
  auto trees = dt::ingest_conll(tmp.file("t.conll"));
  REQUIRE(trees.size() == 2);
  CHECK(trees[0].sentence_id == 7);
  CHECK(trees[1].sentence_id == 8);  // sequential after the last explicit id
  REQUIRE(trees[0].tokens.size() == 2);
  CHECK(trees[0].at(1).form == "John");
  CHECK(trees[0].at(2).lemma == "sleep");
  CHECK(trees[0].at(2).deprel == "root");
  CHECK(trees[0].text() == "John slept");
}

TEST_CASE("conll ingestion, eight-column space-separated with underscores") {
  th::temp_dir tmp("conll8");
  th::write_file(tmp.file("t.conll"),
                 "1 Dogs _ NNS _ _ 2 nsubj\n"
                 "2 bark bark VBP _ _ 0 root\n");
  auto trees = dt::ingest_conll(tmp.file("t.conll"));
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].sentence_id == 1);
  CHECK(trees[0].at(1).lemma == "Dogs");  // "_" lemma falls back to the form
  CHECK(trees[0].at(1).pos == "NNS");     // "_" postag falls back to cpostag
  CHECK(trees[0].at(2).pos == "VBP");
}

TEST_CASE("character offsets come from single-space joining") {
  auto t = th::make_tree({{"John", "John", "NNP", 2, "nsubj"},
                          {"ate", "eat", "VBD", 0, "root"},
                          {"caf\xc3\xa9", "caf\xc3\xa9", "NN", 2, "obj"}});
  CHECK(t.at(1).char_start == 0);
  CHECK(t.at(1).char_end == 3);
  CHECK(t.at(2).char_start == 5);
  CHECK(t.at(2).char_end == 7);
  CHECK(t.at(3).char_start == 9);
  CHECK(t.at(3).char_end == 12);  // 4 scalar values, not 5 bytes

  th::temp_dir tmp("conll_off");
  th::write_file(tmp.file("t.conll"),
                 "1\tJohn\tJohn\tNNP\tNNP\t_\t2\tnsubj\t_\t_\n"
                 "2\tate\teat\tVBD\tVBD\t_\t0\troot\t_\t_\n"
                 "3\tcaf\xc3\xa9\tcaf\xc3\xa9\tNN\tNN\t_\t2\tobj\t_\t_\n");
  auto trees = dt::ingest_conll(tmp.file("t.conll"));
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].at(3).char_start == 9);
  CHECK(trees[0].at(3).char_end == 12);
}

TEST_CASE("conll parse errors") {
  th::temp_dir tmp("conll_err");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("missing.conll")), parse_error);

  th::write_file(tmp.file("cols.conll"), "1 go go VB VB _ 0\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("cols.conll")), parse_error);

  th::write_file(tmp.file("seq.conll"),
                 "1 a a X X _ 0 root\n"
                 "3 b b X X _ 1 obj\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("seq.conll")), parse_error);

  th::write_file(tmp.file("badid.conll"), "# sent_id = oops\n1 a a X X _ 0 root\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("badid.conll")), parse_error);

  th::write_file(tmp.file("badhead.conll"), "1 a a X X _ x root\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("badhead.conll")), parse_error);
}

TEST_CASE("tree structure validation") {
  th::temp_dir tmp("tree_check");

  th::write_file(tmp.file("tworoots.conll"),
                 "1 a a X X _ 0 root\n"
                 "2 b b X X _ 0 root\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("tworoots.conll")), not_a_tree_error);

  th::write_file(tmp.file("noroot.conll"),
                 "1 a a X X _ 2 dep\n"
                 "2 b b X X _ 1 dep\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("noroot.conll")), not_a_tree_error);

  th::write_file(tmp.file("self.conll"),
                 "1 a a X X _ 1 dep\n"
                 "2 b b X X _ 0 root\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("self.conll")), not_a_tree_error);

  th::write_file(tmp.file("range.conll"), "1 a a X X _ 9 root\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("range.conll")), not_a_tree_error);

  // 2 and 3 point at each other; 1 is the only root.
  th::write_file(tmp.file("cycle.conll"),
                 "1 a a X X _ 0 root\n"
                 "2 b b X X _ 3 dep\n"
                 "3 c c X X _ 2 dep\n");
  CHECK_THROWS_AS(dt::ingest_conll(tmp.file("cycle.conll")), not_a_tree_error);
}

TEST_CASE("descendants include the token itself") {
  auto t = th::make_tree({{"a", "a", "X", 2, "dep"},
                          {"b", "b", "X", 0, "root"},
                          {"c", "c", "X", 2, "dep"},
                          {"d", "d", "X", 3, "dep"}});
  CHECK(dt::descendants(t, 2) == std::vector<int>{1, 2, 3, 4});
  CHECK(dt::descendants(t, 3) == std::vector<int>{3, 4});
  CHECK(dt::descendants(t, 1) == std::vector<int>{1});
}

TEST_CASE("candidate spans of a head-initial chain") {
  auto t = th::make_tree({{"a", "a", "X", 0, "root"},
                          {"b", "b", "X", 1, "dep"},
                          {"c", "c", "X", 2, "dep"}});
  auto spans = dt::candidate_spans(t);
  std::set<dt::span> expect = {{1, 1}, {2, 2}, {3, 3}, {1, 3}, {2, 3}};
  CHECK(spans == expect);
}

TEST_CASE("a mid-constituent span is not a candidate") {
  // "President Jacob Zuma said": both modifiers attach to Zuma, so the
  // span "Jacob Zuma" is not a full subtree and not a single token.
  auto t = th::make_tree({{"President", "President", "NNP", 3, "compound"},
                          {"Jacob", "Jacob", "NNP", 3, "compound"},
                          {"Zuma", "Zuma", "NNP", 4, "nsubj"},
                          {"said", "say", "VBD", 0, "root"}});
  auto spans = dt::candidate_spans(t);
  std::set<dt::span> expect = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {1, 3}, {1, 4}};
  CHECK(spans == expect);
  CHECK_FALSE(spans.count({2, 3}));
}

TEST_CASE("non-contiguous subtrees yield no interval") {
  // 3 heads 1 and 2 sits in between: descendants of 1 are {1,3}, a gap.
  auto t = th::make_tree({{"a", "a", "X", 0, "root"},
                          {"b", "b", "X", 1, "dep"},
                          {"c", "c", "X", 1, "dep"},
                          {"d", "d", "X", 2, "dep"}});
  // desc(2) = {2,4}: gap. Only singles, desc(1)=[1,4], desc(3), desc(4).
  auto spans = dt::candidate_spans(t);
  std::set<dt::span> expect = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {1, 4}};
  CHECK(spans == expect);
}

TEST_CASE("candidate spans match the reference enumeration on random trees") {
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    auto t = th::random_tree(seed, 2 + static_cast<int>(seed % 11));
    INFO("seed " << seed);
    CHECK(dt::candidate_spans(t) == th::brute_force_spans(t));
  }
}

TEST_CASE("aligning character spans to tokens") {
  auto t = th::make_tree({{"John", "John", "NNP", 2, "nsubj"},
                          {"ate", "eat", "VBD", 0, "root"},
                          {"apples", "apple", "NNS", 2, "obj"}});
  // "John ate apples": John 0-3, ate 5-7, apples 9-14

  auto a = dt::align_char_span(t, 0, 3);
  REQUIRE(a);
  CHECK(a->tokens == dt::span{1, 1});
  CHECK(a->exact);

  a = dt::align_char_span(t, 5, 14);
  REQUIRE(a);
  CHECK(a->tokens == dt::span{2, 3});
  CHECK(a->exact);

  a = dt::align_char_span(t, 2, 6);  // straddles the space: covers both tokens
  REQUIRE(a);
  CHECK(a->tokens == dt::span{1, 2});
  CHECK_FALSE(a->exact);

  a = dt::align_char_span(t, 9, 12);  // proper prefix of "apples"
  REQUIRE(a);
  CHECK(a->tokens == dt::span{3, 3});
  CHECK_FALSE(a->exact);

  CHECK_FALSE(dt::align_char_span(t, 20, 25));  // beyond the text
  auto gap = dt::align_char_span(t, 4, 4);      // the space between tokens
  CHECK_FALSE(gap);
}

TEST_CASE("span oracle recall over a small corpus") {
  th::corpus_builder b;
  int64_t fr = b.add_frame("F", {{"Agent", fd::core_type::core},
                                 {"Theme", fd::core_type::core}});
  int64_t lu = b.add_lu("eat", fd::pos_tag::v, fr);
  int64_t s1 = b.add_sentence("d", "John ate apples");
  int64_t s2 = b.add_sentence("d", "President Jacob Zuma said");
  b.add_annoset(s1, lu, fr, {{5, 7}},
                {th::overt("Agent", 0, 3), th::overt("Theme", 9, 14),
                 th::ni("Agent", fd::ni_kind::ini)});
  // "Jacob Zuma" aligns to tokens [2,3], which the heuristic cannot produce.
  b.add_annoset(s2, lu, fr, {{21, 24}}, {th::overt("Agent", 10, 19)});
  fd::corpus c = b.build();

  auto t1 = th::make_tree({{"John", "John", "NNP", 2, "nsubj"},
                           {"ate", "eat", "VBD", 0, "root"},
                           {"apples", "apple", "NNS", 2, "obj"}}, s1);
  auto t2 = th::make_tree({{"President", "President", "NNP", 3, "compound"},
                           {"Jacob", "Jacob", "NNP", 3, "compound"},
                           {"Zuma", "Zuma", "NNP", 4, "nsubj"},
                           {"said", "say", "VBD", 0, "root"}}, s2);
  std::map<int64_t, const dt::dep_tree*> trees = {{s1, &t1}, {s2, &t2}};

  auto r = dt::span_oracle_recall(c, trees);
  CHECK(r.n_gold == 3);  // null instantiation not counted
  CHECK(r.n_covered == 2);
  CHECK(r.n_misaligned == 0);
  CHECK(r.recall == Catch::Approx(2.0 / 3.0));

  std::map<int64_t, const dt::dep_tree*> none;
  auto empty = dt::span_oracle_recall(c, none);
  CHECK(empty.n_gold == 0);
  CHECK(empty.recall == 0.0);
}
