#include <cstdio>
#include <set>
#include <string>

#include "doctest.h"
#include "jparse/treebank.hpp"
#include "jparse/trees.hpp"
#include "support.hpp"

using namespace jparse;
using jparse::test::demo_ctree;
using jparse::test::demo_dtree;
using jparse::test::demo_ltree;
using jparse::test::demo_sentence;
using jparse::test::pp_ctree;
using jparse::test::pp_dtree;
using jparse::test::pp_sentence;
using jparse::test::random_compatible_pair;

namespace {

const char* kDemoBracket =
    "(S (NP (NN Logic)) (VP (VBZ plays) (NP (DT a) (JJ maximal) (NN role)) "
    "(ADVP (RB here))))";

std::string data_path(const char* file) {
  return std::string(JPARSE_DATA_DIR) + "/" + file;
}

// unique scratch file in the test working directory
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& p) : path(p) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("bracket reading produces the expected sentence and tree") {
  const auto trees = read_brackets_text(kDemoBracket);
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].first.tokens == demo_sentence().tokens);
  CHECK(trees[0].first.pos == demo_sentence().pos);
  CHECK(trees[0].second == demo_ctree());
}

TEST_CASE("bracket writing is canonical and round-trips") {
  const std::string line = bracket_line(demo_sentence(), demo_ctree());
  CHECK(line == kDemoBracket);
  const auto again = read_brackets_text(line);
  REQUIRE(again.size() == 1);
  CHECK(again[0].second == demo_ctree());
}

TEST_CASE("bracket reader accepts wrappers and pretty-printing") {
  const std::string pretty =
      "( (S\n"
      "    (NP (NN Logic))\n"
      "    (VP (VBZ plays)\n"
      "        (NP (DT a) (JJ maximal) (NN role))\n"
      "        (ADVP (RB here)))) )\n"
      "((X w))\n";
  const auto trees = read_brackets_text(pretty);
  REQUIRE(trees.size() == 2);
  CHECK(trees[0].second == demo_ctree());
  CHECK(trees[1].first.tokens == std::vector<std::string>{"w"});
  CHECK(trees[1].first.pos == std::vector<std::string>{"X"});
  CHECK(trees[1].second.constituents ==
        std::vector<Constituent>{{1, 1, "X"}});
  // single-word canonical form keeps the tag as both constituent and POS
  CHECK(bracket_line(trees[1].first, trees[1].second) == "(X (X w))");
}

TEST_CASE("bracket reader strips function tags and empty elements") {
  const auto trees = read_brackets_text(
      "(S (NP-SBJ-1 (NN Logic)) (VP (VBZ plays) (NP (-NONE- *T*-1)) "
      "(ADVP-TMP (RB here))) (. .))");
  REQUIRE(trees.size() == 1);
  const auto& [sentence, tree] = trees[0];
  CHECK(sentence.tokens ==
        std::vector<std::string>{"Logic", "plays", "here", "."});
  CHECK(sentence.pos == std::vector<std::string>{"NN", "VBZ", "RB", "."});
  CTree want;
  want.constituents = {{1, 4, "S"}, {1, 1, "NP"}, {2, 3, "VP"}, {3, 3, "ADVP"}};
  want.normalize();
  CHECK(tree == want);

  // tags that start with '-' survive whole
  const auto lrb = read_brackets_text("(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))");
  CHECK(lrb[0].first.pos ==
        std::vector<std::string>{"-LRB-", "NN", "-RRB-"});
}

TEST_CASE("unary chains collapse into joined labels") {
  const auto trees = read_brackets_text("(S (VP (VB go)))");
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].second.constituents ==
        std::vector<Constituent>{{1, 1, "S::VP"}});
  CHECK(bracket_line(trees[0].first, trees[0].second) == "(S (VP (VB go)))");

  const auto nested = read_brackets_text("(NP (NP (NN a) (NN b)))");
  CHECK(nested[0].second.constituents ==
        std::vector<Constituent>{{1, 2, "NP::NP"}});
}

TEST_CASE("bracket reader reports malformed input with positions") {
  CHECK_THROWS_WITH_AS(read_brackets_text("(S (NP (NN Logic))", "f"),
                       doctest::Contains("f:1:1"), Error);
  CHECK_THROWS_WITH_AS(read_brackets_text("(S (NN x)))", "f"),
                       doctest::Contains("unmatched ')'"), Error);
  CHECK_THROWS_WITH_AS(read_brackets_text("(S)", "f"),
                       doctest::Contains("no children"), Error);
  CHECK_THROWS_WITH_AS(read_brackets_text("(S plays (NN x))", "f"),
                       doctest::Contains("outside a pre-terminal"), Error);
  CHECK_THROWS_WITH_AS(read_brackets_text("Logic", "f"),
                       doctest::Contains("outside a tree"), Error);
  CHECK_THROWS_WITH_AS(read_brackets_text("( (NP (-NONE- *)) )", "f"),
                       doctest::Contains("empty-element"), Error);
  try {
    read_brackets_text("(S (NP (NN Logic))", "f");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unbalanced_parens);
  }
}

TEST_CASE("conllx round-trips the demo dependency tree") {
  const std::string block = conllx_block(demo_sentence(), demo_dtree());
  CHECK(block.substr(0, block.find('\n')) ==
        "1\tLogic\t_\tNN\tNN\t_\t2\tnsubj\t_\t_");
  const auto back = read_conllx_text(block);
  REQUIRE(back.size() == 1);
  CHECK(back[0].first.tokens == demo_sentence().tokens);
  CHECK(back[0].first.pos == demo_sentence().pos);
  CHECK(back[0].second == demo_dtree());
}

TEST_CASE("conllx reader handles minimal rows and non-projective input") {
  const auto one = read_conllx_text("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].second.heads == std::vector<int>{-1, 0});
  CHECK(one[0].second.rels[1] == "root");
  CHECK(one[0].first.pos == std::vector<std::string>{"_"});

  // crossing arcs are recorded, not rejected
  const auto cross = read_conllx_text(
      "1\tw1\t_\tX\tX\t_\t3\tdep\t_\t_\n"
      "2\tw2\t_\tX\tX\t_\t0\troot\t_\t_\n"
      "3\tw3\t_\tX\tX\t_\t2\tdep\t_\t_\n");
  REQUIRE(cross.size() == 1);
  CHECK_FALSE(is_projective(cross[0].second));
  CHECK(is_tree(cross[0].second));
}

TEST_CASE("conllx reader rejects structural violations") {
  CHECK_THROWS_WITH_AS(read_conllx_text("1\ta\t_\t_\t0\troot\t_\t_\n", "f"),
                       doctest::Contains("expected 10 columns, got 8"), Error);
  CHECK_THROWS_WITH_AS(
      read_conllx_text("2\ta\t_\t_\t_\t_\t0\troot\t_\t_\n", "f"),
      doctest::Contains("unexpected token id"), Error);
  CHECK_THROWS_WITH_AS(
      read_conllx_text("1\ta\t_\t_\t_\t_\tx\troot\t_\t_\n", "f"),
      doctest::Contains("malformed number"), Error);
  CHECK_THROWS_WITH_AS(
      read_conllx_text("1\ta\t_\t_\t_\t_\t7\troot\t_\t_\n", "f"),
      doctest::Contains("out of range"), Error);

  const std::string two_roots =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t0\troot\t_\t_\n";
  try {
    read_conllx_text(two_roots, "f");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::multi_root);
  }

  const std::string cycle =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t3\tdep\t_\t_\n"
      "3\tc\t_\t_\t_\t_\t2\tdep\t_\t_\n";
  try {
    read_conllx_text(cycle, "f");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::cycle_detected);
  }

  const std::string rootless =
      "1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n";
  try {
    read_conllx_text(rootless, "f");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::cycle_detected);
  }
}

TEST_CASE("pair_and_audit joins aligned files and scores compatibility") {
  TempFile b("tb_pair.brackets");
  TempFile c("tb_pair.conllx");
  write_brackets(b.path, {{demo_sentence(), demo_ctree()},
                          {pp_sentence(), pp_ctree()}});
  write_conllx(c.path, {{demo_sentence(), demo_dtree()},
                        {pp_sentence(), pp_dtree()}});

  const PairedCorpus corpus = pair_and_audit(b.path, c.path);
  REQUIRE(corpus.instances.size() == 2);
  CHECK(corpus.instances[0].compat.compatible);
  CHECK_FALSE(corpus.instances[1].compat.compatible);
  CHECK(corpus.instances[1].compat.reason == CompatReason::multi_head);
  CHECK(corpus.stats.sentences == 2);
  CHECK(corpus.stats.compatible == 1);
  CHECK(corpus.stats.summary() == "1/2 (50.0%)");
  CHECK(corpus.stats.label_freq.at("NP") == 4);  // 2 demo + 2 hearing
  CHECK(corpus.stats.rel_freq.at("root") == 2);

  const auto kept = filter_compatible(corpus.instances);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].ctree == demo_ctree());
  CHECK(kept[0].dtree == demo_dtree());
  for (const auto& inst : corpus.instances) {
    CHECK(inst.sentence.size() == inst.ctree.length());
    CHECK(inst.sentence.size() == inst.dtree.size());
  }
}

TEST_CASE("pair_and_audit rejects misaligned corpora") {
  TempFile b("tb_misalign.brackets");
  TempFile c("tb_misalign.conllx");

  write_brackets(b.path, {{demo_sentence(), demo_ctree()}});
  Sentence other = demo_sentence();
  other.tokens[2] = "the";
  write_conllx(c.path, {{other, demo_dtree()}});
  CHECK_THROWS_WITH_AS(pair_and_audit(b.path, c.path),
                       doctest::Contains("token 3"), Error);

  write_conllx(c.path, {{demo_sentence(), demo_dtree()},
                        {demo_sentence(), demo_dtree()}});
  CHECK_THROWS_WITH_AS(pair_and_audit(b.path, c.path),
                       doctest::Contains("sentences"), Error);

  write_brackets(b.path, {});
  write_conllx(c.path, {});
  try {
    pair_and_audit(b.path, c.path);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_corpus);
  }
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_WITH_AS(read_brackets("no_such_file.brackets"),
                       doctest::Contains("cannot open"), Error);
  CHECK_THROWS_WITH_AS(read_conllx("no_such_file.conllx"),
                       doctest::Contains("cannot open"), Error);
}

TEST_CASE("generated corpora survive the file round-trip") {
  Rng rng(20260825);
  std::vector<std::pair<Sentence, CTree>> brackets;
  std::vector<std::pair<Sentence, DTree>> deps;
  std::vector<CTree> want_c;
  std::vector<DTree> want_d;
  for (int k = 0; k < 25; ++k) {
    const int n = 1 + static_cast<int>(rng.below(9));
    auto pair = random_compatible_pair(n, rng);
    brackets.push_back({pair.sentence, pair.ctree});
    deps.push_back({pair.sentence, pair.dtree});
    want_c.push_back(pair.ctree);
    want_d.push_back(pair.dtree);
  }
  TempFile b("tb_roundtrip.brackets");
  TempFile c("tb_roundtrip.conllx");
  write_brackets(b.path, brackets);
  write_conllx(c.path, deps);

  const PairedCorpus corpus = pair_and_audit(b.path, c.path);
  REQUIRE(corpus.instances.size() == 25);
  CHECK(corpus.stats.summary() == "25/25 (100.0%)");
  for (std::size_t k = 0; k < corpus.instances.size(); ++k) {
    CAPTURE(k);
    CHECK(corpus.instances[k].ctree == want_c[k]);
    CHECK(corpus.instances[k].dtree == want_d[k]);
    CHECK(corpus.instances[k].compat.compatible);
  }
}

TEST_CASE("lexicalized dumps serialize as label[head] brackets") {
  const std::string line = ltree_line(demo_sentence(), demo_ltree());
  CHECK(line ==
        "(S[2] (NP[1] Logic) (VP[2] (VP*[2] (VP*[2] plays) (NP[5] (NP*[3] a) "
        "(NP*[5] (NP*[4] maximal) (NP*[5] role)))) (ADVP[6] here)))");

  const auto back = read_ltrees_text(line);
  REQUIRE(back.size() == 1);
  CHECK(back[0].first.tokens == demo_sentence().tokens);
  CHECK(back[0].first.pos == std::vector<std::string>(6, "_"));
  CHECK(back[0].second == demo_ltree());

  LTree single;
  single.spans = {{1, 1, 1, "X"}};
  Sentence w;
  w.tokens = {"w"};
  CHECK(ltree_line(w, single) == "(X[1] w)");
}

TEST_CASE("lexicalized dump files round-trip") {
  TempFile f("tb_dump.ltrees");
  LTree single;
  single.spans = {{1, 1, 1, "X"}};
  Sentence w;
  w.tokens = {"w"};
  write_ltrees(f.path, {{demo_sentence(), demo_ltree()}, {w, single}});
  const auto back = read_ltrees(f.path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].second == demo_ltree());
  CHECK(back[1].second == single);
}

TEST_CASE("lexicalized dump reader validates structure") {
  CHECK_THROWS_WITH_AS(read_ltrees_text("(S[2] (NP[1] Logic))", "f"),
                       doctest::Contains("one word or two subtrees"), Error);
  CHECK_THROWS_WITH_AS(read_ltrees_text("(S (NP[1] a) (VP[2] b))", "f"),
                       doctest::Contains("label[head]"), Error);
  CHECK_THROWS_WITH_AS(
      read_ltrees_text("(S[3] (NP[1] a) (VP[2] b))", "f"),
      doctest::Contains("not inherited"), Error);
  CHECK_THROWS_WITH_AS(read_ltrees_text("(X[2] w)", "f"),
                       doctest::Contains("does not match word"), Error);
}

TEST_CASE("bundled training corpus is fully compatible") {
  const PairedCorpus corpus = pair_and_audit(
      data_path("toy_train.brackets"), data_path("toy_train.conllx"));
  CHECK(corpus.stats.sentences == 32);
  CHECK(corpus.stats.summary() == "32/32 (100.0%)");
  std::set<std::vector<std::string>> distinct;
  for (const auto& inst : corpus.instances) {
    distinct.insert(inst.sentence.tokens);
  }
  CHECK(distinct.size() == 32);  // no duplicate sentences
}

TEST_CASE("bundled audit corpus has exactly two incompatible sentences") {
  const PairedCorpus corpus =
      pair_and_audit(data_path("audit.brackets"), data_path("audit.conllx"));
  CHECK(corpus.stats.sentences == 20);
  CHECK(corpus.stats.summary() == "18/20 (90.0%)");
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < corpus.instances.size(); ++k) {
    if (!corpus.instances[k].compat.compatible) bad.push_back(k);
  }
  REQUIRE(bad.size() == 2);
  for (const std::size_t k : bad) {
    CHECK(corpus.instances[k].compat.reason == CompatReason::multi_head);
    REQUIRE_FALSE(corpus.instances[k].compat.offending.empty());
    CHECK(corpus.instances[k].compat.offending[0].linked.size() == 2);
  }
  CHECK(filter_compatible(corpus.instances).size() == 18);
}
