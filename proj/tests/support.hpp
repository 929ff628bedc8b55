// Shared fixtures and random structure generators for the test suites.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jparse/common.hpp"
#include "jparse/trees.hpp"

namespace jparse::test {

// "Logic plays a maximal role here" with the usual analysis: plays heads the
// sentence, role heads the object noun phrase.
inline Sentence demo_sentence() {
  return {{"Logic", "plays", "a", "maximal", "role", "here"},
          {"NN", "VBZ", "DT", "JJ", "NN", "RB"}};
}

inline CTree demo_ctree() {
  CTree c;
  c.constituents = {{1, 6, "S"}, {1, 1, "NP"}, {2, 6, "VP"},
                    {3, 5, "NP"}, {6, 6, "ADVP"}};
  c.normalize();
  return c;
}

inline DTree demo_dtree() {
  return make_dtree({2, 0, 5, 5, 2, 2},
                    {"nsubj", "root", "det", "amod", "dobj", "advmod"});
}

inline DTree demo_dtree_unlabeled() { return make_dtree({2, 0, 5, 5, 2, 2}); }

inline CTree demo_binarized() {
  CTree c;
  c.constituents = {{1, 6, "S"},   {1, 1, "NP"},  {2, 6, "VP"},
                    {2, 5, "VP*"}, {2, 2, "VP*"}, {3, 5, "NP"},
                    {3, 3, "NP*"}, {4, 5, "NP*"}, {4, 4, "NP*"},
                    {5, 5, "NP*"}, {6, 6, "ADVP"}};
  c.binarized = true;
  c.normalize();
  return c;
}

inline LTree demo_ltree() {
  LTree t;
  t.spans = {{1, 6, 2, "S"},   {1, 1, 1, "NP"},  {2, 6, 2, "VP"},
             {2, 5, 2, "VP*"}, {2, 2, 2, "VP*"}, {3, 5, 5, "NP"},
             {3, 3, 3, "NP*"}, {4, 5, 5, "NP*"}, {4, 4, 4, "NP*"},
             {5, 5, 5, "NP*"}, {6, 6, 6, "ADVP"}};
  t.normalize();
  return t;
}

// "a hearing is scheduled tomorrow on this issue": the prepositional phrase
// attaches to "hearing", so both "scheduled" and "on" link out of the VP.
inline Sentence pp_sentence() {
  return {{"a", "hearing", "is", "scheduled", "tomorrow", "on", "this",
           "issue"},
          {"DT", "NN", "VBZ", "VBN", "NN", "IN", "DT", "NN"}};
}

inline CTree pp_ctree() {
  CTree c;
  c.constituents = {{1, 8, "S"}, {1, 2, "NP"}, {3, 8, "VP"},
                    {6, 8, "PP"}, {7, 8, "NP"}};
  c.normalize();
  return c;
}

inline DTree pp_dtree() {
  return make_dtree({2, 4, 4, 0, 4, 2, 8, 6},
                    {"det", "nsubjpass", "auxpass", "root", "tmod", "prep",
                     "det", "pobj"});
}

// Uniformly structured random lexicalized tree (not uniform over trees, but
// covers the space): random splits, random head side.
inline LTree random_ltree(int n, Rng& rng) {
  LTree t;
  std::function<int(int, int)> rec = [&](int i, int j) -> int {
    if (i == j) {
      t.spans.push_back({i, i, i, ""});
      return i;
    }
    const int k = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(j - i)));
    const int lh = rec(i, k);
    const int rh = rec(k + 1, j);
    const int h = rng.below(2) ? rh : lh;
    t.spans.push_back({i, j, h, ""});
    return h;
  };
  rec(1, n);
  t.normalize();
  return t;
}

// A labeled n-ary constituency tree plus a dependency tree guaranteed to be
// compatible: both are carved out of one random lexicalized tree.
struct GeneratedPair {
  Sentence sentence;
  CTree ctree;
  DTree dtree;
};

inline GeneratedPair random_compatible_pair(int n, Rng& rng,
                                            double keep_prob = 0.5) {
  static const char* kLabels[] = {"S",    "NP",   "VP",  "PP",
                                  "ADJP", "ADVP", "SBAR"};
  static const char* kPos[] = {"NN", "VBZ", "DT", "JJ", "RB", "IN"};
  static const char* kRels[] = {"nsubj", "dobj", "det", "amod", "prep",
                                "dep"};

  const LTree shape = random_ltree(n, rng);
  GeneratedPair out;
  out.dtree = ltree_to_dtree(shape);
  out.dtree.rels.assign(n + 1, "");
  for (int m = 1; m <= n; ++m) {
    out.dtree.rels[m] =
        out.dtree.heads[m] == 0 ? "root" : kRels[rng.below(6)];
  }
  for (const auto& s : shape.spans) {
    const bool is_root = s.left == 1 && s.right == n;
    if (!is_root && rng.unit() >= keep_prob) continue;
    std::string label = kLabels[rng.below(7)];
    if (rng.unit() < 0.15) label += std::string("::") + kLabels[rng.below(7)];
    out.ctree.constituents.push_back({s.left, s.right, label});
  }
  out.ctree.normalize();
  for (int m = 1; m <= n; ++m) {
    out.sentence.tokens.push_back("w" + std::to_string(m));
    out.sentence.pos.push_back(kPos[rng.below(6)]);
  }
  return out;
}

}  // namespace jparse::test
