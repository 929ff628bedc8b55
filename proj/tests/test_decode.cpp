#include <cmath>
#include <set>
#include <tuple>

#include "doctest.h"
#include "jparse/decode.hpp"
#include "jparse/oracle.hpp"
#include "support.hpp"

using namespace jparse;
using namespace jparse::test;

namespace {

LTree unlabeled(const LTree& t) {
  LTree out = t;
  for (auto& s : out.spans) s.label.clear();
  out.normalize();
  return out;
}

// indicator tables: +1 for each reference span, +1 for each reference arc
ScoreTables indicator_tables(const LTree& reference, int n) {
  ScoreTables t(n, false);
  for (const auto& s : reference.spans) t.span_c(s.left, s.right) += 1.0;
  for (const auto& a : reference.arcs()) t.arc_d(a.head, a.mod) += 1.0;
  return t;
}

// independent Hamming distance: wrong spans plus wrong arcs
int hamming(const LTree& a, const LTree& ref) {
  std::set<std::pair<int, int>> ref_spans;
  for (const auto& s : ref.spans) ref_spans.insert({s.left, s.right});
  int cost = 0;
  for (const auto& s : a.spans) {
    if (!ref_spans.count({s.left, s.right})) ++cost;
  }
  const DTree da = ltree_to_dtree(a), dr = ltree_to_dtree(ref);
  for (int m = 1; m <= dr.size(); ++m) {
    if (da.heads[m] != dr.heads[m]) ++cost;
  }
  return cost;
}

}  // namespace

TEST_CASE("one-word sentence decodes to the only tree") {
  ScoreTables t(1, false);
  t.span_c(1, 1) = 0.5;
  t.arc_d(0, 1) = 1.0;
  const DecodeResult r = eisner_satta(t, false);
  REQUIRE(r.tree.spans.size() == 1);
  CHECK(r.tree.spans[0] == LexSpan{1, 1, 1, ""});
  CHECK(r.score == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("empty sentences cannot be decoded") {
  CHECK_THROWS_WITH_AS(eisner_satta(ScoreTables{}, false),
                       doctest::Contains("EMPTY_SENTENCE"), Error);
  CHECK_THROWS_AS(cky(Eigen::MatrixXd::Zero(1, 1), 0), Error);
  CHECK_THROWS_AS(eisner(Eigen::MatrixXd::Zero(1, 1), 0), Error);
  CHECK_THROWS_AS(brute_force_argmax(ScoreTables{}, false), Error);
}

TEST_CASE("non-finite scores are rejected") {
  ScoreTables t(2, false);
  t.span_c(1, 2) = std::nan("");
  CHECK_THROWS_WITH_AS(eisner_satta(t, false),
                       doctest::Contains("INVALID_SCORE"), Error);
}

TEST_CASE("indicator scores recover the reference tree with score 17") {
  const LTree ref = unlabeled(demo_ltree());
  const ScoreTables t = indicator_tables(ref, 6);
  const DecodeResult r = eisner_satta(t, false);
  CHECK(r.score == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(r.tree == ref);
  CHECK(score_ltree(t, ref, false) == doctest::Approx(17.0).epsilon(1e-12));
  // enumeration agrees and confirms uniqueness
  const DecodeResult b = brute_force_argmax(t, false);
  CHECK(b.score == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(b.tree == ref);
}

TEST_CASE("decoder matches enumeration on random tables") {
  const OracleReport report = run_oracle_verification(10, 5, 20260825);
  INFO(format_report(report));
  CHECK(report.all_passed());
}

TEST_CASE("decoded trees are structurally valid") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const ScoreTables t = random_tables(n, trial % 2 == 1, rng);
    const DecodeResult r = eisner_satta(t, trial % 2 == 1);
    CHECK(static_cast<int>(r.tree.spans.size()) == 2 * n - 1);
    const DTree d = ltree_to_dtree(r.tree);
    CHECK(is_tree(d));
    CHECK(is_projective(d));
  }
}

TEST_CASE("constant shifts move the score by a fixed amount") {
  Rng rng(5);
  const int n = 5;
  const ScoreTables t = random_tables(n, false, rng);
  const DecodeResult base = eisner_satta(t, false);

  ScoreTables shifted = t;
  const double c = 0.75;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) shifted.span_c(i, j) += c;
  }
  DecodeResult r = eisner_satta(shifted, false);
  CHECK(r.score ==
        doctest::Approx(base.score + (2 * n - 1) * c).epsilon(1e-12));
  CHECK(r.tree == base.tree);

  shifted = t;
  for (int h = 0; h <= n; ++h) {
    for (int m = 1; m <= n; ++m) shifted.arc_d(h, m) += c;
  }
  r = eisner_satta(shifted, false);
  CHECK(r.score == doctest::Approx(base.score + n * c).epsilon(1e-12));
  CHECK(r.tree == base.tree);
}

TEST_CASE("ties resolve to the smallest split and attachment") {
  const ScoreTables t(3, false);  // all zeros
  const DecodeResult r = eisner_satta(t, false);
  LTree expected;
  expected.spans = {{1, 3, 1, ""}, {1, 1, 1, ""}, {2, 3, 2, ""},
                    {2, 2, 2, ""}, {3, 3, 3, ""}};
  expected.normalize();
  CHECK(r.tree == expected);
  CHECK(r.score == 0.0);

  // deterministic across repeated runs
  CHECK(eisner_satta(t, false).tree == expected);
}

TEST_CASE("zeroed arcs reduce the joint decoder to pure bracketing") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(14));
    ScoreTables t = random_tables(n, false, rng);
    t.arc_d.setZero();
    const DecodeResult joint = eisner_satta(t, false);
    const auto [spans, score] = cky(t.span_c, n);
    CHECK(joint.score == doctest::Approx(score).epsilon(1e-9));
    std::set<std::pair<int, int>> joint_spans;
    for (const auto& s : joint.tree.spans) {
      joint_spans.insert({s.left, s.right});
    }
    CHECK(joint_spans == std::set<std::pair<int, int>>(spans.begin(),
                                                       spans.end()));
  }
}

TEST_CASE("zeroed spans reduce the joint decoder to pure attachment") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(14));
    ScoreTables t = random_tables(n, false, rng);
    t.span_c.setZero();
    const DecodeResult joint = eisner_satta(t, false);
    const auto [dtree, score] = eisner(t.arc_d, n);
    CHECK(joint.score == doctest::Approx(score).epsilon(1e-9));
    CHECK(ltree_to_dtree(joint.tree).heads == dtree.heads);
    CHECK(is_tree(dtree));
    CHECK(is_projective(dtree));
  }
}

TEST_CASE("cky matches exhaustive bracketing enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const ScoreTables t = random_tables(n, false, rng);
    // enumerate all bracketings via the lexicalized-tree enumerator
    double best = -1e300;
    enumerate_ltrees(n, [&](const LTree& lt) {
      double v = 0;
      for (const auto& s : lt.spans) v += t.span_c(s.left, s.right);
      best = std::max(best, v);
    });
    const auto [spans, score] = cky(t.span_c, n);
    CHECK(score == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("eisner matches exhaustive projective tree enumeration") {
  Rng rng(19);
  for (int n = 1; n <= 4; ++n) {
    // collect all single-root projective head vectors
    std::vector<std::vector<int>> all;
    std::vector<int> heads(n, 0);
    const std::function<void(int)> fill = [&](int m) {
      if (m > n) {
        const DTree d = make_dtree(heads);
        if (is_tree(d) && is_projective(d)) all.push_back(heads);
        return;
      }
      for (int h = 0; h <= n; ++h) {
        if (h == m) continue;
        heads[m - 1] = h;
        fill(m + 1);
      }
    };
    fill(1);
    if (n == 3) CHECK(all.size() == 7);

    for (int trial = 0; trial < 20; ++trial) {
      const ScoreTables t = random_tables(n, false, rng);
      double best = -1e300;
      for (const auto& hs : all) {
        double v = 0;
        for (int m = 1; m <= n; ++m) v += t.arc_d(hs[m - 1], m);
        best = std::max(best, v);
      }
      const auto [dtree, score] = eisner(t.arc_d, n);
      CHECK(score == doctest::Approx(best).epsilon(1e-9));
      double check = 0;
      for (int m = 1; m <= n; ++m) check += t.arc_d(dtree.heads[m], m);
      CHECK(check == doctest::Approx(score).epsilon(1e-9));
    }
  }
}

TEST_CASE("enumeration counts match the closed form") {
  const long expected[] = {1, 2, 8, 40, 224, 1344};
  for (int n = 1; n <= 6; ++n) {
    long seen = 0;
    enumerate_ltrees(n, [&](const LTree&) { ++seen; });
    CHECK(seen == expected[n - 1]);
    CHECK(count_ltrees(n) == expected[n - 1]);
  }
  CHECK(count_ltrees(7) == 8448);
  CHECK(count_ltrees(8) == 54912);
}

TEST_CASE("enumeration rejects out-of-range lengths") {
  CHECK_THROWS_WITH_AS(enumerate_ltrees(9, [](const LTree&) {}),
                       doctest::Contains("TOO_LARGE"), Error);
  CHECK_THROWS_AS(enumerate_ltrees(0, [](const LTree&) {}), Error);
}

TEST_CASE("enumerated trees are distinct and valid") {
  std::set<std::vector<std::tuple<int, int, int>>> seen;
  enumerate_ltrees(4, [&](const LTree& t) {
    CHECK(t.spans.size() == 7);
    const DTree d = ltree_to_dtree(t);
    CHECK(is_tree(d));
    CHECK(is_projective(d));
    std::vector<std::tuple<int, int, int>> key;
    for (const auto& s : t.spans) key.emplace_back(s.left, s.right, s.head);
    seen.insert(key);
  });
  CHECK(seen.size() == 40);
}

TEST_CASE("cost augmentation leaves reference parts untouched") {
  Rng rng(23);
  const int n = 4;
  const ScoreTables t = random_tables(n, true, rng);
  CostConfig cost;
  cost.reference = random_ltree(n, rng);
  const ScoreTables aug = cost_augment(t, cost);
  CHECK(score_ltree(aug, cost.reference, true) ==
        doctest::Approx(score_ltree(t, cost.reference, true)).epsilon(1e-12));
  // and adds exactly the Hamming distance for every other tree
  enumerate_ltrees(n, [&](const LTree& y) {
    const double plain = score_ltree(t, y, true);
    const double augmented = score_ltree(aug, y, true);
    CHECK(augmented ==
          doctest::Approx(plain + hamming(y, cost.reference)).epsilon(1e-9));
  });
}

TEST_CASE("cost-augmented decoding maximizes score plus distance") {
  Rng rng(29);
  const int n = 4;
  ScoreTables t(n, false);  // all-zero scores isolate the cost term
  CostConfig cost;
  cost.reference = random_ltree(n, rng);
  const DecodeResult r = eisner_satta(t, false, &cost);
  int worst = 0;
  enumerate_ltrees(n, [&](const LTree& y) {
    worst = std::max(worst, hamming(y, cost.reference));
  });
  CHECK(r.score == doctest::Approx(worst).epsilon(1e-9));
}
