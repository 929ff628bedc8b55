#include "jparse/decode.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace jparse {

namespace {

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

Scalar second_order_or_zero(const ScoreTables& s, bool second_order, int i,
                            int j, int h) {
  return second_order ? s.span2o(i, j, h) : Scalar{0};
}

}  // namespace

DecodeResult eisner_satta(const ScoreTables& scores_in, bool second_order,
                          const CostConfig* cost) {
  if (scores_in.n < 1) {
    fail(errc::empty_sentence, "cannot decode an empty sentence");
  }
  if (second_order && !scores_in.has_second_order()) {
    fail(errc::invalid_score, "second-order decoding needs span2o scores");
  }
  scores_in.require_finite();

  ScoreTables augmented;
  const ScoreTables* sp = &scores_in;
  if (cost != nullptr) {
    augmented = cost_augment(scores_in, *cost);
    sp = &augmented;
  }
  const ScoreTables& s = *sp;
  const int n = s.n;

  // alpha(i, j, h): best headed span, h in [i, j]; includes span_c(i, j)
  // and, second order, span2o(i, j, h).
  // beta(i, j, hp): best hooked span, hp outside [i, j]; alpha plus the arc
  // hp -> head and, second order, span2o(i, j, hp).
  Cube<Scalar> alpha(n + 1, kNegInf), beta(n + 1, kNegInf);
  Cube<int> alpha_bp(n + 1, -1), beta_bp(n + 1, -1);

  std::vector<Scalar> best(n + 1);
  std::vector<int> best_k(n + 1);

  for (int w = 0; w < n; ++w) {
    for (int i = 1; i + w <= n; ++i) {
      const int j = i + w;
      if (w == 0) {
        alpha(i, i, i) =
            s.span_c(i, i) + second_order_or_zero(s, second_order, i, i, i);
      } else {
        std::fill(best.begin() + i, best.begin() + j + 1, kNegInf);
        std::fill(best_k.begin() + i, best_k.begin() + j + 1, -1);
        for (int k = i; k < j; ++k) {
          // head inside the left part, right part hooks onto it
          for (int h = i; h <= k; ++h) {
            const Scalar v = alpha(i, k, h) + beta(k + 1, j, h);
            if (v > best[h]) {
              best[h] = v;
              best_k[h] = k;
            }
          }
          // head inside the right part
          for (int h = k + 1; h <= j; ++h) {
            const Scalar v = beta(i, k, h) + alpha(k + 1, j, h);
            if (v > best[h]) {
              best[h] = v;
              best_k[h] = k;
            }
          }
        }
        const Scalar base = s.span_c(i, j);
        for (int h = i; h <= j; ++h) {
          alpha(i, j, h) =
              base + best[h] + second_order_or_zero(s, second_order, i, j, h);
          alpha_bp(i, j, h) = best_k[h];
        }
      }
      // hooked items: attach the span head to every word outside [i, j]
      for (int hp = 0; hp <= n; ++hp) {
        if (hp >= i && hp <= j) continue;
        Scalar b = kNegInf;
        int arg = -1;
        for (int h = i; h <= j; ++h) {
          const Scalar v = alpha(i, j, h) + s.arc_d(hp, h);
          if (v > b) {
            b = v;
            arg = h;
          }
        }
        beta(i, j, hp) =
            b + second_order_or_zero(s, second_order, i, j, hp);
        beta_bp(i, j, hp) = arg;
      }
    }
  }

  DecodeResult result;
  result.score = beta(1, n, 0);

  // recover the tree by walking the backpointers
  struct Walker {
    const Cube<int>& alpha_bp;
    const Cube<int>& beta_bp;
    LTree& tree;

    void expand_alpha(int i, int j, int h) {
      tree.spans.push_back({i, j, h, ""});
      if (i == j) return;
      const int k = alpha_bp(i, j, h);
      if (h <= k) {
        expand_alpha(i, k, h);
        expand_beta(k + 1, j, h);
      } else {
        expand_beta(i, k, h);
        expand_alpha(k + 1, j, h);
      }
    }
    void expand_beta(int i, int j, int hp) {
      expand_alpha(i, j, beta_bp(i, j, hp));
    }
  };
  Walker walker{alpha_bp, beta_bp, result.tree};
  walker.expand_beta(1, n, 0);
  result.tree.normalize();
  return result;
}

Scalar score_ltree(const ScoreTables& scores, const LTree& tree,
                   bool second_order) {
  if (tree.length() > scores.n || tree.length() < 1) {
    fail(errc::length_mismatch,
         "tree length " + std::to_string(tree.length()) +
             " does not match tables for n=" + std::to_string(scores.n));
  }
  Scalar total = 0;
  for (const auto& sp : tree.spans) {
    total += scores.span_c(sp.left, sp.right);
    if (second_order) total += scores.span2o(sp.left, sp.right, sp.head);
  }
  for (const auto& arc : tree.arcs()) {
    total += scores.arc_d(arc.head, arc.mod);
  }
  if (second_order) {
    for (const auto& hooked : tree.hooked_spans()) {
      total += scores.span2o(hooked.left, hooked.right, hooked.head);
    }
  }
  return total;
}

std::pair<std::vector<std::pair<int, int>>, Scalar> cky(
    const Eigen::MatrixXd& span_c, int n) {
  if (n < 1) fail(errc::empty_sentence, "cannot decode an empty sentence");
  Eigen::MatrixXd chart = Eigen::MatrixXd::Constant(n + 1, n + 1, kNegInf);
  Eigen::MatrixXi bp = Eigen::MatrixXi::Constant(n + 1, n + 1, -1);
  for (int w = 0; w < n; ++w) {
    for (int i = 1; i + w <= n; ++i) {
      const int j = i + w;
      if (w == 0) {
        chart(i, i) = span_c(i, i);
        continue;
      }
      Scalar best = kNegInf;
      int arg = -1;
      for (int k = i; k < j; ++k) {
        const Scalar v = chart(i, k) + chart(k + 1, j);
        if (v > best) {
          best = v;
          arg = k;
        }
      }
      chart(i, j) = best + span_c(i, j);
      bp(i, j) = arg;
    }
  }
  std::vector<std::pair<int, int>> spans;
  const std::function<void(int, int)> rec = [&](int i, int j) {
    spans.push_back({i, j});
    if (i == j) return;
    rec(i, bp(i, j));
    rec(bp(i, j) + 1, j);
  };
  rec(1, n);
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, b.second) < std::tie(b.first, a.second);
  });
  return {spans, chart(1, n)};
}

std::pair<DTree, Scalar> eisner(const Eigen::MatrixXd& arc_d, int n) {
  if (n < 1) fail(errc::empty_sentence, "cannot decode an empty sentence");
  // comp_r(i, j): head i covers i..j with all right dependents attached
  // comp_l(i, j): head j covers i..j
  // inc_r(i, j): arc i -> j covering i..j; inc_l(i, j): arc j -> i
  Eigen::MatrixXd comp_r = Eigen::MatrixXd::Constant(n + 1, n + 1, kNegInf);
  Eigen::MatrixXd comp_l = comp_r, inc_r = comp_r, inc_l = comp_r;
  Eigen::MatrixXi bcr = Eigen::MatrixXi::Constant(n + 1, n + 1, -1);
  Eigen::MatrixXi bcl = bcr, bir = bcr, bil = bcr;
  for (int i = 1; i <= n; ++i) {
    comp_r(i, i) = 0;
    comp_l(i, i) = 0;
  }
  for (int w = 1; w < n; ++w) {
    for (int i = 1; i + w <= n; ++i) {
      const int j = i + w;
      for (int k = i; k < j; ++k) {
        const Scalar inner = comp_r(i, k) + comp_l(k + 1, j);
        if (inner + arc_d(i, j) > inc_r(i, j)) {
          inc_r(i, j) = inner + arc_d(i, j);
          bir(i, j) = k;
        }
        if (inner + arc_d(j, i) > inc_l(i, j)) {
          inc_l(i, j) = inner + arc_d(j, i);
          bil(i, j) = k;
        }
      }
      for (int k = i + 1; k <= j; ++k) {
        const Scalar v = inc_r(i, k) + comp_r(k, j);
        if (v > comp_r(i, j)) {
          comp_r(i, j) = v;
          bcr(i, j) = k;
        }
      }
      for (int k = i; k < j; ++k) {
        const Scalar v = comp_l(i, k) + inc_l(k, j);
        if (v > comp_l(i, j)) {
          comp_l(i, j) = v;
          bcl(i, j) = k;
        }
      }
    }
  }

  Scalar best = kNegInf;
  int root = -1;
  for (int r = 1; r <= n; ++r) {
    const Scalar v = arc_d(0, r) + comp_l(1, r) + comp_r(r, n);
    if (v > best) {
      best = v;
      root = r;
    }
  }

  DTree tree(n);
  struct Walker {
    const Eigen::MatrixXi &bcr, &bcl, &bir, &bil;
    DTree& tree;
    void comp_right(int i, int j) {
      if (i == j) return;
      const int k = bcr(i, j);
      inc_right(i, k);
      comp_right(k, j);
    }
    void comp_left(int i, int j) {
      if (i == j) return;
      const int k = bcl(i, j);
      comp_left(i, k);
      inc_left(k, j);
    }
    void inc_right(int i, int j) {
      tree.heads[j] = i;
      const int k = bir(i, j);
      comp_right(i, k);
      comp_left(k + 1, j);
    }
    void inc_left(int i, int j) {
      tree.heads[i] = j;
      const int k = bil(i, j);
      comp_right(i, k);
      comp_left(k + 1, j);
    }
  };
  Walker walker{bcr, bcl, bir, bil, tree};
  tree.heads[root] = 0;
  walker.comp_left(1, root);
  walker.comp_right(root, n);
  return {tree, best};
}

void enumerate_ltrees(int n, const std::function<void(const LTree&)>& visit) {
  if (n < 1) fail(errc::empty_sentence, "need at least one word");
  if (n > 8) {
    fail(errc::too_large,
         "enumeration is capped at 8 words, got " + std::to_string(n));
  }
  std::vector<LexSpan> acc;
  // continuation-passing enumeration: rec(i, j, k) builds every sub-tree
  // over [i, j], pushes its spans onto acc and hands the sub-tree head to k
  std::function<void(int, int, const std::function<void(int)>&)> rec =
      [&](int i, int j, const std::function<void(int)>& k) {
        if (i == j) {
          acc.push_back({i, i, i, ""});
          k(i);
          acc.pop_back();
          return;
        }
        for (int split = i; split < j; ++split) {
          rec(i, split, [&, split](int lh) {
            rec(split + 1, j, [&, lh](int rh) {
              for (const int h : {lh, rh}) {
                acc.push_back({i, j, h, ""});
                k(h);
                acc.pop_back();
              }
            });
          });
        }
      };
  rec(1, n, [&](int) {
    LTree t;
    t.spans = acc;
    t.normalize();
    visit(t);
  });
}

long count_ltrees(int n) {
  if (n < 1) fail(errc::empty_sentence, "need at least one word");
  // Catalan(n-1) binary shapes, 2^(n-1) head choices
  const int m = n - 1;
  long binom = 1;  // C(m+k, k) after step k, each division exact
  for (int k = 1; k <= m; ++k) {
    binom = binom * (m + k) / k;
  }
  return (binom / (m + 1)) << m;
}

DecodeResult brute_force_argmax(const ScoreTables& scores, bool second_order,
                                const CostConfig* cost) {
  if (scores.n < 1) fail(errc::empty_sentence, "cannot decode an empty sentence");
  ScoreTables augmented;
  const ScoreTables* sp = &scores;
  if (cost != nullptr) {
    augmented = cost_augment(scores, *cost);
    sp = &augmented;
  }
  const ScoreTables& s = *sp;

  auto span_key = [](const LTree& t) {
    std::vector<std::tuple<int, int, int>> key;
    key.reserve(t.spans.size());
    for (const auto& sp_ : t.spans) {
      key.emplace_back(sp_.left, sp_.right, sp_.head);
    }
    return key;
  };

  DecodeResult best;
  best.score = kNegInf;
  auto best_key = span_key(best.tree);
  enumerate_ltrees(s.n, [&](const LTree& t) {
    const Scalar v = score_ltree(s, t, second_order);
    if (v > best.score) {
      best = {t, v};
      best_key = span_key(t);
    } else if (v == best.score) {
      auto key = span_key(t);
      if (key < best_key) {
        best = {t, v};
        best_key = std::move(key);
      }
    }
  });
  return best;
}

}  // namespace jparse
