#include "jparse/tables.hpp"

#include <cmath>
#include <set>

namespace jparse {

void ScoreTables::require_finite() const {
  if (!span_c.allFinite() || !arc_d.allFinite()) {
    fail(errc::invalid_score, "non-finite entry in score tables");
  }
  if (!span2o.empty()) {
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        if (!span2o.slice(i, j, 0, n + 1).isFinite().all()) {
          fail(errc::invalid_score, "non-finite entry in span2o");
        }
      }
    }
  }
}

ScoreTables random_tables(int n, bool second_order, Rng& rng, double lo,
                          double hi) {
  ScoreTables t(n, second_order);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      t.span_c(i, j) = rng.uniform(lo, hi);
    }
  }
  for (int h = 0; h <= n; ++h) {
    for (int m = 1; m <= n; ++m) {
      if (h != m) t.arc_d(h, m) = rng.uniform(lo, hi);
    }
  }
  if (second_order) {
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        for (int h = 0; h <= n; ++h) {
          t.span2o(i, j, h) = rng.uniform(lo, hi);
        }
      }
    }
  }
  return t;
}

ScoreTables cost_augment(const ScoreTables& scores, const CostConfig& cost) {
  if (cost.reference.length() != scores.n) {
    fail(errc::length_mismatch,
         "reference tree length " + std::to_string(cost.reference.length()) +
             " does not match tables for n=" + std::to_string(scores.n));
  }
  ScoreTables out = scores;
  std::set<std::pair<int, int>> ref_spans;
  for (const auto& s : cost.reference.spans) {
    ref_spans.insert({s.left, s.right});
  }
  const DTree ref_d = ltree_to_dtree(cost.reference);
  for (int i = 1; i <= scores.n; ++i) {
    for (int j = i; j <= scores.n; ++j) {
      if (!ref_spans.count({i, j})) out.span_c(i, j) += cost.span_cost;
    }
  }
  for (int m = 1; m <= scores.n; ++m) {
    for (int h = 0; h <= scores.n; ++h) {
      if (h != m && h != ref_d.heads[m]) out.arc_d(h, m) += cost.arc_cost;
    }
  }
  return out;
}

}  // namespace jparse
