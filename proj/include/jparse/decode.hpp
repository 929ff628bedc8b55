// Chart decoders: the joint constituency/dependency argmax and the two
// single-formalism baselines used for cross-checks.
#pragma once

#include <functional>
#include <utility>

#include "jparse/tables.hpp"
#include "jparse/trees.hpp"

namespace jparse {

struct DecodeResult {
  LTree tree;  // unlabeled
  Scalar score = 0;
};

// Joint argmax over lexicalized trees, O(n^4) time / O(n^3) space.
// Maximizes the sum of span_c over the 2n-1 spans and arc_d over the n arcs;
// with second_order it adds span2o(i, j, head) for every span and
// span2o(i, j, governor) for every span whose head attaches outside.
// Passing cost decodes under cost-augmented scores.
DecodeResult eisner_satta(const ScoreTables& scores, bool second_order,
                          const CostConfig* cost = nullptr);

// Score an existing tree under the same objective.
Scalar score_ltree(const ScoreTables& scores, const LTree& tree,
                   bool second_order);

// Best binary bracketing under span scores alone, O(n^3).
std::pair<std::vector<std::pair<int, int>>, Scalar> cky(
    const Eigen::MatrixXd& span_c, int n);

// Best projective single-root dependency tree under arc scores alone, O(n^3).
std::pair<DTree, Scalar> eisner(const Eigen::MatrixXd& arc_d, int n);

// Exhaustive enumeration of the (2n-2 choose n-1)/n * 2^(n-1) lexicalized
// trees over n words; n is capped at 8. Trees arrive in a deterministic
// order with normalized span lists.
void enumerate_ltrees(int n, const std::function<void(const LTree&)>& visit);
long count_ltrees(int n);

// Enumeration-based argmax under the identical objective; ties broken by
// lexicographic span order. The reference oracle for eisner_satta.
DecodeResult brute_force_argmax(const ScoreTables& scores, bool second_order,
                                const CostConfig* cost = nullptr);

}  // namespace jparse
