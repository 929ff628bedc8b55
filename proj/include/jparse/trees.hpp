// Constituency trees, dependency trees and their joint lexicalized encoding.
//
// Conventions used throughout:
//   - words are numbered 1..n, position 0 is the synthetic root
//   - an n-ary constituency tree stores unary chains collapsed into a single
//     constituent whose label joins the chain members with "::" (top first),
//     so (i,j) pairs are unique within a tree
//   - binarized trees additionally contain intermediate constituents labeled
//     "<base>*"; those are erased when converting back to n-ary form
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jparse/common.hpp"

namespace jparse {

// Label used for spans that must disappear at debinarization time. Gold
// intermediate "<base>*" spans map to it in the label vocabulary, and the
// labeler may predict it for spans the final tree should not contain.
inline constexpr const char* kNullLabel = "-NULL-";

struct Sentence {
  std::vector<std::string> tokens;  // tokens[k] is word k+1
  std::vector<std::string> pos;     // aligned POS tags, may be empty

  int size() const { return static_cast<int>(tokens.size()); }
};

struct Constituent {
  int left = 0;
  int right = 0;
  std::string label;

  friend bool operator==(const Constituent&, const Constituent&) = default;
};

// Canonical order: outer spans before inner ones, so a stack-based walk
// rebuilds the nesting.
bool span_before(const Constituent& a, const Constituent& b);

struct CTree {
  std::vector<Constituent> constituents;
  bool binarized = false;

  // sentence length, derived from the mandatory full span (1, n)
  int length() const;
  void normalize();  // sort into canonical order
  friend bool operator==(const CTree&, const CTree&) = default;
};

struct Arc {
  int head = 0;  // 0 is the root
  int mod = 0;
  std::string rel;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct DTree {
  // heads[m] for m in 1..n; heads[0] is a -1 sentinel
  std::vector<int> heads;
  // rels[m] aligned with heads, empty vector when unlabeled
  std::vector<std::string> rels;

  explicit DTree(int n = 0)
      : heads(static_cast<std::size_t>(n) + 1, -1) {}
  DTree(std::vector<int> h, std::vector<std::string> r = {})
      : heads(std::move(h)), rels(std::move(r)) {}

  int size() const { return static_cast<int>(heads.size()) - 1; }
  friend bool operator==(const DTree&, const DTree&) = default;
};

// Convenience: build a DTree from 0-based input [head_of_word1, ...].
DTree make_dtree(const std::vector<int>& heads_of_words,
                 const std::vector<std::string>& rels_of_words = {});

struct LexSpan {
  int left = 0;
  int right = 0;
  int head = 0;          // word position in [left, right]
  std::string label;     // empty when unlabeled

  friend bool operator==(const LexSpan&, const LexSpan&) = default;
};

// A lexicalized tree: 2n-1 spans forming a binary tree over words 1..n, each
// annotated with the single word that links past its boundary.
struct LTree {
  std::vector<LexSpan> spans;

  int length() const;
  void normalize();
  // arcs induced by the head annotations, including the root arc (0, h)
  std::vector<Arc> arcs() const;
  // (left, right, governor) triples for spans whose head attaches outside,
  // i.e. every non-head child plus the full span governed by the root
  std::vector<LexSpan> hooked_spans() const;
  friend bool operator==(const LTree&, const LTree&) = default;
};

enum class CompatReason { multi_head, non_projective };

struct CompatOffense {
  Constituent span;
  std::vector<int> linked;  // words inside the span with links crossing it
};

struct CompatReport {
  bool compatible = true;
  CompatReason reason = CompatReason::multi_head;  // valid when !compatible
  std::vector<CompatOffense> offending;
};

// All arcs with exactly one endpoint inside [i, j] must attach to the same
// inside word; returns that word, or nullopt when the inside endpoints are
// not unique (or the span has no crossing arc at all, which cannot happen
// for well-formed trees).
std::optional<int> span_head(const DTree& dtree, int i, int j);

// True iff a single word per constituent carries every dependency link that
// crosses the constituent boundary, in either direction, and the dependency
// tree is projective.
CompatReport check_compatibility(const CTree& ctree, const DTree& dtree);

// Convert an n-ary tree into binary form, choosing split points that keep
// every resulting word span single-headed under dtree. Splitting off the
// last child is preferred, then the first child, then interior boundaries
// left to right. Intermediate spans are labeled "<base>*".
CTree head_binarize(const CTree& ctree, const DTree& dtree);

// Annotate each span of a binarized tree with its head word.
LTree build_ltree(const CTree& binarized, const DTree& dtree);

// Drop head annotations and erase "*" / null-labeled spans.
CTree ltree_to_ctree(const LTree& ltree);

// Read the dependency structure off the head annotations (unlabeled).
DTree ltree_to_dtree(const LTree& ltree);

// Every arc's inner words are descendants of the arc's head. Tolerates
// malformed head vectors (returns false instead of looping).
bool is_projective(const DTree& dtree);

// Exactly one root, every word reaches it.
bool is_tree(const DTree& dtree);

}  // namespace jparse
