#include "jparse/trees.hpp"

#include <algorithm>
#include <tuple>

namespace jparse {

bool span_before(const Constituent& a, const Constituent& b) {
  return std::tie(a.left, b.right, a.label) < std::tie(b.left, a.right, b.label);
}

int CTree::length() const {
  int n = 0;
  for (const auto& c : constituents) n = std::max(n, c.right);
  return n;
}

void CTree::normalize() {
  std::sort(constituents.begin(), constituents.end(), span_before);
}

DTree make_dtree(const std::vector<int>& heads_of_words,
                 const std::vector<std::string>& rels_of_words) {
  DTree d(static_cast<int>(heads_of_words.size()));
  for (std::size_t k = 0; k < heads_of_words.size(); ++k) {
    d.heads[k + 1] = heads_of_words[k];
  }
  if (!rels_of_words.empty()) {
    d.rels.assign(heads_of_words.size() + 1, "");
    for (std::size_t k = 0; k < rels_of_words.size(); ++k) {
      d.rels[k + 1] = rels_of_words[k];
    }
  }
  return d;
}

int LTree::length() const {
  int n = 0;
  for (const auto& s : spans) n = std::max(n, s.right);
  return n;
}

void LTree::normalize() {
  std::sort(spans.begin(), spans.end(), [](const LexSpan& a, const LexSpan& b) {
    return std::tie(a.left, b.right, a.head) < std::tie(b.left, a.right, b.head);
  });
}

namespace {

// parent index per span under canonical order, -1 for the root span
std::vector<int> parent_indices(const std::vector<LexSpan>& sorted) {
  std::vector<int> parent(sorted.size(), -1);
  std::vector<int> stack;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    while (!stack.empty()) {
      const LexSpan& top = sorted[stack.back()];
      if (top.left <= sorted[k].left && sorted[k].right <= top.right &&
          !(top.left == sorted[k].left && top.right == sorted[k].right)) {
        break;
      }
      stack.pop_back();
    }
    parent[k] = stack.empty() ? -1 : stack.back();
    stack.push_back(static_cast<int>(k));
  }
  return parent;
}

}  // namespace

std::vector<Arc> LTree::arcs() const {
  LTree copy = *this;
  copy.normalize();
  const auto parent = parent_indices(copy.spans);
  std::vector<Arc> out;
  for (std::size_t k = 0; k < copy.spans.size(); ++k) {
    const LexSpan& s = copy.spans[k];
    if (parent[k] < 0) {
      out.push_back({0, s.head, ""});
    } else if (copy.spans[parent[k]].head != s.head) {
      out.push_back({copy.spans[parent[k]].head, s.head, ""});
    }
  }
  std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.mod, a.head) < std::tie(b.mod, b.head);
  });
  return out;
}

std::vector<LexSpan> LTree::hooked_spans() const {
  LTree copy = *this;
  copy.normalize();
  const auto parent = parent_indices(copy.spans);
  std::vector<LexSpan> out;
  for (std::size_t k = 0; k < copy.spans.size(); ++k) {
    const LexSpan& s = copy.spans[k];
    if (parent[k] < 0) {
      out.push_back({s.left, s.right, 0, ""});
    } else if (copy.spans[parent[k]].head != s.head) {
      out.push_back({s.left, s.right, copy.spans[parent[k]].head, ""});
    }
  }
  return out;
}

namespace {

// words inside [i, j] with a dependency link crossing the span boundary
std::vector<int> crossing_words(const DTree& d, int i, int j) {
  std::vector<int> out;
  const int n = d.size();
  for (int m = 1; m <= n; ++m) {
    const int h = d.heads[m];
    const bool in_m = i <= m && m <= j;
    const bool in_h = h >= 1 && i <= h && h <= j;
    if (in_m != in_h) out.push_back(in_m ? m : h);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// whether anc is an ancestor of w (or equal); bounded climb so malformed
// head vectors terminate
bool reaches(const DTree& d, int w, int anc) {
  const int n = d.size();
  for (int steps = 0; steps <= n && w >= 1 && w <= n; ++steps) {
    if (w == anc) return true;
    w = d.heads[w];
  }
  return w == anc;
}

}  // namespace

std::optional<int> span_head(const DTree& dtree, int i, int j) {
  const auto linked = crossing_words(dtree, i, j);
  if (linked.size() != 1) return std::nullopt;
  return linked[0];
}

bool is_projective(const DTree& dtree) {
  const int n = dtree.size();
  for (int m = 1; m <= n; ++m) {
    const int h = dtree.heads[m];
    if (h < 0 || h > n) return false;
    if (h == 0) continue;
    const int lo = std::min(h, m);
    const int hi = std::max(h, m);
    for (int w = lo + 1; w < hi; ++w) {
      if (!reaches(dtree, w, h)) return false;
    }
  }
  return true;
}

bool is_tree(const DTree& dtree) {
  const int n = dtree.size();
  if (n < 1) return false;
  int roots = 0;
  for (int m = 1; m <= n; ++m) {
    const int h = dtree.heads[m];
    if (h < 0 || h > n) return false;
    if (h == 0) ++roots;
  }
  if (roots != 1) return false;
  for (int m = 1; m <= n; ++m) {
    if (!reaches(dtree, m, 0)) return false;
  }
  return true;
}

CompatReport check_compatibility(const CTree& ctree, const DTree& dtree) {
  const int n = dtree.size();
  if (ctree.length() != n) {
    fail(errc::length_mismatch,
         "constituency tree covers " + std::to_string(ctree.length()) +
             " words, dependency tree has " + std::to_string(n));
  }
  CompatReport report;
  for (const auto& c : ctree.constituents) {
    auto linked = crossing_words(dtree, c.left, c.right);
    if (linked.size() != 1) {
      report.offending.push_back({c, std::move(linked)});
    }
  }
  if (!report.offending.empty()) {
    report.compatible = false;
    report.reason = CompatReason::multi_head;
    return report;
  }
  if (!is_projective(dtree)) {
    report.compatible = false;
    report.reason = CompatReason::non_projective;
    for (int m = 1; m <= n; ++m) {
      const int h = dtree.heads[m];
      if (h < 1) continue;
      const int lo = std::min(h, m);
      const int hi = std::max(h, m);
      std::vector<int> violators;
      for (int w = lo + 1; w < hi; ++w) {
        if (!reaches(dtree, w, h)) violators.push_back(w);
      }
      if (!violators.empty()) {
        report.offending.push_back({{lo, hi, ""}, std::move(violators)});
      }
    }
  }
  return report;
}

namespace {

struct NaryNode {
  int left = 0;
  int right = 0;
  std::string label;
  // child items in surface order: constituent children point into the node
  // pool, bare words carry their position
  struct Item {
    int left;
    int right;
    int node;  // pool index, or -1 for a bare word
  };
  std::vector<Item> items;
};

struct NaryTree {
  std::vector<NaryNode> pool;
  int root = -1;
};

NaryTree build_nary(const CTree& ctree) {
  std::vector<Constituent> sorted = ctree.constituents;
  std::sort(sorted.begin(), sorted.end(), span_before);
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].left == sorted[k - 1].left &&
        sorted[k].right == sorted[k - 1].right) {
      fail(errc::incompatible,
           "duplicate span (" + std::to_string(sorted[k].left) + ", " +
               std::to_string(sorted[k].right) +
               "); collapse unary chains with \"::\" first");
    }
  }

  NaryTree tree;
  tree.pool.reserve(sorted.size());
  std::vector<int> stack;
  for (const auto& c : sorted) {
    while (!stack.empty()) {
      const NaryNode& top = tree.pool[stack.back()];
      if (top.left <= c.left && c.right <= top.right) break;
      stack.pop_back();
    }
    const int id = static_cast<int>(tree.pool.size());
    tree.pool.push_back({c.left, c.right, c.label, {}});
    if (stack.empty()) {
      if (tree.root >= 0) {
        fail(errc::incompatible, "multiple top-level constituents");
      }
      tree.root = id;
    } else {
      tree.pool[stack.back()].items.push_back({c.left, c.right, id});
    }
    stack.push_back(id);
  }
  if (tree.root < 0) fail(errc::incompatible, "constituency tree is empty");

  // fill the gaps between constituent children with bare words
  for (auto& node : tree.pool) {
    std::vector<NaryNode::Item> merged;
    int pos = node.left;
    for (const auto& child : node.items) {
      if (child.left < pos || child.right > node.right) {
        fail(errc::incompatible, "overlapping constituents");
      }
      for (; pos < child.left; ++pos) merged.push_back({pos, pos, -1});
      merged.push_back(child);
      pos = child.right + 1;
    }
    for (; pos <= node.right; ++pos) merged.push_back({pos, pos, -1});
    node.items = std::move(merged);
  }

  // collapse unary chains: a single constituent child covering the full span
  for (auto& node : tree.pool) {
    while (node.items.size() == 1 && node.items[0].node >= 0 &&
           node.items[0].left == node.left &&
           node.items[0].right == node.right) {
      NaryNode& child = tree.pool[node.items[0].node];
      node.label += "::" + child.label;
      node.items = child.items;
    }
  }
  return tree;
}

class Binarizer {
 public:
  Binarizer(const NaryTree& tree, const DTree& dtree)
      : tree_(tree), dtree_(dtree) {}

  CTree run() {
    emit_node(tree_.root);
    CTree out;
    out.binarized = true;
    out.constituents = std::move(spans_);
    out.normalize();
    return out;
  }

 private:
  bool headed(int left, int right) const {
    return span_head(dtree_, left, right).has_value();
  }

  void emit_node(int id) {
    const NaryNode& node = tree_.pool[id];
    emit_group(node.items, 0, static_cast<int>(node.items.size()) - 1,
               node.label, node.label);
  }

  void emit_group(const std::vector<NaryNode::Item>& items, int lo, int hi,
                  const std::string& label, const std::string& base) {
    const int left = items[lo].left;
    const int right = items[hi].right;
    spans_.push_back({left, right, label});
    if (lo == hi) return;  // leaf word; single-node groups never reach here

    const int split = pick_split(items, lo, hi);
    if (split < 0) {
      fail(errc::incompatible,
           "no split of (" + std::to_string(left) + ", " +
               std::to_string(right) +
               ") keeps both halves single-headed");
    }
    emit_part(items, lo, split, base);
    emit_part(items, split + 1, hi, base);
  }

  void emit_part(const std::vector<NaryNode::Item>& items, int lo, int hi,
                 const std::string& base) {
    if (lo == hi && items[lo].node >= 0) {
      emit_node(items[lo].node);
    } else {
      emit_group(items, lo, hi, base + "*", base);
    }
  }

  // candidate order: split off the last child, then the first child, then
  // interior boundaries left to right
  int pick_split(const std::vector<NaryNode::Item>& items, int lo,
                 int hi) const {
    auto feasible = [&](int s) {
      return headed(items[lo].left, items[s].right) &&
             headed(items[s + 1].left, items[hi].right);
    };
    if (feasible(hi - 1)) return hi - 1;
    if (feasible(lo)) return lo;
    for (int s = lo + 1; s < hi - 1; ++s) {
      if (feasible(s)) return s;
    }
    return -1;
  }

  const NaryTree& tree_;
  const DTree& dtree_;
  std::vector<Constituent> spans_;
};

}  // namespace

CTree head_binarize(const CTree& ctree, const DTree& dtree) {
  if (ctree.length() != dtree.size()) {
    fail(errc::length_mismatch,
         "constituency tree covers " + std::to_string(ctree.length()) +
             " words, dependency tree has " + std::to_string(dtree.size()));
  }
  const NaryTree tree = build_nary(ctree);
  return Binarizer(tree, dtree).run();
}

LTree build_ltree(const CTree& binarized, const DTree& dtree) {
  const int n = dtree.size();
  if (binarized.length() != n) {
    fail(errc::length_mismatch,
         "constituency tree covers " + std::to_string(binarized.length()) +
             " words, dependency tree has " + std::to_string(n));
  }
  if (static_cast<int>(binarized.constituents.size()) != 2 * n - 1) {
    fail(errc::incompatible,
         "expected " + std::to_string(2 * n - 1) +
             " spans in a binarized tree, got " +
             std::to_string(binarized.constituents.size()));
  }
  LTree out;
  out.spans.reserve(binarized.constituents.size());
  for (const auto& c : binarized.constituents) {
    const auto h = span_head(dtree, c.left, c.right);
    if (!h) {
      fail(errc::incompatible,
           "span (" + std::to_string(c.left) + ", " +
               std::to_string(c.right) + ") has no unique head word");
    }
    out.spans.push_back({c.left, c.right, *h, c.label});
  }
  out.normalize();
  return out;
}

CTree ltree_to_ctree(const LTree& ltree) {
  CTree out;
  for (const auto& s : ltree.spans) {
    if (!s.label.empty() && s.label.back() == '*') continue;
    if (s.label == kNullLabel) continue;
    out.constituents.push_back({s.left, s.right, s.label});
  }
  out.normalize();
  return out;
}

DTree ltree_to_dtree(const LTree& ltree) {
  DTree out(ltree.length());
  for (const auto& arc : ltree.arcs()) {
    out.heads[arc.mod] = arc.head;
  }
  return out;
}

}  // namespace jparse
