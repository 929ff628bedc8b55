#pragma once
// Parsing metrics: attachment accuracy with punctuation omitted, labeled
// constituent precision/recall/F1, and sentence-level labeled complete
// match. Corpus values aggregate raw counts, never per-sentence percentages.

#include <set>
#include <string>
#include <vector>

#include "jparse/treebank.hpp"
#include "jparse/trees.hpp"

namespace jparse {

// , . : `` '' -LRB- -RRB-
const std::set<std::string>& default_punct_tags();

// true for tokens whose gold POS tag is in the set
std::vector<bool> punct_mask(const Sentence& sentence,
                             const std::set<std::string>& punct_tags);

struct Ratio {
  long hits = 0;
  long total = 0;

  // an empty denominator reports 100.0 and sets the vacuous flag
  bool vacuous() const { return total == 0; }
  double percent() const {
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(hits) / total;
  }
  Ratio& operator+=(const Ratio& o) {
    hits += o.hits;
    total += o.total;
    return *this;
  }
};

struct AttachmentCounts {
  Ratio uas;
  Ratio las;
};

// head / head+relation accuracy over non-punctuation tokens
AttachmentCounts attachment_scores(const DTree& pred, const DTree& gold,
                                   const std::vector<bool>& punct);

struct PrfCounts {
  long matched = 0;
  long predicted = 0;
  long gold = 0;

  bool vacuous() const { return predicted == 0 && gold == 0; }
  double precision() const {
    return predicted == 0 ? 100.0 : 100.0 * static_cast<double>(matched) / predicted;
  }
  double recall() const {
    return gold == 0 ? 100.0 : 100.0 * static_cast<double>(matched) / gold;
  }
  double f1() const;  // harmonic mean of the percentages, 0 when both are 0
  PrfCounts& operator+=(const PrfCounts& o) {
    matched += o.matched;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
};

// Labeled span multiset intersection. "A::B" collapsed labels expand into
// one item per chain member before matching; the root span counts.
PrfCounts constituent_prf(const CTree& pred, const CTree& gold);

struct MatchFlags {
  bool con = false;
  bool dep = false;   // heads and relations over all tokens, punctuation too
  bool both = false;
};

MatchFlags complete_match(const CTree& pred_c, const DTree& pred_d,
                          const CTree& gold_c, const DTree& gold_d);

struct Metrics {
  Ratio uas;
  Ratio las;
  PrfCounts constituents;
  Ratio lcm_con;
  Ratio lcm_dep;
  Ratio lcm_both;

  std::string report() const;  // "key: value (hits/total)" lines
  std::string json() const;    // one machine-readable record
};

// Positionally aligned corpora; gold POS tags drive the punctuation mask.
Metrics evaluate_corpus(const std::vector<JointInstance>& pred,
                        const std::vector<JointInstance>& gold,
                        const std::set<std::string>& punct_tags);

// Fine-grained breakdowns for external plotting: by sentence length, by
// constituent width (words covered), and by dependency length |head - mod|
// with root arcs in their own bucket.
struct BucketTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string tsv() const;
};

std::vector<BucketTable> bucket_reports(
    const std::vector<JointInstance>& pred,
    const std::vector<JointInstance>& gold,
    const std::set<std::string>& punct_tags);

}  // namespace jparse
