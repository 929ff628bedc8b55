#pragma once
// File formats: bracketed constituency trees, CoNLL-X dependency rows, and
// the lexicalized dump produced by the convert command. Readers are strict
// about structure (balanced parens, column counts, treeness) and report the
// offending location; writers emit one canonical line per sentence.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jparse/trees.hpp"

namespace jparse {

// -------- bracketed constituency files --------

// Parses every tree in the file. POS pre-terminals are stored in
// Sentence.pos and dropped from the tree, function tags after "-" or "="
// are stripped (tags that start with "-", like -LRB-, are kept whole),
// "-NONE-" subtrees are removed with word positions renumbered, and unary
// chains collapse into "::"-joined labels.
std::vector<std::pair<Sentence, CTree>> read_brackets(const std::string& path);
std::vector<std::pair<Sentence, CTree>> read_brackets_text(
    const std::string& text, const std::string& name = "<memory>");

// Canonical single-line form with pre-terminals reinserted and "::" chains
// expanded back into nested unaries. Missing POS tags are written as "_".
std::string bracket_line(const Sentence& sentence, const CTree& ctree);
void write_brackets(const std::string& path,
                    const std::vector<std::pair<Sentence, CTree>>& trees);

// -------- CoNLL-X dependency files --------

// 10 whitespace-separated columns per row, blank line between sentences.
// Reads ID/FORM/POSTAG/HEAD/DEPREL (CPOSTAG fills in when POSTAG is "_");
// validates ids, head range, single-rootedness and treeness. Projectivity
// is not enforced here; check_compatibility reports it per instance.
std::vector<std::pair<Sentence, DTree>> read_conllx(const std::string& path);
std::vector<std::pair<Sentence, DTree>> read_conllx_text(
    const std::string& text, const std::string& name = "<memory>");

std::string conllx_block(const Sentence& sentence, const DTree& dtree);
void write_conllx(const std::string& path,
                  const std::vector<std::pair<Sentence, DTree>>& trees);

// -------- joint corpora --------

struct JointInstance {
  Sentence sentence;  // tokens and POS from the bracket side
  CTree ctree;        // n-ary, unary chains collapsed
  DTree dtree;        // relations as read
  CompatReport compat;
};

struct CorpusStats {
  long sentences = 0;
  long compatible = 0;
  // per-label / per-relation occurrence counts, key-sorted
  std::map<std::string, long> label_freq;
  std::map<std::string, long> rel_freq;

  double percent() const {
    return sentences == 0 ? 0.0 : 100.0 * compatible / sentences;
  }
  std::string summary() const;  // "18/20 (90.0%)"
};

struct PairedCorpus {
  std::vector<JointInstance> instances;
  CorpusStats stats;
};

// Positional pairing of a bracket file with a CoNLL-X file. Token sequences
// must match exactly per sentence; POS tags may differ (the bracket side
// wins). Empty inputs raise EMPTY_CORPUS.
PairedCorpus pair_and_audit(const std::string& bracket_path,
                            const std::string& conllx_path);

std::vector<JointInstance> filter_compatible(
    const std::vector<JointInstance>& instances);

// -------- lexicalized tree dumps --------

// One tree per line, every span written as "(label[head] ...)" with bare
// words at the leaves, e.g. (S[2] (NP[1] Logic) (VP[2] ...)). POS tags and
// relation names are not part of the encoding, so a recovered corpus
// carries "_" in those slots.
std::string ltree_line(const Sentence& sentence, const LTree& ltree);
void write_ltrees(const std::string& path,
                  const std::vector<std::pair<Sentence, LTree>>& trees);
std::vector<std::pair<Sentence, LTree>> read_ltrees(const std::string& path);
std::vector<std::pair<Sentence, LTree>> read_ltrees_text(
    const std::string& text, const std::string& name = "<memory>");

}  // namespace jparse
