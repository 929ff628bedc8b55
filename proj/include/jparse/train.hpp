#pragma once
// Two-stage training: structured hinge on the lexicalized bracketing plus
// per-item cross-entropy on labels, optimized with minibatch SGD. Batch
// gradients are divided by the total token count of the batch.

#include <functional>
#include <vector>

#include "jparse/model.hpp"
#include "jparse/tables.hpp"
#include "jparse/trees.hpp"

namespace jparse {

// one training instance: the labeled binarized l-tree ("*" spans keep their
// intermediate labels and train the NULL class) plus the relation targets
struct TrainInstance {
  Sentence sentence;
  LTree gold;
  DTree deps;
};

// binarizes and encodes a compatible (c, d) pair
TrainInstance make_instance(const Sentence& sentence, const CTree& ctree,
                            const DTree& dtree);

// Vocabularies induced by a training corpus: tokens plus the reserved
// entries, constituent labels with intermediate spans mapped to the NULL
// label, and relation names. Order follows first occurrence.
struct CorpusVocabs {
  Vocab tokens;
  Vocab labels;
  Vocab rels;
};
CorpusVocabs collect_vocabs(const std::vector<TrainInstance>& corpus);

struct TrainConfig {
  int epochs = 200;
  int batch_size = 8;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;
  double label_weight = 1.0;
  Scalar span_cost = 1.0;
  Scalar arc_cost = 1.0;
  std::uint64_t seed = 1;
};

struct LossReport {
  int epoch = 0;
  double bracket_loss = 0;  // epoch mean per token
  double label_loss = 0;    // epoch mean per token, label_weight applied
  long tokens = 0;
  double total() const { return bracket_loss + label_loss; }
};

struct HingeResult {
  double loss = 0;
  ScoreTables grads;  // +1 on predicted-only parts, -1 on gold-only parts
  LTree best;         // the cost-augmented argmax
};

// Cost-augmented structured hinge for one sentence. Labels on the gold tree
// are ignored; only its spans and induced arcs matter.
HingeResult hinge_loss(const ScoreTables& scores, const LTree& gold,
                       bool second_order, Scalar span_cost = 1.0,
                       Scalar arc_cost = 1.0);

struct LabelResult {
  double loss = 0;
  LabelScores grads;
};

// Softmax cross-entropy over every gold span's label (intermediate "*"
// spans target the NULL label) and every gold arc's relation.
LabelResult label_loss(const LabelScores& scores, const LTree& gold,
                       const DTree& deps, const Vocab& labels,
                       const Vocab& rels);

// Minibatch SGD with momentum. Deterministic for a fixed seed; the shuffle
// stream and all arithmetic are platform-stable.
std::vector<LossReport> train(
    Model& model, const std::vector<TrainInstance>& corpus,
    const TrainConfig& cfg,
    const std::function<void(const LossReport&)>& on_epoch = nullptr);

struct Prediction {
  CTree ctree;
  DTree dtree;
  LTree ltree;  // labeled, before debinarization
};

// Stage 1 decodes the best l-tree, stage 2 labels it. The NULL label is
// masked at the full-sentence span so the c-tree always has a root node.
Prediction predict(const Model& model, const Sentence& sentence);

}  // namespace jparse
