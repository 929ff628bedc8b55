#include "jparse/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "jparse/decode.hpp"

namespace jparse {

namespace {

// +-1 indicators for every table entry the tree's score reads
void accumulate_tree(const LTree& tree, double sign, bool second_order,
                     ScoreTables& g) {
  for (const LexSpan& s : tree.spans) {
    g.span_c(s.left, s.right) += sign;
    if (second_order) g.span2o(s.left, s.right, s.head) += sign;
  }
  for (const Arc& a : tree.arcs()) g.arc_d(a.head, a.mod) += sign;
  if (second_order) {
    for (const LexSpan& s : tree.hooked_spans()) {
      g.span2o(s.left, s.right, s.head) += sign;
    }
  }
}

// cross-entropy of one score row against a target id; adds the softmax
// residual into the matching gradient row
double ce_row(const Eigen::MatrixXd& scores, Eigen::MatrixXd& grads, int row,
              int target) {
  const Eigen::ArrayXd logits = scores.row(row).transpose().array();
  const double mx = logits.maxCoeff();
  const Eigen::ArrayXd ex = (logits - mx).exp();
  const double z = ex.sum();
  grads.row(row) += (ex / z).matrix().transpose();
  grads(row, target) -= 1.0;
  return std::log(z) + mx - logits(target);
}

int label_target(const LexSpan& span, const Vocab& labels) {
  const bool intermediate =
      !span.label.empty() && span.label.back() == '*';
  const std::string& name = intermediate ? kNullLabel : span.label;
  const int id = labels.find(name);
  if (id < 0) {
    fail(errc::unknown_label,
         "constituent label '" + name + "' is not in the vocabulary");
  }
  return id;
}

}  // namespace

TrainInstance make_instance(const Sentence& sentence, const CTree& ctree,
                            const DTree& dtree) {
  if (sentence.size() != dtree.size()) {
    fail(errc::length_mismatch,
         "sentence has " + std::to_string(sentence.size()) +
             " tokens, dependency tree has " + std::to_string(dtree.size()));
  }
  TrainInstance inst;
  inst.sentence = sentence;
  inst.gold = build_ltree(head_binarize(ctree, dtree), dtree);
  inst.deps = dtree;
  return inst;
}

CorpusVocabs collect_vocabs(const std::vector<TrainInstance>& corpus) {
  CorpusVocabs v;
  v.tokens = base_token_vocab();
  v.labels.add(kNullLabel);
  for (const TrainInstance& inst : corpus) {
    for (const std::string& tok : inst.sentence.tokens) v.tokens.add(tok);
    for (const LexSpan& s : inst.gold.spans) {
      if (!s.label.empty() && s.label.back() == '*') continue;
      v.labels.add(s.label);
    }
    for (int m = 1; m <= inst.deps.size(); ++m) {
      if (m < static_cast<int>(inst.deps.rels.size())) {
        v.rels.add(inst.deps.rels[m]);
      }
    }
  }
  return v;
}

HingeResult hinge_loss(const ScoreTables& scores, const LTree& gold,
                       bool second_order, Scalar span_cost, Scalar arc_cost) {
  if (gold.length() != scores.n) {
    fail(errc::length_mismatch,
         "reference tree covers " + std::to_string(gold.length()) +
             " words, score tables cover " + std::to_string(scores.n));
  }
  const CostConfig cost{gold, span_cost, arc_cost};
  HingeResult out;
  out.best = eisner_satta(scores, second_order, &cost).tree;
  out.grads = ScoreTables(scores.n, second_order);

  // Re-scoring both trees through score_ltree keeps the margin exactly zero
  // whenever the augmented argmax returns the reference itself; the chart's
  // own accumulation order would leave rounding residue.
  const Scalar best_score =
      score_ltree(cost_augment(scores, cost), out.best, second_order);
  const Scalar gold_score = score_ltree(scores, gold, second_order);
  const double margin = best_score - gold_score;
  if (margin > 0) {
    out.loss = margin;
    accumulate_tree(out.best, 1.0, second_order, out.grads);
    accumulate_tree(gold, -1.0, second_order, out.grads);
  }
  return out;
}

LabelResult label_loss(const LabelScores& scores, const LTree& gold,
                       const DTree& deps, const Vocab& labels,
                       const Vocab& rels) {
  const int n = gold.length();
  if (scores.n != n || deps.size() != n) {
    fail(errc::length_mismatch,
         "label scores, reference tree and dependency tree disagree on the "
         "sentence length");
  }
  if (static_cast<int>(deps.rels.size()) != n + 1) {
    fail(errc::length_mismatch,
         "dependency relations are required for the label loss");
  }

  LabelResult out;
  out.grads = zero_label_grads(n, static_cast<int>(scores.con.cols()),
                               static_cast<int>(scores.rel.cols()));
  for (const LexSpan& s : gold.spans) {
    out.loss += ce_row(scores.con, out.grads.con,
                       scores.con_row(s.left, s.right),
                       label_target(s, labels));
  }
  for (int m = 1; m <= n; ++m) {
    const int target = rels.find(deps.rels[m]);
    if (target < 0) {
      fail(errc::unknown_label,
           "relation '" + deps.rels[m] + "' is not in the vocabulary");
    }
    out.loss += ce_row(scores.rel, out.grads.rel,
                       scores.rel_row(deps.heads[m], m), target);
  }
  return out;
}

std::vector<LossReport> train(
    Model& model, const std::vector<TrainInstance>& corpus,
    const TrainConfig& cfg,
    const std::function<void(const LossReport&)>& on_epoch) {
  if (corpus.empty()) fail(errc::empty_corpus, "training corpus is empty");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.lr > 0.0)) {
    fail(errc::io_error,
         "learning rate, epochs and batch_size must all be positive");
  }

  const bool second = model.config().second_order;
  Rng rng(cfg.seed);
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(model.num_params());
  Eigen::VectorXd grad(model.num_params());
  std::vector<LossReport> reports;
  reports.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    LossReport rep;
    rep.epoch = epoch;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      grad.setZero();
      long batch_tokens = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const TrainInstance& inst = corpus[order[k]];
        Tape tape = model.forward(inst.sentence);
        HingeResult hinge = hinge_loss(tape.tables, inst.gold, second,
                                       cfg.span_cost, cfg.arc_cost);
        LabelResult label = label_loss(tape.labels, inst.gold, inst.deps,
                                       model.label_vocab(), model.rel_vocab());
        if (cfg.label_weight != 1.0) {
          label.grads.con *= cfg.label_weight;
          label.grads.rel *= cfg.label_weight;
        }
        model.backward(tape, hinge.loss > 0 ? &hinge.grads : nullptr,
                       &label.grads, grad);
        rep.bracket_loss += hinge.loss;
        rep.label_loss += cfg.label_weight * label.loss;
        batch_tokens += inst.sentence.size();
      }
      grad /= static_cast<double>(batch_tokens);
      if (cfg.weight_decay != 0.0) grad += cfg.weight_decay * model.params();
      velocity = cfg.momentum * velocity - cfg.lr * grad;
      model.apply_delta(velocity);
      rep.tokens += batch_tokens;
    }
    rep.bracket_loss /= static_cast<double>(rep.tokens);
    rep.label_loss /= static_cast<double>(rep.tokens);
    if (on_epoch) on_epoch(rep);
    reports.push_back(rep);
  }
  return reports;
}

Prediction predict(const Model& model, const Sentence& sentence) {
  Tape tape = model.forward(sentence);
  const int n = tape.n;
  const Vocab& labels = model.label_vocab();
  const Vocab& rels = model.rel_vocab();
  const int null_id = labels.find(kNullLabel);

  Prediction out;
  out.ltree = eisner_satta(tape.tables, model.config().second_order).tree;
  for (LexSpan& s : out.ltree.spans) {
    const int row = tape.labels.con_row(s.left, s.right);
    // the sentence span keeps a real label so the tree retains its root
    const bool mask_null = (s.left == 1 && s.right == n) && null_id >= 0;
    int best = -1;
    double best_score = 0;
    for (int l = 0; l < labels.size(); ++l) {
      if (mask_null && l == null_id) continue;
      if (best < 0 || tape.labels.con(row, l) > best_score) {
        best = l;
        best_score = tape.labels.con(row, l);
      }
    }
    s.label = labels.items[static_cast<std::size_t>(best)];
  }
  out.ctree = ltree_to_ctree(out.ltree);
  out.dtree = ltree_to_dtree(out.ltree);
  out.dtree.rels.assign(static_cast<std::size_t>(n) + 1, std::string());
  for (int m = 1; m <= n; ++m) {
    const int row = tape.labels.rel_row(out.dtree.heads[m], m);
    Eigen::Index best = 0;
    tape.labels.rel.row(row).maxCoeff(&best);
    out.dtree.rels[static_cast<std::size_t>(m)] =
        rels.items[static_cast<std::size_t>(best)];
  }
  return out;
}

}  // namespace jparse
