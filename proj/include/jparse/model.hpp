#pragma once
// Trainable scorer. A small token encoder (embeddings + positions through a
// two-layer feedforward) feeds biaffine heads that fill ScoreTables and
// per-label score tables. All parameters live in one flat vector so the
// optimizer, finite-difference checks, and checkpoints stay trivial.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "jparse/common.hpp"
#include "jparse/tables.hpp"
#include "jparse/trees.hpp"

namespace jparse {

struct Vocab {
  std::vector<std::string> items;
  std::unordered_map<std::string, int> index;

  // inserts if absent, returns the id either way
  int add(const std::string& s);
  // -1 when absent
  int find(const std::string& s) const;
  int size() const { return static_cast<int>(items.size()); }
  bool operator==(const Vocab& o) const { return items == o.items; }
};

inline constexpr int kUnkId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;

// vocabulary pre-seeded with the reserved <unk>/<bos>/<eos> entries
Vocab base_token_vocab();

struct ModelConfig {
  int encoder_dim = 64;    // token vector width; halves act as the two
                           // contextual orientations, so it must be even
  int hidden_dim = 128;    // feedforward hidden width
  int mlp_dim = 100;       // boundary and head/mod vector width
  int span_mlp_dim = 100;  // word and span vector width (second order)
  int max_len = 128;       // position table size, includes bos/eos
  bool second_order = true;
  double init_range = 0.1;
  std::uint64_t seed = 1;
};

struct LabelScores {
  int n = 0;
  // row con_row(i,j) scores constituent (i,j) over every constituent label;
  // row rel_row(h,m) scores arc (h,m) over every relation
  Eigen::MatrixXd con;
  Eigen::MatrixXd rel;

  int con_row(int i, int j) const { return i * (n + 1) + j; }
  int rel_row(int h, int m) const { return h * (n + 1) + m; }
};

// Forward-pass record consumed by backward. A parameter update invalidates
// every outstanding tape.
struct Tape {
  std::uint64_t version = ~std::uint64_t{0};
  int n = 0;
  std::vector<int> ids;  // token ids incl. bos/eos, length n+2

  Eigen::MatrixXd X;  // encoder inputs, one column per position 0..n+1
  Eigen::MatrixXd U;  // feedforward hidden activations
  Eigen::MatrixXd E;  // encoded token vectors
  Eigen::MatrixXd F;  // fencepost vectors f_0..f_n

  Eigen::MatrixXd Rleft, Rright;  // boundary vectors per fencepost
  Eigen::MatrixXd Rhead, Rmod;    // token-as-head / token-as-modifier
  Eigen::MatrixXd Rword;          // token vectors for second-order scoring
  Eigen::MatrixXd Rspan;          // one column per span, see span_index

  bool scored = false;
  bool labeled = false;
  ScoreTables tables;
  LabelScores labels;

  // dense index over spans 1 <= i <= j <= n, grouped by left endpoint
  int span_index(int i, int j) const {
    return (i - 1) * n - (i - 1) * (i - 2) / 2 + (j - i);
  }
  int span_count() const { return n * (n + 1) / 2; }
};

class Model {
 public:
  // fresh model with uniform [-init_range, init_range] parameters
  Model(const ModelConfig& cfg, Vocab tokens, Vocab labels, Vocab rels);

  const ModelConfig& config() const { return cfg_; }
  const Vocab& token_vocab() const { return tokens_; }
  const Vocab& label_vocab() const { return labels_; }
  const Vocab& rel_vocab() const { return rels_; }
  std::uint64_t version() const { return version_; }

  int num_params() const { return total_; }
  const Eigen::VectorXd& params() const { return theta_; }
  void set_params(const Eigen::VectorXd& theta);
  // theta += delta (the optimizer's update step)
  void apply_delta(const Eigen::VectorXd& delta);

  // Read-only view of one named parameter block. Names: e_tok, e_pos, w1,
  // b1, w2, b2, w_left, b_left, w_right, b_right, w_head, b_head, w_mod,
  // b_mod, w_word, b_word, w_span_mlp, b_span_mlp, w_c, w_d, w_span, w_con,
  // w_rel. The same names index gradient vectors via param_offset.
  Eigen::Map<const Eigen::MatrixXd> param_block(const std::string& name) const;
  int param_offset(const std::string& name) const;

  // encoder only: fills ids, X, U, E, F
  Tape encode(const Sentence& sentence) const;
  // fills the structural representations and tape.tables
  const ScoreTables& score_structure(Tape& tape) const;
  // fills tape.labels
  const LabelScores& score_labels(Tape& tape) const;
  // encode + score_structure + score_labels
  Tape forward(const Sentence& sentence) const;

  // Accumulates parameter gradients for the given table/label gradients.
  // Either gradient input may be null. Throws STALE_TAPE if the tape was
  // produced by different parameters or lacks the required pass.
  void backward(const Tape& tape, const ScoreTables* table_grads,
                const LabelScores* label_grads, Eigen::VectorXd& grad) const;

  void save(const std::string& path) const;
  static Model load(const std::string& path);

 private:
  struct Seg {
    int offset = 0;
    int rows = 0;
    int cols = 0;
  };

  Model(const ModelConfig& cfg, Vocab tokens, Vocab labels, Vocab rels,
        bool init);
  Seg alloc(int rows, int cols);
  void layout();
  const Seg& named_seg(const std::string& name) const;

  ModelConfig cfg_;
  Vocab tokens_, labels_, rels_;
  Eigen::VectorXd theta_;
  std::uint64_t version_ = 0;
  int total_ = 0;

  Seg e_tok_, e_pos_;
  Seg w1_, b1_, w2_, b2_;
  Seg wl_, bl_, wr_, br_, wh_, bh_, wm_, bm_, ww_, bw_, ws_, bs_;
  Seg wc_, wd_, wspan_;
  Seg wcon_, wrel_;  // per-label biaffine blocks, stacked column-wise
};

// Gradient holder matching LabelScores shapes.
LabelScores zero_label_grads(int n, int num_labels, int num_rels);

}  // namespace jparse
