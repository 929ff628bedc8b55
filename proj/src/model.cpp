#include "jparse/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace jparse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLeakySlope = 0.1;

MatrixXd lrelu(const MatrixXd& z) {
  return (z.array().max(0.0) + kLeakySlope * z.array().min(0.0)).matrix();
}

// leaky rectifier slope recovered from the activation value: the sign is
// preserved, so act > 0 iff the pre-activation was > 0
MatrixXd lrelu_slope(const MatrixXd& act) {
  return (act.array() > 0.0).select(1.0, MatrixXd::Constant(act.rows(),
                                                            act.cols(),
                                                            kLeakySlope));
}

// appends the constant-1 row used by the biaffine bias terms
MatrixXd aug(const MatrixXd& r) {
  MatrixXd a(r.rows() + 1, r.cols());
  a.topRows(r.rows()) = r;
  a.row(r.rows()).setOnes();
  return a;
}

}  // namespace

int Vocab::add(const std::string& s) {
  auto it = index.find(s);
  if (it != index.end()) return it->second;
  const int id = static_cast<int>(items.size());
  items.push_back(s);
  index.emplace(s, id);
  return id;
}

int Vocab::find(const std::string& s) const {
  auto it = index.find(s);
  return it == index.end() ? -1 : it->second;
}

Vocab base_token_vocab() {
  Vocab v;
  v.add("<unk>");
  v.add("<bos>");
  v.add("<eos>");
  return v;
}

LabelScores zero_label_grads(int n, int num_labels, int num_rels) {
  LabelScores g;
  g.n = n;
  g.con = MatrixXd::Zero((n + 1) * (n + 1), num_labels);
  g.rel = MatrixXd::Zero((n + 1) * (n + 1), num_rels);
  return g;
}

Model::Seg Model::alloc(int rows, int cols) {
  Seg s{total_, rows, cols};
  total_ += rows * cols;
  return s;
}

void Model::layout() {
  const int dim = cfg_.encoder_dim;
  const int k = cfg_.mlp_dim;
  const int k2 = cfg_.span_mlp_dim;
  total_ = 0;
  e_tok_ = alloc(dim, tokens_.size());
  e_pos_ = alloc(dim, cfg_.max_len);
  w1_ = alloc(cfg_.hidden_dim, dim);
  b1_ = alloc(cfg_.hidden_dim, 1);
  w2_ = alloc(dim, cfg_.hidden_dim);
  b2_ = alloc(dim, 1);
  wl_ = alloc(k, dim);
  bl_ = alloc(k, 1);
  wr_ = alloc(k, dim);
  br_ = alloc(k, 1);
  wh_ = alloc(k, dim);
  bh_ = alloc(k, 1);
  wm_ = alloc(k, dim);
  bm_ = alloc(k, 1);
  ww_ = alloc(k2, dim);
  bw_ = alloc(k2, 1);
  ws_ = alloc(k2, dim);
  bs_ = alloc(k2, 1);
  wc_ = alloc(k + 1, k);
  wd_ = alloc(k + 1, k);
  wspan_ = alloc(k2 + 1, k2 + 1);
  wcon_ = alloc(k + 1, labels_.size() * (k + 1));
  wrel_ = alloc(k + 1, rels_.size() * (k + 1));
}

Model::Model(const ModelConfig& cfg, Vocab tokens, Vocab labels, Vocab rels,
             bool init)
    : cfg_(cfg),
      tokens_(std::move(tokens)),
      labels_(std::move(labels)),
      rels_(std::move(rels)) {
  if (cfg_.encoder_dim <= 0 || cfg_.encoder_dim % 2 != 0 ||
      cfg_.hidden_dim <= 0 || cfg_.mlp_dim <= 0 || cfg_.span_mlp_dim <= 0 ||
      cfg_.max_len < 3) {
    fail(errc::io_error, "bad model configuration");
  }
  if (tokens_.size() < 3 || labels_.size() < 1 || rels_.size() < 1) {
    fail(errc::io_error, "model requires token, label and relation vocabs");
  }
  layout();
  theta_.setZero(total_);
  if (init) {
    Rng rng(cfg_.seed);
    for (int i = 0; i < total_; ++i) {
      theta_[i] = rng.uniform(-cfg_.init_range, cfg_.init_range);
    }
  }
}

Model::Model(const ModelConfig& cfg, Vocab tokens, Vocab labels, Vocab rels)
    : Model(cfg, std::move(tokens), std::move(labels), std::move(rels),
            true) {}

const Model::Seg& Model::named_seg(const std::string& name) const {
  if (name == "e_tok") return e_tok_;
  if (name == "e_pos") return e_pos_;
  if (name == "w1") return w1_;
  if (name == "b1") return b1_;
  if (name == "w2") return w2_;
  if (name == "b2") return b2_;
  if (name == "w_left") return wl_;
  if (name == "b_left") return bl_;
  if (name == "w_right") return wr_;
  if (name == "b_right") return br_;
  if (name == "w_head") return wh_;
  if (name == "b_head") return bh_;
  if (name == "w_mod") return wm_;
  if (name == "b_mod") return bm_;
  if (name == "w_word") return ww_;
  if (name == "b_word") return bw_;
  if (name == "w_span_mlp") return ws_;
  if (name == "b_span_mlp") return bs_;
  if (name == "w_c") return wc_;
  if (name == "w_d") return wd_;
  if (name == "w_span") return wspan_;
  if (name == "w_con") return wcon_;
  if (name == "w_rel") return wrel_;
  fail(errc::io_error, "unknown parameter block: " + name);
}

Eigen::Map<const MatrixXd> Model::param_block(const std::string& name) const {
  const Seg& s = named_seg(name);
  return {theta_.data() + s.offset, s.rows, s.cols};
}

int Model::param_offset(const std::string& name) const {
  return named_seg(name).offset;
}

void Model::set_params(const VectorXd& theta) {
  if (theta.size() != total_) {
    fail(errc::length_mismatch, "parameter vector size mismatch");
  }
  theta_ = theta;
  ++version_;
}

void Model::apply_delta(const VectorXd& delta) {
  if (delta.size() != total_) {
    fail(errc::length_mismatch, "parameter delta size mismatch");
  }
  theta_ += delta;
  ++version_;
}

Tape Model::encode(const Sentence& sentence) const {
  const int n = sentence.size();
  if (n < 1) fail(errc::empty_sentence, "cannot encode an empty sentence");
  if (n + 2 > cfg_.max_len) {
    fail(errc::too_large, "sentence exceeds the position table (max_len)");
  }
  const int dim = cfg_.encoder_dim;
  const int half = dim / 2;

  auto cm = [&](const Seg& s) {
    return Eigen::Map<const MatrixXd>(theta_.data() + s.offset, s.rows,
                                      s.cols);
  };

  Tape t;
  t.version = version_;
  t.n = n;
  t.ids.resize(n + 2);
  t.ids[0] = kBosId;
  for (int i = 1; i <= n; ++i) {
    const int id = tokens_.find(sentence.tokens[i - 1]);
    t.ids[i] = id < 0 ? kUnkId : id;
  }
  t.ids[n + 1] = kEosId;

  t.X.resize(dim, n + 2);
  for (int p = 0; p < n + 2; ++p) {
    t.X.col(p) = cm(e_tok_).col(t.ids[p]) + cm(e_pos_).col(p);
  }
  t.U = lrelu((cm(w1_) * t.X).colwise() + cm(b1_).col(0));
  t.E = (cm(w2_) * t.U).colwise() + cm(b2_).col(0);

  t.F.resize(dim, n + 1);
  for (int kpos = 0; kpos <= n; ++kpos) {
    t.F.col(kpos).head(half) = t.E.col(kpos).head(half);
    t.F.col(kpos).tail(half) = t.E.col(kpos + 1).tail(half);
  }
  return t;
}

const ScoreTables& Model::score_structure(Tape& t) const {
  if (t.version != version_) {
    fail(errc::stale_tape, "tape does not match the current parameters");
  }
  const int n = t.n;
  auto cm = [&](const Seg& s) {
    return Eigen::Map<const MatrixXd>(theta_.data() + s.offset, s.rows,
                                      s.cols);
  };

  t.Rleft = lrelu((cm(wl_) * t.F).colwise() + cm(bl_).col(0));
  t.Rright = lrelu((cm(wr_) * t.F).colwise() + cm(br_).col(0));
  const auto tok = t.E.leftCols(n + 1);
  t.Rhead = lrelu((cm(wh_) * tok).colwise() + cm(bh_).col(0));
  t.Rmod = lrelu((cm(wm_) * tok).colwise() + cm(bm_).col(0));
  t.Rword = lrelu((cm(ww_) * tok).colwise() + cm(bw_).col(0));

  t.tables = ScoreTables(n, cfg_.second_order);

  const MatrixXd sc = aug(t.Rleft).transpose() * cm(wc_) * t.Rright;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) t.tables.span_c(i, j) = sc(i - 1, j);
  }

  const MatrixXd gd = aug(t.Rmod).transpose() * (cm(wd_) * t.Rhead);
  for (int h = 0; h <= n; ++h) {
    for (int m = 1; m <= n; ++m) {
      if (h != m) t.tables.arc_d(h, m) = gd(m, h);
    }
  }

  if (cfg_.second_order) {
    MatrixXd hs(cfg_.encoder_dim, t.span_count());
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        hs.col(t.span_index(i, j)) = t.F.col(i - 1) - t.F.col(j);
      }
    }
    t.Rspan = lrelu((cm(ws_) * hs).colwise() + cm(bs_).col(0));
    const MatrixXd p = aug(t.Rword).transpose() * cm(wspan_) * aug(t.Rspan);
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        const int s = t.span_index(i, j);
        for (int h = 0; h <= n; ++h) t.tables.span2o(i, j, h) = p(h, s);
      }
    }
  }

  t.scored = true;
  return t.tables;
}

const LabelScores& Model::score_labels(Tape& t) const {
  if (t.version != version_) {
    fail(errc::stale_tape, "tape does not match the current parameters");
  }
  if (!t.scored) score_structure(t);
  const int n = t.n;
  const int k = cfg_.mlp_dim;
  auto cm = [&](const Seg& s) {
    return Eigen::Map<const MatrixXd>(theta_.data() + s.offset, s.rows,
                                      s.cols);
  };

  t.labels = zero_label_grads(n, labels_.size(), rels_.size());

  const MatrixXd la = aug(t.Rleft);
  const MatrixXd ra = aug(t.Rright);
  for (int l = 0; l < labels_.size(); ++l) {
    const auto w = cm(wcon_).middleCols(l * (k + 1), k + 1);
    const MatrixXd sl = la.transpose() * w * ra;
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        t.labels.con(t.labels.con_row(i, j), l) = sl(i - 1, j);
      }
    }
  }

  const MatrixXd ma = aug(t.Rmod);
  const MatrixXd ha = aug(t.Rhead);
  for (int r = 0; r < rels_.size(); ++r) {
    const auto w = cm(wrel_).middleCols(r * (k + 1), k + 1);
    const MatrixXd tr = ma.transpose() * w * ha;
    for (int h = 0; h <= n; ++h) {
      for (int m = 1; m <= n; ++m) {
        if (h != m) t.labels.rel(t.labels.rel_row(h, m), r) = tr(m, h);
      }
    }
  }

  t.labeled = true;
  return t.labels;
}

Tape Model::forward(const Sentence& sentence) const {
  Tape t = encode(sentence);
  score_structure(t);
  score_labels(t);
  return t;
}

void Model::backward(const Tape& t, const ScoreTables* table_grads,
                     const LabelScores* label_grads, VectorXd& grad) const {
  if (t.version != version_) {
    fail(errc::stale_tape, "tape does not match the current parameters");
  }
  if (table_grads != nullptr && !t.scored) {
    fail(errc::stale_tape, "tape lacks a score_structure pass");
  }
  if (label_grads != nullptr && !t.labeled) {
    fail(errc::stale_tape, "tape lacks a score_labels pass");
  }
  if (grad.size() == 0) grad.setZero(total_);
  if (grad.size() != total_) {
    fail(errc::length_mismatch, "gradient vector size mismatch");
  }
  if (!t.scored) return;

  const int n = t.n;
  const int dim = cfg_.encoder_dim;
  const int half = dim / 2;
  const int k = cfg_.mlp_dim;
  const int k2 = cfg_.span_mlp_dim;

  auto cm = [&](const Seg& s) {
    return Eigen::Map<const MatrixXd>(theta_.data() + s.offset, s.rows,
                                      s.cols);
  };
  auto gm = [&](const Seg& s) {
    return Eigen::Map<MatrixXd>(grad.data() + s.offset, s.rows, s.cols);
  };

  MatrixXd d_rleft = MatrixXd::Zero(k, n + 1);
  MatrixXd d_rright = MatrixXd::Zero(k, n + 1);
  MatrixXd d_rhead = MatrixXd::Zero(k, n + 1);
  MatrixXd d_rmod = MatrixXd::Zero(k, n + 1);
  MatrixXd d_rword = MatrixXd::Zero(k2, n + 1);
  MatrixXd d_rspan;
  if (cfg_.second_order) d_rspan = MatrixXd::Zero(k2, t.span_count());

  const MatrixXd la = aug(t.Rleft);
  const MatrixXd ra = aug(t.Rright);
  const MatrixXd ma = aug(t.Rmod);
  const MatrixXd ha = aug(t.Rhead);

  if (table_grads != nullptr) {
    MatrixXd dsc = MatrixXd::Zero(n + 1, n + 1);
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) dsc(i - 1, j) = table_grads->span_c(i, j);
    }
    gm(wc_) += la * dsc * t.Rright.transpose();
    d_rleft += ((cm(wc_) * t.Rright) * dsc.transpose()).topRows(k);
    d_rright += (cm(wc_).transpose() * la) * dsc;

    MatrixXd dgd = MatrixXd::Zero(n + 1, n + 1);
    for (int h = 0; h <= n; ++h) {
      for (int m = 1; m <= n; ++m) {
        if (h != m) dgd(m, h) = table_grads->arc_d(h, m);
      }
    }
    gm(wd_) += ma * dgd * t.Rhead.transpose();
    d_rmod += ((cm(wd_) * t.Rhead) * dgd.transpose()).topRows(k);
    d_rhead += (cm(wd_).transpose() * ma) * dgd;

    if (cfg_.second_order && table_grads->has_second_order()) {
      MatrixXd dp = MatrixXd::Zero(n + 1, t.span_count());
      for (int i = 1; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
          const int s = t.span_index(i, j);
          for (int h = 0; h <= n; ++h) dp(h, s) = table_grads->span2o(i, j, h);
        }
      }
      const MatrixXd ua = aug(t.Rword);
      const MatrixXd va = aug(t.Rspan);
      gm(wspan_) += ua * dp * va.transpose();
      d_rword += ((cm(wspan_) * va) * dp.transpose()).topRows(k2);
      d_rspan += ((cm(wspan_).transpose() * ua) * dp).topRows(k2);
    }
  }

  if (label_grads != nullptr) {
    for (int l = 0; l < labels_.size(); ++l) {
      if (label_grads->con.col(l).isZero(0.0)) continue;
      MatrixXd dsl = MatrixXd::Zero(n + 1, n + 1);
      for (int i = 1; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
          dsl(i - 1, j) = label_grads->con(t.labels.con_row(i, j), l);
        }
      }
      const auto w = cm(wcon_).middleCols(l * (k + 1), k + 1);
      gm(wcon_).middleCols(l * (k + 1), k + 1) += la * dsl * ra.transpose();
      d_rleft += ((w * ra) * dsl.transpose()).topRows(k);
      d_rright += ((w.transpose() * la) * dsl).topRows(k);
    }
    for (int r = 0; r < rels_.size(); ++r) {
      if (label_grads->rel.col(r).isZero(0.0)) continue;
      MatrixXd dtr = MatrixXd::Zero(n + 1, n + 1);
      for (int h = 0; h <= n; ++h) {
        for (int m = 1; m <= n; ++m) {
          if (h != m) dtr(m, h) = label_grads->rel(t.labels.rel_row(h, m), r);
        }
      }
      const auto w = cm(wrel_).middleCols(r * (k + 1), k + 1);
      gm(wrel_).middleCols(r * (k + 1), k + 1) += ma * dtr * ha.transpose();
      d_rmod += ((w * ha) * dtr.transpose()).topRows(k);
      d_rhead += ((w.transpose() * ma) * dtr).topRows(k);
    }
  }

  MatrixXd d_f = MatrixXd::Zero(dim, n + 1);
  MatrixXd d_e = MatrixXd::Zero(dim, n + 2);

  auto mlp_back = [&](const MatrixXd& act, const MatrixXd& d_act,
                      const Seg& w, const Seg& b, const auto& input,
                      auto&& d_input) {
    const MatrixXd dz = d_act.cwiseProduct(lrelu_slope(act));
    gm(w) += dz * input.transpose();
    gm(b).col(0) += dz.rowwise().sum();
    d_input += cm(w).transpose() * dz;
  };

  mlp_back(t.Rleft, d_rleft, wl_, bl_, t.F, d_f);
  mlp_back(t.Rright, d_rright, wr_, br_, t.F, d_f);
  const auto tok = t.E.leftCols(n + 1);
  mlp_back(t.Rhead, d_rhead, wh_, bh_, tok, d_e.leftCols(n + 1));
  mlp_back(t.Rmod, d_rmod, wm_, bm_, tok, d_e.leftCols(n + 1));
  mlp_back(t.Rword, d_rword, ww_, bw_, tok, d_e.leftCols(n + 1));

  if (cfg_.second_order && t.Rspan.cols() > 0) {
    MatrixXd hs(dim, t.span_count());
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        hs.col(t.span_index(i, j)) = t.F.col(i - 1) - t.F.col(j);
      }
    }
    const MatrixXd dzs = d_rspan.cwiseProduct(lrelu_slope(t.Rspan));
    gm(ws_) += dzs * hs.transpose();
    gm(bs_).col(0) += dzs.rowwise().sum();
    const MatrixXd dhs = cm(ws_).transpose() * dzs;
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        const int s = t.span_index(i, j);
        d_f.col(i - 1) += dhs.col(s);
        d_f.col(j) -= dhs.col(s);
      }
    }
  }

  for (int kpos = 0; kpos <= n; ++kpos) {
    d_e.col(kpos).head(half) += d_f.col(kpos).head(half);
    d_e.col(kpos + 1).tail(half) += d_f.col(kpos).tail(half);
  }

  gm(w2_) += d_e * t.U.transpose();
  gm(b2_).col(0) += d_e.rowwise().sum();
  const MatrixXd du = cm(w2_).transpose() * d_e;
  const MatrixXd dz1 = du.cwiseProduct(lrelu_slope(t.U));
  gm(w1_) += dz1 * t.X.transpose();
  gm(b1_).col(0) += dz1.rowwise().sum();
  const MatrixXd dx = cm(w1_).transpose() * dz1;
  for (int p = 0; p < n + 2; ++p) {
    gm(e_tok_).col(t.ids[p]) += dx.col(p);
    gm(e_pos_).col(p) += dx.col(p);
  }
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

constexpr char kMagic[4] = {'J', 'P', 'C', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

void require_little_endian() {
  if (std::endian::native != std::endian::little) {
    fail(errc::io_error, "checkpoints are little-endian only");
  }
}

}  // namespace

void Model::save(const std::string& path) const {
  require_little_endian();
  nlohmann::json j;
  j["encoder_dim"] = cfg_.encoder_dim;
  j["hidden_dim"] = cfg_.hidden_dim;
  j["mlp_dim"] = cfg_.mlp_dim;
  j["span_mlp_dim"] = cfg_.span_mlp_dim;
  j["max_len"] = cfg_.max_len;
  j["second_order"] = cfg_.second_order;
  j["init_range"] = cfg_.init_range;
  j["seed"] = cfg_.seed;
  j["tokens"] = tokens_.items;
  j["labels"] = labels_.items;
  j["rels"] = rels_.items;
  const std::string header = j.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write checkpoint: " + path);
  out.write(kMagic, sizeof kMagic);
  write_u32(out, kFormatVersion);
  write_u64(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_u64(out, static_cast<std::uint64_t>(theta_.size()));
  out.write(reinterpret_cast<const char*>(theta_.data()),
            static_cast<std::streamsize>(theta_.size() * sizeof(double)));
  if (!out) fail(errc::io_error, "short write while saving: " + path);
}

Model Model::load(const std::string& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot read checkpoint: " + path);
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    fail(errc::io_error, "not a checkpoint file: " + path);
  }
  if (read_u32(in) != kFormatVersion) {
    fail(errc::io_error, "unsupported checkpoint version: " + path);
  }
  const std::uint64_t header_len = read_u64(in);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) fail(errc::io_error, "truncated checkpoint header: " + path);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_error, std::string("bad checkpoint header: ") + e.what());
  }

  ModelConfig cfg;
  Vocab tokens, labels, rels;
  try {
    cfg.encoder_dim = j.at("encoder_dim").get<int>();
    cfg.hidden_dim = j.at("hidden_dim").get<int>();
    cfg.mlp_dim = j.at("mlp_dim").get<int>();
    cfg.span_mlp_dim = j.at("span_mlp_dim").get<int>();
    cfg.max_len = j.at("max_len").get<int>();
    cfg.second_order = j.at("second_order").get<bool>();
    cfg.init_range = j.at("init_range").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("tokens")) tokens.add(s.get<std::string>());
    for (const auto& s : j.at("labels")) labels.add(s.get<std::string>());
    for (const auto& s : j.at("rels")) rels.add(s.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_error, std::string("bad checkpoint header: ") + e.what());
  }

  Model m(cfg, std::move(tokens), std::move(labels), std::move(rels), false);
  const std::uint64_t count = read_u64(in);
  if (count != static_cast<std::uint64_t>(m.total_)) {
    fail(errc::io_error, "checkpoint parameter count mismatch: " + path);
  }
  in.read(reinterpret_cast<char*>(m.theta_.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) fail(errc::io_error, "truncated checkpoint payload: " + path);
  return m;
}

}  // namespace jparse
