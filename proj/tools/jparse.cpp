// Command line front end. Exit codes: 0 success, 1 failed verification,
// 2 usage or I/O error. All commands are deterministic under a fixed seed.
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "jparse/metrics.hpp"
#include "jparse/model.hpp"
#include "jparse/oracle.hpp"
#include "jparse/train.hpp"
#include "jparse/treebank.hpp"

namespace {

using namespace jparse;

std::set<std::string> parse_tag_set(const std::string& text) {
  std::set<std::string> out;
  std::istringstream in(text);
  std::string tag;
  while (in >> tag) out.insert(tag);
  return out;
}

// plain text input: one sentence per line, tokens separated by whitespace
std::vector<Sentence> read_tokenized(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    Sentence s;
    std::istringstream words(line);
    std::string tok;
    while (words >> tok) s.tokens.push_back(tok);
    if (s.tokens.empty()) continue;
    s.pos.assign(s.tokens.size(), "_");
    out.push_back(std::move(s));
  }
  if (out.empty()) fail(errc::empty_corpus, "no sentences in " + path);
  return out;
}

std::string describe(const CompatReport& report) {
  if (report.reason == CompatReason::non_projective) {
    return "dependency tree is not projective";
  }
  std::string out = "constituent boundaries split dependency links";
  if (!report.offending.empty()) {
    const CompatOffense& o = report.offending.front();
    out += " at " + o.span.label + "(" + std::to_string(o.span.left) + "," +
           std::to_string(o.span.right) + ")";
  }
  return out;
}

int cmd_check_compat(const std::string& brackets, const std::string& conllx) {
  const PairedCorpus corpus = pair_and_audit(brackets, conllx);
  std::cout << corpus.stats.summary() << "\n";
  return 0;
}

int cmd_convert(const std::string& brackets, const std::string& conllx,
                const std::string& out) {
  const PairedCorpus corpus = pair_and_audit(brackets, conllx);
  std::vector<std::pair<Sentence, LTree>> dump;
  for (std::size_t k = 0; k < corpus.instances.size(); ++k) {
    const JointInstance& inst = corpus.instances[k];
    if (!inst.compat.compatible) {
      std::cerr << "skipping sentence " << k + 1 << ": "
                << describe(inst.compat) << "\n";
      continue;
    }
    const TrainInstance enc =
        make_instance(inst.sentence, inst.ctree, inst.dtree);
    dump.emplace_back(inst.sentence, enc.gold);
  }
  write_ltrees(out, dump);
  std::cout << "converted " << dump.size() << "/" << corpus.instances.size()
            << " sentences\n";
  return 0;
}

int cmd_recover(const std::string& ltrees, const std::string& out_brackets,
                const std::string& out_conllx) {
  const auto dump = read_ltrees(ltrees);
  std::vector<std::pair<Sentence, CTree>> cs;
  std::vector<std::pair<Sentence, DTree>> ds;
  for (const auto& [sentence, ltree] : dump) {
    cs.emplace_back(sentence, ltree_to_ctree(ltree));
    ds.emplace_back(sentence, ltree_to_dtree(ltree));
  }
  write_brackets(out_brackets, cs);
  write_conllx(out_conllx, ds);
  std::cout << "recovered " << dump.size() << " sentences\n";
  return 0;
}

struct TrainArgs {
  std::string brackets;
  std::string conllx;
  std::string model_path;
  int order = 2;
  ModelConfig mc;
  TrainConfig tc;
};

int cmd_train(const TrainArgs& a) {
  const PairedCorpus corpus = pair_and_audit(a.brackets, a.conllx);
  std::cout << "compatibility: " << corpus.stats.summary() << "\n";
  const std::vector<JointInstance> kept = filter_compatible(corpus.instances);
  if (kept.empty()) {
    fail(errc::empty_corpus, "no compatible sentences to train on");
  }
  std::vector<TrainInstance> insts;
  insts.reserve(kept.size());
  for (const JointInstance& inst : kept) {
    insts.push_back(make_instance(inst.sentence, inst.ctree, inst.dtree));
  }
  const CorpusVocabs vocabs = collect_vocabs(insts);

  ModelConfig mc = a.mc;
  mc.second_order = a.order == 2;
  mc.seed = a.tc.seed;
  Model model(mc, vocabs.tokens, vocabs.labels, vocabs.rels);
  std::cout << "training on " << insts.size() << " sentences, "
            << model.num_params() << " parameters\n";

  train(model, insts, a.tc, [](const LossReport& r) {
    std::printf("epoch %4d  bracket %.4f  label %.4f  total %.4f\n", r.epoch,
                r.bracket_loss, r.label_loss, r.total());
  });
  model.save(a.model_path);
  std::cout << "saved " << a.model_path << "\n";
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& input,
              const std::string& out_brackets, const std::string& out_conllx,
              int jobs) {
  const Model model = Model::load(model_path);
  const std::vector<Sentence> sentences = read_tokenized(input);

  // collect-then-emit: workers fill slots by input index, output stays in
  // input order no matter how the sentences were scheduled
  std::vector<Prediction> preds(sentences.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= sentences.size()) return;
      try {
        preds[k] = predict(model, sentences[k]);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int workers = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::pair<Sentence, CTree>> cs;
  std::vector<std::pair<Sentence, DTree>> ds;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    cs.emplace_back(sentences[k], preds[k].ctree);
    ds.emplace_back(sentences[k], preds[k].dtree);
  }
  write_brackets(out_brackets, cs);
  write_conllx(out_conllx, ds);
  std::cout << "parsed " << sentences.size() << " sentences\n";
  return 0;
}

int cmd_eval(const std::string& pred_brackets, const std::string& pred_conllx,
             const std::string& gold_brackets, const std::string& gold_conllx,
             const std::set<std::string>& punct, bool as_json,
             const std::string& buckets_path) {
  const PairedCorpus pred = pair_and_audit(pred_brackets, pred_conllx);
  const PairedCorpus gold = pair_and_audit(gold_brackets, gold_conllx);
  const Metrics m = evaluate_corpus(pred.instances, gold.instances, punct);
  if (as_json) {
    std::cout << m.json() << "\n";
  } else {
    std::cout << m.report();
  }
  if (!buckets_path.empty()) {
    std::ofstream out(buckets_path);
    if (!out) fail(errc::io_error, "cannot write " + buckets_path);
    bool first = true;
    for (const BucketTable& table :
         bucket_reports(pred.instances, gold.instances, punct)) {
      if (!first) out << "\n";
      out << table.tsv();
      first = false;
    }
  }
  return 0;
}

int cmd_oracle_verify(int trials, int max_n, std::uint64_t seed) {
  const OracleReport report = run_oracle_verification(trials, max_n, seed);
  std::cout << format_report(report);
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint constituency and dependency parsing toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read option defaults from an INI file");

  const std::string default_punct = ", . : `` '' -LRB- -RRB-";

  auto* check = app.add_subcommand(
      "check-compat", "audit how many tree pairs admit a joint encoding");
  std::string check_brackets, check_conllx;
  check->add_option("brackets", check_brackets, "bracketed constituency file")
      ->required();
  check->add_option("conllx", check_conllx, "CoNLL-X dependency file")
      ->required();

  auto* convert = app.add_subcommand(
      "convert", "encode compatible tree pairs as lexicalized trees");
  std::string conv_brackets, conv_conllx, conv_out;
  convert->add_option("brackets", conv_brackets, "bracketed constituency file")
      ->required();
  convert->add_option("conllx", conv_conllx, "CoNLL-X dependency file")
      ->required();
  convert->add_option("-o,--out", conv_out, "output dump path")->required();

  auto* recover = app.add_subcommand(
      "recover", "split a lexicalized dump back into both tree files");
  std::string rec_in, rec_brackets, rec_conllx;
  recover->add_option("ltrees", rec_in, "lexicalized dump path")->required();
  recover->add_option("-b,--brackets", rec_brackets, "output bracket path")
      ->required();
  recover->add_option("-d,--conllx", rec_conllx, "output CoNLL-X path")
      ->required();

  auto* train_cmd =
      app.add_subcommand("train", "fit a model on a compatible corpus");
  TrainArgs ta;
  // small-corpus defaults; near-zero init makes the bilinear scorers start
  // at a saddle where gradients vanish, so start wider than the library does
  ta.mc.init_range = 0.3;
  ta.tc.lr = 0.05;
  ta.tc.momentum = 0.5;
  train_cmd->add_option("brackets", ta.brackets, "bracketed constituency file")
      ->required();
  train_cmd->add_option("conllx", ta.conllx, "CoNLL-X dependency file")
      ->required();
  train_cmd->add_option("--model", ta.model_path, "checkpoint output path")
      ->required();
  train_cmd->add_option("--order", ta.order, "decoder order")
      ->check(CLI::IsMember({1, 2}));
  train_cmd->add_option("--epochs", ta.tc.epochs, "training epochs");
  train_cmd->add_option("--batch-size", ta.tc.batch_size, "sentences per step");
  train_cmd->add_option("--lr", ta.tc.lr, "learning rate");
  train_cmd->add_option("--momentum", ta.tc.momentum, "momentum coefficient");
  train_cmd->add_option("--weight-decay", ta.tc.weight_decay, "L2 strength");
  train_cmd->add_option("--label-weight", ta.tc.label_weight,
                        "labeling loss weight");
  train_cmd->add_option("--seed", ta.tc.seed, "random seed");
  train_cmd->add_option("--init-range", ta.mc.init_range,
                        "uniform parameter init half-width");
  train_cmd->add_option("--encoder-dim", ta.mc.encoder_dim,
                        "token vector width (even)");
  train_cmd->add_option("--hidden-dim", ta.mc.hidden_dim,
                        "feedforward hidden width");
  train_cmd->add_option("--mlp-dim", ta.mc.mlp_dim,
                        "boundary and head/mod vector width");
  train_cmd->add_option("--span-mlp-dim", ta.mc.span_mlp_dim,
                        "second-order span vector width");
  train_cmd->add_option("--max-len", ta.mc.max_len,
                        "longest supported sentence");

  auto* parse_cmd = app.add_subcommand(
      "parse", "parse tokenized text into compatible tree pairs");
  std::string parse_model, parse_input, parse_brackets, parse_conllx;
  int parse_jobs = 1;
  parse_cmd->add_option("input", parse_input, "one sentence per line")
      ->required();
  parse_cmd->add_option("--model", parse_model, "checkpoint path")->required();
  parse_cmd->add_option("-b,--brackets", parse_brackets, "output bracket path")
      ->required();
  parse_cmd->add_option("-d,--conllx", parse_conllx, "output CoNLL-X path")
      ->required();
  parse_cmd->add_option("--jobs", parse_jobs, "worker threads");

  auto* eval_cmd = app.add_subcommand(
      "eval", "score predicted tree pairs against gold tree pairs");
  std::string eval_pb, eval_pd, eval_gb, eval_gd, eval_buckets;
  std::string eval_punct = default_punct;
  bool eval_json = false;
  eval_cmd->add_option("pred-brackets", eval_pb, "predicted bracket file")
      ->required();
  eval_cmd->add_option("pred-conllx", eval_pd, "predicted CoNLL-X file")
      ->required();
  eval_cmd->add_option("gold-brackets", eval_gb, "gold bracket file")
      ->required();
  eval_cmd->add_option("gold-conllx", eval_gd, "gold CoNLL-X file")
      ->required();
  eval_cmd->add_option("--punct-tags", eval_punct,
                       "space-separated POS tags skipped by UAS/LAS");
  eval_cmd->add_flag("--json", eval_json, "machine-readable output");
  eval_cmd->add_option("--buckets", eval_buckets,
                       "also write breakdown tables to this TSV path");

  auto* verify = app.add_subcommand(
      "oracle-verify", "check the decoder against exhaustive enumeration");
  int trials = 100;
  int max_n = 6;
  std::uint64_t seed = 1;
  verify->add_option("--trials", trials, "random score tables per setting");
  verify->add_option("--max-n", max_n, "largest sentence length (at most 8)");
  verify->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check_compat(check_brackets, check_conllx);
    if (convert->parsed()) {
      return cmd_convert(conv_brackets, conv_conllx, conv_out);
    }
    if (recover->parsed()) {
      return cmd_recover(rec_in, rec_brackets, rec_conllx);
    }
    if (train_cmd->parsed()) return cmd_train(ta);
    if (parse_cmd->parsed()) {
      return cmd_parse(parse_model, parse_input, parse_brackets, parse_conllx,
                       parse_jobs);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_pb, eval_pd, eval_gb, eval_gd,
                      parse_tag_set(eval_punct), eval_json, eval_buckets);
    }
    if (verify->parsed()) return cmd_oracle_verify(trials, max_n, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
