#include "jparse/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <tuple>

#include "json.hpp"
#include "jparse/common.hpp"

namespace jparse {
namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

using ItemCounts = std::map<std::tuple<int, int, std::string>, long>;

// one item per chain member of a collapsed "A::B" label
ItemCounts expand_items(const CTree& tree) {
  ItemCounts out;
  for (const Constituent& c : tree.constituents) {
    std::size_t start = 0;
    while (true) {
      const auto cut = c.label.find("::", start);
      const std::string lab = c.label.substr(
          start, cut == std::string::npos ? std::string::npos : cut - start);
      out[{c.left, c.right, lab}] += 1;
      if (cut == std::string::npos) break;
      start = cut + 2;
    }
  }
  return out;
}

std::string rel_of(const DTree& t, int m) {
  if (static_cast<int>(t.rels.size()) == t.size() + 1) {
    return t.rels[static_cast<std::size_t>(m)];
  }
  return "";
}

std::string length_bucket(int n) {
  if (n <= 9) return "1-9";
  if (n <= 19) return "10-19";
  if (n <= 29) return "20-29";
  if (n <= 39) return "30-39";
  return "40+";
}

std::string width_bucket(int w) {
  return w <= 9 ? std::to_string(w) : "10+";
}

std::string dep_bucket(int head, int mod) {
  if (head == 0) return "root";
  const int d = std::abs(head - mod);
  return d <= 6 ? std::to_string(d) : "7+";
}

void check_aligned(const std::vector<JointInstance>& pred,
                   const std::vector<JointInstance>& gold) {
  if (pred.empty() || gold.empty()) {
    fail(errc::empty_corpus, "nothing to evaluate");
  }
  if (pred.size() != gold.size()) {
    fail(errc::alignment_mismatch,
         "prediction corpus has " + std::to_string(pred.size()) +
             " sentences, gold corpus has " + std::to_string(gold.size()));
  }
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred[k].sentence.size() != gold[k].sentence.size()) {
      fail(errc::alignment_mismatch,
           "sentence " + std::to_string(k + 1) + ": " +
               std::to_string(pred[k].sentence.size()) + " predicted tokens vs " +
               std::to_string(gold[k].sentence.size()) + " gold tokens");
    }
  }
}

}  // namespace

const std::set<std::string>& default_punct_tags() {
  static const std::set<std::string> tags = {",",     ".",     ":",    "``",
                                             "''",    "-LRB-", "-RRB-"};
  return tags;
}

std::vector<bool> punct_mask(const Sentence& sentence,
                             const std::set<std::string>& punct_tags) {
  std::vector<bool> mask(sentence.tokens.size(), false);
  for (std::size_t j = 0; j < mask.size() && j < sentence.pos.size(); ++j) {
    mask[j] = punct_tags.count(sentence.pos[j]) > 0;
  }
  return mask;
}

AttachmentCounts attachment_scores(const DTree& pred, const DTree& gold,
                                   const std::vector<bool>& punct) {
  const int n = gold.size();
  if (pred.size() != n || static_cast<int>(punct.size()) != n) {
    fail(errc::length_mismatch,
         "attachment scoring needs equal-length trees and mask");
  }
  AttachmentCounts out;
  for (int m = 1; m <= n; ++m) {
    if (punct[static_cast<std::size_t>(m - 1)]) continue;
    const bool head_ok = pred.heads[m] == gold.heads[m];
    out.uas.total += 1;
    out.uas.hits += head_ok ? 1 : 0;
    out.las.total += 1;
    out.las.hits += head_ok && rel_of(pred, m) == rel_of(gold, m) ? 1 : 0;
  }
  return out;
}

double PrfCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

PrfCounts constituent_prf(const CTree& pred, const CTree& gold) {
  const ItemCounts pc = expand_items(pred);
  const ItemCounts gc = expand_items(gold);
  PrfCounts out;
  for (const auto& [item, count] : pc) {
    out.predicted += count;
    const auto hit = gc.find(item);
    if (hit != gc.end()) out.matched += std::min(count, hit->second);
  }
  for (const auto& [item, count] : gc) out.gold += count;
  return out;
}

MatchFlags complete_match(const CTree& pred_c, const DTree& pred_d,
                          const CTree& gold_c, const DTree& gold_d) {
  MatchFlags out;
  out.con = expand_items(pred_c) == expand_items(gold_c);
  out.dep = pred_d.heads == gold_d.heads;
  if (out.dep) {
    for (int m = 1; m <= gold_d.size(); ++m) {
      if (rel_of(pred_d, m) != rel_of(gold_d, m)) {
        out.dep = false;
        break;
      }
    }
  }
  out.both = out.con && out.dep;
  return out;
}

std::string Metrics::report() const {
  auto ratio_line = [](const char* name, const Ratio& r) {
    std::string out = std::string(name) + ": " + pct(r.percent()) + " (" +
                      std::to_string(r.hits) + "/" + std::to_string(r.total) +
                      ")";
    if (r.vacuous()) out += " [vacuous]";
    return out + "\n";
  };
  std::string out;
  out += ratio_line("uas", uas);
  out += ratio_line("las", las);
  out += "con_p: " + pct(constituents.precision()) + " (" +
         std::to_string(constituents.matched) + "/" +
         std::to_string(constituents.predicted) + ")" +
         (constituents.vacuous() ? " [vacuous]" : "") + "\n";
  out += "con_r: " + pct(constituents.recall()) + " (" +
         std::to_string(constituents.matched) + "/" +
         std::to_string(constituents.gold) + ")\n";
  out += "con_f1: " + pct(constituents.f1()) + "\n";
  out += ratio_line("lcm_con", lcm_con);
  out += ratio_line("lcm_dep", lcm_dep);
  out += ratio_line("lcm_both", lcm_both);
  return out;
}

std::string Metrics::json() const {
  nlohmann::ordered_json j;
  auto put_ratio = [&](const char* name, const Ratio& r) {
    j[name] = r.percent();
    j[std::string(name) + "_counts"] = {r.hits, r.total};
  };
  put_ratio("uas", uas);
  put_ratio("las", las);
  j["con_p"] = constituents.precision();
  j["con_r"] = constituents.recall();
  j["con_f1"] = constituents.f1();
  j["con_counts"] = {constituents.matched, constituents.predicted,
                     constituents.gold};
  put_ratio("lcm_con", lcm_con);
  put_ratio("lcm_dep", lcm_dep);
  put_ratio("lcm_both", lcm_both);
  return j.dump();
}

Metrics evaluate_corpus(const std::vector<JointInstance>& pred,
                        const std::vector<JointInstance>& gold,
                        const std::set<std::string>& punct_tags) {
  check_aligned(pred, gold);
  Metrics out;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const std::vector<bool> mask = punct_mask(gold[k].sentence, punct_tags);
    const AttachmentCounts att =
        attachment_scores(pred[k].dtree, gold[k].dtree, mask);
    out.uas += att.uas;
    out.las += att.las;
    out.constituents += constituent_prf(pred[k].ctree, gold[k].ctree);
    const MatchFlags match = complete_match(pred[k].ctree, pred[k].dtree,
                                            gold[k].ctree, gold[k].dtree);
    out.lcm_con += Ratio{match.con ? 1 : 0, 1};
    out.lcm_dep += Ratio{match.dep ? 1 : 0, 1};
    out.lcm_both += Ratio{match.both ? 1 : 0, 1};
  }
  return out;
}

std::string BucketTable::tsv() const {
  std::string out = "# " + title + "\n";
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += "\t";
    out += header[c];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "\t";
      out += row[c];
    }
    out += "\n";
  }
  return out;
}

std::vector<BucketTable> bucket_reports(
    const std::vector<JointInstance>& pred,
    const std::vector<JointInstance>& gold,
    const std::set<std::string>& punct_tags) {
  check_aligned(pred, gold);

  struct LenCell {
    long sentences = 0;
    Ratio uas, las;
    PrfCounts prf;
  };
  std::map<std::string, LenCell> by_len;
  std::map<std::string, PrfCounts> by_width;
  struct DepCell {
    Ratio uas, las;
  };
  std::map<std::string, DepCell> by_dep;

  for (std::size_t k = 0; k < pred.size(); ++k) {
    const std::vector<bool> mask = punct_mask(gold[k].sentence, punct_tags);
    const AttachmentCounts att =
        attachment_scores(pred[k].dtree, gold[k].dtree, mask);
    const PrfCounts prf = constituent_prf(pred[k].ctree, gold[k].ctree);

    LenCell& cell = by_len[length_bucket(gold[k].sentence.size())];
    cell.sentences += 1;
    cell.uas += att.uas;
    cell.las += att.las;
    cell.prf += prf;

    const ItemCounts pc = expand_items(pred[k].ctree);
    const ItemCounts gc = expand_items(gold[k].ctree);
    for (const auto& [item, count] : pc) {
      PrfCounts& w = by_width[width_bucket(std::get<1>(item) -
                                           std::get<0>(item) + 1)];
      w.predicted += count;
      const auto hit = gc.find(item);
      if (hit != gc.end()) w.matched += std::min(count, hit->second);
    }
    for (const auto& [item, count] : gc) {
      by_width[width_bucket(std::get<1>(item) - std::get<0>(item) + 1)].gold +=
          count;
    }

    const DTree& pd = pred[k].dtree;
    const DTree& gd = gold[k].dtree;
    for (int m = 1; m <= gd.size(); ++m) {
      if (mask[static_cast<std::size_t>(m - 1)]) continue;
      DepCell& d = by_dep[dep_bucket(gd.heads[m], m)];
      const bool head_ok = pd.heads[m] == gd.heads[m];
      d.uas += Ratio{head_ok ? 1 : 0, 1};
      d.las += Ratio{head_ok && rel_of(pd, m) == rel_of(gd, m) ? 1 : 0, 1};
    }
  }

  // canonical row orders; only buckets that occurred are emitted
  const std::vector<std::string> len_order = {"1-9", "10-19", "20-29", "30-39",
                                              "40+"};
  std::vector<std::string> width_order;
  for (int w = 1; w <= 9; ++w) width_order.push_back(std::to_string(w));
  width_order.push_back("10+");
  std::vector<std::string> dep_order = {"root"};
  for (int d = 1; d <= 6; ++d) dep_order.push_back(std::to_string(d));
  dep_order.push_back("7+");

  std::vector<BucketTable> out;

  BucketTable lens;
  lens.title = "by_sentence_length";
  lens.header = {"bucket", "sentences", "uas", "las", "con_f1"};
  for (const std::string& key : len_order) {
    const auto it = by_len.find(key);
    if (it == by_len.end()) continue;
    lens.rows.push_back({key, std::to_string(it->second.sentences),
                         pct(it->second.uas.percent()),
                         pct(it->second.las.percent()),
                         pct(it->second.prf.f1())});
  }
  out.push_back(std::move(lens));

  BucketTable widths;
  widths.title = "by_constituent_width";
  widths.header = {"bucket", "gold", "predicted", "matched",
                   "precision", "recall", "f1"};
  for (const std::string& key : width_order) {
    const auto it = by_width.find(key);
    if (it == by_width.end()) continue;
    const PrfCounts& p = it->second;
    widths.rows.push_back({key, std::to_string(p.gold),
                           std::to_string(p.predicted),
                           std::to_string(p.matched), pct(p.precision()),
                           pct(p.recall()), pct(p.f1())});
  }
  out.push_back(std::move(widths));

  BucketTable deps;
  deps.title = "by_dependency_length";
  deps.header = {"bucket", "arcs", "uas", "las"};
  for (const std::string& key : dep_order) {
    const auto it = by_dep.find(key);
    if (it == by_dep.end()) continue;
    deps.rows.push_back({key, std::to_string(it->second.uas.total),
                         pct(it->second.uas.percent()),
                         pct(it->second.las.percent())});
  }
  out.push_back(std::move(deps));

  return out;
}

}  // namespace jparse
