#include "jparse/treebank.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "jparse/common.hpp"

namespace jparse {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) fail(errc::io_error, "failed while writing '" + path + "'");
}

// ---- s-expressions, shared by bracket files and l-tree dumps ----

struct Token {
  enum Kind { open, close, atom } kind = atom;
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> scan(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t k = 0;
  while (k < text.size()) {
    const char c = text[k];
    if (c == '\n') {
      ++line;
      col = 1;
      ++k;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++k;
    } else if (c == '(' || c == ')') {
      out.push_back(
          {c == '(' ? Token::open : Token::close, std::string(1, c), line, col});
      ++col;
      ++k;
    } else {
      const int start = col;
      std::string word;
      while (k < text.size() && text[k] != '(' && text[k] != ')' &&
             !std::isspace(static_cast<unsigned char>(text[k]))) {
        word += text[k];
        ++k;
        ++col;
      }
      out.push_back({Token::atom, std::move(word), line, start});
    }
  }
  return out;
}

struct SNode {
  std::string label;
  std::string word;  // set on leaves only
  bool is_word = false;
  std::vector<SNode> kids;
  int line = 0;
  int col = 0;
};

[[noreturn]] void at(errc code, const std::string& name, int line, int col,
                     const std::string& msg) {
  fail(code, name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                 ": " + msg);
}

struct SParser {
  const std::vector<Token>& toks;
  const std::string& name;
  std::size_t pos = 0;

  bool done() const { return pos == toks.size(); }

  SNode parse_node() {
    const Token opener = toks[pos++];  // caller guarantees '('
    SNode node;
    node.line = opener.line;
    node.col = opener.col;
    if (!done() && toks[pos].kind == Token::atom) {
      node.label = toks[pos].text;
      ++pos;
    }
    while (!done() && toks[pos].kind != Token::close) {
      if (toks[pos].kind == Token::open) {
        node.kids.push_back(parse_node());
      } else {
        SNode leaf;
        leaf.is_word = true;
        leaf.word = toks[pos].text;
        leaf.line = toks[pos].line;
        leaf.col = toks[pos].col;
        node.kids.push_back(std::move(leaf));
        ++pos;
      }
    }
    if (done()) {
      at(errc::unbalanced_parens, name, opener.line, opener.col,
         "unclosed '('");
    }
    ++pos;  // the ')'
    if (node.kids.empty()) {
      at(errc::parse_error, name, opener.line, opener.col,
         "node has no children");
    }
    return node;
  }

  std::vector<SNode> parse_all() {
    std::vector<SNode> roots;
    while (!done()) {
      const Token& t = toks[pos];
      if (t.kind == Token::open) {
        roots.push_back(parse_node());
      } else if (t.kind == Token::close) {
        at(errc::unbalanced_parens, name, t.line, t.col, "unmatched ')'");
      } else {
        at(errc::parse_error, name, t.line, t.col,
           "word '" + t.text + "' outside a tree");
      }
    }
    return roots;
  }
};

// ---- bracket reading ----

bool is_preterminal(const SNode& n) {
  return n.kids.size() == 1 && n.kids[0].is_word;
}

// drop "-NONE-" subtrees and anything emptied by the removal
bool prune_traces(SNode& node) {
  if (node.is_word) return true;
  if (node.label == "-NONE-") return false;
  std::vector<SNode> kept;
  for (SNode& k : node.kids) {
    if (prune_traces(k)) kept.push_back(std::move(k));
  }
  node.kids = std::move(kept);
  return !node.kids.empty();
}

// "NP-SBJ=2" -> "NP"; leading '-' marks punctuation tags like -LRB-
void strip_tags(SNode& node) {
  if (node.is_word) return;
  if (!node.label.empty() && node.label[0] != '-') {
    const auto cut = node.label.find_first_of("-=");
    if (cut != std::string::npos) node.label.resize(cut);
  }
  for (SNode& k : node.kids) strip_tags(k);
}

struct BracketBuilder {
  const std::string& name;
  Sentence sentence;
  std::vector<Constituent> consts;
  int n = 0;

  std::pair<int, int> visit(const SNode& node, const std::string& prefix) {
    const std::string label =
        prefix.empty() ? node.label : prefix + "::" + node.label;
    if (is_preterminal(node)) {
      if (node.label.empty()) {
        at(errc::parse_error, name, node.line, node.col,
           "missing pre-terminal label");
      }
      ++n;
      sentence.tokens.push_back(node.kids[0].word);
      sentence.pos.push_back(node.label);
      return {n, n};
    }
    if (label.empty()) {
      at(errc::parse_error, name, node.line, node.col, "missing node label");
    }
    for (const SNode& k : node.kids) {
      if (k.is_word) {
        at(errc::parse_error, name, k.line, k.col,
           "word '" + k.word + "' outside a pre-terminal");
      }
    }
    if (node.kids.size() == 1 && !is_preterminal(node.kids[0])) {
      return visit(node.kids[0], label);  // collapse the unary chain
    }
    int left = 0;
    int right = 0;
    for (std::size_t i = 0; i < node.kids.size(); ++i) {
      const auto [l, r] = visit(node.kids[i], "");
      if (i == 0) left = l;
      right = r;
    }
    consts.push_back({left, right, label});
    return {left, right};
  }
};

std::pair<Sentence, CTree> build_bracket_tree(SNode root,
                                              const std::string& name) {
  if (!prune_traces(root)) {
    at(errc::parse_error, name, root.line, root.col,
       "no words left after empty-element removal");
  }
  strip_tags(root);
  // unwrap the common label-less top shell, e.g. "( (S ...) )"
  const SNode* top = &root;
  while (top->label.empty() && top->kids.size() == 1 &&
         !top->kids[0].is_word) {
    top = &top->kids[0];
  }
  BracketBuilder b{name};
  b.visit(*top, "");
  if (b.consts.empty()) {
    // bare pre-terminal root: promote the tag to a single constituent
    b.consts.push_back({1, 1, b.sentence.pos[0]});
  }
  CTree tree;
  tree.constituents = std::move(b.consts);
  tree.normalize();
  return {std::move(b.sentence), std::move(tree)};
}

std::vector<std::string> split_label(const std::string& label) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto cut = label.find("::", start);
    if (cut == std::string::npos) {
      parts.push_back(label.substr(start));
      return parts;
    }
    parts.push_back(label.substr(start, cut - start));
    start = cut + 2;
  }
}

std::string pos_of(const Sentence& s, int i) {
  if (i - 1 < static_cast<int>(s.pos.size()) && !s.pos[i - 1].empty()) {
    return s.pos[i - 1];
  }
  return "_";
}

// ---- CoNLL-X ----

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

int parse_int(const std::string& text, const std::string& name, int line) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    fail(errc::parse_error, name + ":" + std::to_string(line) +
                                ": malformed number '" + text + "'");
  }
  return value;
}

struct ConllRow {
  std::string form;
  std::string pos;
  int head = 0;
  std::string rel;
  int line = 0;
};

std::pair<Sentence, DTree> finish_block(const std::vector<ConllRow>& rows,
                                        const std::string& name) {
  const int n = static_cast<int>(rows.size());
  Sentence sentence;
  DTree dtree(n);
  dtree.rels.assign(static_cast<std::size_t>(n) + 1, "");
  int roots = 0;
  for (int m = 1; m <= n; ++m) {
    const ConllRow& row = rows[static_cast<std::size_t>(m - 1)];
    if (row.head < 0 || row.head > n) {
      fail(errc::parse_error, name + ":" + std::to_string(row.line) +
                                  ": head " + std::to_string(row.head) +
                                  " out of range for " + std::to_string(n) +
                                  " words");
    }
    sentence.tokens.push_back(row.form);
    sentence.pos.push_back(row.pos);
    dtree.heads[m] = row.head;
    dtree.rels[m] = row.rel;
    if (row.head == 0) ++roots;
  }
  const std::string where =
      name + ":" + std::to_string(rows.front().line) + ": ";
  if (roots > 1) {
    fail(errc::multi_root,
         where + std::to_string(roots) + " tokens attach to the root");
  }
  if (roots == 0) {
    fail(errc::cycle_detected, where + "no token attaches to the root");
  }
  if (!is_tree(dtree)) {
    fail(errc::cycle_detected, where + "dependency heads contain a cycle");
  }
  return {std::move(sentence), std::move(dtree)};
}

// ---- l-tree dumps ----

struct DumpBuilder {
  const std::string& name;
  Sentence sentence;
  std::vector<LexSpan> spans;
  int n = 0;

  static bool parse_head(const std::string& text, std::string& label,
                         int& head) {
    const auto open = text.rfind('[');
    if (open == std::string::npos || text.back() != ']') return false;
    const std::string digits = text.substr(open + 1, text.size() - open - 2);
    if (digits.empty()) return false;
    for (const char c : digits) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    label = text.substr(0, open);
    head = std::atoi(digits.c_str());
    return true;
  }

  LexSpan visit(const SNode& node) {
    std::string label;
    int head = 0;
    if (!parse_head(node.label, label, head)) {
      at(errc::parse_error, name, node.line, node.col,
         "expected a label[head] annotation, got '" + node.label + "'");
    }
    LexSpan span;
    span.label = label;
    span.head = head;
    if (node.kids.size() == 1 && node.kids[0].is_word) {
      ++n;
      sentence.tokens.push_back(node.kids[0].word);
      span.left = span.right = n;
      if (head != n) {
        at(errc::parse_error, name, node.line, node.col,
           "leaf head " + std::to_string(head) + " does not match word " +
               std::to_string(n));
      }
    } else if (node.kids.size() == 2 && !node.kids[0].is_word &&
               !node.kids[1].is_word) {
      const LexSpan l = visit(node.kids[0]);
      const LexSpan r = visit(node.kids[1]);
      span.left = l.left;
      span.right = r.right;
      if (head != l.head && head != r.head) {
        at(errc::parse_error, name, node.line, node.col,
           "head " + std::to_string(head) + " is not inherited from a child");
      }
    } else {
      at(errc::parse_error, name, node.line, node.col,
         "dump nodes take either one word or two subtrees");
    }
    spans.push_back(span);
    return span;
  }
};

}  // namespace

// ---- brackets ----

std::vector<std::pair<Sentence, CTree>> read_brackets_text(
    const std::string& text, const std::string& name) {
  const std::vector<Token> toks = scan(text);
  SParser parser{toks, name};
  std::vector<std::pair<Sentence, CTree>> out;
  for (SNode& root : parser.parse_all()) {
    out.push_back(build_bracket_tree(std::move(root), name));
  }
  return out;
}

std::vector<std::pair<Sentence, CTree>> read_brackets(const std::string& path) {
  return read_brackets_text(read_file(path), path);
}

std::string bracket_line(const Sentence& sentence, const CTree& ctree) {
  CTree tree = ctree;
  tree.normalize();
  const auto& cs = tree.constituents;
  if (cs.empty()) fail(errc::empty_sentence, "cannot serialize an empty tree");
  if (tree.length() != sentence.size()) {
    fail(errc::length_mismatch,
         "tree covers " + std::to_string(tree.length()) + " words, sentence has " +
             std::to_string(sentence.size()) + " tokens");
  }
  int k = 0;
  std::function<std::string()> rec = [&]() -> std::string {
    const Constituent c = cs[static_cast<std::size_t>(k++)];
    std::vector<std::string> parts;
    int i = c.left;
    while (i <= c.right) {
      if (k < static_cast<int>(cs.size()) &&
          cs[static_cast<std::size_t>(k)].left == i &&
          cs[static_cast<std::size_t>(k)].right <= c.right) {
        const int r = cs[static_cast<std::size_t>(k)].right;
        parts.push_back(rec());
        i = r + 1;
      } else {
        parts.push_back("(" + pos_of(sentence, i) + " " +
                        sentence.tokens[static_cast<std::size_t>(i - 1)] + ")");
        ++i;
      }
    }
    std::string out;
    const std::vector<std::string> labels = split_label(c.label);
    for (const std::string& lab : labels) out += "(" + lab + " ";
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (p) out += " ";
      out += parts[p];
    }
    out.append(labels.size(), ')');
    return out;
  };
  return rec();
}

void write_brackets(const std::string& path,
                    const std::vector<std::pair<Sentence, CTree>>& trees) {
  std::string content;
  for (const auto& [sentence, tree] : trees) {
    content += bracket_line(sentence, tree);
    content += '\n';
  }
  write_file(path, content);
}

// ---- CoNLL-X ----

std::vector<std::pair<Sentence, DTree>> read_conllx_text(
    const std::string& text, const std::string& name) {
  std::vector<std::pair<Sentence, DTree>> out;
  std::vector<ConllRow> rows;
  auto flush = [&]() {
    if (rows.empty()) return;
    out.push_back(finish_block(rows, name));
    rows.clear();
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    const std::vector<std::string> f = split_ws(line);
    if (f.size() != 10) {
      fail(errc::bad_column_count,
           name + ":" + std::to_string(lineno) + ": expected 10 columns, got " +
               std::to_string(f.size()));
    }
    const int id = parse_int(f[0], name, lineno);
    if (id != static_cast<int>(rows.size()) + 1) {
      fail(errc::parse_error, name + ":" + std::to_string(lineno) +
                                  ": unexpected token id " + f[0]);
    }
    ConllRow row;
    row.form = f[1];
    row.pos = f[4] == "_" ? f[3] : f[4];  // POSTAG, CPOSTAG as fallback
    row.head = parse_int(f[6], name, lineno);
    row.rel = f[7];
    row.line = lineno;
    rows.push_back(std::move(row));
  }
  flush();
  return out;
}

std::vector<std::pair<Sentence, DTree>> read_conllx(const std::string& path) {
  return read_conllx_text(read_file(path), path);
}

std::string conllx_block(const Sentence& sentence, const DTree& dtree) {
  const int n = dtree.size();
  if (sentence.size() != n) {
    fail(errc::length_mismatch,
         "sentence has " + std::to_string(sentence.size()) +
             " tokens, dependency tree has " + std::to_string(n));
  }
  const bool has_rels = static_cast<int>(dtree.rels.size()) == n + 1;
  std::string out;
  for (int m = 1; m <= n; ++m) {
    const std::string pos = pos_of(sentence, m);
    const std::string rel =
        has_rels && !dtree.rels[static_cast<std::size_t>(m)].empty()
            ? dtree.rels[static_cast<std::size_t>(m)]
            : "_";
    out += std::to_string(m) + "\t" +
           sentence.tokens[static_cast<std::size_t>(m - 1)] + "\t_\t" + pos +
           "\t" + pos + "\t_\t" + std::to_string(dtree.heads[m]) + "\t" + rel +
           "\t_\t_\n";
  }
  return out;
}

void write_conllx(const std::string& path,
                  const std::vector<std::pair<Sentence, DTree>>& trees) {
  std::string content;
  for (const auto& [sentence, tree] : trees) {
    content += conllx_block(sentence, tree);
    content += '\n';
  }
  write_file(path, content);
}

// ---- joint corpora ----

std::string CorpusStats::summary() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%ld/%ld (%.1f%%)", compatible, sentences,
                percent());
  return buf;
}

PairedCorpus pair_and_audit(const std::string& bracket_path,
                            const std::string& conllx_path) {
  const auto brackets = read_brackets(bracket_path);
  const auto deps = read_conllx(conllx_path);
  if (brackets.empty() && deps.empty()) {
    fail(errc::empty_corpus,
         "'" + bracket_path + "' and '" + conllx_path + "' contain no sentences");
  }
  if (brackets.size() != deps.size()) {
    fail(errc::alignment_mismatch,
         "'" + bracket_path + "' has " + std::to_string(brackets.size()) +
             " sentences but '" + conllx_path + "' has " +
             std::to_string(deps.size()));
  }

  PairedCorpus out;
  for (std::size_t k = 0; k < brackets.size(); ++k) {
    const Sentence& bs = brackets[k].first;
    const Sentence& cs = deps[k].first;
    const std::string where = "sentence " + std::to_string(k + 1);
    if (bs.tokens.size() != cs.tokens.size()) {
      fail(errc::alignment_mismatch,
           where + ": " + std::to_string(bs.tokens.size()) +
               " bracket tokens vs " + std::to_string(cs.tokens.size()) +
               " dependency tokens");
    }
    for (std::size_t j = 0; j < bs.tokens.size(); ++j) {
      if (bs.tokens[j] != cs.tokens[j]) {
        fail(errc::alignment_mismatch,
             where + ": token " + std::to_string(j + 1) + " is '" +
                 bs.tokens[j] + "' in the bracket file but '" + cs.tokens[j] +
                 "' in the dependency file");
      }
    }

    JointInstance inst;
    inst.sentence = bs;
    for (std::size_t j = 0; j < inst.sentence.pos.size(); ++j) {
      // recovered bracket files carry "_" tags; let the CoNLL side fill them
      if (inst.sentence.pos[j] == "_" && j < cs.pos.size() &&
          !cs.pos[j].empty()) {
        inst.sentence.pos[j] = cs.pos[j];
      }
    }
    inst.ctree = brackets[k].second;
    inst.dtree = deps[k].second;
    inst.compat = check_compatibility(inst.ctree, inst.dtree);

    out.stats.sentences += 1;
    out.stats.compatible += inst.compat.compatible ? 1 : 0;
    for (const Constituent& c : inst.ctree.constituents) {
      out.stats.label_freq[c.label] += 1;
    }
    for (int m = 1; m <= inst.dtree.size(); ++m) {
      out.stats.rel_freq[inst.dtree.rels[static_cast<std::size_t>(m)]] += 1;
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

std::vector<JointInstance> filter_compatible(
    const std::vector<JointInstance>& instances) {
  std::vector<JointInstance> out;
  for (const JointInstance& inst : instances) {
    if (inst.compat.compatible) out.push_back(inst);
  }
  return out;
}

// ---- l-tree dumps ----

std::string ltree_line(const Sentence& sentence, const LTree& ltree) {
  LTree tree = ltree;
  tree.normalize();
  const int n = tree.length();
  if (n != sentence.size()) {
    fail(errc::length_mismatch,
         "tree covers " + std::to_string(n) + " words, sentence has " +
             std::to_string(sentence.size()) + " tokens");
  }
  if (static_cast<int>(tree.spans.size()) != 2 * n - 1) {
    fail(errc::incompatible, "expected " + std::to_string(2 * n - 1) +
                                 " spans, got " +
                                 std::to_string(tree.spans.size()));
  }
  int k = 0;
  std::function<std::string()> rec = [&]() -> std::string {
    const LexSpan s = tree.spans[static_cast<std::size_t>(k++)];
    std::string out =
        "(" + s.label + "[" + std::to_string(s.head) + "] ";
    if (s.left == s.right) {
      out += sentence.tokens[static_cast<std::size_t>(s.left - 1)];
    } else {
      out += rec();
      out += " ";
      out += rec();
    }
    out += ")";
    return out;
  };
  return rec();
}

void write_ltrees(const std::string& path,
                  const std::vector<std::pair<Sentence, LTree>>& trees) {
  std::string content;
  for (const auto& [sentence, tree] : trees) {
    content += ltree_line(sentence, tree);
    content += '\n';
  }
  write_file(path, content);
}

std::vector<std::pair<Sentence, LTree>> read_ltrees_text(
    const std::string& text, const std::string& name) {
  const std::vector<Token> toks = scan(text);
  SParser parser{toks, name};
  std::vector<std::pair<Sentence, LTree>> out;
  for (const SNode& root : parser.parse_all()) {
    DumpBuilder b{name};
    b.visit(root);
    b.sentence.pos.assign(b.sentence.tokens.size(), "_");
    LTree tree;
    tree.spans = std::move(b.spans);
    tree.normalize();
    out.emplace_back(std::move(b.sentence), std::move(tree));
  }
  return out;
}

std::vector<std::pair<Sentence, LTree>> read_ltrees(const std::string& path) {
  return read_ltrees_text(read_file(path), path);
}

}  // namespace jparse
