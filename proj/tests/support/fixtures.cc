#include "fixtures.h"

#include <algorithm>
#include <sstream>

namespace ruleparse::testing {

std::string data_dir() { return RULEPARSE_DATA_DIR; }
std::string test_data_dir() { return RULEPARSE_TEST_DATA_DIR; }

const Lexicon& shipped_lexicon() {
  static const Lexicon lex = Lexicon::load_dir(data_dir() + "/lexicon");
  return lex;
}

const SuffixInventory& shipped_inventory() {
  static const SuffixInventory inv = SuffixInventory::load(data_dir() + "/suffix_inventory.tsv");
  return inv;
}

Sentence sentence_of(const std::vector<W>& words) {
  Sentence s;
  for (size_t i = 0; i < words.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = words[i].form;
    if (!words[i].lemma.empty()) t.lemma = words[i].lemma;
    if (!words[i].upos.empty()) t.upos = words[i].upos;
    if (words[i].head >= 0) t.head = words[i].head;
    if (!words[i].deprel.empty()) t.deprel = words[i].deprel;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

TokenAnalyses analyses_of(const std::vector<W>& words) {
  TokenAnalyses out;
  for (const auto& w : words) out.push_back(parse_morphemes(w.lemma, w.morph));
  return out;
}

const Corpus& example_corpus() {
  static const Corpus c = [] {
    Corpus corpus;
    corpus.sentences = read_conllu_file(test_data_dir() + "/examples.conllu");
    auto sidecar = read_morph_sidecar_file(test_data_dir() + "/examples.morph");
    for (size_t i = 0; i < corpus.sentences.size(); ++i) {
      corpus.analyses.push_back(
          analyses_for(sidecar, static_cast<int>(i) + 1, corpus.sentences[i].size()));
    }
    return corpus;
  }();
  return c;
}

std::vector<GoldenCase> golden_cases() {
  using R = RuleCode;
  const RuleSet defaults = RuleSet::defaults();
  RuleSet with_av = defaults;
  with_av.add(R::kAV);
  return {
      {"complex predicate", 0, defaults, {{4, 3, R::kCPI}}},
      {"head-initial compound", 1, defaults, {{2, 1, R::kNC}}},
      {"reduplication", 2, defaults, {{2, 1, R::kNC}}},
      {"genitive possessive", 3, defaults, {{1, 2, R::kPC}}},
      {"bare possessive compound", 4, defaults, {{1, 2, R::kPC}}},
      {"accusative blocks compound", 5, defaults, {}},
      {"queued adverb, no verb rule", 6, defaults, {}},
      {"adverb late binding", 6, with_av, {{2, 4, R::kAC}, {3, 4, R::kAV}}},
      {"adjective chain", 7, defaults, {{2, 4, R::kAJC}, {3, 4, R::kAJN}}},
      {"walkthrough, all rules",
       8,
       RuleSet::all(),
       {{2, 1, R::kCPI},
        {4, 3, R::kPC},
        {3, 16, R::kNV},
        {5, 16, R::kAC},
        {6, 16, R::kAV},
        {7, 8, R::kPC},
        {8, 16, R::kNV},
        {9, 11, R::kAAJ},
        {10, 13, R::kAJC},
        {11, 13, R::kAJN},
        {12, 13, R::kPC},
        {13, 16, R::kNV},
        {14, 16, R::kNV},
        {15, 14, R::kNC}}},
  };
}

std::vector<RuleAssignment> sorted(std::vector<RuleAssignment> arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) {
    return a.dependent < b.dependent;
  });
  return arcs;
}

std::string describe(const std::vector<RuleAssignment>& arcs) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < arcs.size(); ++i) {
    if (i > 0) os << ", ";
    os << arcs[i].dependent << "->" << arcs[i].head << ' ' << rule_code_name(arcs[i].code);
  }
  os << '}';
  return os.str();
}

}  // namespace ruleparse::testing
