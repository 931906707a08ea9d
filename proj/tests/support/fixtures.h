// Shared fixtures: data paths, the worked example sentences and their
// expected rule arcs.

#ifndef RULEPARSE_TESTS_FIXTURES_H_
#define RULEPARSE_TESTS_FIXTURES_H_

#include <string>
#include <vector>

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/lexicon.h"
#include "ruleparse/morph.h"

namespace ruleparse::testing {

std::string data_dir();       // shipped data/
std::string test_data_dir();  // tests/data/

const Lexicon& shipped_lexicon();
const SuffixInventory& shipped_inventory();

// A token written compactly: morph is "Noun+A3sg+Gen" style.
struct W {
  std::string form;
  std::string lemma;
  std::string upos;
  std::string morph;
  int head = -1;  // -1 leaves HEAD empty
  std::string deprel;
};

Sentence sentence_of(const std::vector<W>& words);
TokenAnalyses analyses_of(const std::vector<W>& words);

struct Corpus {
  std::vector<Sentence> sentences;
  std::vector<TokenAnalyses> analyses;
};

// tests/data/examples.conllu with its sidecar: eight short example sentences
// followed by the sixteen-word walkthrough sentence.
const Corpus& example_corpus();

struct GoldenCase {
  std::string name;
  size_t sentence;  // index into example_corpus()
  RuleSet rules;
  std::vector<RuleAssignment> expected;  // in firing order
};

std::vector<GoldenCase> golden_cases();

std::vector<RuleAssignment> sorted(std::vector<RuleAssignment> arcs);
std::string describe(const std::vector<RuleAssignment>& arcs);

}  // namespace ruleparse::testing

#endif  // RULEPARSE_TESTS_FIXTURES_H_
