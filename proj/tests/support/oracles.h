// Independent re-implementations used as test oracles. They favour being
// obviously correct over being fast.

#ifndef RULEPARSE_TESTS_ORACLES_H_
#define RULEPARSE_TESTS_ORACLES_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/morph.h"

namespace ruleparse::testing {

// Plain-text view of a lexicon directory: entries as word lists.
struct RefLexicon {
  std::vector<std::vector<std::string>> cpi, nc, pc, redup;
  std::vector<std::string> degree;
  std::vector<std::pair<std::string, std::string>> emphasis;  // (adverb, required tag or "")

  static RefLexicon load(const std::string& dir);
};

// Straightforward version of the rule schedule. Works on token ids and
// rebuilds the list of open words for every step.
std::vector<RuleAssignment> reference_run(const Sentence& s, const TokenAnalyses& analyses,
                                          const RefLexicon& lex, const RuleSet& rules);

// Counts per lemma, most frequent `cap` lemmas with at least one counted
// suffix, rows divided by their sums.
std::map<std::string, std::vector<double>> naive_matrix(const std::vector<MorphAnalysis>& corpus,
                                                        const SuffixInventory& inventory,
                                                        size_t cap);

struct NaiveCounts {
  uint64_t total = 0, heads = 0, labeled = 0;
};
NaiveCounts naive_score(const std::vector<Sentence>& gold, const std::vector<Sentence>& system);

// Fraction of all 2^n sign patterns whose |sum| reaches the observed |sum|:
// the value the Monte Carlo p converges to.
double exact_tail(const std::vector<int64_t>& diffs);

}  // namespace ruleparse::testing

#endif  // RULEPARSE_TESTS_ORACLES_H_
