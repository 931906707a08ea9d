// Attachment scores, the paired randomization test and the cumulative rule
// ablation.

#ifndef RULEPARSE_EVAL_H_
#define RULEPARSE_EVAL_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/lexicon.h"
#include "ruleparse/morph.h"

namespace ruleparse {

// Gold and system output disagree in shape. sentence() is 1-based, 0 when
// the mismatch is in the sentence count.
class AlignmentError : public std::invalid_argument {
 public:
  AlignmentError(const std::string& what, int sentence);
  int sentence() const { return sentence_; }

 private:
  int sentence_;
};

struct AttachmentScores {
  uint64_t total = 0;
  uint64_t correct_heads = 0;
  uint64_t correct_labeled = 0;
  double uas = 0.0;
  double las = 0.0;

  bool operator==(const AttachmentScores&) const = default;
};

AttachmentScores make_scores(uint64_t total, uint64_t heads, uint64_t labeled);

// Counts every syntactic word, punctuation included. LAS compares the full
// DEPREL string. A missing system head is wrong; a missing gold head is an
// alignment error.
AttachmentScores score(const std::vector<Sentence>& gold,
                       const std::vector<Sentence>& system);

enum class Metric { kUAS, kLAS };

// Correct heads (or head+label) per sentence.
std::vector<int64_t> sentence_correct(const std::vector<Sentence>& gold,
                                      const std::vector<Sentence>& system, Metric metric);

// Monte Carlo p-value for one pair of systems given the per-sentence
// differences in correct counts. Each shuffle flips the sign of every
// difference with probability 1/2 (swapping the two systems' outputs for that
// sentence); p = (1 + #{|shuffled sum| >= |observed sum|}) / (1 + shuffles).
// The draw depends only on (seed, stream, shuffles), not on `jobs`.
double randomization_p(const std::vector<int64_t>& diffs, uint64_t shuffles,
                       uint64_t seed, uint64_t stream = 0, int jobs = 1);

struct SigOptions {
  uint64_t shuffles = 10000;
  Metric metric = Metric::kUAS;
  uint64_t seed = 1;
  int jobs = 1;
};

struct SigResult {
  // p_values[i][j] compares outputs_a[i] with outputs_b[j].
  std::vector<std::vector<double>> p_values;
  double harmonic_mean_p = 1.0;
  uint64_t shuffles = 0;
  Metric metric = Metric::kUAS;
};

double harmonic_mean(const std::vector<double>& values);

// Every file of `outputs_a` against every file of `outputs_b`. Throws
// std::invalid_argument when shuffles < 1 or a side is empty, and
// AlignmentError when a file does not align with `gold`.
SigResult randomization_test(const std::vector<Sentence>& gold,
                             const std::vector<std::vector<Sentence>>& outputs_a,
                             const std::vector<std::vector<Sentence>>& outputs_b,
                             const SigOptions& opts = {});

// --- ablation ------------------------------------------------------------

struct AblationStep {
  std::string name;  // "CPI + NC"
  RuleSet rules;
};

// The eight cumulative configurations: no rule, CPI, +NC, +PC, +AC+AAJ,
// +AV, +AJC+AJN, +NV.
std::vector<AblationStep> cumulative_steps();
// The same sequence with AV and NV left out (six steps).
std::vector<AblationStep> cumulative_steps_without_av_nv();

struct AblationRow {
  int step = 0;
  std::string name;
  RuleSet rules;
  uint64_t tokens = 0;
  uint64_t assigned = 0;
  uint64_t correct = 0;
  double coverage = 0.0;            // assigned / tokens
  std::optional<double> precision;  // correct / assigned; absent when nothing is assigned
  double uas = 0.0;                 // correct / tokens
  EngineDiagnostics diagnostics;
};

// Runs the engine under each step over a gold-annotated sample and checks
// rule heads against gold heads. This measures the rules themselves, not a
// parser trained on their output.
std::vector<AblationRow> ablate(const std::vector<Sentence>& gold,
                                const std::vector<TokenAnalyses>& analyses,
                                const Lexicon& lex, const std::vector<AblationStep>& steps,
                                int max_iterations = RuleConfig{}.max_iterations,
                                int jobs = 1);

}  // namespace ruleparse

#endif  // RULEPARSE_EVAL_H_
