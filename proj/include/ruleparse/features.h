// Per-token features handed to a downstream neural parser.
//
// Four channels: the code of the rule that attached the token, the token's
// inflectional suffixes, its last suffix, and its lemma's suffix vector.
// Channels travel in the MISC column:
//
//   Rule=CPI|LastSuffix=Gen|InflSuffixes=A3pl+Gen|SufVec=0.500000000,...
//
// The first sentence of an exported file carries two header comments,
// "rule_vocab = NONE CPI ..." and "hybrid = rule+last", so consumers can
// size their embedding tables.

#ifndef RULEPARSE_FEATURES_H_
#define RULEPARSE_FEATURES_H_

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/morph.h"

namespace ruleparse {

enum class FeatureMode { kRule, kInflectional, kLastSuffix, kSuffixVector };

class HybridConfig {
 public:
  HybridConfig() = default;
  // Throws std::invalid_argument when more than one suffix mode is set.
  HybridConfig(bool rule, std::optional<FeatureMode> suffix_mode);

  // "rule", "infl", "last", "sufvec", "rule+last", ... ; "none" or "" for
  // the empty configuration.
  static HybridConfig parse(std::string_view text);

  bool has(FeatureMode m) const;
  bool rule() const { return rule_; }
  std::optional<FeatureMode> suffix_mode() const { return suffix_; }
  bool empty() const { return !rule_ && !suffix_; }
  std::string to_string() const;

  bool operator==(const HybridConfig&) const = default;

 private:
  bool rule_ = false;
  std::optional<FeatureMode> suffix_;
};

// Written when the last-suffix channel is on but the analysis has no suffix.
inline constexpr std::string_view kNoSuffix = "NONE";

struct FeatureBundle {
  std::optional<RuleCode> rule_code;
  std::optional<std::string> last_suffix;
  std::optional<std::vector<std::string>> inflectional_suffixes;
  // Quantized to 9 decimals, so it survives export and re-reading.
  std::optional<std::vector<double>> suffix_vector;

  bool empty() const {
    return !rule_code && !last_suffix && !inflectional_suffixes && !suffix_vector;
  }
  bool operator==(const FeatureBundle&) const = default;
};

// One bundle per token. `matrix` is required in suffix-vector mode;
// `inventory` classifies tags for the inflectional mode. Throws
// std::invalid_argument naming the token when a suffix mode needs an
// analysis that is missing.
std::vector<FeatureBundle> encode(const Sentence& sentence,
                                  const std::vector<RuleAssignment>& assignments,
                                  const TokenAnalyses& analyses,
                                  const SuffixInventory& inventory,
                                  const LemmaSuffixMatrix* matrix,
                                  const HybridConfig& cfg);

// Writes bundles into MISC: populated channels are set, the other feature
// keys are removed. Throws std::invalid_argument on a size mismatch.
void export_features(Sentence& sentence, const std::vector<FeatureBundle>& bundles);
// Adds (or replaces) the vocabulary and configuration header comments.
void add_feature_header(Sentence& sentence, const HybridConfig& cfg);

// Reads the feature keys of every token back. Throws FormatError on a
// malformed value.
std::vector<FeatureBundle> read_features(const Sentence& sentence, int ordinal = 0);

// One JSON object per token: sentence ordinal, token id, form and the
// populated channels.
void write_features_jsonl(std::ostream& out, int ordinal, const Sentence& sentence,
                          const std::vector<FeatureBundle>& bundles);

// Adds Rule=<code> to every token and RuleHead=<id> to tokens a rule
// attached.
void annotate_rules(Sentence& sentence, const std::vector<RuleAssignment>& assignments);

}  // namespace ruleparse

#endif  // RULEPARSE_FEATURES_H_
