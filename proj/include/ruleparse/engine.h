// Rule-based unlabeled dependency pre-annotation.
//
// Nine rules decide heads for the hard cases of a sentence (complex
// predicates, compounds, possessives, adverb and adjective groups) and
// leave everything else to a downstream parser. Scheduling:
//
//   1. AC   builds the consecutive-adverbs list
//   2. AJC  builds the consecutive-adjectives list
//   3. CPI, then NC, once each
//   4. PC, AAJ, AV, AJN, NV repeated until an iteration assigns nothing
//
// Every rule looks at adjacent pairs of the *remaining* list: tokens whose
// head is still open and that were not set aside by AC/AJC. Pairs are
// scanned left to right. A token whose head is decided leaves the list, so
// its neighbours become adjacent for the rest of the run.

#ifndef RULEPARSE_ENGINE_H_
#define RULEPARSE_ENGINE_H_

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ruleparse/conllu.h"
#include "ruleparse/lexicon.h"
#include "ruleparse/morph.h"

namespace ruleparse {

enum class RuleCode : uint8_t { kNone, kCPI, kNC, kPC, kAC, kAJC, kAAJ, kAV, kAJN, kNV };

constexpr size_t kRuleCodeCount = 10;

// The nine rules in scheduling order.
constexpr std::array<RuleCode, 9> kScheduleOrder = {
    RuleCode::kAC,  RuleCode::kAJC, RuleCode::kCPI, RuleCode::kNC, RuleCode::kPC,
    RuleCode::kAAJ, RuleCode::kAV,  RuleCode::kAJN, RuleCode::kNV};

// "CPI", "NONE", ...
std::string_view rule_code_name(RuleCode code);
// Case-insensitive.
std::optional<RuleCode> parse_rule_code(std::string_view name);
// NONE followed by the nine rule codes; the exported feature vocabulary.
const std::array<RuleCode, kRuleCodeCount>& rule_vocabulary();

class RuleSet {
 public:
  RuleSet() = default;
  RuleSet(std::initializer_list<RuleCode> rules);

  static RuleSet all();
  // Everything except AV and NV.
  static RuleSet defaults();
  // "cpi,nc,pc"; also accepts "all", "none", "default". Throws
  // std::invalid_argument on an unknown name.
  static RuleSet parse(std::string_view text);

  bool contains(RuleCode r) const { return bits_.test(static_cast<size_t>(r)); }
  RuleSet& add(RuleCode r);
  RuleSet& remove(RuleCode r);
  bool empty() const { return bits_.none(); }
  bool is_subset_of(const RuleSet& other) const;
  // Enabled rules in scheduling order.
  std::vector<RuleCode> scheduled() const;
  // "cpi,nc,pc" in scheduling order.
  std::string to_string() const;

  bool operator==(const RuleSet&) const = default;

 private:
  std::bitset<kRuleCodeCount> bits_;
};

struct RuleConfig {
  RuleSet enabled = RuleSet::defaults();
  int max_iterations = 1000;
};

struct RuleAssignment {
  int dependent = 0;
  int head = 0;
  RuleCode code = RuleCode::kNone;

  bool operator==(const RuleAssignment&) const = default;
};

struct EngineDiagnostics {
  std::array<uint64_t, kRuleCodeCount> fired{};
  uint64_t skipped_cycles = 0;
  uint64_t loop_iterations = 0;
  uint64_t queued_adverb_pairs = 0;
  uint64_t queued_adjective_pairs = 0;
  uint64_t tokens = 0;
  uint64_t assigned = 0;

  void merge(const EngineDiagnostics& other);
};

struct EngineResult {
  std::vector<RuleAssignment> assignments;
  EngineDiagnostics diagnostics;

  // Code of the rule that decided each token's head; NONE elsewhere.
  std::vector<RuleCode> codes(size_t token_count) const;
};

// A run broke one of its own invariants, e.g. the iteration cap.
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WordClass { kNoun, kProperNoun, kPronoun, kAdjective, kAdverb, kVerb, kDeterminer, kOther };

// From UPOS when present, otherwise from the analysis' root POS.
WordClass word_class(const Token& token, const MorphAnalysis* analysis);

// Mutable per-sentence state shared by the rule passes.
class EngineState {
 public:
  // `analyses` must outlive the state. Throws std::invalid_argument when a
  // token has no analysis or the sizes disagree.
  EngineState(const Sentence& sentence, const TokenAnalyses& analyses);

  size_t size() const { return words_.size(); }
  const std::vector<int>& remaining() const { return remaining_; }
  const std::vector<std::pair<int, int>>& consecutive_adverbs() const { return adverb_pairs_; }
  const std::vector<std::pair<int, int>>& consecutive_adjectives() const { return adjective_pairs_; }
  const std::vector<RuleAssignment>& assignments() const { return assignments_; }
  const std::set<int>& cp_marked() const { return cp_marked_; }
  std::optional<int> head_of(int id) const;
  bool in_remaining(int id) const;

  WordClass word_class(int id) const { return word(id).cls; }
  const WordKeys& keys(int id) const { return word(id).keys; }
  const MorphAnalysis& analysis(int id) const { return *word(id).analysis; }
  bool has_tag(int id, std::string_view tag) const;
  bool is_cp_marked(int id) const { return cp_marked_.contains(id); }

  // Records head(dependent) = head unless the dependent already has a head
  // or the arc would close a cycle (counted, then skipped). Queued partners
  // of the dependent are bound to the same head. Returns whether the arc was
  // added.
  bool assign(int dependent, int head, RuleCode code);
  // Sets `first` aside until `second` gets a head.
  void queue_adverbs(int first, int second);
  void queue_adjectives(int first, int second);
  void mark_cp(int id) { cp_marked_.insert(id); }

  EngineDiagnostics& diagnostics() { return diag_; }
  const EngineDiagnostics& diagnostics() const { return diag_; }

 private:
  struct Word {
    WordClass cls;
    WordKeys keys;
    const MorphAnalysis* analysis;
  };

  const Word& word(int id) const { return words_.at(id - 1); }
  void drop(int id);
  bool closes_cycle(int dependent, int head) const;
  void bind_partners(int second, int head);

  std::vector<Word> words_;
  std::vector<int> remaining_;
  std::vector<int> heads_;  // 0-based index by id-1; -1 = open
  std::vector<std::pair<int, int>> adverb_pairs_;
  std::vector<std::pair<int, int>> adjective_pairs_;
  std::vector<RuleAssignment> assignments_;
  std::set<int> cp_marked_;
  EngineDiagnostics diag_;
};

// Single passes. Each returns true when it changed the state.
bool rule_cpi(EngineState& state, const Lexicon& lex);
bool rule_nc(EngineState& state, const Lexicon& lex);
bool rule_pc(EngineState& state, const Lexicon& lex);
bool rule_ac(EngineState& state, const Lexicon& lex);
bool rule_ajc(EngineState& state, const Lexicon& lex);
bool rule_aaj(EngineState& state, const Lexicon& lex);
bool rule_av(EngineState& state, const Lexicon& lex);
bool rule_ajn(EngineState& state, const Lexicon& lex);
bool rule_nv(EngineState& state, const Lexicon& lex);

bool apply_rule(RuleCode rule, EngineState& state, const Lexicon& lex);

// Full schedule over one sentence.
EngineResult run(const Sentence& sentence, const TokenAnalyses& analyses,
                 const Lexicon& lex, const RuleConfig& cfg = {});

// One run per sentence, in input order, on up to `jobs` threads.
std::vector<EngineResult> run_all(const std::vector<Sentence>& sentences,
                                  const std::vector<TokenAnalyses>& analyses,
                                  const Lexicon& lex, const RuleConfig& cfg = {},
                                  int jobs = 1);

}  // namespace ruleparse

#endif  // RULEPARSE_ENGINE_H_
