#include "ruleparse/engine.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ruleparse/parallel.h"
#include "ruleparse/text.h"

namespace ruleparse {

namespace {

constexpr std::array<std::string_view, kRuleCodeCount> kNames = {
    "NONE", "CPI", "NC", "PC", "AC", "AJC", "AAJ", "AV", "AJN", "NV"};

size_t idx(RuleCode c) { return static_cast<size_t>(c); }

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

}  // namespace

std::string_view rule_code_name(RuleCode code) { return kNames[idx(code)]; }

std::optional<RuleCode> parse_rule_code(std::string_view name) {
  std::string up = ascii_upper(trim(name));
  for (size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == up) return static_cast<RuleCode>(i);
  }
  return std::nullopt;
}

const std::array<RuleCode, kRuleCodeCount>& rule_vocabulary() {
  static const std::array<RuleCode, kRuleCodeCount> vocab = {
      RuleCode::kNone, RuleCode::kCPI, RuleCode::kNC,  RuleCode::kPC,  RuleCode::kAC,
      RuleCode::kAJC,  RuleCode::kAAJ, RuleCode::kAV,  RuleCode::kAJN, RuleCode::kNV};
  return vocab;
}

// --- RuleSet -------------------------------------------------------------

RuleSet::RuleSet(std::initializer_list<RuleCode> rules) {
  for (RuleCode r : rules) add(r);
}

RuleSet RuleSet::all() {
  RuleSet s;
  for (RuleCode r : kScheduleOrder) s.add(r);
  return s;
}

RuleSet RuleSet::defaults() {
  return RuleSet::all().remove(RuleCode::kAV).remove(RuleCode::kNV);
}

RuleSet RuleSet::parse(std::string_view text) {
  std::string_view t = trim(text);
  std::string up = ascii_upper(t);
  if (up == "ALL") return all();
  if (up == "DEFAULT" || up == "DEFAULTS") return defaults();
  RuleSet s;
  if (up == "NONE" || up.empty()) return s;
  for (auto part : split(t, ',')) {
    auto name = trim(part);
    if (name.empty()) continue;
    auto code = parse_rule_code(name);
    if (!code || *code == RuleCode::kNone) {
      throw std::invalid_argument("unknown rule '" + std::string(name) +
                                  "' (expected cpi, nc, pc, ac, ajc, aaj, av, ajn, nv)");
    }
    s.add(*code);
  }
  return s;
}

RuleSet& RuleSet::add(RuleCode r) {
  if (r != RuleCode::kNone) bits_.set(idx(r));
  return *this;
}

RuleSet& RuleSet::remove(RuleCode r) {
  bits_.reset(idx(r));
  return *this;
}

bool RuleSet::is_subset_of(const RuleSet& other) const {
  return (bits_ & ~other.bits_).none();
}

std::vector<RuleCode> RuleSet::scheduled() const {
  std::vector<RuleCode> out;
  for (RuleCode r : kScheduleOrder) {
    if (contains(r)) out.push_back(r);
  }
  return out;
}

std::string RuleSet::to_string() const {
  std::string out;
  for (RuleCode r : scheduled()) {
    if (!out.empty()) out.push_back(',');
    std::string name(rule_code_name(r));
    for (char& c : name) c = static_cast<char>(c - 'A' + 'a');
    out += name;
  }
  return out.empty() ? "none" : out;
}

// --- results -------------------------------------------------------------

void EngineDiagnostics::merge(const EngineDiagnostics& other) {
  for (size_t i = 0; i < fired.size(); ++i) fired[i] += other.fired[i];
  skipped_cycles += other.skipped_cycles;
  loop_iterations += other.loop_iterations;
  queued_adverb_pairs += other.queued_adverb_pairs;
  queued_adjective_pairs += other.queued_adjective_pairs;
  tokens += other.tokens;
  assigned += other.assigned;
}

std::vector<RuleCode> EngineResult::codes(size_t token_count) const {
  std::vector<RuleCode> out(token_count, RuleCode::kNone);
  for (const auto& a : assignments) {
    if (a.dependent >= 1 && static_cast<size_t>(a.dependent) <= token_count) {
      out[a.dependent - 1] = a.code;
    }
  }
  return out;
}

WordClass word_class(const Token& token, const MorphAnalysis* analysis) {
  if (token.upos) {
    const std::string& u = *token.upos;
    if (u == "NOUN") return WordClass::kNoun;
    if (u == "PROPN") return WordClass::kProperNoun;
    if (u == "PRON") return WordClass::kPronoun;
    if (u == "ADJ") return WordClass::kAdjective;
    if (u == "ADV") return WordClass::kAdverb;
    if (u == "VERB") return WordClass::kVerb;
    if (u == "DET") return WordClass::kDeterminer;
    return WordClass::kOther;
  }
  if (!analysis) return WordClass::kOther;
  const std::string& p = analysis->pos;
  if (p == "Noun") return analysis->has_tag("Prop") ? WordClass::kProperNoun : WordClass::kNoun;
  if (p == "Prop") return WordClass::kProperNoun;
  if (p == "Pron") return WordClass::kPronoun;
  if (p == "Adj") return WordClass::kAdjective;
  if (p == "Adv") return WordClass::kAdverb;
  if (p == "Verb") return WordClass::kVerb;
  if (p == "Det") return WordClass::kDeterminer;
  return WordClass::kOther;
}

// --- EngineState ---------------------------------------------------------

EngineState::EngineState(const Sentence& sentence, const TokenAnalyses& analyses) {
  const size_t n = sentence.tokens.size();
  if (analyses.size() != n) {
    throw std::invalid_argument("sentence has " + std::to_string(n) + " tokens but " +
                      std::to_string(analyses.size()) + " analyses");
  }
  words_.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.id != static_cast<int>(i) + 1) {
      throw std::invalid_argument("token ids must run 1.." + std::to_string(n));
    }
    if (!analyses[i]) {
      throw std::invalid_argument("token " + std::to_string(t.id) + " ('" + t.form +
                        "') has no morphological analysis");
    }
    const MorphAnalysis* a = &*analyses[i];
    WordKeys keys{t.form, !a->lemma.empty() ? a->lemma : t.lemma.value_or(t.form)};
    words_.push_back(Word{ruleparse::word_class(t, a), std::move(keys), a});
    remaining_.push_back(t.id);
  }
  heads_.assign(n, -1);
  diag_.tokens = n;
}

std::optional<int> EngineState::head_of(int id) const {
  int h = heads_.at(id - 1);
  if (h < 0) return std::nullopt;
  return h;
}

bool EngineState::in_remaining(int id) const {
  return std::find(remaining_.begin(), remaining_.end(), id) != remaining_.end();
}

bool EngineState::has_tag(int id, std::string_view tag) const {
  return analysis(id).has_tag(tag);
}

void EngineState::drop(int id) {
  auto it = std::find(remaining_.begin(), remaining_.end(), id);
  if (it != remaining_.end()) remaining_.erase(it);
}

bool EngineState::closes_cycle(int dependent, int head) const {
  // Following heads upwards from `head` must not reach `dependent`.
  int cur = head;
  for (size_t steps = 0; steps <= heads_.size(); ++steps) {
    if (cur == dependent) return true;
    int next = heads_[cur - 1];
    if (next <= 0) return false;
    cur = next;
  }
  return true;
}

bool EngineState::assign(int dependent, int head, RuleCode code) {
  const int n = static_cast<int>(words_.size());
  if (dependent < 1 || dependent > n || head < 1 || head > n) {
    throw EngineError("arc " + std::to_string(dependent) + " -> " +
                      std::to_string(head) + " outside the sentence");
  }
  if (heads_[dependent - 1] >= 0) return false;
  if (dependent == head || closes_cycle(dependent, head)) {
    ++diag_.skipped_cycles;
    return false;
  }
  heads_[dependent - 1] = head;
  assignments_.push_back({dependent, head, code});
  ++diag_.fired[idx(code)];
  ++diag_.assigned;
  drop(dependent);
  bind_partners(dependent, head);
  return true;
}

void EngineState::bind_partners(int second, int head) {
  // Copy: recursive binds may append to neither list, but keep this robust.
  for (auto [first, s] : std::vector(adverb_pairs_)) {
    if (s == second && heads_[first - 1] < 0) assign(first, head, RuleCode::kAC);
  }
  for (auto [first, s] : std::vector(adjective_pairs_)) {
    if (s == second && heads_[first - 1] < 0) assign(first, head, RuleCode::kAJC);
  }
}

void EngineState::queue_adverbs(int first, int second) {
  adverb_pairs_.emplace_back(first, second);
  ++diag_.queued_adverb_pairs;
  drop(first);
  if (auto h = head_of(second)) assign(first, *h, RuleCode::kAC);
}

void EngineState::queue_adjectives(int first, int second) {
  adjective_pairs_.emplace_back(first, second);
  ++diag_.queued_adjective_pairs;
  drop(first);
  if (auto h = head_of(second)) assign(first, *h, RuleCode::kAJC);
}

// --- rules ---------------------------------------------------------------

namespace {

bool is_noun(WordClass c) { return c == WordClass::kNoun || c == WordClass::kProperNoun; }

// Calls `step(pos)` for each adjacent pair (remaining[pos], remaining[pos+1]).
// `step` returns true when it removed something from the remaining list; the
// same position is then examined again, which either re-pairs the first word
// with its new neighbour or moves on to the old second word.
template <class Step>
bool scan_pairs(EngineState& st, Step&& step) {
  bool changed = false;
  size_t pos = 0;
  while (pos + 1 < st.remaining().size()) {
    size_t before = st.remaining().size();
    bool did = step(pos);
    changed |= did;
    if (!did || st.remaining().size() >= before) ++pos;
  }
  return changed;
}

std::pair<int, int> pair_at(const EngineState& st, size_t pos) {
  return {st.remaining()[pos], st.remaining()[pos + 1]};
}

// Longest lexicon entry starting at remaining[pos]; the matched words are
// chained with `link(ids)`.
template <class Link>
bool scan_entries(EngineState& st, const Lexicon& lex, LexiconClass cls, Link&& link) {
  return scan_pairs(st, [&](size_t pos) {
    const auto& rem = st.remaining();
    std::vector<const WordKeys*> words;
    for (size_t i = pos; i < rem.size(); ++i) words.push_back(&st.keys(rem[i]));
    size_t len = lex.match_at(cls, words);
    if (len < 2) return false;
    std::vector<int> ids(rem.begin() + pos, rem.begin() + pos + len);
    return link(ids);
  });
}

// Every component is a bare nominal stem: no overt suffix at all.
bool is_bare(const MorphAnalysis& a) {
  return std::all_of(a.tags.begin(), a.tags.end(), [](const std::string& t) {
    return t == "A3sg" || t == "Pnon" || t == "Nom" || t == "Prop";
  });
}

bool is_nc_nominal(WordClass c) { return is_noun(c) || c == WordClass::kAdjective; }

}  // namespace

bool rule_cpi(EngineState& st, const Lexicon& lex) {
  return scan_entries(st, lex, LexiconClass::kComplexPredicate, [&](const std::vector<int>& ids) {
    bool any = false;
    for (size_t k = 1; k < ids.size(); ++k) {
      if (st.assign(ids[k], ids[k - 1], RuleCode::kCPI)) {
        any = true;
        if (is_noun(st.word_class(ids[k - 1]))) st.mark_cp(ids[k - 1]);
      }
    }
    return any;
  });
}

bool rule_nc(EngineState& st, const Lexicon& lex) {
  bool changed = false;
  auto nominal = [&](const std::vector<int>& ids) {
    return std::all_of(ids.begin(), ids.end(),
                       [&](int id) { return is_nc_nominal(st.word_class(id)); });
  };
  // Head-initial classes: the first word heads the rest.
  auto head_first = [&](const std::vector<int>& ids) {
    if (!nominal(ids)) return false;
    bool any = false;
    for (size_t k = 1; k < ids.size(); ++k) {
      any |= st.assign(ids[k], ids[k - 1], RuleCode::kNC);
    }
    return any;
  };
  // Possessive compounds: each word depends on the next.
  auto head_last = [&](const std::vector<int>& ids) {
    if (!nominal(ids)) return false;
    bool any = false;
    for (size_t k = 0; k + 1 < ids.size(); ++k) {
      any |= st.assign(ids[k], ids[k + 1], RuleCode::kNC);
    }
    return any;
  };
  changed |= scan_entries(st, lex, LexiconClass::kNounCompound, head_first);
  changed |= scan_entries(st, lex, LexiconClass::kReduplicatedCompound, head_first);
  changed |= scan_entries(st, lex, LexiconClass::kPossessiveCompound, head_last);
  return changed;
}

bool rule_pc(EngineState& st, const Lexicon&) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    WordClass ca = st.word_class(a), cb = st.word_class(b);
    if (ca == WordClass::kDeterminer && is_noun(cb)) {
      return st.assign(a, b, RuleCode::kPC);
    }
    if (!is_noun(ca) || !is_noun(cb) || st.is_cp_marked(a)) return false;
    if (ca == WordClass::kProperNoun && cb == WordClass::kProperNoun) {
      return st.assign(b, a, RuleCode::kPC);
    }
    if (st.has_tag(a, "Gen")) return st.assign(a, b, RuleCode::kPC);
    if (is_bare(st.analysis(a)) && (st.has_tag(b, "P3sg") || st.has_tag(b, "P3pl")) &&
        !st.has_tag(b, "Acc")) {
      return st.assign(a, b, RuleCode::kPC);
    }
    return false;
  });
}

bool rule_ac(EngineState& st, const Lexicon& lex) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    if (st.word_class(a) != WordClass::kAdverb || st.word_class(b) != WordClass::kAdverb) {
      return false;
    }
    if (lex.is_degree_adverb(st.keys(a))) return st.assign(a, b, RuleCode::kAC);
    st.queue_adverbs(a, b);
    return true;
  });
}

bool rule_ajc(EngineState& st, const Lexicon&) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    if (st.word_class(a) != WordClass::kAdjective || st.word_class(b) != WordClass::kAdjective) {
      return false;
    }
    st.queue_adjectives(a, b);
    return true;
  });
}

bool rule_aaj(EngineState& st, const Lexicon& lex) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    if (st.word_class(a) == WordClass::kAdverb && st.word_class(b) == WordClass::kAdjective &&
        lex.is_degree_adverb(st.keys(a))) {
      return st.assign(a, b, RuleCode::kAAJ);
    }
    return false;
  });
}

bool rule_av(EngineState& st, const Lexicon& lex) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    if (st.word_class(a) != WordClass::kAdverb || st.word_class(b) != WordClass::kVerb) {
      return false;
    }
    // Emphasizers attach to the word right before them in the sentence.
    const int prev = a - 1;
    for (const auto& e : lex.emphasis_entries(st.keys(a))) {
      if (prev < 1) continue;
      if (e.preceding_tag && !st.has_tag(prev, *e.preceding_tag)) continue;
      return st.assign(a, prev, RuleCode::kAV);
    }
    return st.assign(a, b, RuleCode::kAV);
  });
}

bool rule_ajn(EngineState& st, const Lexicon&) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    if (st.word_class(a) == WordClass::kAdjective && is_noun(st.word_class(b))) {
      return st.assign(a, b, RuleCode::kAJN);
    }
    return false;
  });
}

bool rule_nv(EngineState& st, const Lexicon&) {
  return scan_pairs(st, [&](size_t pos) {
    auto [a, b] = pair_at(st, pos);
    WordClass ca = st.word_class(a);
    if ((is_noun(ca) || ca == WordClass::kPronoun) && !st.is_cp_marked(a) &&
        st.word_class(b) == WordClass::kVerb) {
      return st.assign(a, b, RuleCode::kNV);
    }
    return false;
  });
}

bool apply_rule(RuleCode rule, EngineState& st, const Lexicon& lex) {
  switch (rule) {
    case RuleCode::kCPI: return rule_cpi(st, lex);
    case RuleCode::kNC: return rule_nc(st, lex);
    case RuleCode::kPC: return rule_pc(st, lex);
    case RuleCode::kAC: return rule_ac(st, lex);
    case RuleCode::kAJC: return rule_ajc(st, lex);
    case RuleCode::kAAJ: return rule_aaj(st, lex);
    case RuleCode::kAV: return rule_av(st, lex);
    case RuleCode::kAJN: return rule_ajn(st, lex);
    case RuleCode::kNV: return rule_nv(st, lex);
    case RuleCode::kNone: break;
  }
  return false;
}

EngineResult run(const Sentence& sentence, const TokenAnalyses& analyses,
                 const Lexicon& lex, const RuleConfig& cfg) {
  EngineState st(sentence, analyses);
  for (RuleCode r : {RuleCode::kAC, RuleCode::kAJC, RuleCode::kCPI, RuleCode::kNC}) {
    if (cfg.enabled.contains(r)) apply_rule(r, st, lex);
  }
  std::vector<RuleCode> loop;
  for (RuleCode r : {RuleCode::kPC, RuleCode::kAAJ, RuleCode::kAV, RuleCode::kAJN, RuleCode::kNV}) {
    if (cfg.enabled.contains(r)) loop.push_back(r);
  }
  if (!loop.empty()) {
    for (int iter = 1;; ++iter) {
      if (iter > cfg.max_iterations) {
        throw EngineError("rule loop exceeded " + std::to_string(cfg.max_iterations) +
                          " iterations");
      }
      ++st.diagnostics().loop_iterations;
      bool any = false;
      for (RuleCode r : loop) any |= apply_rule(r, st, lex);
      if (!any) break;
    }
  }
  return EngineResult{st.assignments(), st.diagnostics()};
}

std::vector<EngineResult> run_all(const std::vector<Sentence>& sentences,
                                  const std::vector<TokenAnalyses>& analyses,
                                  const Lexicon& lex, const RuleConfig& cfg, int jobs) {
  if (analyses.size() != sentences.size()) {
    throw std::invalid_argument("got analyses for " + std::to_string(analyses.size()) + " of " +
                      std::to_string(sentences.size()) + " sentences");
  }
  std::vector<EngineResult> out(sentences.size());
  parallel_for(sentences.size(), jobs, [&](size_t i) {
    try {
      out[i] = run(sentences[i], analyses[i], lex, cfg);
    } catch (const EngineError& e) {
      throw EngineError("sentence " + std::to_string(i + 1) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("sentence " + std::to_string(i + 1) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace ruleparse
