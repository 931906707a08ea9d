#include <algorithm>

#include "doctest.h"
#include "fixtures.h"
#include "ruleparse/engine.h"

using namespace ruleparse;
using namespace ruleparse::testing;

TEST_CASE("golden examples") {
  const auto& corpus = example_corpus();
  REQUIRE(corpus.sentences.size() == 9);
  for (const auto& g : golden_cases()) {
    CAPTURE(g.name);
    RuleConfig cfg;
    cfg.enabled = g.rules;
    auto r = run(corpus.sentences[g.sentence], corpus.analyses[g.sentence], shipped_lexicon(), cfg);
    CHECK(describe(sorted(r.assignments)) == describe(sorted(g.expected)));
  }
}

TEST_CASE("walkthrough leaves the first and last word open") {
  const auto& corpus = example_corpus();
  auto r = run(corpus.sentences[8], corpus.analyses[8], shipped_lexicon(),
               RuleConfig{RuleSet::all()});
  auto codes = r.codes(16);
  std::vector<int> open;
  for (size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] == RuleCode::kNone) open.push_back(static_cast<int>(i + 1));
  }
  CHECK(open == std::vector<int>{1, 16});
  CHECK(r.diagnostics.assigned == 14);
  CHECK(r.diagnostics.tokens == 16);
}

TEST_CASE("consecutive adverbs wait in the queue") {
  const auto& corpus = example_corpus();
  EngineState st(corpus.sentences[6], corpus.analyses[6]);
  CHECK(rule_ac(st, shipped_lexicon()));
  CHECK(st.consecutive_adverbs() == std::vector<std::pair<int, int>>{{2, 3}});
  CHECK(st.remaining() == std::vector<int>{1, 3, 4});
  CHECK_FALSE(st.head_of(2).has_value());

  // Deciding the second adverb binds the first to the same head.
  CHECK(st.assign(3, 4, RuleCode::kAV));
  CHECK(st.head_of(2) == 4);
  CHECK(st.remaining() == std::vector<int>{1, 4});
  auto arcs = sorted(st.assignments());
  CHECK(describe(arcs) == "{2->4 AC, 3->4 AV}");
}

TEST_CASE("assign refuses a second head and cycles") {
  const auto& corpus = example_corpus();
  EngineState st(corpus.sentences[7], corpus.analyses[7]);
  CHECK(st.assign(1, 2, RuleCode::kNV));
  CHECK_FALSE(st.assign(1, 3, RuleCode::kNV));
  CHECK(st.assign(2, 3, RuleCode::kNV));
  CHECK_FALSE(st.assign(3, 1, RuleCode::kNV));
  CHECK(st.diagnostics().skipped_cycles == 1);
  CHECK(st.in_remaining(3));
  CHECK_THROWS_AS(st.assign(4, 99, RuleCode::kNV), EngineError);
}

TEST_CASE("rule sets") {
  CHECK(RuleSet::parse("all") == RuleSet::all());
  CHECK(RuleSet::parse("default") == RuleSet::defaults());
  CHECK(RuleSet::parse("none").empty());
  CHECK(RuleSet::parse("NC, cpi") == RuleSet{RuleCode::kCPI, RuleCode::kNC});
  CHECK(RuleSet::parse("nc,cpi").to_string() == "cpi,nc");
  CHECK(RuleSet::all().to_string() == "ac,ajc,cpi,nc,pc,aaj,av,ajn,nv");
  CHECK_FALSE(RuleSet::defaults().contains(RuleCode::kAV));
  CHECK_FALSE(RuleSet::defaults().contains(RuleCode::kNV));
  CHECK(RuleSet::defaults().is_subset_of(RuleSet::all()));
  CHECK_THROWS_AS(RuleSet::parse("cpi,xyz"), std::invalid_argument);
  CHECK(parse_rule_code("ajn") == RuleCode::kAJN);
  CHECK(rule_code_name(RuleCode::kNone) == "NONE");
  CHECK(rule_vocabulary()[0] == RuleCode::kNone);
}

TEST_CASE("no rules enabled assigns nothing") {
  const auto& corpus = example_corpus();
  auto r = run(corpus.sentences[8], corpus.analyses[8], shipped_lexicon(),
               RuleConfig{RuleSet{}});
  CHECK(r.assignments.empty());
}

TEST_CASE("iteration cap raises EngineError") {
  const auto& corpus = example_corpus();
  RuleConfig cfg{RuleSet::all(), 1};
  CHECK_THROWS_AS(run(corpus.sentences[8], corpus.analyses[8], shipped_lexicon(), cfg),
                  EngineError);
  cfg.max_iterations = 1000;
  CHECK_NOTHROW(run(corpus.sentences[8], corpus.analyses[8], shipped_lexicon(), cfg));
}

TEST_CASE("missing analysis is an input error") {
  const auto& corpus = example_corpus();
  TokenAnalyses partial = corpus.analyses[0];
  partial[1].reset();
  CHECK_THROWS_AS(run(corpus.sentences[0], partial, shipped_lexicon()), std::invalid_argument);
  TokenAnalyses shorter(partial.begin(), partial.end() - 1);
  CHECK_THROWS_AS(run(corpus.sentences[0], shorter, shipped_lexicon()), std::invalid_argument);

  std::vector<Sentence> sents{corpus.sentences[1], corpus.sentences[0]};
  std::vector<TokenAnalyses> an{corpus.analyses[1], partial};
  try {
    run_all(sents, an, shipped_lexicon());
    FAIL("expected std::invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).rfind("sentence 2: ", 0) == 0);
  }
}

TEST_CASE("word class prefers UPOS") {
  Token t;
  t.upos = "ADV";
  MorphAnalysis noun{"x", "Noun", {}};
  CHECK(word_class(t, &noun) == WordClass::kAdverb);
  t.upos.reset();
  CHECK(word_class(t, &noun) == WordClass::kNoun);
  MorphAnalysis prop{"x", "Noun", {"Prop"}};
  CHECK(word_class(t, &prop) == WordClass::kProperNoun);
  t.upos = "AUX";
  CHECK(word_class(t, &noun) == WordClass::kOther);
}

TEST_CASE("diagnostics merge") {
  EngineDiagnostics a, b;
  a.fired[1] = 2;
  b.fired[1] = 3;
  b.skipped_cycles = 1;
  a.merge(b);
  CHECK(a.fired[1] == 5);
  CHECK(a.skipped_cycles == 1);
}
