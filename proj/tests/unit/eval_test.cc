#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.h"
#include "generators.h"
#include "oracles.h"
#include "ruleparse/eval.h"

using namespace ruleparse;
using namespace ruleparse::testing;

namespace {

std::vector<Sentence> four_token_gold() {
  return {sentence_of({{"a", "a", "NOUN", "Noun", 2, "nsubj"},
                       {"b", "b", "VERB", "Verb", 0, "root"}}),
          sentence_of({{"c", "c", "NOUN", "Noun", 0, "root"},
                       {"d", "d", "ADJ", "Adj", 1, "amod"}})};
}

std::vector<Sentence> gold_sample(uint64_t seed, size_t n) {
  std::vector<Sentence> out;
  for (auto& rs : random_corpus(seed, n, 20)) out.push_back(rs.sentence);
  return out;
}

std::vector<Sentence> perturbed(Rng& rng, const std::vector<Sentence>& gold) {
  std::vector<Sentence> out;
  for (const auto& s : gold) {
    Sentence copy = s;
    for (auto& t : copy.tokens) {
      auto r = rng() % 10;
      if (r == 0) t.head = static_cast<int>(rng() % (copy.size() + 1));
      if (r == 1) t.deprel = "dep";
      if (r == 2) t.head.reset();
    }
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace

TEST_CASE("attachment scores on a small case") {
  auto gold = four_token_gold();
  auto sys = gold;
  sys[1].tokens[1].deprel = "nmod";
  auto s = score(gold, sys);
  CHECK(s.total == 4);
  CHECK(s.correct_heads == 4);
  CHECK(s.correct_labeled == 3);
  CHECK(s.uas == 1.0);
  CHECK(s.las == 0.75);

  sys[0].tokens[0].head.reset();
  s = score(gold, sys);
  CHECK(s.correct_heads == 3);
  CHECK(sentence_correct(gold, sys, Metric::kUAS) == std::vector<int64_t>{1, 2});
  CHECK(sentence_correct(gold, sys, Metric::kLAS) == std::vector<int64_t>{1, 1});
}

TEST_CASE("alignment errors") {
  auto gold = four_token_gold();
  auto fewer = gold;
  fewer.pop_back();
  CHECK_THROWS_AS(score(gold, fewer), AlignmentError);
  auto shorter = gold;
  shorter[1].tokens.pop_back();
  try {
    score(gold, shorter);
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(e.sentence() == 2);
  }
  auto no_gold = gold;
  no_gold[0].tokens[0].head.reset();
  CHECK_THROWS_AS(score(no_gold, gold), AlignmentError);
}

TEST_CASE("scores match a naive recount") {
  Rng rng(21);
  for (uint64_t k = 0; k < 50; ++k) {
    auto gold = gold_sample(100 + k, 1 + k % 12);
    auto sys = perturbed(rng, gold);
    auto s = score(gold, sys);
    auto n = naive_score(gold, sys);
    CHECK(s.total == n.total);
    CHECK(s.correct_heads == n.heads);
    CHECK(s.correct_labeled == n.labeled);
    CHECK(s.uas == static_cast<double>(n.heads) / static_cast<double>(n.total));
  }
  auto empty = score({}, {});
  CHECK(empty.total == 0);
  CHECK(empty.uas == 0.0);
}

TEST_CASE("identical outputs give p = 1") {
  auto gold = gold_sample(3, 30);
  Rng rng(4);
  auto sys = perturbed(rng, gold);
  SigOptions opts;
  opts.shuffles = 2000;
  auto r = randomization_test(gold, {sys}, {sys}, opts);
  CHECK(r.p_values[0][0] == 1.0);
  CHECK(r.harmonic_mean_p == 1.0);
}

TEST_CASE("five by five grid") {
  auto gold = gold_sample(8, 40);
  Rng rng(9);
  std::vector<std::vector<Sentence>> a, b;
  for (int i = 0; i < 5; ++i) a.push_back(perturbed(rng, gold));
  for (int i = 0; i < 5; ++i) b.push_back(perturbed(rng, gold));
  SigOptions opts;
  opts.shuffles = 500;
  auto r = randomization_test(gold, a, b, opts);
  REQUIRE(r.p_values.size() == 5);
  size_t count = 0;
  std::vector<double> flat;
  for (const auto& row : r.p_values) {
    REQUIRE(row.size() == 5);
    for (double p : row) {
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
      flat.push_back(p);
      ++count;
    }
  }
  CHECK(count == 25);
  CHECK(r.harmonic_mean_p == doctest::Approx(harmonic_mean(flat)).epsilon(1e-12));
  double arithmetic = std::accumulate(flat.begin(), flat.end(), 0.0) / flat.size();
  CHECK(r.harmonic_mean_p <= arithmetic + 1e-12);

  opts.jobs = 3;
  auto again = randomization_test(gold, a, b, opts);
  CHECK(again.p_values == r.p_values);
}

TEST_CASE("Monte Carlo p approaches the exact tail") {
  const std::vector<std::vector<int64_t>> cases{
      {3, -1, 2}, {1, 1, 1}, {5, 0, -4}, {2, 2, -1, 3, 0, 1}, {0, 0, 0}};
  for (const auto& d : cases) {
    CAPTURE(d.size());
    double p = randomization_p(d, 100000, 42);
    CHECK(std::abs(p - exact_tail(d)) <= 0.02);
  }
}

TEST_CASE("randomization p is deterministic and independent of jobs") {
  std::vector<int64_t> d{1, -2, 0, 3, 1, 1, -1, 2, 0, 4};
  double one = randomization_p(d, 20000, 7, 3, 1);
  CHECK(randomization_p(d, 20000, 7, 3, 4) == one);
  CHECK(randomization_p(d, 20000, 7, 3, 1) == one);
  CHECK(randomization_p(d, 20000, 8, 3, 1) != one);
  CHECK(randomization_p({}, 10, 1) == 1.0);
}

TEST_CASE("significance input checks") {
  auto gold = four_token_gold();
  SigOptions opts;
  opts.shuffles = 0;
  CHECK_THROWS_AS(randomization_test(gold, {gold}, {gold}, opts), std::invalid_argument);
  opts.shuffles = 10;
  CHECK_THROWS_AS(randomization_test(gold, {}, {gold}, opts), std::invalid_argument);
  auto bad = gold;
  bad.pop_back();
  CHECK_THROWS_AS(randomization_test(gold, {gold}, {bad}, opts), AlignmentError);
}

TEST_CASE("harmonic mean") {
  CHECK(harmonic_mean({0.5, 0.5}) == 0.5);
  CHECK(harmonic_mean({1.0, 0.25}) == doctest::Approx(0.4));
}

TEST_CASE("ablation steps") {
  auto steps = cumulative_steps();
  REQUIRE(steps.size() == 8);
  CHECK(steps[0].rules.empty());
  CHECK(steps[7].rules == RuleSet::all());
  for (size_t i = 1; i < steps.size(); ++i) CHECK(steps[i - 1].rules.is_subset_of(steps[i].rules));
  auto six = cumulative_steps_without_av_nv();
  REQUIRE(six.size() == 6);
  CHECK(six.back().rules == RuleSet::defaults());
}

TEST_CASE("ablation rows") {
  const auto& corpus = example_corpus();
  auto rows = ablate(corpus.sentences, corpus.analyses, shipped_lexicon(), cumulative_steps());
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].assigned == 0);
  CHECK_FALSE(rows[0].precision.has_value());
  CHECK(rows[0].coverage == 0.0);
  uint64_t tokens = 0;
  for (const auto& s : corpus.sentences) tokens += s.size();
  for (const auto& r : rows) {
    CHECK(r.tokens == tokens);
    CHECK(r.correct <= r.assigned);
    CHECK(r.uas == static_cast<double>(r.correct) / static_cast<double>(tokens));
  }
  CHECK(rows.back().assigned > rows[1].assigned);
  REQUIRE(rows[1].precision.has_value());
  CHECK(*rows[1].precision ==
        static_cast<double>(rows[1].correct) / static_cast<double>(rows[1].assigned));

  auto parallel = ablate(corpus.sentences, corpus.analyses, shipped_lexicon(),
                         cumulative_steps(), 1000, 3);
  for (size_t i = 0; i < rows.size(); ++i) CHECK(parallel[i].correct == rows[i].correct);
}
