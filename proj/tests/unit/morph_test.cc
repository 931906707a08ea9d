#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "generators.h"
#include "oracles.h"
#include "ruleparse/conllu.h"
#include "ruleparse/morph.h"

using namespace ruleparse;
using ruleparse::testing::shipped_inventory;

TEST_CASE("shipped inventory has 81 tags") {
  const auto& inv = shipped_inventory();
  CHECK(inv.size() == 81);
  size_t infl = 0;
  for (const auto& e : inv.entries()) infl += e.cls == SuffixClass::kInflectional;
  CHECK(infl == 36);
  CHECK(inv.class_of("Gen") == SuffixClass::kInflectional);
  CHECK(inv.class_of("PastPart") == SuffixClass::kDerivational);
  CHECK_FALSE(inv.class_of("Noun").has_value());
  CHECK(inv.column("A1sg") == 0u);
}

TEST_CASE("inventory parsing errors") {
  std::istringstream dup("A\tinflectional\nA\tderivational\n");
  CHECK_THROWS(SuffixInventory::parse(dup));
  std::istringstream bad("A\tsomething\n");
  CHECK_THROWS(SuffixInventory::parse(bad));
}

TEST_CASE("morpheme sequences") {
  auto a = parse_morphemes("insan", "Noun+A3pl+Pnon+Gen");
  CHECK(a.pos == "Noun");
  CHECK(a.tags == std::vector<std::string>{"A3pl", "Pnon", "Gen"});
  CHECK(a.morpheme_string() == "Noun+A3pl+Pnon+Gen");
  CHECK(last_suffix(a) == "Gen");
  CHECK(inflectional_suffixes(a, shipped_inventory()) ==
        std::vector<std::string>{"A3pl", "Pnon", "Gen"});

  auto bare = parse_morphemes("her", "Det");
  CHECK_FALSE(last_suffix(bare).has_value());
  CHECK(inflectional_suffixes(bare, shipped_inventory()).empty());

  // A derivation keeps its root-POS marker out of the inflectional view.
  auto d = parse_morphemes("iste", "Verb+Pos+PastPart+Noun+P3sg+Acc");
  CHECK(inflectional_suffixes(d, shipped_inventory()) ==
        std::vector<std::string>{"Pos", "P3sg", "Acc"});
  CHECK(last_suffix(d) == "Acc");

  CHECK_THROWS_AS(parse_morphemes("x", "Noun++Gen"), std::invalid_argument);
  CHECK_THROWS_AS(parse_morphemes("x", "A3sg+Gen"), std::invalid_argument);
  CHECK_THROWS_AS(parse_morphemes("", "Noun"), std::invalid_argument);

  auto unk = parse_morphemes("x", "Noun+Bogus");
  CHECK_THROWS_AS(check_analysis(unk, shipped_inventory()), UnknownTagError);
  CHECK_THROWS_AS(inflectional_suffixes(unk, shipped_inventory()), UnknownTagError);
}

TEST_CASE("sidecar reading") {
  std::istringstream in("# c\n1\t1\tev\tNoun+A3sg\n1\t2\tgit\tVerb+Pos\n");
  auto side = read_morph_sidecar(in);
  CHECK(side.size() == 2);
  auto an = analyses_for(side, 1, 3);
  REQUIRE(an.size() == 3);
  CHECK(an[0]->lemma == "ev");
  CHECK_FALSE(an[2].has_value());

  std::istringstream dup("1\t1\tev\tNoun\n1\t1\tev\tNoun\n");
  try {
    read_morph_sidecar(dup);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream short_rec("1\t1\tev\n");
  CHECK_THROWS_AS(read_morph_sidecar(short_rec), FormatError);

  std::ostringstream out;
  write_morph_sidecar(out, side);
  std::istringstream again(out.str());
  CHECK(read_morph_sidecar(again) == side);
}

namespace {

std::vector<MorphAnalysis> random_analyses(uint64_t seed, size_t n, size_t lemma_pool) {
  testing::Rng rng(seed);
  std::vector<std::string> lemmas;
  for (size_t i = 0; i < lemma_pool; ++i) lemmas.push_back("l" + std::to_string(i));
  std::vector<MorphAnalysis> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back(testing::random_analysis(rng, shipped_inventory(), lemmas));
  }
  return out;
}

}  // namespace

TEST_CASE("matrix equals a naive recount") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    auto corpus = random_analyses(seed, 1 + seed * 2, 1 + seed % 9);
    for (size_t cap : {size_t{1}, size_t{3}, size_t{1000}}) {
      auto m = build_matrix(corpus, shipped_inventory(), cap);
      auto naive = testing::naive_matrix(corpus, shipped_inventory(), cap);
      REQUIRE(m.rows() == naive.size());
      for (const auto& [lemma, row] : naive) {
        const auto* got = m.row(lemma);
        REQUIRE(got != nullptr);
        CHECK(*got == row);
      }
    }
  }
}

TEST_CASE("rows sum to one and unknown lemmas get zeros") {
  auto corpus = random_analyses(99, 500, 40);
  auto m = build_matrix(corpus, shipped_inventory());
  REQUIRE_FALSE(m.empty());
  for (const auto& [lemma, row] : m.data()) {
    double s = std::accumulate(row.begin(), row.end(), 0.0);
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
  auto z = suffix_vector(m, "no-such-lemma");
  CHECK(z == std::vector<double>(81, 0.0));
}

TEST_CASE("cap keeps the most frequent lemmas, ties by lemma") {
  std::vector<MorphAnalysis> corpus{
      parse_morphemes("b", "Noun+A3sg"), parse_morphemes("a", "Noun+A3pl"),
      parse_morphemes("c", "Noun+Gen"),  parse_morphemes("c", "Noun+Acc"),
      parse_morphemes("z", "Adv"),  parse_morphemes("z", "Adv"), parse_morphemes("z", "Adv")};
  MatrixDiagnostics diag;
  auto m = build_matrix(corpus, shipped_inventory(), 2, &diag);
  CHECK(m.rows() == 2);
  CHECK(m.row("c") != nullptr);
  CHECK(m.row("a") != nullptr);
  CHECK(m.row("b") == nullptr);
  CHECK(m.row("z") == nullptr);  // never seen with a counted suffix
  CHECK(diag.lemmas_seen == 4);
  CHECK(diag.lemmas_kept == 2);
  const auto& c = *m.row("c");
  CHECK(c[*shipped_inventory().column("Gen")] == 0.5);
  CHECK(c[*shipped_inventory().column("Acc")] == 0.5);
  CHECK_THROWS(build_matrix(corpus, shipped_inventory(), 0));
}

TEST_CASE("unknown tags are counted in diagnostics, not in rows") {
  std::vector<MorphAnalysis> corpus{parse_morphemes("a", "Noun+Weird+Gen")};
  MatrixDiagnostics diag;
  auto m = build_matrix(corpus, shipped_inventory(), 10, &diag);
  CHECK(diag.unknown_tags.at("Weird") == 1);
  CHECK((*m.row("a"))[*shipped_inventory().column("Gen")] == 1.0);
}

TEST_CASE("matrix does not depend on the number of jobs") {
  auto corpus = random_analyses(5, 3000, 200);
  auto one = build_matrix(corpus, shipped_inventory(), 150, nullptr, 1);
  for (int jobs : {2, 3, 8}) {
    CHECK(build_matrix(corpus, shipped_inventory(), 150, nullptr, jobs) == one);
  }
}

TEST_CASE("quantized rows sum to exactly one billion units") {
  std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto u = quantize_row(thirds);
  CHECK(u[0] + u[1] + u[2] == 1000000000);
  CHECK(format_units(666666667) == "0.666666667");
  CHECK(format_units(1000000000) == "1.000000000");
  CHECK(format_units(5) == "0.000000005");

  testing::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    size_t n = 1 + rng() % 81;
    std::vector<uint64_t> counts(n);
    uint64_t total = 0;
    for (auto& c : counts) total += c = rng() % 7;
    if (total == 0) continue;
    std::vector<double> row(n);
    for (size_t k = 0; k < n; ++k) row[k] = static_cast<double>(counts[k]) / total;
    auto units = quantize_row(row);
    int64_t sum = 0;
    for (size_t k = 0; k < n; ++k) {
      sum += units[k];
      // Never more than one unit away from the exact value.
      CHECK(std::abs(static_cast<double>(units[k]) - row[k] * 1e9) < 1.0 + 1e-6);
    }
    CHECK(sum == 1000000000);
    // Quantizing the quantized row is a fixed point.
    std::vector<double> back(n);
    for (size_t k = 0; k < n; ++k) back[k] = units[k] / 1e9;
    CHECK(quantize_row(back) == units);
  }
}

TEST_CASE("matrix file round trip is bit-exact after the first write") {
  auto corpus = random_analyses(17, 800, 60);
  auto m = build_matrix(corpus, shipped_inventory());
  std::ostringstream first;
  write_matrix(first, m);
  std::istringstream in(first.str());
  auto back = read_matrix(in, shipped_inventory());
  CHECK(back.rows() == m.rows());
  std::ostringstream second;
  write_matrix(second, back);
  CHECK(second.str() == first.str());

  std::istringstream bad_header("lemma\tX\n");
  CHECK_THROWS_AS(read_matrix(bad_header, shipped_inventory()), FormatError);
}

TEST_CASE("empty corpus gives a header-only matrix") {
  auto m = build_matrix({}, shipped_inventory());
  std::ostringstream out;
  write_matrix(out, m);
  std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.rfind("lemma\tA1sg\t", 0) == 0);
}
