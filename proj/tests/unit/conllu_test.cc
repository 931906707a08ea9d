#include <random>
#include <string>

#include "doctest.h"
#include "generators.h"
#include "ruleparse/conllu.h"

using namespace ruleparse;

namespace {

const char* kSample =
    "# sent_id = 1\n"
    "# text = Makinenin yağı aktı.\n"
    "1\tMakinenin\tmakine\tNOUN\t_\tCase=Gen|Number=Sing\t2\tnmod:poss\t_\t_\n"
    "2\tyağı\tyağ\tNOUN\t_\tCase=Nom\t3\tnsubj\t_\t_\n"
    "3-4\taktı.\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "3\taktı\tak\tVERB\t_\t_\t0\troot\t_\tSpaceAfter=No\n"
    "4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\tFlag\n"
    "\n";

std::string error_of(std::string_view text) {
  try {
    parse_conllu(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reads tokens, comments and ranges") {
  auto sents = parse_conllu(kSample);
  REQUIRE(sents.size() == 1);
  const Sentence& s = sents[0];
  CHECK(s.comments.size() == 2);
  CHECK(s.comments[1] == "text = Makinenin yağı aktı.");
  REQUIRE(s.tokens.size() == 4);
  CHECK(s.tokens[0].feats.get("Case") == "Gen");
  CHECK(s.tokens[0].head == 2);
  CHECK_FALSE(s.tokens[0].xpos.has_value());
  CHECK(s.tokens[2].misc.get("SpaceAfter") == "No");
  CHECK(s.tokens[3].misc.contains("Flag"));
  CHECK_FALSE(s.tokens[3].misc.get("Flag").has_value());
  REQUIRE(s.ranges.size() == 1);
  CHECK(s.ranges[0].first == 3);
  CHECK(s.ranges[0].last == 4);
}

TEST_CASE("writing reproduces the input byte for byte") {
  auto sents = parse_conllu(kSample);
  CHECK(write_conllu(sents) == kSample);
}

TEST_CASE("absent fields are written as underscores") {
  Sentence s;
  Token t;
  t.id = 1;
  t.form = "ev";
  s.tokens.push_back(t);
  CHECK(format_token_line(s.tokens[0]) == "1\tev\t_\t_\t_\t_\t_\t_\t_\t_");
}

TEST_CASE("multiple sentences, CRLF and missing final blank line") {
  std::string text =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\r\n\r\n"
      "1\tb\t_\t_\t_\t_\t2\tdep\t_\t_\n"
      "2\tc\t_\t_\t_\t_\t0\troot\t_\t_\n";
  auto sents = parse_conllu(text);
  REQUIRE(sents.size() == 2);
  CHECK(sents[1].tokens[1].form == "c");
}

TEST_CASE("format errors carry sentence and line") {
  std::string bad_cols = "1\ta\t_\t_\n";
  CHECK(error_of(bad_cols) == "sentence 1, line 1: wrong column count (expected 10, got 4)");

  std::string two =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n\n"
      "1\tb\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "3\tc\t_\t_\t_\t_\t1\tdep\t_\t_\n";
  CHECK(error_of(two) == "sentence 2, line 4: non-contiguous ids");

  std::string self_head = "1\ta\t_\t_\t_\t_\t1\troot\t_\t_\n";
  CHECK(error_of(self_head).find("head is self") != std::string::npos);

  std::string out_of_range = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t7\tdep\t_\t_\n";
  CHECK(error_of(out_of_range) == "sentence 1, line 2: head out of range");

  std::string empty_node =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n1.1\tb\t_\t_\t_\t_\t_\t_\t_\t_\n";
  CHECK(error_of(empty_node).find("empty-node") != std::string::npos);

  std::string dup_feat = "1\ta\t_\t_\t_\tCase=Nom|Case=Acc\t0\troot\t_\t_\n";
  CHECK(error_of(dup_feat).find("duplicate key 'Case'") != std::string::npos);

  std::string two_roots = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t0\troot\t_\t_\n";
  CHECK_FALSE(error_of(two_roots).empty());

  std::string cycle =
      "1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n3\tc\t_\t_\t_\t_\t0\troot\t_\t_\n";
  CHECK_FALSE(error_of(cycle).empty());

  std::string late_comment = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n# late\n";
  CHECK(error_of(late_comment).find("comment line inside") != std::string::npos);

  CHECK(error_of("1\t\xff\t_\t_\t_\t_\t0\troot\t_\t_\n").find("invalid UTF-8") !=
        std::string::npos);
}

TEST_CASE("range must precede its words") {
  std::string text =
      "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n";
  CHECK(error_of(text).find("multiword range") != std::string::npos);
}

TEST_CASE("partial heads are accepted without a tree check") {
  std::string text =
      "1\ta\t_\t_\t_\t_\t2\t_\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t1\t_\t_\t_\n"
      "3\tc\t_\t_\t_\t_\t_\t_\t_\t_\n";
  CHECK(parse_conllu(text).size() == 1);
}

TEST_CASE("random sentences survive write and re-read") {
  testing::Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    std::vector<Sentence> batch{testing::random_conllu_sentence(rng),
                                testing::random_conllu_sentence(rng)};
    std::string text = write_conllu(batch);
    auto back = parse_conllu(text);
    REQUIRE(back == batch);
    REQUIRE(write_conllu(back) == text);
  }
}

TEST_CASE("arbitrary bytes raise FormatError or parse, never anything else") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "1234567890\t\n_-.#=| abcIİı\xc3\xa7\xff";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    size_t len = rng() % 200;
    for (size_t k = 0; k < len; ++k) text.push_back(alphabet[rng() % alphabet.size()]);
    try {
      parse_conllu(text);
    } catch (const FormatError&) {
    }
  }
  // Mutations of a valid file hit deeper paths.
  std::string base(kSample);
  for (int i = 0; i < 3000; ++i) {
    std::string text = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = alphabet[rng() % alphabet.size()]; break;
        case 1: text.erase(pos, 1); break;
        default: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
      }
    }
    try {
      parse_conllu(text);
    } catch (const FormatError&) {
    }
  }
}
