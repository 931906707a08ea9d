// CoNLL-U treebank reading and writing.
//
// Only syntactic-word lines become tokens. Multiword range lines ("3-4") are
// kept verbatim so a file can be written back unchanged; empty-node lines
// ("5.1") are rejected.

#ifndef RULEPARSE_CONLLU_H_
#define RULEPARSE_CONLLU_H_

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ruleparse {

// Input format error. Carries the 1-based sentence ordinal and the 1-based
// line number when they are known (0 otherwise).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int sentence = 0, int line = 0);

  // Same location, message prefixed with `context` (e.g. a file path).
  FormatError with_context(const std::string& context) const;

  int sentence() const { return sentence_; }
  int line() const { return line_; }

 private:
  struct Raw {};
  FormatError(Raw, const std::string& message, int sentence, int line);

  int sentence_;
  int line_;
};

// Ordered Key=Value list as found in FEATS and MISC. An entry without '='
// (legal in MISC) has no value.
class Annotations {
 public:
  struct Entry {
    std::string key;
    std::optional<std::string> value;
    bool operator==(const Entry&) const = default;
  };

  Annotations() = default;

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  const std::optional<std::string>* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  // Value of `key` or nullopt when the key is missing or has no value.
  std::optional<std::string> get(std::string_view key) const;

  // Replaces the value in place when the key exists, appends otherwise.
  void set(std::string_view key, std::optional<std::string> value);
  void erase(std::string_view key);

  // "_" for an empty list.
  std::string to_string() const;

  bool operator==(const Annotations&) const = default;

 private:
  std::vector<Entry> entries_;
};

struct Token {
  int id = 0;
  std::string form;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  std::optional<std::string> xpos;
  Annotations feats;
  std::optional<int> head;
  std::optional<std::string> deprel;
  std::optional<std::string> deps;
  Annotations misc;

  bool operator==(const Token&) const = default;
};

struct MultiwordRange {
  int first = 0;
  int last = 0;
  std::string line;  // verbatim, without the trailing newline

  bool operator==(const MultiwordRange&) const = default;
};

struct Sentence {
  std::vector<std::string> comments;  // text after the leading "# "
  std::vector<Token> tokens;
  std::vector<MultiwordRange> ranges;

  size_t size() const { return tokens.size(); }
  const Token& token(int id) const { return tokens.at(id - 1); }

  bool operator==(const Sentence&) const = default;
};

// Throws FormatError when ids are not 1..n, a head is out of range or points
// at its own token, feature keys repeat, or a fully headed sentence is not a
// single-rooted tree.
void validate(const Sentence& sentence, int ordinal = 0);

std::vector<Sentence> parse_conllu(std::istream& in);
std::vector<Sentence> parse_conllu(std::string_view text);

void write_conllu(std::ostream& out, std::span<const Sentence> sentences);
std::string write_conllu(std::span<const Sentence> sentences);

std::string format_token_line(const Token& token);

std::vector<Sentence> read_conllu_file(const std::string& path);

}  // namespace ruleparse

#endif  // RULEPARSE_CONLLU_H_
