// Dictionaries consulted by the rules: complex predicates and idioms, the
// three compound classes, and two adverb classes.
//
// One UTF-8 file per class (cpi.txt, nc.txt, pc.txt, redup.txt,
// adv_degree.txt, adv_emph.txt), one entry per line, components separated
// by spaces, '#' starts a comment line. Entries are stored case-folded.

#ifndef RULEPARSE_LEXICON_H_
#define RULEPARSE_LEXICON_H_

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ruleparse {

enum class LexiconClass {
  kComplexPredicate,
  kNounCompound,
  kPossessiveCompound,
  kReduplicatedCompound,
  kDegreeAdverb,
  kEmphasizingAdverb,
};

constexpr std::array<LexiconClass, 6> kLexiconClasses = {
    LexiconClass::kComplexPredicate,     LexiconClass::kNounCompound,
    LexiconClass::kPossessiveCompound,   LexiconClass::kReduplicatedCompound,
    LexiconClass::kDegreeAdverb,         LexiconClass::kEmphasizingAdverb};

// Conventional file name, e.g. "cpi.txt".
std::string_view lexicon_file_name(LexiconClass cls);
bool is_compound_class(LexiconClass cls);

// The two forms under which a token can match a dictionary component.
struct WordKeys {
  std::string form;
  std::string lemma;
};

// An emphasizing adverb entry. "bile" has no condition; "-DAn sonra" only
// applies when the preceding word carries the ablative tag.
struct EmphasisEntry {
  std::string adverb;
  std::optional<std::string> preceding_tag;

  auto operator<=>(const EmphasisEntry&) const = default;
};

class Lexicon {
 public:
  Lexicon() = default;

  // Adds one entry line to a class. Throws std::invalid_argument when a
  // compound-class entry has fewer than two components or an emphasizer
  // uses an unknown suffix notation.
  void add(LexiconClass cls, std::string_view entry);

  // Reads every file of the conventional set from `dir`; a missing or
  // unreadable file is an error naming its path.
  static Lexicon load_dir(const std::string& dir);
  // Loads whichever classes have a path; others stay empty.
  static Lexicon load(const std::array<std::optional<std::string>, 6>& paths);

  size_t size(LexiconClass cls) const;
  bool contains(LexiconClass cls, std::string_view entry) const;

  // Exact lookup of a space-joined, case-folded pair.
  bool match_multiword(LexiconClass cls, std::string_view first,
                       std::string_view second) const;

  // Length of the longest entry of `cls` that matches the words starting at
  // words[0]: non-final components by surface form or lemma, the final
  // component by lemma (complex predicates) or by either (compounds).
  // 0 when nothing matches.
  size_t match_at(LexiconClass cls, const std::vector<const WordKeys*>& words) const;

  bool is_degree_adverb(const WordKeys& w) const;
  // Emphasizer entries whose adverb matches `w` (by lemma or form).
  std::vector<EmphasisEntry> emphasis_entries(const WordKeys& w) const;

  bool operator==(const Lexicon&) const = default;

 private:
  const std::set<std::string, std::less<>>& entries(LexiconClass cls) const;

  std::array<std::set<std::string, std::less<>>, 6> sets_;
  std::array<size_t, 6> max_components_{};
  std::set<EmphasisEntry> emphasis_;
};

}  // namespace ruleparse

#endif  // RULEPARSE_LEXICON_H_
