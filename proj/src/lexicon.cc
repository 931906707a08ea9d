#include "ruleparse/lexicon.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ruleparse/conllu.h"
#include "ruleparse/text.h"

namespace ruleparse {

std::string_view lexicon_file_name(LexiconClass cls) {
  switch (cls) {
    case LexiconClass::kComplexPredicate: return "cpi.txt";
    case LexiconClass::kNounCompound: return "nc.txt";
    case LexiconClass::kPossessiveCompound: return "pc.txt";
    case LexiconClass::kReduplicatedCompound: return "redup.txt";
    case LexiconClass::kDegreeAdverb: return "adv_degree.txt";
    case LexiconClass::kEmphasizingAdverb: return "adv_emph.txt";
  }
  return "";
}

bool is_compound_class(LexiconClass cls) {
  return cls == LexiconClass::kComplexPredicate ||
         cls == LexiconClass::kNounCompound ||
         cls == LexiconClass::kPossessiveCompound ||
         cls == LexiconClass::kReduplicatedCompound;
}

namespace {

size_t slot(LexiconClass cls) { return static_cast<size_t>(cls); }

std::vector<std::string> components(std::string_view entry) {
  std::vector<std::string> out;
  for (auto part : split(entry, ' ')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

// Suffix notations accepted in front of an emphasizing adverb.
std::optional<std::string> notation_tag(std::string_view notation) {
  if (notation == "-DAn") return "Abl";
  if (notation == "-DA") return "Loc";
  if (notation == "-(y)A") return "Dat";
  if (notation == "-(n)In") return "Gen";
  if (notation == "-(y)lA") return "Ins";
  if (notation == "-(y)I") return "Acc";
  return std::nullopt;
}

}  // namespace

void Lexicon::add(LexiconClass cls, std::string_view entry) {
  auto parts = components(trim(entry));
  if (parts.empty()) return;
  if (cls == LexiconClass::kEmphasizingAdverb) {
    EmphasisEntry e;
    if (parts[0].starts_with("-")) {
      auto tag = notation_tag(parts[0]);
      if (!tag || parts.size() != 2) {
        throw std::invalid_argument("unsupported emphasizer entry '" +
                                    std::string(entry) + "'");
      }
      e.preceding_tag = *tag;
      e.adverb = turkish_fold(parts[1]);
    } else {
      if (parts.size() != 1) {
        throw std::invalid_argument("emphasizer entry must be one word: '" +
                                    std::string(entry) + "'");
      }
      e.adverb = turkish_fold(parts[0]);
    }
    emphasis_.insert(e);
  } else if (is_compound_class(cls) && parts.size() < 2) {
    throw std::invalid_argument("entry '" + std::string(trim(entry)) +
                                "' needs at least two components");
  }
  std::vector<std::string> folded;
  for (auto& p : parts) {
    folded.push_back(cls == LexiconClass::kEmphasizingAdverb && p.starts_with("-")
                         ? p
                         : turkish_fold(p));
  }
  sets_[slot(cls)].insert(join(folded, " "));
  max_components_[slot(cls)] = std::max(max_components_[slot(cls)], folded.size());
}

Lexicon Lexicon::load(const std::array<std::optional<std::string>, 6>& paths) {
  Lexicon lex;
  for (LexiconClass cls : kLexiconClasses) {
    const auto& path = paths[slot(cls)];
    if (!path) continue;
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw FormatError("cannot read lexicon file " + *path);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (!is_valid_utf8(line)) {
        throw FormatError(*path + ": invalid UTF-8", 0, line_no);
      }
      try {
        lex.add(cls, line);
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what(), 0, line_no).with_context(*path);
      }
    }
  }
  return lex;
}

Lexicon Lexicon::load_dir(const std::string& dir) {
  std::array<std::optional<std::string>, 6> paths;
  for (LexiconClass cls : kLexiconClasses) {
    auto p = std::filesystem::path(dir) / lexicon_file_name(cls);
    if (!std::filesystem::is_regular_file(p)) {
      throw FormatError("missing lexicon file " + p.string());
    }
    paths[slot(cls)] = p.string();
  }
  return load(paths);
}

const std::set<std::string, std::less<>>& Lexicon::entries(LexiconClass cls) const {
  return sets_[slot(cls)];
}

size_t Lexicon::size(LexiconClass cls) const { return entries(cls).size(); }

bool Lexicon::contains(LexiconClass cls, std::string_view entry) const {
  auto parts = components(entry);
  std::vector<std::string> folded;
  for (auto& p : parts) {
    folded.push_back(cls == LexiconClass::kEmphasizingAdverb && p.starts_with("-")
                         ? p
                         : turkish_fold(p));
  }
  return entries(cls).contains(join(folded, " "));
}

bool Lexicon::match_multiword(LexiconClass cls, std::string_view first,
                              std::string_view second) const {
  if (first.empty() || second.empty()) return false;
  std::string key = turkish_fold(first);
  key.push_back(' ');
  key += turkish_fold(second);
  return entries(cls).contains(key);
}

size_t Lexicon::match_at(LexiconClass cls,
                         const std::vector<const WordKeys*>& words) const {
  const auto& set = entries(cls);
  if (set.empty()) return 0;
  const bool last_by_lemma_only = cls == LexiconClass::kComplexPredicate;
  auto variants = [](const WordKeys& w, bool lemma_only) {
    std::vector<std::string> v;
    if (!w.lemma.empty()) v.push_back(turkish_fold(w.lemma));
    if (!lemma_only && !w.form.empty()) {
      std::string f = turkish_fold(w.form);
      if (v.empty() || v[0] != f) v.push_back(std::move(f));
    }
    return v;
  };
  const size_t longest = std::min(max_components_[slot(cls)], words.size());
  for (size_t len = longest; len >= 2; --len) {
    // Breadth-first over component choices; prefixes stay small because
    // each position has at most two keys.
    std::vector<std::string> prefixes{""};
    for (size_t i = 0; i < len; ++i) {
      bool last = i + 1 == len;
      auto keys = variants(*words[i], last && last_by_lemma_only);
      std::vector<std::string> next;
      for (const auto& p : prefixes) {
        for (const auto& k : keys) next.push_back(p.empty() ? k : p + " " + k);
      }
      prefixes = std::move(next);
      if (prefixes.empty()) break;
    }
    for (const auto& candidate : prefixes) {
      if (set.contains(candidate)) return len;
    }
  }
  return 0;
}

bool Lexicon::is_degree_adverb(const WordKeys& w) const {
  const auto& set = entries(LexiconClass::kDegreeAdverb);
  return (!w.lemma.empty() && set.contains(turkish_fold(w.lemma))) ||
         (!w.form.empty() && set.contains(turkish_fold(w.form)));
}

std::vector<EmphasisEntry> Lexicon::emphasis_entries(const WordKeys& w) const {
  std::vector<EmphasisEntry> out;
  std::string lemma = turkish_fold(w.lemma);
  std::string form = turkish_fold(w.form);
  for (const auto& e : emphasis_) {
    if ((!lemma.empty() && e.adverb == lemma) || (!form.empty() && e.adverb == form)) {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace ruleparse
