// Morphological analyses, suffix views and the lemma-suffix matrix.
//
// Suffixes are abstract morpheme tags (A3pl, Gen, PastPart, ...) rather than
// surface allomorphs. The suffix inventory fixes which tags exist, whether
// each one is inflectional or derivational, and the column order of the
// lemma-suffix matrix.

#ifndef RULEPARSE_MORPH_H_
#define RULEPARSE_MORPH_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ruleparse {

struct MorphAnalysis {
  std::string lemma;
  std::string pos;                // root part of speech, e.g. "Noun"
  std::vector<std::string> tags;  // suffix tags in suffixation order

  bool has_tag(std::string_view tag) const;
  // "Noun+A3pl+Gen"
  std::string morpheme_string() const;

  bool operator==(const MorphAnalysis&) const = default;
};

// Analyses aligned with the tokens of one sentence; index i is token i+1.
using TokenAnalyses = std::vector<std::optional<MorphAnalysis>>;

// Root part-of-speech tags an analyzer may put first in a morpheme sequence
// (and, after a derivation boundary, inside it).
bool is_root_pos_tag(std::string_view tag);

class UnknownTagError : public std::invalid_argument {
 public:
  explicit UnknownTagError(const std::string& tag);
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

enum class SuffixClass { kInflectional, kDerivational };

class SuffixInventory {
 public:
  struct Entry {
    std::string tag;
    SuffixClass cls;
  };

  SuffixInventory() = default;
  // Throws std::invalid_argument on duplicate or empty tags.
  explicit SuffixInventory(std::vector<Entry> entries);

  // Lines of `tag<TAB>inflectional|derivational`; '#' lines are comments.
  static SuffixInventory parse(std::istream& in);
  static SuffixInventory load(const std::string& path);

  size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& tag(size_t column) const { return entries_.at(column).tag; }
  std::optional<size_t> column(std::string_view tag) const;
  std::optional<SuffixClass> class_of(std::string_view tag) const;

  bool operator==(const SuffixInventory& other) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Throws UnknownTagError for a tag that is neither in the inventory nor a
// reserved root-POS tag.
void check_analysis(const MorphAnalysis& a, const SuffixInventory& inventory);

// Inflectional tags of `a` in their original order. Root-POS markers are
// skipped; any other tag missing from the inventory throws UnknownTagError.
std::vector<std::string> inflectional_suffixes(const MorphAnalysis& a,
                                               const SuffixInventory& inventory);

// Final tag of the analysis, whatever its class.
std::optional<std::string> last_suffix(const MorphAnalysis& a);

// --- sidecar files -------------------------------------------------------

// "Noun+A3pl+Gen" -> pos Noun, tags [A3pl, Gen]. Throws std::invalid_argument
// on an empty segment or a first segment that is not a root-POS tag.
MorphAnalysis parse_morphemes(std::string_view lemma, std::string_view sequence);

// Keyed by (1-based sentence ordinal, token id).
using MorphSidecar = std::map<std::pair<int, int>, MorphAnalysis>;

// Streams `ordinal<TAB>id<TAB>lemma<TAB>tags` records without the duplicate
// check; used for corpus-scale input.
void for_each_morph_record(
    std::istream& in,
    const std::function<void(int sentence, int token, MorphAnalysis)>& fn);

// Throws FormatError (with line number) on malformed or duplicate records.
MorphSidecar read_morph_sidecar(std::istream& in);
MorphSidecar read_morph_sidecar_file(const std::string& path);
void write_morph_sidecar(std::ostream& out, const MorphSidecar& sidecar);

TokenAnalyses analyses_for(const MorphSidecar& sidecar, int sentence_ordinal,
                           size_t token_count);

// --- lemma-suffix matrix -------------------------------------------------

struct MatrixDiagnostics {
  uint64_t analyses = 0;
  uint64_t counted_tags = 0;
  uint64_t lemmas_seen = 0;
  uint64_t lemmas_kept = 0;
  std::map<std::string, uint64_t> unknown_tags;
};

class LemmaSuffixMatrix {
 public:
  explicit LemmaSuffixMatrix(SuffixInventory inventory = {});

  const SuffixInventory& inventory() const { return inventory_; }
  size_t dimension() const { return inventory_.size(); }
  size_t rows() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  const std::vector<double>* row(std::string_view lemma) const;
  const std::map<std::string, std::vector<double>, std::less<>>& data() const {
    return rows_;
  }

  // Throws std::invalid_argument unless the row has `dimension()` entries in
  // [0,1] that either sum to 1 (within 1e-9) or are all zero.
  void set_row(std::string lemma, std::vector<double> values);

  bool operator==(const LemmaSuffixMatrix&) const = default;

 private:
  SuffixInventory inventory_;
  std::map<std::string, std::vector<double>, std::less<>> rows_;
};

// Per-lemma suffix counts. Counters built over disjoint parts of a corpus
// merge into the same result in any order.
class SuffixCounter {
 public:
  explicit SuffixCounter(const SuffixInventory& inventory);

  void add(const MorphAnalysis& a);
  void merge(const SuffixCounter& other);

  // Keeps the `cap` most frequent lemmas (by occurrences; ties by lemma,
  // bytewise) among those with at least one counted suffix, and normalizes
  // each row by its sum.
  LemmaSuffixMatrix finalize(size_t cap, MatrixDiagnostics* diag = nullptr) const;

  const MatrixDiagnostics& diagnostics() const { return diag_; }

 private:
  struct LemmaCounts {
    uint64_t occurrences = 0;
    std::vector<uint64_t> suffixes;
  };

  const SuffixInventory* inventory_;
  std::unordered_map<std::string, LemmaCounts> counts_;
  MatrixDiagnostics diag_;
};

constexpr size_t kDefaultLemmaCap = 40000;

LemmaSuffixMatrix build_matrix(std::span<const MorphAnalysis> corpus,
                               const SuffixInventory& inventory,
                               size_t cap = kDefaultLemmaCap,
                               MatrixDiagnostics* diag = nullptr, int jobs = 1);

// Stored row, or the all-zero vector when the lemma is not in the matrix.
std::vector<double> suffix_vector(const LemmaSuffixMatrix& m,
                                  std::string_view lemma);

// Rounds a row to integer billionths. A row summing to 1 is rounded by
// largest remainder so the units sum to exactly 1e9; already-quantized rows
// come back unchanged.
std::vector<int64_t> quantize_row(std::span<const double> row);
std::string format_units(int64_t units);  // 666666667 -> "0.666666667"
std::string format_row(std::span<const double> row, char sep);

// Header `lemma<TAB>tag0<TAB>...`, then one line per lemma with 9-decimal
// values. Rows are written in lemma order.
void write_matrix(std::ostream& out, const LemmaSuffixMatrix& m);
// The header must list the inventory's tags in order.
LemmaSuffixMatrix read_matrix(std::istream& in, const SuffixInventory& inventory);

}  // namespace ruleparse

#endif  // RULEPARSE_MORPH_H_
