#include "ruleparse/morph.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "ruleparse/conllu.h"
#include "ruleparse/text.h"

namespace ruleparse {

bool MorphAnalysis::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::string MorphAnalysis::morpheme_string() const {
  std::string out = pos;
  for (const auto& t : tags) {
    out.push_back('+');
    out += t;
  }
  return out;
}

bool is_root_pos_tag(std::string_view tag) {
  static constexpr std::array<std::string_view, 15> kRootPos = {
      "Noun", "Verb", "Adj",   "Adv",  "Pron", "Det", "Num",  "Postp",
      "Conj", "Interj", "Punc", "Ques", "Dup", "Prop", "Zero"};
  return std::find(kRootPos.begin(), kRootPos.end(), tag) != kRootPos.end();
}

UnknownTagError::UnknownTagError(const std::string& tag)
    : std::invalid_argument("unknown morpheme tag '" + tag + "'"), tag_(tag) {}

SuffixInventory::SuffixInventory(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto& tag = entries_[i].tag;
    if (tag.empty()) throw std::invalid_argument("empty suffix tag");
    if (is_root_pos_tag(tag)) {
      throw std::invalid_argument("suffix tag '" + tag +
                                  "' collides with a root POS tag");
    }
    if (!index_.emplace(tag, i).second) {
      throw std::invalid_argument("duplicate suffix tag '" + tag + "'");
    }
  }
}

SuffixInventory SuffixInventory::parse(std::istream& in) {
  std::vector<Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) {
      throw FormatError("inventory line needs tag<TAB>class", 0, line_no);
    }
    SuffixClass cls;
    if (cols[1] == "inflectional") {
      cls = SuffixClass::kInflectional;
    } else if (cols[1] == "derivational") {
      cls = SuffixClass::kDerivational;
    } else {
      throw FormatError("unknown suffix class '" + std::string(cols[1]) + "'",
                        0, line_no);
    }
    entries.push_back(Entry{std::string(trim(cols[0])), cls});
  }
  try {
    return SuffixInventory(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

SuffixInventory SuffixInventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return parse(in);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
}

std::optional<size_t> SuffixInventory::column(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<SuffixClass> SuffixInventory::class_of(std::string_view tag) const {
  auto c = column(tag);
  if (!c) return std::nullopt;
  return entries_[*c].cls;
}

bool SuffixInventory::operator==(const SuffixInventory& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].tag != other.entries_[i].tag ||
        entries_[i].cls != other.entries_[i].cls) {
      return false;
    }
  }
  return true;
}

void check_analysis(const MorphAnalysis& a, const SuffixInventory& inventory) {
  for (const auto& t : a.tags) {
    if (!inventory.column(t) && !is_root_pos_tag(t)) throw UnknownTagError(t);
  }
}

std::vector<std::string> inflectional_suffixes(const MorphAnalysis& a,
                                               const SuffixInventory& inventory) {
  std::vector<std::string> out;
  for (const auto& t : a.tags) {
    auto cls = inventory.class_of(t);
    if (!cls) {
      if (is_root_pos_tag(t)) continue;
      throw UnknownTagError(t);
    }
    if (*cls == SuffixClass::kInflectional) out.push_back(t);
  }
  return out;
}

std::optional<std::string> last_suffix(const MorphAnalysis& a) {
  if (a.tags.empty()) return std::nullopt;
  return a.tags.back();
}

MorphAnalysis parse_morphemes(std::string_view lemma, std::string_view sequence) {
  if (lemma.empty()) throw std::invalid_argument("empty lemma");
  if (sequence.empty()) throw std::invalid_argument("empty morpheme sequence");
  auto parts = split(sequence, '+');
  for (auto p : parts) {
    if (p.empty()) {
      throw std::invalid_argument("empty morpheme in '" +
                                  std::string(sequence) + "'");
    }
    if (p.find_first_of(" \t") != std::string_view::npos) {
      throw std::invalid_argument("whitespace in morpheme '" +
                                  std::string(p) + "'");
    }
  }
  if (!is_root_pos_tag(parts[0])) {
    throw std::invalid_argument("'" + std::string(parts[0]) +
                                "' is not a root POS tag");
  }
  MorphAnalysis a;
  a.lemma = std::string(lemma);
  a.pos = std::string(parts[0]);
  for (size_t i = 1; i < parts.size(); ++i) a.tags.emplace_back(parts[i]);
  return a;
}

namespace {

struct Record {
  int sentence;
  int token;
  MorphAnalysis analysis;
};

std::optional<Record> parse_record(std::string_view line, int line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (trim(line).empty() || line[0] == '#') return std::nullopt;
  if (!is_valid_utf8(line)) throw FormatError("invalid UTF-8", 0, line_no);
  auto cols = split(line, '\t');
  if (cols.size() != 4) {
    throw FormatError("sidecar record needs 4 tab-separated columns", 0,
                      line_no);
  }
  auto s = parse_int(cols[0]);
  auto t = parse_int(cols[1]);
  if (!s || !t || *s < 1 || *t < 1 || *s > INT32_MAX || *t > INT32_MAX) {
    throw FormatError("bad sentence ordinal or token id", 0, line_no);
  }
  try {
    return Record{static_cast<int>(*s), static_cast<int>(*t),
                  parse_morphemes(cols[2], cols[3])};
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what(), 0, line_no);
  }
}

}  // namespace

void for_each_morph_record(
    std::istream& in,
    const std::function<void(int sentence, int token, MorphAnalysis)>& fn) {
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto rec = parse_record(raw, line_no);
    if (rec) fn(rec->sentence, rec->token, std::move(rec->analysis));
  }
}

MorphSidecar read_morph_sidecar(std::istream& in) {
  MorphSidecar out;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto rec = parse_record(raw, line_no);
    if (!rec) continue;
    auto key = std::make_pair(rec->sentence, rec->token);
    if (!out.emplace(key, std::move(rec->analysis)).second) {
      throw FormatError("duplicate record for sentence " +
                            std::to_string(key.first) + " token " +
                            std::to_string(key.second),
                        0, line_no);
    }
  }
  return out;
}

MorphSidecar read_morph_sidecar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return read_morph_sidecar(in);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
}

void write_morph_sidecar(std::ostream& out, const MorphSidecar& sidecar) {
  for (const auto& [key, a] : sidecar) {
    out << key.first << '\t' << key.second << '\t' << a.lemma << '\t'
        << a.morpheme_string() << '\n';
  }
}

TokenAnalyses analyses_for(const MorphSidecar& sidecar, int sentence_ordinal,
                           size_t token_count) {
  TokenAnalyses out(token_count);
  auto it = sidecar.lower_bound({sentence_ordinal, 1});
  for (; it != sidecar.end() && it->first.first == sentence_ordinal; ++it) {
    int id = it->first.second;
    if (id >= 1 && static_cast<size_t>(id) <= token_count) {
      out[id - 1] = it->second;
    }
  }
  return out;
}

// --- matrix --------------------------------------------------------------

LemmaSuffixMatrix::LemmaSuffixMatrix(SuffixInventory inventory)
    : inventory_(std::move(inventory)) {}

const std::vector<double>* LemmaSuffixMatrix::row(std::string_view lemma) const {
  auto it = rows_.find(lemma);
  return it == rows_.end() ? nullptr : &it->second;
}

void LemmaSuffixMatrix::set_row(std::string lemma, std::vector<double> values) {
  if (lemma.empty() || lemma.find_first_of("\t\n\r") != std::string::npos) {
    throw std::invalid_argument("invalid lemma for matrix row");
  }
  if (values.size() != dimension()) {
    throw std::invalid_argument("row for '" + lemma + "' has " +
                                std::to_string(values.size()) +
                                " entries, expected " +
                                std::to_string(dimension()));
  }
  double sum = 0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("row for '" + lemma +
                                  "' has an entry outside [0,1]");
    }
    sum += v;
  }
  if (sum != 0.0 && std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("row for '" + lemma + "' does not sum to 1");
  }
  rows_[std::move(lemma)] = std::move(values);
}

SuffixCounter::SuffixCounter(const SuffixInventory& inventory)
    : inventory_(&inventory) {}

void SuffixCounter::add(const MorphAnalysis& a) {
  auto& c = counts_[a.lemma];
  if (c.suffixes.empty()) c.suffixes.assign(inventory_->size(), 0);
  ++c.occurrences;
  ++diag_.analyses;
  for (const auto& t : a.tags) {
    auto col = inventory_->column(t);
    if (col) {
      ++c.suffixes[*col];
      ++diag_.counted_tags;
    } else if (!is_root_pos_tag(t)) {
      ++diag_.unknown_tags[t];
    }
  }
}

void SuffixCounter::merge(const SuffixCounter& other) {
  for (const auto& [lemma, oc] : other.counts_) {
    auto& c = counts_[lemma];
    if (c.suffixes.empty()) c.suffixes.assign(inventory_->size(), 0);
    c.occurrences += oc.occurrences;
    for (size_t i = 0; i < c.suffixes.size(); ++i) c.suffixes[i] += oc.suffixes[i];
  }
  diag_.analyses += other.diag_.analyses;
  diag_.counted_tags += other.diag_.counted_tags;
  for (const auto& [tag, n] : other.diag_.unknown_tags) diag_.unknown_tags[tag] += n;
}

LemmaSuffixMatrix SuffixCounter::finalize(size_t cap,
                                          MatrixDiagnostics* diag) const {
  if (cap == 0) throw std::invalid_argument("lemma cap must be positive");
  std::vector<const std::pair<const std::string, LemmaCounts>*> order;
  order.reserve(counts_.size());
  for (const auto& kv : counts_) {
    // A lemma never seen with a counted suffix would be an all-zero row,
    // which is what suffix_vector returns for absent lemmas anyway.
    const auto& c = kv.second.suffixes;
    if (std::any_of(c.begin(), c.end(), [](uint64_t n) { return n > 0; })) {
      order.push_back(&kv);
    }
  }
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
    if (a->second.occurrences != b->second.occurrences) {
      return a->second.occurrences > b->second.occurrences;
    }
    return a->first < b->first;
  });
  if (order.size() > cap) order.resize(cap);

  LemmaSuffixMatrix m(*inventory_);
  for (const auto* kv : order) {
    const auto& counts = kv->second.suffixes;
    uint64_t total = std::accumulate(counts.begin(), counts.end(), uint64_t{0});
    std::vector<double> row(counts.size(), 0.0);
    for (size_t i = 0; i < counts.size(); ++i) {
      row[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    m.set_row(kv->first, std::move(row));
  }
  if (diag != nullptr) {
    *diag = diag_;
    diag->lemmas_seen = counts_.size();
    diag->lemmas_kept = order.size();
  }
  return m;
}

LemmaSuffixMatrix build_matrix(std::span<const MorphAnalysis> corpus,
                               const SuffixInventory& inventory, size_t cap,
                               MatrixDiagnostics* diag, int jobs) {
  const size_t workers = static_cast<size_t>(std::max(1, jobs));
  std::vector<SuffixCounter> parts(workers, SuffixCounter(inventory));
  const size_t chunk = (corpus.size() + workers - 1) / workers;
  auto count_part = [&](size_t w) {
    size_t begin = std::min(corpus.size(), w * chunk);
    size_t end = std::min(corpus.size(), begin + chunk);
    for (size_t i = begin; i < end; ++i) parts[w].add(corpus[i]);
  };
  if (workers == 1) {
    count_part(0);
  } else {
    std::vector<std::jthread> threads;
    for (size_t w = 0; w < workers; ++w) threads.emplace_back(count_part, w);
  }
  for (size_t w = 1; w < workers; ++w) parts[0].merge(parts[w]);
  return parts[0].finalize(cap, diag);
}

std::vector<double> suffix_vector(const LemmaSuffixMatrix& m,
                                  std::string_view lemma) {
  const auto* r = m.row(lemma);
  if (r == nullptr) return std::vector<double>(m.dimension(), 0.0);
  return *r;
}

namespace {
constexpr int64_t kUnitsPerOne = 1000000000;
}

std::vector<int64_t> quantize_row(std::span<const double> row) {
  std::vector<int64_t> units(row.size());
  std::vector<double> residual(row.size());
  double sum = 0;
  int64_t total = 0;
  for (size_t i = 0; i < row.size(); ++i) {
    double scaled = row[i] * static_cast<double>(kUnitsPerOne);
    units[i] = std::max<int64_t>(0, std::llround(scaled));
    residual[i] = scaled - static_cast<double>(units[i]);
    sum += row[i];
    total += units[i];
  }
  if (sum == 0.0 || std::abs(sum - 1.0) > 1e-6) return units;

  int64_t diff = kUnitsPerOne - total;
  std::vector<size_t> order(row.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (diff > 0) {
    // Round up the entries that lost the most.
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return residual[a] > residual[b]; });
    for (size_t k = 0; diff > 0 && !order.empty(); k = (k + 1) % order.size()) {
      ++units[order[k]];
      --diff;
    }
  } else if (diff < 0) {
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return residual[a] < residual[b]; });
    for (size_t k = 0; diff < 0; k = (k + 1) % order.size()) {
      if (units[order[k]] > 0) {
        --units[order[k]];
        ++diff;
      }
    }
  }
  return units;
}

std::string format_units(int64_t units) {
  std::string frac = std::to_string(units % kUnitsPerOne);
  return std::to_string(units / kUnitsPerOne) + "." +
         std::string(9 - frac.size(), '0') + frac;
}

std::string format_row(std::span<const double> row, char sep) {
  std::string out;
  auto units = quantize_row(row);
  for (size_t i = 0; i < units.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += format_units(units[i]);
  }
  return out;
}

void write_matrix(std::ostream& out, const LemmaSuffixMatrix& m) {
  out << "lemma";
  for (const auto& e : m.inventory().entries()) out << '\t' << e.tag;
  out << '\n';
  for (const auto& [lemma, row] : m.data()) {
    out << lemma << '\t' << format_row(row, '\t') << '\n';
  }
}

LemmaSuffixMatrix read_matrix(std::istream& in, const SuffixInventory& inventory) {
  std::string raw;
  int line_no = 1;
  if (!std::getline(in, raw)) throw FormatError("matrix file has no header");
  {
    auto cols = split(raw, '\t');
    bool ok = cols.size() == inventory.size() + 1 && cols[0] == "lemma";
    for (size_t i = 0; ok && i < inventory.size(); ++i) {
      ok = cols[i + 1] == inventory.tag(i);
    }
    if (!ok) {
      throw FormatError("matrix header does not match the suffix inventory", 0,
                        line_no);
    }
  }
  LemmaSuffixMatrix m(inventory);
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty()) continue;
    auto cols = split(raw, '\t');
    if (cols.size() != inventory.size() + 1) {
      throw FormatError("matrix row has wrong column count", 0, line_no);
    }
    std::vector<double> row;
    row.reserve(inventory.size());
    for (size_t i = 1; i < cols.size(); ++i) {
      auto v = parse_double(cols[i]);
      if (!v) throw FormatError("bad matrix value", 0, line_no);
      row.push_back(*v);
    }
    std::string lemma(cols[0]);
    if (m.row(lemma) != nullptr) {
      throw FormatError("duplicate lemma '" + lemma + "'", 0, line_no);
    }
    try {
      m.set_row(std::move(lemma), std::move(row));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what(), 0, line_no);
    }
  }
  return m;
}

}  // namespace ruleparse
