#include "ruleparse/conllu.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ruleparse/text.h"

namespace ruleparse {

namespace {

std::string located(const std::string& what, int sentence, int line) {
  std::string prefix;
  if (sentence > 0) prefix += "sentence " + std::to_string(sentence);
  if (line > 0) {
    if (!prefix.empty()) prefix += ", ";
    prefix += "line " + std::to_string(line);
  }
  return prefix.empty() ? what : prefix + ": " + what;
}

constexpr int kColumns = 10;

bool has_control_separator(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

}  // namespace

FormatError::FormatError(const std::string& what, int sentence, int line)
    : std::runtime_error(located(what, sentence, line)),
      sentence_(sentence),
      line_(line) {}

FormatError::FormatError(Raw, const std::string& message, int sentence,
                         int line)
    : std::runtime_error(message), sentence_(sentence), line_(line) {}

FormatError FormatError::with_context(const std::string& context) const {
  return FormatError(Raw{}, context + ": " + what(), sentence_, line_);
}

const std::optional<std::string>* Annotations::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

std::optional<std::string> Annotations::get(std::string_view key) const {
  const auto* v = find(key);
  if (v == nullptr) return std::nullopt;
  return *v;
}

void Annotations::set(std::string_view key, std::optional<std::string> value) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  entries_.push_back(Entry{std::string(key), std::move(value)});
}

void Annotations::erase(std::string_view key) {
  std::erase_if(entries_, [&](const Entry& e) { return e.key == key; });
}

std::string Annotations::to_string() const {
  if (entries_.empty()) return "_";
  std::string out;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) out.push_back('|');
    out += entries_[i].key;
    if (entries_[i].value) {
      out.push_back('=');
      out += *entries_[i].value;
    }
  }
  return out;
}

namespace {

void check_annotations(const Annotations& a, bool require_values,
                       const std::string& where, int ordinal) {
  std::unordered_set<std::string_view> seen;
  if (a.size() == 1 && a.entries()[0].key == "_" && !a.entries()[0].value) {
    throw FormatError(where + ": entry '_' is reserved for an empty column",
                      ordinal);
  }
  for (const auto& e : a.entries()) {
    if (e.key.empty() || e.key.find_first_of("|=") != std::string::npos ||
        has_control_separator(e.key)) {
      throw FormatError(where + ": bad key '" + e.key + "'", ordinal);
    }
    if (require_values && !e.value) {
      throw FormatError(where + ": feature '" + e.key + "' has no value",
                        ordinal);
    }
    if (e.value && (e.value->find('|') != std::string::npos ||
                    has_control_separator(*e.value))) {
      throw FormatError(where + ": bad value for '" + e.key + "'", ordinal);
    }
    if (!seen.insert(e.key).second) {
      throw FormatError(where + ": duplicate key '" + e.key + "'",
                        ordinal);
    }
  }
}

void check_field(const std::optional<std::string>& v, const char* name,
                 const std::string& where, int ordinal) {
  if (!v) return;
  if (v->empty() || *v == "_" || has_control_separator(*v)) {
    throw FormatError(where + ": invalid " + name + " '" + *v + "'", ordinal);
  }
}

// Single root and no cycles, assuming every head is present and in range.
bool is_tree(const Sentence& s) {
  const int n = static_cast<int>(s.size());
  int roots = 0;
  for (const auto& t : s.tokens) {
    if (*t.head == 0) ++roots;
  }
  if (roots != 1) return false;
  // 0 = unvisited, 1 = on current path, 2 = known to reach the root
  std::vector<int> state(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    int v = start;
    std::vector<int> path;
    while (v != 0 && state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = *s.tokens[v - 1].head;
    }
    if (v != 0 && state[v] == 1) return false;
    for (int p : path) state[p] = 2;
  }
  return true;
}

}  // namespace

void validate(const Sentence& s, int ordinal) {
  const int n = static_cast<int>(s.size());
  if (n == 0) throw FormatError("sentence has no tokens", ordinal);
  bool all_heads = true;
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    const std::string where = "token " + std::to_string(t.id);
    if (t.id != i + 1) throw FormatError("non-contiguous ids", ordinal);
    if (t.form.empty() || has_control_separator(t.form)) {
      throw FormatError(where + ": invalid form", ordinal);
    }
    check_field(t.lemma, "lemma", where, ordinal);
    check_field(t.upos, "upos", where, ordinal);
    check_field(t.xpos, "xpos", where, ordinal);
    check_field(t.deprel, "deprel", where, ordinal);
    check_field(t.deps, "deps", where, ordinal);
    check_annotations(t.feats, true, where, ordinal);
    check_annotations(t.misc, false, where, ordinal);
    if (t.head) {
      if (*t.head < 0 || *t.head > n) {
        throw FormatError(where + ": head out of range", ordinal);
      }
      if (*t.head == t.id) throw FormatError(where + ": head is self", ordinal);
    } else {
      all_heads = false;
    }
  }
  for (const auto& r : s.ranges) {
    if (r.first < 1 || r.last <= r.first || r.last > n) {
      throw FormatError("multiword range " + std::to_string(r.first) + "-" +
                            std::to_string(r.last) + " out of range",
                        ordinal);
    }
  }
  if (all_heads && !is_tree(s)) {
    throw FormatError("heads do not form a single-rooted tree", ordinal);
  }
}

namespace {

std::optional<std::string> optional_field(std::string_view f) {
  if (f == "_") return std::nullopt;
  return std::string(f);
}

Annotations parse_annotations(std::string_view f, bool require_values,
                              int ordinal, int line) {
  Annotations a;
  if (f == "_") return a;
  for (std::string_view item : split(f, '|')) {
    if (item.empty()) throw FormatError("empty annotation entry", ordinal, line);
    size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      if (require_values) {
        throw FormatError("feature without value: '" + std::string(item) + "'",
                          ordinal, line);
      }
      if (a.contains(item)) {
        throw FormatError("duplicate key '" + std::string(item) + "'",
                          ordinal, line);
      }
      a.set(item, std::nullopt);
      continue;
    }
    std::string_view key = item.substr(0, eq);
    if (key.empty()) throw FormatError("empty annotation key", ordinal, line);
    if (a.contains(key)) {
      throw FormatError("duplicate key '" + std::string(key) + "'", ordinal,
                        line);
    }
    a.set(key, std::string(item.substr(eq + 1)));
  }
  return a;
}

class Reader {
 public:
  std::vector<Sentence> run(std::istream& in) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no_;
      std::string_view line(raw);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!is_valid_utf8(line)) error("invalid UTF-8");
      if (trim(line).empty()) {
        flush();
        continue;
      }
      if (line[0] == '#') {
        comment(line);
        continue;
      }
      word_line(line);
    }
    flush();
    return std::move(out_);
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    throw FormatError(what, ordinal(), line_no_);
  }

  int ordinal() const { return static_cast<int>(out_.size()) + 1; }

  void comment(std::string_view line) {
    if (!cur_.tokens.empty() || !cur_.ranges.empty()) {
      error("comment line inside a sentence body");
    }
    std::string_view text = line.substr(1);
    if (!text.empty() && text[0] == ' ') text.remove_prefix(1);
    cur_.comments.emplace_back(text);
    open_ = true;
  }

  void word_line(std::string_view line) {
    open_ = true;
    auto cols = split(line, '\t');
    if (static_cast<int>(cols.size()) != kColumns) {
      error("wrong column count (expected 10, got " +
            std::to_string(cols.size()) + ")");
    }
    for (const auto& c : cols) {
      if (c.empty()) error("empty column");
    }
    std::string_view id = cols[0];
    if (id.find('.') != std::string_view::npos) {
      error("empty-node lines are not supported");
    }
    const int expected = static_cast<int>(cur_.tokens.size()) + 1;
    size_t dash = id.find('-');
    if (dash != std::string_view::npos) {
      auto first = parse_int(id.substr(0, dash));
      auto last = parse_int(id.substr(dash + 1));
      if (!first || !last || *first < 1 || *last <= *first) {
        error("malformed multiword range '" + std::string(id) + "'");
      }
      if (*first != expected) error("multiword range does not precede its words");
      cur_.ranges.push_back(MultiwordRange{static_cast<int>(*first),
                                           static_cast<int>(*last),
                                           std::string(line)});
      return;
    }
    auto idv = parse_int(id);
    if (!idv || *idv < 1) error("malformed id '" + std::string(id) + "'");
    if (*idv != expected) error("non-contiguous ids");

    Token t;
    t.id = expected;
    t.form = std::string(cols[1]);
    t.lemma = optional_field(cols[2]);
    t.upos = optional_field(cols[3]);
    t.xpos = optional_field(cols[4]);
    t.feats = parse_annotations(cols[5], true, ordinal(), line_no_);
    if (cols[6] != "_") {
      auto h = parse_int(cols[6]);
      if (!h || *h < 0 || *h > 1000000) {
        error("malformed head '" + std::string(cols[6]) + "'");
      }
      t.head = static_cast<int>(*h);
    }
    t.deprel = optional_field(cols[7]);
    t.deps = optional_field(cols[8]);
    t.misc = parse_annotations(cols[9], false, ordinal(), line_no_);
    cur_.tokens.push_back(std::move(t));
    token_lines_.push_back(line_no_);
  }

  void flush() {
    if (!open_) return;
    const int n = static_cast<int>(cur_.tokens.size());
    if (n == 0) error("sentence has no word lines");
    for (int i = 0; i < n; ++i) {
      const Token& t = cur_.tokens[i];
      if (!t.head) continue;
      if (*t.head > n) {
        throw FormatError("head out of range", ordinal(), token_lines_[i]);
      }
      if (*t.head == t.id) {
        throw FormatError("head is self", ordinal(), token_lines_[i]);
      }
    }
    for (const auto& r : cur_.ranges) {
      if (r.last > n) {
        throw FormatError("multiword range past the last word", ordinal());
      }
    }
    validate(cur_, ordinal());
    out_.push_back(std::move(cur_));
    cur_ = Sentence{};
    token_lines_.clear();
    open_ = false;
  }

  std::vector<Sentence> out_;
  Sentence cur_;
  std::vector<int> token_lines_;
  bool open_ = false;
  int line_no_ = 0;
};

}  // namespace

std::vector<Sentence> parse_conllu(std::istream& in) { return Reader().run(in); }

std::vector<Sentence> parse_conllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in);
}

std::string format_token_line(const Token& t) {
  auto opt = [](const std::optional<std::string>& v) -> const std::string& {
    static const std::string kAbsent = "_";
    return v ? *v : kAbsent;
  };
  std::string line;
  line += std::to_string(t.id);
  line += '\t';
  line += t.form;
  line += '\t';
  line += opt(t.lemma);
  line += '\t';
  line += opt(t.upos);
  line += '\t';
  line += opt(t.xpos);
  line += '\t';
  line += t.feats.to_string();
  line += '\t';
  line += t.head ? std::to_string(*t.head) : "_";
  line += '\t';
  line += opt(t.deprel);
  line += '\t';
  line += opt(t.deps);
  line += '\t';
  line += t.misc.to_string();
  return line;
}

void write_conllu(std::ostream& out, std::span<const Sentence> sentences) {
  for (const Sentence& s : sentences) {
    for (const auto& c : s.comments) out << "# " << c << '\n';
    size_t r = 0;
    for (const Token& t : s.tokens) {
      while (r < s.ranges.size() && s.ranges[r].first == t.id) {
        out << s.ranges[r].line << '\n';
        ++r;
      }
      out << format_token_line(t) << '\n';
    }
    out << '\n';
  }
}

std::string write_conllu(std::span<const Sentence> sentences) {
  std::ostringstream out;
  write_conllu(out, sentences);
  return out.str();
}

std::vector<Sentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return parse_conllu(in);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
}

}  // namespace ruleparse
