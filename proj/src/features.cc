#include "ruleparse/features.h"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

#include "ruleparse/text.h"

namespace ruleparse {

namespace {

constexpr std::string_view kRuleKey = "Rule";
constexpr std::string_view kLastKey = "LastSuffix";
constexpr std::string_view kInflKey = "InflSuffixes";
constexpr std::string_view kVecKey = "SufVec";
constexpr std::string_view kVocabComment = "rule_vocab = ";
constexpr std::string_view kHybridComment = "hybrid = ";

std::string_view mode_name(FeatureMode m) {
  switch (m) {
    case FeatureMode::kRule: return "rule";
    case FeatureMode::kInflectional: return "infl";
    case FeatureMode::kLastSuffix: return "last";
    case FeatureMode::kSuffixVector: return "sufvec";
  }
  return "";
}

std::optional<FeatureMode> parse_mode(std::string_view s) {
  if (s == "rule") return FeatureMode::kRule;
  if (s == "infl" || s == "inflectional") return FeatureMode::kInflectional;
  if (s == "last" || s == "last_suffix") return FeatureMode::kLastSuffix;
  if (s == "sufvec" || s == "suffix_vector") return FeatureMode::kSuffixVector;
  return std::nullopt;
}

std::vector<double> quantized(std::span<const double> row) {
  auto units = quantize_row(row);
  std::vector<double> out(units.size());
  for (size_t i = 0; i < units.size(); ++i) {
    out[i] = static_cast<double>(units[i]) / 1e9;
  }
  return out;
}

}  // namespace

HybridConfig::HybridConfig(bool rule, std::optional<FeatureMode> suffix_mode)
    : rule_(rule), suffix_(suffix_mode) {
  if (suffix_ == FeatureMode::kRule) {
    throw std::invalid_argument("rule is not a suffix mode");
  }
}

HybridConfig HybridConfig::parse(std::string_view text) {
  std::string_view t = trim(text);
  if (t.empty() || t == "none") return {};
  bool rule = false;
  std::optional<FeatureMode> suffix;
  for (auto part : split(t, '+')) {
    auto m = parse_mode(trim(part));
    if (!m) {
      throw std::invalid_argument("unknown feature mode '" + std::string(trim(part)) +
                                  "' (expected rule, infl, last or sufvec)");
    }
    if (*m == FeatureMode::kRule) {
      rule = true;
    } else if (suffix && *suffix != *m) {
      throw std::invalid_argument("suffix modes are mutually exclusive: '" +
                                  std::string(t) + "'");
    } else {
      suffix = m;
    }
  }
  return HybridConfig(rule, suffix);
}

bool HybridConfig::has(FeatureMode m) const {
  return m == FeatureMode::kRule ? rule_ : suffix_ == m;
}

std::string HybridConfig::to_string() const {
  std::string out;
  if (rule_) out = "rule";
  if (suffix_) {
    if (!out.empty()) out.push_back('+');
    out += mode_name(*suffix_);
  }
  return out.empty() ? "none" : out;
}

std::vector<FeatureBundle> encode(const Sentence& sentence,
                                  const std::vector<RuleAssignment>& assignments,
                                  const TokenAnalyses& analyses,
                                  const SuffixInventory& inventory,
                                  const LemmaSuffixMatrix* matrix,
                                  const HybridConfig& cfg) {
  const size_t n = sentence.tokens.size();
  std::vector<FeatureBundle> out(n);
  if (cfg.rule()) {
    auto codes = EngineResult{assignments, {}}.codes(n);
    for (size_t i = 0; i < n; ++i) out[i].rule_code = codes[i];
  }
  auto mode = cfg.suffix_mode();
  if (!mode) return out;
  if (*mode == FeatureMode::kSuffixVector && matrix == nullptr) {
    throw std::invalid_argument("suffix-vector features need a lemma-suffix matrix");
  }
  if (analyses.size() != n) {
    throw std::invalid_argument("sentence has " + std::to_string(n) + " tokens but " +
                                std::to_string(analyses.size()) + " analyses");
  }
  for (size_t i = 0; i < n; ++i) {
    const auto& a = analyses[i];
    if (!a) {
      const Token& t = sentence.tokens[i];
      throw std::invalid_argument("token " + std::to_string(t.id) + " ('" + t.form +
                                  "') has no morphological analysis");
    }
    switch (*mode) {
      case FeatureMode::kLastSuffix:
        out[i].last_suffix = last_suffix(*a).value_or(std::string(kNoSuffix));
        break;
      case FeatureMode::kInflectional:
        out[i].inflectional_suffixes = inflectional_suffixes(*a, inventory);
        break;
      case FeatureMode::kSuffixVector:
        out[i].suffix_vector = quantized(suffix_vector(*matrix, a->lemma));
        break;
      case FeatureMode::kRule:
        break;
    }
  }
  return out;
}

void export_features(Sentence& sentence, const std::vector<FeatureBundle>& bundles) {
  if (bundles.size() != sentence.tokens.size()) {
    throw std::invalid_argument("got " + std::to_string(bundles.size()) +
                                " feature bundles for " +
                                std::to_string(sentence.tokens.size()) + " tokens");
  }
  for (size_t i = 0; i < bundles.size(); ++i) {
    Annotations& misc = sentence.tokens[i].misc;
    const FeatureBundle& b = bundles[i];
    if (b.rule_code) {
      misc.set(kRuleKey, std::string(rule_code_name(*b.rule_code)));
    } else {
      misc.erase(kRuleKey);
    }
    if (b.last_suffix) {
      misc.set(kLastKey, *b.last_suffix);
    } else {
      misc.erase(kLastKey);
    }
    if (b.inflectional_suffixes) {
      misc.set(kInflKey, join(*b.inflectional_suffixes, "+"));
    } else {
      misc.erase(kInflKey);
    }
    if (b.suffix_vector) {
      misc.set(kVecKey, format_row(*b.suffix_vector, ','));
    } else {
      misc.erase(kVecKey);
    }
  }
}

void add_feature_header(Sentence& sentence, const HybridConfig& cfg) {
  std::erase_if(sentence.comments, [](const std::string& c) {
    return c.starts_with(kVocabComment) || c.starts_with(kHybridComment);
  });
  std::string vocab(kVocabComment);
  for (size_t i = 0; i < rule_vocabulary().size(); ++i) {
    if (i > 0) vocab.push_back(' ');
    vocab += rule_code_name(rule_vocabulary()[i]);
  }
  sentence.comments.insert(sentence.comments.begin(),
                           {vocab, std::string(kHybridComment) + cfg.to_string()});
}

std::vector<FeatureBundle> read_features(const Sentence& sentence, int ordinal) {
  std::vector<FeatureBundle> out(sentence.tokens.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const Token& t = sentence.tokens[i];
    auto bad = [&](std::string_view key, std::string_view what) {
      return FormatError("token " + std::to_string(t.id) + ": " + std::string(key) +
                             " " + std::string(what),
                         ordinal);
    };
    if (auto v = t.misc.find(kRuleKey)) {
      auto code = v->has_value() ? parse_rule_code(**v) : std::nullopt;
      if (!code) throw bad(kRuleKey, "has an unknown rule code");
      out[i].rule_code = code;
    }
    if (auto v = t.misc.find(kLastKey)) {
      if (!v->has_value() || (*v)->empty()) throw bad(kLastKey, "is empty");
      out[i].last_suffix = **v;
    }
    if (auto v = t.misc.find(kInflKey)) {
      std::vector<std::string> tags;
      if (v->has_value() && !(*v)->empty()) {
        for (auto tag : split(**v, '+')) {
          if (tag.empty()) throw bad(kInflKey, "has an empty tag");
          tags.emplace_back(tag);
        }
      }
      out[i].inflectional_suffixes = std::move(tags);
    }
    if (auto v = t.misc.find(kVecKey)) {
      std::vector<double> vec;
      if (v->has_value() && !(*v)->empty()) {
        for (auto cell : split(**v, ',')) {
          auto d = parse_double(cell);
          if (!d || *d < 0.0 || *d > 1.0) throw bad(kVecKey, "has a value outside [0,1]");
          vec.push_back(*d);
        }
      }
      out[i].suffix_vector = std::move(vec);
    }
  }
  return out;
}

void write_features_jsonl(std::ostream& out, int ordinal, const Sentence& sentence,
                          const std::vector<FeatureBundle>& bundles) {
  if (bundles.size() != sentence.tokens.size()) {
    throw std::invalid_argument("feature bundles do not align with tokens");
  }
  for (size_t i = 0; i < bundles.size(); ++i) {
    const FeatureBundle& b = bundles[i];
    nlohmann::ordered_json j;
    j["sentence"] = ordinal;
    j["token"] = sentence.tokens[i].id;
    j["form"] = sentence.tokens[i].form;
    if (b.rule_code) j["rule"] = rule_code_name(*b.rule_code);
    if (b.last_suffix) j["last_suffix"] = *b.last_suffix;
    if (b.inflectional_suffixes) j["infl_suffixes"] = *b.inflectional_suffixes;
    if (b.suffix_vector) j["suffix_vector"] = *b.suffix_vector;
    out << j.dump() << '\n';
  }
}

void annotate_rules(Sentence& sentence, const std::vector<RuleAssignment>& assignments) {
  const size_t n = sentence.tokens.size();
  auto codes = EngineResult{assignments, {}}.codes(n);
  std::vector<int> heads(n, 0);
  for (const auto& a : assignments) {
    if (a.dependent >= 1 && static_cast<size_t>(a.dependent) <= n) heads[a.dependent - 1] = a.head;
  }
  for (size_t i = 0; i < n; ++i) {
    Annotations& misc = sentence.tokens[i].misc;
    misc.set(kRuleKey, std::string(rule_code_name(codes[i])));
    if (heads[i] > 0) {
      misc.set("RuleHead", std::to_string(heads[i]));
    } else {
      misc.erase("RuleHead");
    }
  }
}

}  // namespace ruleparse
