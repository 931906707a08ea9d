#include "ruleparse/eval.h"

#include <algorithm>
#include <random>

#include "ruleparse/parallel.h"

namespace ruleparse {

AlignmentError::AlignmentError(const std::string& what, int sentence)
    : std::invalid_argument(sentence > 0 ? "sentence " + std::to_string(sentence) + ": " + what
                                         : what),
      sentence_(sentence) {}

AttachmentScores make_scores(uint64_t total, uint64_t heads, uint64_t labeled) {
  AttachmentScores s;
  s.total = total;
  s.correct_heads = heads;
  s.correct_labeled = labeled;
  if (total > 0) {
    s.uas = static_cast<double>(heads) / static_cast<double>(total);
    s.las = static_cast<double>(labeled) / static_cast<double>(total);
  }
  return s;
}

namespace {

void check_aligned(const std::vector<Sentence>& gold, const std::vector<Sentence>& system) {
  if (gold.size() != system.size()) {
    throw AlignmentError("gold has " + std::to_string(gold.size()) +
                             " sentences, system output has " +
                             std::to_string(system.size()),
                         0);
  }
  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].tokens.size() != system[s].tokens.size()) {
      throw AlignmentError("gold has " + std::to_string(gold[s].tokens.size()) +
                               " tokens, system output has " +
                               std::to_string(system[s].tokens.size()),
                           static_cast<int>(s) + 1);
    }
  }
}

// (correct heads, correct head+label) of one sentence.
std::pair<int64_t, int64_t> count_sentence(const Sentence& g, const Sentence& p, int ordinal) {
  int64_t heads = 0, labeled = 0;
  for (size_t i = 0; i < g.tokens.size(); ++i) {
    const Token& gt = g.tokens[i];
    const Token& pt = p.tokens[i];
    if (!gt.head) {
      throw AlignmentError("gold token " + std::to_string(gt.id) + " has no head", ordinal);
    }
    if (pt.head == gt.head) {
      ++heads;
      if (pt.deprel && pt.deprel == gt.deprel) ++labeled;
    }
  }
  return {heads, labeled};
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t kChunk = 4096;

uint64_t count_extreme(const std::vector<int64_t>& diffs, int64_t observed, uint64_t seed,
                       uint64_t stream, uint64_t chunk, uint64_t count) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream ^ splitmix64(chunk))));
  uint64_t hits = 0;
  for (uint64_t k = 0; k < count; ++k) {
    int64_t sum = 0;
    uint64_t bits = 0;
    int left = 0;
    for (int64_t d : diffs) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      sum += (bits & 1) ? -d : d;
      bits >>= 1;
      --left;
    }
    if ((sum < 0 ? -sum : sum) >= observed) ++hits;
  }
  return hits;
}

}  // namespace

AttachmentScores score(const std::vector<Sentence>& gold, const std::vector<Sentence>& system) {
  check_aligned(gold, system);
  uint64_t total = 0, heads = 0, labeled = 0;
  for (size_t s = 0; s < gold.size(); ++s) {
    auto [h, l] = count_sentence(gold[s], system[s], static_cast<int>(s) + 1);
    total += gold[s].tokens.size();
    heads += h;
    labeled += l;
  }
  return make_scores(total, heads, labeled);
}

std::vector<int64_t> sentence_correct(const std::vector<Sentence>& gold,
                                      const std::vector<Sentence>& system, Metric metric) {
  check_aligned(gold, system);
  std::vector<int64_t> out(gold.size());
  for (size_t s = 0; s < gold.size(); ++s) {
    auto [h, l] = count_sentence(gold[s], system[s], static_cast<int>(s) + 1);
    out[s] = metric == Metric::kUAS ? h : l;
  }
  return out;
}

double randomization_p(const std::vector<int64_t>& diffs, uint64_t shuffles, uint64_t seed,
                       uint64_t stream, int jobs) {
  if (shuffles < 1) throw std::invalid_argument("shuffles must be at least 1");
  std::vector<int64_t> nonzero;
  int64_t observed = 0;
  for (int64_t d : diffs) {
    observed += d;
    if (d != 0) nonzero.push_back(d);
  }
  if (observed < 0) observed = -observed;
  const uint64_t chunks = (shuffles + kChunk - 1) / kChunk;
  std::vector<uint64_t> hits(chunks);
  parallel_for(chunks, jobs, [&](size_t c) {
    uint64_t count = std::min(kChunk, shuffles - c * kChunk);
    hits[c] = count_extreme(nonzero, observed, seed, stream, c, count);
  });
  uint64_t total = 0;
  for (uint64_t h : hits) total += h;
  return static_cast<double>(1 + total) / static_cast<double>(1 + shuffles);
}

double harmonic_mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("harmonic mean of no values");
  double inv = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("harmonic mean needs positive values");
    inv += 1.0 / v;
  }
  return static_cast<double>(values.size()) / inv;
}

SigResult randomization_test(const std::vector<Sentence>& gold,
                             const std::vector<std::vector<Sentence>>& outputs_a,
                             const std::vector<std::vector<Sentence>>& outputs_b,
                             const SigOptions& opts) {
  if (opts.shuffles < 1) throw std::invalid_argument("shuffles must be at least 1");
  if (outputs_a.empty() || outputs_b.empty()) {
    throw std::invalid_argument("both sides need at least one output file");
  }
  std::vector<std::vector<int64_t>> ca, cb;
  for (const auto& f : outputs_a) ca.push_back(sentence_correct(gold, f, opts.metric));
  for (const auto& f : outputs_b) cb.push_back(sentence_correct(gold, f, opts.metric));

  SigResult r;
  r.shuffles = opts.shuffles;
  r.metric = opts.metric;
  r.p_values.assign(ca.size(), std::vector<double>(cb.size(), 1.0));
  const size_t pairs = ca.size() * cb.size();
  // Pairs run one after another; each spreads its shuffles over the jobs.
  for (size_t k = 0; k < pairs; ++k) {
    size_t i = k / cb.size(), j = k % cb.size();
    std::vector<int64_t> diffs(gold.size());
    for (size_t s = 0; s < gold.size(); ++s) diffs[s] = ca[i][s] - cb[j][s];
    r.p_values[i][j] = randomization_p(diffs, opts.shuffles, opts.seed, k, opts.jobs);
  }
  std::vector<double> flat;
  for (const auto& row : r.p_values) flat.insert(flat.end(), row.begin(), row.end());
  r.harmonic_mean_p = harmonic_mean(flat);
  return r;
}

// --- ablation ------------------------------------------------------------

std::vector<AblationStep> cumulative_steps() {
  using R = RuleCode;
  return {
      {"No rule", RuleSet{}},
      {"CPI", RuleSet{R::kCPI}},
      {"CPI + NC", RuleSet{R::kCPI, R::kNC}},
      {"CPI + NC + PC", RuleSet{R::kCPI, R::kNC, R::kPC}},
      {"CPI + NC + PC + AC + AAJ", RuleSet{R::kCPI, R::kNC, R::kPC, R::kAC, R::kAAJ}},
      {"CPI + NC + PC + AC + AAJ + AV",
       RuleSet{R::kCPI, R::kNC, R::kPC, R::kAC, R::kAAJ, R::kAV}},
      {"CPI + NC + PC + AC + AAJ + AV + AJC + AJN",
       RuleSet{R::kCPI, R::kNC, R::kPC, R::kAC, R::kAAJ, R::kAV, R::kAJC, R::kAJN}},
      {"CPI + NC + PC + AC + AAJ + AV + AJC + AJN + NV", RuleSet::all()},
  };
}

std::vector<AblationStep> cumulative_steps_without_av_nv() {
  using R = RuleCode;
  return {
      {"No rule", RuleSet{}},
      {"CPI", RuleSet{R::kCPI}},
      {"CPI + NC", RuleSet{R::kCPI, R::kNC}},
      {"CPI + NC + PC", RuleSet{R::kCPI, R::kNC, R::kPC}},
      {"CPI + NC + PC + AC + AAJ", RuleSet{R::kCPI, R::kNC, R::kPC, R::kAC, R::kAAJ}},
      {"CPI + NC + PC + AC + AAJ + AJC + AJN",
       RuleSet{R::kCPI, R::kNC, R::kPC, R::kAC, R::kAAJ, R::kAJC, R::kAJN}},
  };
}

std::vector<AblationRow> ablate(const std::vector<Sentence>& gold,
                                const std::vector<TokenAnalyses>& analyses,
                                const Lexicon& lex, const std::vector<AblationStep>& steps,
                                int max_iterations, int jobs) {
  std::vector<AblationRow> rows;
  for (size_t k = 0; k < steps.size(); ++k) {
    RuleConfig cfg{steps[k].rules, max_iterations};
    auto results = run_all(gold, analyses, lex, cfg, jobs);
    AblationRow row;
    row.step = static_cast<int>(k) + 1;
    row.name = steps[k].name;
    row.rules = steps[k].rules;
    for (size_t s = 0; s < gold.size(); ++s) {
      row.tokens += gold[s].tokens.size();
      row.diagnostics.merge(results[s].diagnostics);
      for (const auto& a : results[s].assignments) {
        ++row.assigned;
        if (gold[s].token(a.dependent).head == a.head) ++row.correct;
      }
    }
    if (row.tokens > 0) {
      row.coverage = static_cast<double>(row.assigned) / static_cast<double>(row.tokens);
      row.uas = static_cast<double>(row.correct) / static_cast<double>(row.tokens);
    }
    if (row.assigned > 0) {
      row.precision = static_cast<double>(row.correct) / static_cast<double>(row.assigned);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ruleparse
