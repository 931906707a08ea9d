#include "cli.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/eval.h"
#include "ruleparse/features.h"
#include "ruleparse/lexicon.h"
#include "ruleparse/morph.h"
#include "ruleparse/parallel.h"

#ifndef RULEPARSE_DATA_DIR
#define RULEPARSE_DATA_DIR "data"
#endif
#ifndef RULEPARSE_VERSION
#define RULEPARSE_VERSION "0.0.0"
#endif

namespace ruleparse::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fnv1a64_hex(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Options {
  std::string rules = "cpi,nc,pc,ac,aaj,ajc,ajn";
  std::string hybrid = "rule";
  uint64_t seed = 1;
  int jobs = 1;
  std::string format = "conllu";
  std::string output;
  std::string manifest;
  bool no_manifest = false;
  std::string diagnostics;
  int max_iterations = RuleConfig{}.max_iterations;

  std::string treebank;
  std::string morph;
  std::string lexicon = std::string(RULEPARSE_DATA_DIR) + "/lexicon";
  std::string inventory = std::string(RULEPARSE_DATA_DIR) + "/suffix_inventory.tsv";
  std::string matrix;
  std::vector<std::string> sidecars;
  size_t cap = kDefaultLemmaCap;
  std::string gold;
  std::string system;
  std::vector<std::string> side_a;
  std::vector<std::string> side_b;
  uint64_t shuffles = 10000;
  std::string metric = "uas";
  bool no_av_nv = false;

  int effective_jobs() const {
    if (jobs > 0) return jobs;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
};

// Reads inputs and remembers their content hashes for the manifest.
class Inputs {
 public:
  std::string read(const std::string& path) {
    std::string bytes;
    if (path == "-") {
      std::ostringstream ss;
      ss << std::cin.rdbuf();
      bytes = ss.str();
    } else {
      std::ifstream in(path, std::ios::binary);
      if (!in || fs::is_directory(path)) throw InputError("cannot read '" + path + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      bytes = ss.str();
    }
    record(path, bytes);
    return bytes;
  }

  void record(const std::string& path, std::string_view bytes) {
    records_.push_back({{"path", path},
                        {"bytes", bytes.size()},
                        {"fnv1a64", fnv1a64_hex(bytes)}});
  }

  const json& records() const { return records_; }

 private:
  json records_ = json::array();
};

std::vector<Sentence> read_treebank(Inputs& in, const std::string& path) {
  std::string bytes = in.read(path);
  try {
    return parse_conllu(bytes);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
}

std::vector<TokenAnalyses> read_analyses(Inputs& in, const std::string& path,
                                         const std::vector<Sentence>& sentences) {
  std::string bytes = in.read(path);
  std::istringstream ss(bytes);
  MorphSidecar sidecar;
  try {
    sidecar = read_morph_sidecar(ss);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
  for (const auto& [key, a] : sidecar) {
    auto [s, t] = key;
    if (static_cast<size_t>(s) > sentences.size() ||
        static_cast<size_t>(t) > sentences[s - 1].tokens.size()) {
      throw InputError(path + ": record for sentence " + std::to_string(s) + " token " +
                       std::to_string(t) + " has no matching token in the treebank");
    }
  }
  std::vector<TokenAnalyses> out;
  out.reserve(sentences.size());
  for (size_t i = 0; i < sentences.size(); ++i) {
    out.push_back(analyses_for(sidecar, static_cast<int>(i) + 1, sentences[i].tokens.size()));
  }
  return out;
}

Lexicon read_lexicon(Inputs& in, const std::string& dir) {
  if (!fs::is_directory(dir)) throw InputError("lexicon directory '" + dir + "' not found");
  for (LexiconClass cls : kLexiconClasses) {
    auto p = (fs::path(dir) / lexicon_file_name(cls)).string();
    if (fs::is_regular_file(p)) in.read(p);
  }
  return Lexicon::load_dir(dir);
}

SuffixInventory read_inventory(Inputs& in, const std::string& path) {
  std::string bytes = in.read(path);
  std::istringstream ss(bytes);
  try {
    return SuffixInventory::parse(ss);
  } catch (const FormatError& e) {
    throw e.with_context(path);
  }
}

std::vector<std::string> expand_outputs(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".conllu") {
          files.push_back(e.path().string());
        }
      }
      if (files.empty()) throw InputError("no .conllu files in '" + p + "'");
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

json diagnostics_json(const EngineDiagnostics& d) {
  json fired = json::object();
  for (RuleCode c : kScheduleOrder) fired[std::string(rule_code_name(c))] = d.fired[static_cast<size_t>(c)];
  return {{"tokens", d.tokens},
          {"assigned", d.assigned},
          {"fired", fired},
          {"skipped_cycles", d.skipped_cycles},
          {"loop_iterations", d.loop_iterations},
          {"queued_adverb_pairs", d.queued_adverb_pairs},
          {"queued_adjective_pairs", d.queued_adjective_pairs}};
}

json scores_json(const AttachmentScores& s) {
  return {{"uas", s.uas},
          {"las", s.las},
          {"total", s.total},
          {"correct_heads", s.correct_heads},
          {"correct_labeled", s.correct_labeled}};
}

void write_text(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw InputError("cannot write '" + o.output + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + o.output + "'");
}

// --- commands --------------------------------------------------------------

struct CommandResult {
  std::string text;  // main output
  json config = json::object();
  json diagnostics = json::object();
};

RuleConfig rule_config(const Options& o) {
  if (o.max_iterations < 1) throw InputError("--max-iterations must be positive");
  return RuleConfig{RuleSet::parse(o.rules), o.max_iterations};
}

CommandResult cmd_annotate(const Options& o, Inputs& in) {
  RuleConfig cfg = rule_config(o);
  auto sentences = read_treebank(in, o.treebank);
  auto analyses = read_analyses(in, o.morph, sentences);
  Lexicon lex = read_lexicon(in, o.lexicon);
  auto results = run_all(sentences, analyses, lex, cfg, o.effective_jobs());

  CommandResult r;
  EngineDiagnostics total;
  std::ostringstream os;
  for (size_t i = 0; i < sentences.size(); ++i) {
    total.merge(results[i].diagnostics);
    if (o.format == "jsonl") {
      auto codes = results[i].codes(sentences[i].tokens.size());
      std::vector<int> heads(sentences[i].tokens.size(), 0);
      for (const auto& a : results[i].assignments) heads[a.dependent - 1] = a.head;
      for (const auto& t : sentences[i].tokens) {
        json j{{"sentence", i + 1}, {"token", t.id}, {"form", t.form},
               {"rule", rule_code_name(codes[t.id - 1])}};
        if (heads[t.id - 1] > 0) j["rule_head"] = heads[t.id - 1];
        os << j.dump() << '\n';
      }
    } else {
      annotate_rules(sentences[i], results[i].assignments);
    }
  }
  if (o.format != "jsonl") write_conllu(os, sentences);
  r.text = os.str();
  r.config = {{"rules", cfg.enabled.to_string()}, {"max_iterations", cfg.max_iterations}};
  r.diagnostics = diagnostics_json(total);
  r.diagnostics["sentences"] = sentences.size();
  return r;
}

CommandResult cmd_features(const Options& o, Inputs& in) {
  HybridConfig hcfg = HybridConfig::parse(o.hybrid);
  RuleConfig cfg = rule_config(o);
  auto sentences = read_treebank(in, o.treebank);
  auto analyses = read_analyses(in, o.morph, sentences);
  SuffixInventory inventory = read_inventory(in, o.inventory);

  std::optional<LemmaSuffixMatrix> matrix;
  if (hcfg.has(FeatureMode::kSuffixVector)) {
    if (o.matrix.empty()) throw InputError("--hybrid " + hcfg.to_string() + " needs --matrix");
    std::istringstream ss(in.read(o.matrix));
    try {
      matrix = read_matrix(ss, inventory);
    } catch (const FormatError& e) {
      throw e.with_context(o.matrix);
    }
  }
  std::vector<EngineResult> results(sentences.size());
  CommandResult r;
  if (hcfg.rule()) {
    Lexicon lex = read_lexicon(in, o.lexicon);
    results = run_all(sentences, analyses, lex, cfg, o.effective_jobs());
    EngineDiagnostics total;
    for (const auto& res : results) total.merge(res.diagnostics);
    r.diagnostics = diagnostics_json(total);
  }
  std::vector<std::vector<FeatureBundle>> bundles(sentences.size());
  parallel_for(sentences.size(), o.effective_jobs(), [&](size_t i) {
    try {
      bundles[i] = encode(sentences[i], results[i].assignments, analyses[i], inventory,
                          matrix ? &*matrix : nullptr, hcfg);
    } catch (const std::invalid_argument& e) {
      throw InputError("sentence " + std::to_string(i + 1) + ": " + e.what());
    }
  });

  std::ostringstream os;
  if (o.format == "jsonl") {
    for (size_t i = 0; i < sentences.size(); ++i) {
      write_features_jsonl(os, static_cast<int>(i) + 1, sentences[i], bundles[i]);
    }
  } else {
    for (size_t i = 0; i < sentences.size(); ++i) export_features(sentences[i], bundles[i]);
    if (!sentences.empty()) add_feature_header(sentences.front(), hcfg);
    write_conllu(os, sentences);
  }
  r.text = os.str();
  r.config = {{"hybrid", hcfg.to_string()}};
  if (hcfg.rule()) {
    r.config["rules"] = cfg.enabled.to_string();
    r.config["max_iterations"] = cfg.max_iterations;
  }
  r.diagnostics["sentences"] = sentences.size();
  return r;
}

CommandResult cmd_matrix(const Options& o, Inputs& in) {
  if (o.cap < 1) throw InputError("--cap must be positive");
  SuffixInventory inventory = read_inventory(in, o.inventory);
  SuffixCounter counter(inventory);
  for (const auto& path : o.sidecars) {
    std::istringstream ss(in.read(path));
    try {
      for_each_morph_record(ss, [&](int, int, MorphAnalysis a) { counter.add(a); });
    } catch (const FormatError& e) {
      throw e.with_context(path);
    }
  }
  MatrixDiagnostics diag;
  LemmaSuffixMatrix m = counter.finalize(o.cap, &diag);
  std::ostringstream os;
  write_matrix(os, m);
  CommandResult r;
  r.text = os.str();
  r.config = {{"cap", o.cap}, {"dimension", inventory.size()}};
  r.diagnostics = {{"analyses", diag.analyses},
                   {"counted_tags", diag.counted_tags},
                   {"lemmas_seen", diag.lemmas_seen},
                   {"lemmas_kept", diag.lemmas_kept},
                   {"unknown_tags", diag.unknown_tags}};
  return r;
}

CommandResult cmd_score(const Options& o, Inputs& in) {
  auto gold = read_treebank(in, o.gold);
  auto system = read_treebank(in, o.system);
  AttachmentScores s = score(gold, system);
  CommandResult r;
  r.text = scores_json(s).dump(2) + "\n";
  return r;
}

CommandResult cmd_sigtest(const Options& o, Inputs& in) {
  if (o.shuffles < 1) throw InputError("--shuffles must be at least 1");
  auto gold = read_treebank(in, o.gold);
  auto files_a = expand_outputs(o.side_a);
  auto files_b = expand_outputs(o.side_b);
  std::vector<std::vector<Sentence>> a, b;
  for (const auto& f : files_a) a.push_back(read_treebank(in, f));
  for (const auto& f : files_b) b.push_back(read_treebank(in, f));
  SigOptions opts{o.shuffles, o.metric == "las" ? Metric::kLAS : Metric::kUAS, o.seed,
                  o.effective_jobs()};
  SigResult res;
  try {
    res = randomization_test(gold, a, b, opts);
  } catch (const AlignmentError& e) {
    throw InputError(std::string("output does not align with gold: ") + e.what());
  }
  json j{{"metric", o.metric},
         {"shuffles", res.shuffles},
         {"seed", o.seed},
         {"files_a", files_a},
         {"files_b", files_b},
         {"pairs", files_a.size() * files_b.size()},
         {"p_values", res.p_values},
         {"harmonic_mean_p", res.harmonic_mean_p}};
  CommandResult r;
  r.text = j.dump(2) + "\n";
  r.config = {{"shuffles", o.shuffles}, {"seed", o.seed}, {"metric", o.metric}};
  return r;
}

CommandResult cmd_ablate(const Options& o, Inputs& in) {
  if (o.max_iterations < 1) throw InputError("--max-iterations must be positive");
  auto gold = read_treebank(in, o.gold);
  auto analyses = read_analyses(in, o.morph, gold);
  Lexicon lex = read_lexicon(in, o.lexicon);
  auto steps = o.no_av_nv ? cumulative_steps_without_av_nv() : cumulative_steps();
  auto rows = ablate(gold, analyses, lex, steps, o.max_iterations, o.effective_jobs());
  json out_rows = json::array();
  for (const auto& row : rows) {
    json jr{{"step", row.step},
            {"name", row.name},
            {"rules", row.rules.to_string()},
            {"tokens", row.tokens},
            {"assigned", row.assigned},
            {"correct", row.correct},
            {"coverage", row.coverage},
            {"precision", row.precision ? json(*row.precision) : json(nullptr)},
            {"uas", row.uas},
            {"diagnostics", diagnostics_json(row.diagnostics)}};
    out_rows.push_back(std::move(jr));
  }
  json j{{"variant", o.no_av_nv ? "no-av-nv" : "cumulative"},
         {"sentences", gold.size()},
         {"steps", out_rows}};
  CommandResult r;
  r.text = j.dump(2) + "\n";
  r.config = {{"variant", o.no_av_nv ? "no-av-nv" : "cumulative"},
              {"max_iterations", o.max_iterations}};
  return r;
}

// --- argument parsing ------------------------------------------------------

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("-o,--output", o.output, "Output file (default: stdout)");
  sub->add_option("--manifest", o.manifest,
                  "Manifest path (default: <output>.manifest.json when -o is given)");
  sub->add_flag("--no-manifest", o.no_manifest, "Do not write a run manifest");
  sub->add_option("--diagnostics", o.diagnostics, "Write diagnostics JSON to this path");
  sub->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")
      ->envname("RULEPARSE_JOBS")
      ->check(CLI::NonNegativeNumber);
}

void add_rule_flags(CLI::App* sub, Options& o) {
  sub->add_option("--rules", o.rules, "Comma-separated rule list, or all/none/default")
      ->envname("RULEPARSE_RULES")
      ->capture_default_str();
  sub->add_option("--max-iterations", o.max_iterations, "Cap on rule-loop iterations")
      ->capture_default_str();
}

void add_format_flag(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "conllu or jsonl")
      ->envname("RULEPARSE_FORMAT")
      ->check(CLI::IsMember({"conllu", "jsonl"}))
      ->capture_default_str();
}

void add_lexicon_flag(CLI::App* sub, Options& o) {
  sub->add_option("--lexicon", o.lexicon, "Lexicon directory")
      ->envname("RULEPARSE_LEXICON")
      ->capture_default_str();
}

void add_inventory_flag(CLI::App* sub, Options& o) {
  sub->add_option("--inventory", o.inventory, "Suffix inventory file")
      ->envname("RULEPARSE_INVENTORY")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rule-based dependency pre-annotation and evaluation tools", "ruleparse"};
  app.set_version_flag("--version", std::string(RULEPARSE_VERSION));
  app.require_subcommand(1);

  auto* annotate = app.add_subcommand("annotate", "Run the rules and record them in MISC");
  annotate->add_option("treebank", o.treebank, "CoNLL-U input")->required();
  annotate->add_option("--morph", o.morph, "Morphology sidecar")->required();
  add_lexicon_flag(annotate, o);
  add_rule_flags(annotate, o);
  add_format_flag(annotate, o);
  add_output_flags(annotate, o);

  auto* features = app.add_subcommand("features", "Export per-token parser features");
  features->add_option("treebank", o.treebank, "CoNLL-U input")->required();
  features->add_option("--morph", o.morph, "Morphology sidecar")->required();
  features->add_option("--hybrid", o.hybrid, "rule, infl, last, sufvec, or rule+<suffix mode>")
      ->envname("RULEPARSE_HYBRID")
      ->capture_default_str();
  features->add_option("--matrix", o.matrix, "Lemma-suffix matrix (sufvec modes)");
  add_lexicon_flag(features, o);
  add_inventory_flag(features, o);
  add_rule_flags(features, o);
  add_format_flag(features, o);
  add_output_flags(features, o);

  auto* matrix = app.add_subcommand("matrix", "Build the lemma-suffix matrix");
  matrix->add_option("sidecars", o.sidecars, "Morphology sidecar files ('-' = stdin)")
      ->required();
  matrix->add_option("--cap", o.cap, "Keep this many most frequent lemmas")
      ->capture_default_str();
  add_inventory_flag(matrix, o);
  add_output_flags(matrix, o);

  auto* score_cmd = app.add_subcommand("score", "Attachment scores of a system file");
  score_cmd->add_option("gold", o.gold, "Gold CoNLL-U")->required();
  score_cmd->add_option("system", o.system, "System CoNLL-U")->required();
  add_output_flags(score_cmd, o);

  auto* sig = app.add_subcommand("sigtest", "Paired randomization test between two systems");
  sig->add_option("gold", o.gold, "Gold CoNLL-U")->required();
  sig->add_option("--a", o.side_a, "Outputs of system A (files or directories)")
      ->required()
      ->expected(1, -1);
  sig->add_option("--b", o.side_b, "Outputs of system B (files or directories)")
      ->required()
      ->expected(1, -1);
  sig->add_option("--shuffles", o.shuffles, "Shuffles per pair")
      ->envname("RULEPARSE_SHUFFLES")
      ->capture_default_str();
  sig->add_option("--seed", o.seed, "Random seed")->envname("RULEPARSE_SEED")->capture_default_str();
  sig->add_option("--metric", o.metric, "uas or las")
      ->check(CLI::IsMember({"uas", "las"}))
      ->capture_default_str();
  add_output_flags(sig, o);

  auto* abl = app.add_subcommand("ablate", "Rule coverage and precision per cumulative step");
  abl->add_option("gold", o.gold, "Gold CoNLL-U")->required();
  abl->add_option("--morph", o.morph, "Morphology sidecar")->required();
  abl->add_flag("--no-av-nv", o.no_av_nv, "Leave AV and NV out (six steps)");
  abl->add_option("--max-iterations", o.max_iterations, "Cap on rule-loop iterations")
      ->capture_default_str();
  add_lexicon_flag(abl, o);
  add_output_flags(abl, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kInputError;
  }

  const std::string started = utc_now();
  Inputs inputs;
  CommandResult result;
  std::string command;
  try {
    if (annotate->parsed()) {
      command = "annotate";
      result = cmd_annotate(o, inputs);
    } else if (features->parsed()) {
      command = "features";
      result = cmd_features(o, inputs);
    } else if (matrix->parsed()) {
      command = "matrix";
      result = cmd_matrix(o, inputs);
    } else if (score_cmd->parsed()) {
      command = "score";
      result = cmd_score(o, inputs);
    } else if (sig->parsed()) {
      command = "sigtest";
      result = cmd_sigtest(o, inputs);
    } else {
      command = "ablate";
      result = cmd_ablate(o, inputs);
    }
    write_text(o, out, result.text);

    json manifest{{"command", command},
                  {"arguments", args},
                  {"inputs", inputs.records()},
                  {"config", result.config},
                  {"version", RULEPARSE_VERSION},
                  {"started_at", started},
                  {"finished_at", utc_now()},
                  {"diagnostics", result.diagnostics}};
    manifest["config"]["jobs"] = o.jobs;
    if (command == "sigtest") manifest["config"]["seed"] = o.seed;
    if (command == "annotate" || command == "features") manifest["config"]["format"] = o.format;

    std::string manifest_path = o.manifest;
    if (manifest_path.empty() && !o.output.empty() && o.output != "-") {
      manifest_path = o.output + ".manifest.json";
    }
    if (!o.no_manifest && !manifest_path.empty()) {
      std::ofstream f(manifest_path, std::ios::binary);
      if (!f) throw InputError("cannot write '" + manifest_path + "'");
      f << manifest.dump(2) << '\n';
    }
    if (!o.diagnostics.empty()) {
      std::ofstream f(o.diagnostics, std::ios::binary);
      if (!f) throw InputError("cannot write '" + o.diagnostics + "'");
      f << result.diagnostics.dump(2) << '\n';
    }
    return kOk;
  } catch (const EngineError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace ruleparse::cli
