#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ruleparse/conllu.h"
#include "ruleparse/engine.h"
#include "ruleparse/eval.h"
#include "ruleparse/features.h"
#include "ruleparse/lexicon.h"
#include "ruleparse/morph.h"

namespace py = pybind11;
using namespace ruleparse;

namespace {

using Pairs = std::vector<std::pair<std::string, std::optional<std::string>>>;

Pairs to_pairs(const Annotations& a) {
  Pairs out;
  for (const auto& e : a.entries()) out.emplace_back(e.key, e.value);
  return out;
}

Annotations from_pairs(const Pairs& pairs) {
  Annotations a;
  for (const auto& [k, v] : pairs) a.set(k, v);
  return a;
}

// Sidecar text -> per-sentence analyses aligned with `sentences`.
std::vector<TokenAnalyses> align_sidecar(const std::vector<Sentence>& sentences,
                                         const std::string& morph_text) {
  std::istringstream in(morph_text);
  MorphSidecar side = read_morph_sidecar(in);
  std::vector<TokenAnalyses> out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    out.push_back(analyses_for(side, static_cast<int>(i) + 1, sentences[i].size()));
  }
  return out;
}

RuleConfig make_config(const std::string& rules, int max_iterations) {
  return RuleConfig{RuleSet::parse(rules), max_iterations};
}

}  // namespace

PYBIND11_MODULE(_ruleparse, m) {
  m.doc() = "Rule-based dependency pre-annotation for Turkish treebanks.";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);

  py::class_<Token>(m, "Token")
      .def(py::init<>())
      .def_readwrite("id", &Token::id)
      .def_readwrite("form", &Token::form)
      .def_readwrite("lemma", &Token::lemma)
      .def_readwrite("upos", &Token::upos)
      .def_readwrite("xpos", &Token::xpos)
      .def_readwrite("head", &Token::head)
      .def_readwrite("deprel", &Token::deprel)
      .def_readwrite("deps", &Token::deps)
      .def_property(
          "feats", [](const Token& t) { return to_pairs(t.feats); },
          [](Token& t, const Pairs& p) { t.feats = from_pairs(p); })
      .def_property(
          "misc", [](const Token& t) { return to_pairs(t.misc); },
          [](Token& t, const Pairs& p) { t.misc = from_pairs(p); })
      .def("__repr__", [](const Token& t) { return "<Token " + format_token_line(t) + ">"; });

  py::class_<Sentence>(m, "Sentence")
      .def(py::init<>())
      .def_readwrite("comments", &Sentence::comments)
      .def_readwrite("tokens", &Sentence::tokens)
      .def("__len__", &Sentence::size)
      .def("__eq__", [](const Sentence& a, const Sentence& b) { return a == b; });

  m.def("parse_conllu", py::overload_cast<std::string_view>(&parse_conllu), py::arg("text"));
  m.def("read_conllu_file", &read_conllu_file, py::arg("path"));
  m.def(
      "write_conllu",
      [](const std::vector<Sentence>& s) { return write_conllu(std::span<const Sentence>(s)); },
      py::arg("sentences"));

  py::class_<MorphAnalysis>(m, "MorphAnalysis")
      .def(py::init([](const std::string& lemma, const std::string& seq) {
             return parse_morphemes(lemma, seq);
           }),
           py::arg("lemma"), py::arg("morphemes"))
      .def_readonly("lemma", &MorphAnalysis::lemma)
      .def_readonly("pos", &MorphAnalysis::pos)
      .def_readonly("tags", &MorphAnalysis::tags)
      .def("__str__", &MorphAnalysis::morpheme_string);

  py::class_<SuffixInventory>(m, "SuffixInventory")
      .def_static("load", &SuffixInventory::load, py::arg("path"))
      .def("__len__", &SuffixInventory::size)
      .def("tag", &SuffixInventory::tag)
      .def("column", &SuffixInventory::column)
      .def("is_inflectional", [](const SuffixInventory& inv, const std::string& tag) {
        auto c = inv.class_of(tag);
        if (!c) throw py::key_error(tag);
        return *c == SuffixClass::kInflectional;
      });

  py::class_<Lexicon>(m, "Lexicon")
      .def_static("load_dir", &Lexicon::load_dir, py::arg("path"));

  py::class_<LemmaSuffixMatrix>(m, "LemmaSuffixMatrix")
      .def("__len__", &LemmaSuffixMatrix::rows)
      .def_property_readonly("dimension", &LemmaSuffixMatrix::dimension)
      .def("vector", &suffix_vector, py::arg("lemma"))
      .def("to_tsv", [](const LemmaSuffixMatrix& mat) {
        std::ostringstream os;
        write_matrix(os, mat);
        return os.str();
      });

  m.def(
      "build_matrix",
      [](const std::vector<MorphAnalysis>& corpus, const SuffixInventory& inv, size_t cap) {
        return build_matrix(corpus, inv, cap);
      },
      py::arg("analyses"), py::arg("inventory"), py::arg("cap") = kDefaultLemmaCap);
  m.def(
      "read_matrix",
      [](const std::string& text, const SuffixInventory& inv) {
        std::istringstream in(text);
        return read_matrix(in, inv);
      },
      py::arg("text"), py::arg("inventory"));

  m.def(
      "annotate",
      [](const std::vector<Sentence>& sentences, const std::string& morph_text,
         const Lexicon& lex, const std::string& rules, int max_iterations) {
        auto analyses = align_sidecar(sentences, morph_text);
        auto results = run_all(sentences, analyses, lex, make_config(rules, max_iterations));
        std::vector<std::vector<std::tuple<int, int, std::string>>> out;
        for (const auto& r : results) {
          auto& arcs = out.emplace_back();
          for (const auto& a : r.assignments) {
            arcs.emplace_back(a.dependent, a.head, std::string(rule_code_name(a.code)));
          }
        }
        return out;
      },
      py::arg("sentences"), py::arg("morph"), py::arg("lexicon"), py::arg("rules") = "default",
      py::arg("max_iterations") = 1000,
      "Rule arcs (dependent, head, code) per sentence, in firing order.");

  m.def(
      "export_features",
      [](std::vector<Sentence> sentences, const std::string& morph_text, const Lexicon& lex,
         const SuffixInventory& inv, const std::string& hybrid, const LemmaSuffixMatrix* matrix,
         const std::string& rules) {
        auto cfg = HybridConfig::parse(hybrid);
        auto analyses = align_sidecar(sentences, morph_text);
        std::vector<EngineResult> results(sentences.size());
        if (cfg.rule()) results = run_all(sentences, analyses, lex, make_config(rules, 1000));
        for (size_t i = 0; i < sentences.size(); ++i) {
          export_features(sentences[i],
                          encode(sentences[i], results[i].assignments, analyses[i], inv, matrix, cfg));
        }
        if (!sentences.empty()) add_feature_header(sentences.front(), cfg);
        return sentences;
      },
      py::arg("sentences"), py::arg("morph"), py::arg("lexicon"), py::arg("inventory"),
      py::arg("hybrid") = "rule", py::arg("matrix") = nullptr, py::arg("rules") = "default",
      "Copies of the sentences with feature channels written into MISC.");

  m.def(
      "score",
      [](const std::vector<Sentence>& gold, const std::vector<Sentence>& system) {
        auto s = score(gold, system);
        py::dict d;
        d["total"] = s.total;
        d["correct_heads"] = s.correct_heads;
        d["correct_labeled"] = s.correct_labeled;
        d["uas"] = s.uas;
        d["las"] = s.las;
        return d;
      },
      py::arg("gold"), py::arg("system"));

  m.def(
      "sigtest",
      [](const std::vector<Sentence>& gold, const std::vector<std::vector<Sentence>>& a,
         const std::vector<std::vector<Sentence>>& b, uint64_t shuffles,
         const std::string& metric, uint64_t seed) {
        if (metric != "uas" && metric != "las") throw py::value_error("metric must be uas or las");
        SigOptions opts{shuffles, metric == "las" ? Metric::kLAS : Metric::kUAS, seed, 1};
        auto r = randomization_test(gold, a, b, opts);
        return py::make_tuple(r.p_values, r.harmonic_mean_p);
      },
      py::arg("gold"), py::arg("outputs_a"), py::arg("outputs_b"), py::arg("shuffles") = 10000,
      py::arg("metric") = "uas", py::arg("seed") = 1,
      "(p_values grid, harmonic mean p) for every pair of outputs.");

  m.def(
      "ablate",
      [](const std::vector<Sentence>& gold, const std::string& morph_text, const Lexicon& lex,
         bool without_av_nv) {
        auto analyses = align_sidecar(gold, morph_text);
        auto steps = without_av_nv ? cumulative_steps_without_av_nv() : cumulative_steps();
        py::list rows;
        for (const auto& r : ablate(gold, analyses, lex, steps)) {
          py::dict d;
          d["step"] = r.step;
          d["name"] = r.name;
          d["rules"] = r.rules.to_string();
          d["tokens"] = r.tokens;
          d["assigned"] = r.assigned;
          d["correct"] = r.correct;
          d["coverage"] = r.coverage;
          d["precision"] = r.precision ? py::cast(*r.precision) : py::none();
          d["uas"] = r.uas;
          rows.append(d);
        }
        return rows;
      },
      py::arg("gold"), py::arg("morph"), py::arg("lexicon"), py::arg("without_av_nv") = false);
}
