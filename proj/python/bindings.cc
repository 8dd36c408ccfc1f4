#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "unipos/dmv.h"
#include "unipos/error.h"
#include "unipos/experiment.h"
#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"
#include "unipos/trigram_hmm.h"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using unipos::TagSequence;

TagSequence ToTags(const std::vector<std::string> &tags) {
  TagSequence out;
  out.reserve(tags.size());
  for (const std::string &t : tags) out.push_back(unipos::ParseUniversalTagOrThrow(t));
  return out;
}

std::vector<TagSequence> ToTagCorpus(const std::vector<std::vector<std::string>> &corpus) {
  std::vector<TagSequence> out;
  out.reserve(corpus.size());
  for (const auto &s : corpus) out.push_back(ToTags(s));
  return out;
}

std::vector<std::vector<std::string>> FromTagCorpus(const std::vector<TagSequence> &corpus) {
  std::vector<std::vector<std::string>> out;
  for (const TagSequence &s : corpus) {
    std::vector<std::string> row;
    for (unipos::UniversalTag t : s) row.emplace_back(unipos::ToString(t));
    out.push_back(std::move(row));
  }
  return out;
}

unipos::TaggedCorpus ToTagged(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> &c) {
  unipos::TaggedCorpus out;
  for (const auto &[words, tags] : c) out.push_back({words, tags});
  return out;
}

std::string HeadName(int head) {
  return head == unipos::kRootHead ? "ROOT" : std::string(unipos::ToString(unipos::kAllUniversalTags[head]));
}

py::dict CountsToDict(const unipos::ExpectedCounts &c) {
  py::dict attach, stop, cont;
  for (int h = 0; h < unipos::kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      const char *dname = dir == 0 ? "left" : "right";
      for (int d = 0; d < unipos::kNumUniversalTags; ++d) {
        if (c.attach[h][dir][d] != 0.0) {
          attach[py::make_tuple(HeadName(h), HeadName(d), dname)] = c.attach[h][dir][d];
        }
      }
      for (int adj = 0; adj < 2; ++adj) {
        auto key = py::make_tuple(HeadName(h), dname, adj == 1);
        if (c.stop[h][dir][adj] != 0.0) stop[key] = c.stop[h][dir][adj];
        if (c.cont[h][dir][adj] != 0.0) cont[key] = c.cont[h][dir][adj];
      }
    }
  }
  return py::dict("attach"_a = attach, "stop"_a = stop, "cont"_a = cont,
                  "log_likelihood"_a = c.log_likelihood);
}

}  // namespace

PYBIND11_MODULE(_unipos, m) {
  m.doc() = "Universal POS tagset mapping, trigram HMM tagging and DMV grammar induction";
#ifdef UNIPOS_VERSION
  m.attr("__version__") = UNIPOS_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
  m.attr("MAPPING_FORMAT_VERSION") = unipos::kMappingFormatVersion;

  // Owned by the module; the translator keeps a borrowed pointer.
  static PyObject *error = PyErr_NewException("unipos.UniposError", PyExc_ValueError, nullptr);
  m.add_object("UniposError", py::handle(error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const unipos::Error &e) {
      py::tuple args = py::make_tuple(e.what(), unipos::ErrorKindName(e.kind()), e.line());
      PyErr_SetObject(error, args.ptr());
    }
  });

  // --- tagset ---------------------------------------------------------------
  m.def("universal_tags", [] {
    std::vector<std::string> out;
    for (auto t : unipos::kAllUniversalTags) out.emplace_back(unipos::ToString(t));
    return out;
  }, "The twelve universal tags in canonical order ('.' is punctuation).");
  m.def("is_universal_tag", [](const std::string &s) { return unipos::ParseUniversalTag(s).has_value(); });

  py::class_<unipos::TagMapping>(m, "TagMapping")
      .def_property_readonly("treebank_id", &unipos::TagMapping::treebank_id)
      .def_property_readonly("entries", [](const unipos::TagMapping &mp) {
        std::map<std::string, std::string> out;
        for (const auto &[k, v] : mp.entries()) out.emplace(k, std::string(unipos::ToString(v)));
        return out;
      })
      .def("map", [](const unipos::TagMapping &mp, const std::string &fine, bool fallback_x) {
        return std::string(unipos::ToString(mp.Map(fine, fallback_x)));
      }, "fine"_a, "fallback_x"_a = false)
      .def("serialize", &unipos::TagMapping::Serialize)
      .def("__len__", &unipos::TagMapping::size)
      .def("__contains__", &unipos::TagMapping::Contains)
      .def("__eq__", [](const unipos::TagMapping &a, const unipos::TagMapping &b) { return a == b; });

  m.def("parse_mapping", &unipos::ParseMapping, "text"_a, "treebank_id"_a = "");
  m.def("load_mapping_file", &unipos::LoadMappingFile, "path"_a);
  m.def("validate_mapping", [](const unipos::TagMapping &mp, const std::map<std::string, std::size_t> &observed) {
    std::map<std::string, std::size_t, std::less<>> counts(observed.begin(), observed.end());
    const auto report = unipos::ValidateMapping(mp, counts);
    std::map<std::string, std::size_t> histogram;
    for (auto t : unipos::kAllUniversalTags) {
      auto n = report.tag_histogram[static_cast<std::size_t>(unipos::ToIndex(t))];
      if (n) histogram.emplace(std::string(unipos::ToString(t)), n);
    }
    return py::dict("unknown_tags"_a = report.unknown_tags, "unused_tags"_a = report.unused_tags,
                    "tag_histogram"_a = histogram);
  }, "mapping"_a, "observed"_a);

  // --- treebank -------------------------------------------------------------
  py::class_<unipos::Token>(m, "Token")
      .def(py::init([](std::string form, std::string fine_tag, std::optional<std::string> universal_tag,
                       std::optional<int> head) {
        unipos::Token t{std::move(form), std::move(fine_tag), std::nullopt, head};
        if (universal_tag) t.universal_tag = unipos::ParseUniversalTagOrThrow(*universal_tag);
        return t;
      }), "form"_a, "fine_tag"_a = "", "universal_tag"_a = py::none(), "head"_a = py::none())
      .def_readwrite("form", &unipos::Token::form)
      .def_readwrite("fine_tag", &unipos::Token::fine_tag)
      .def_readwrite("head", &unipos::Token::head)
      .def_property("universal_tag",
          [](const unipos::Token &t) -> std::optional<std::string> {
            if (!t.universal_tag) return std::nullopt;
            return std::string(unipos::ToString(*t.universal_tag));
          },
          [](unipos::Token &t, std::optional<std::string> v) {
            t.universal_tag = v ? std::optional(unipos::ParseUniversalTagOrThrow(*v)) : std::nullopt;
          })
      .def_property_readonly("is_punct", &unipos::Token::is_punct)
      .def("__eq__", [](const unipos::Token &a, const unipos::Token &b) { return a == b; })
      .def("__repr__", [](const unipos::Token &t) {
        return "Token(" + t.form + "/" + t.fine_tag + ")";
      });

  py::class_<unipos::Sentence>(m, "Sentence")
      .def(py::init([](std::vector<unipos::Token> tokens) { return unipos::Sentence{std::move(tokens)}; }),
           "tokens"_a = std::vector<unipos::Token>{})
      .def_readwrite("tokens", &unipos::Sentence::tokens)
      .def("__len__", &unipos::Sentence::size)
      .def("__eq__", [](const unipos::Sentence &a, const unipos::Sentence &b) { return a == b; });

  m.def("read_conllx", [](const std::string &text, bool universal_from_cpostag) {
    std::istringstream in(text);
    return unipos::ReadConllx(in, {universal_from_cpostag});
  }, "text"_a, "universal_from_cpostag"_a = false);
  m.def("write_conllx", [](const unipos::Corpus &corpus) {
    std::ostringstream out;
    unipos::WriteConllx(out, corpus);
    return out.str();
  }, "corpus"_a);
  m.def("read_wordtag", [](const std::string &text) {
    std::istringstream in(text);
    return unipos::ReadWordTag(in);
  }, "text"_a);
  m.def("apply_mapping", py::overload_cast<const unipos::Sentence &, const unipos::TagMapping &, bool>(
            &unipos::ApplyMapping), "sentence"_a, "mapping"_a, "fallback_x"_a = false);
  m.def("strip_punctuation", &unipos::StripPunctuation, "sentence"_a);
  m.def("filter_by_length", &unipos::FilterByLength, "corpus"_a, "max_len"_a);

  // --- tagger ---------------------------------------------------------------
  py::class_<unipos::TrigramHmm>(m, "TrigramHmm")
      .def_static("train", [](const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> &c,
                              int max_suffix_length, int rare_word_threshold) {
        return unipos::TrigramHmm::Train(ToTagged(c), {max_suffix_length, rare_word_threshold});
      }, "corpus"_a, "max_suffix_length"_a = unipos::kDefaultMaxSuffixLength,
         "rare_word_threshold"_a = unipos::kDefaultRareWordThreshold,
         "Train from a list of (words, tags) pairs.")
      .def_static("deserialize", &unipos::TrigramHmm::Deserialize, "text"_a)
      .def("serialize", &unipos::TrigramHmm::Serialize)
      .def_property_readonly("tagset", &unipos::TrigramHmm::tagset)
      .def_property_readonly("lambdas", [](const unipos::TrigramHmm &h) {
        const auto &l = h.lambdas();
        return py::make_tuple(l.unigram, l.bigram, l.trigram);
      })
      .def("tag", [](const unipos::TrigramHmm &h, const std::vector<std::string> &words, std::optional<double> beam) {
        return h.Tag(words, beam);
      }, "words"_a, "beam"_a = py::none())
      .def("suffix_distribution", [](const unipos::TrigramHmm &h, const std::string &word) {
        std::map<std::string, double> out;
        const auto p = h.SuffixDistribution(word);
        for (std::size_t t = 0; t < p.size(); ++t) out.emplace(h.tagset()[t], p[t]);
        return out;
      }, "word"_a)
      .def("evaluate", [](const unipos::TrigramHmm &h,
                          const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> &gold,
                          const unipos::TagMapping *mapping, std::optional<double> beam) {
        return unipos::Evaluate(h, ToTagged(gold), mapping, beam);
      }, "gold"_a, "eval_mapping"_a = nullptr, "beam"_a = py::none());

  // --- experiment -----------------------------------------------------------
  m.def("run_matrix", [](const unipos::Corpus &train, const unipos::Corpus &test, const unipos::TagMapping &mp) {
    const auto r = unipos::RunMatrix(train, test, mp);
    return py::dict("treebank_id"_a = r.treebank_id, "n_fine_tags"_a = r.n_fine_tags, "acc_oo"_a = r.acc_oo,
                    "acc_uu"_a = r.acc_uu, "acc_ou"_a = r.acc_ou);
  }, "train"_a, "test"_a, "mapping"_a);
  m.def("variance_report", [](const std::vector<std::tuple<double, double, double>> &rows) {
    std::vector<unipos::ExperimentResult> results;
    for (const auto &[oo, uu, ou] : rows) results.push_back({"", 0, oo, uu, ou});
    const auto v = unipos::ComputeVariance(results);
    return py::dict("var_oo"_a = v.var_oo, "var_uu"_a = v.var_uu, "var_ou"_a = v.var_ou);
  }, "rows"_a, "Rows of (O/O, U/U, O/U) accuracies as fractions; variances are over percentages.");

  // --- grammar induction ----------------------------------------------------
  py::class_<unipos::DmvParameters>(m, "DmvParameters")
      .def_static("uniform", &unipos::DmvParameters::Uniform, "single_root"_a = true)
      .def_readwrite("single_root", &unipos::DmvParameters::single_root)
      .def("attach", [](const unipos::DmvParameters &p, const std::string &head, const std::string &dep,
                        const std::string &dir) {
        int h = head == "ROOT" ? unipos::kRootHead : unipos::ToIndex(unipos::ParseUniversalTagOrThrow(head));
        return p.Attach(h, dir == "left" ? unipos::Direction::kLeft : unipos::Direction::kRight,
                        unipos::ToIndex(unipos::ParseUniversalTagOrThrow(dep)));
      }, "head"_a, "dependent"_a, "direction"_a = "right")
      .def("stop", [](const unipos::DmvParameters &p, const std::string &head, const std::string &dir, bool adjacent) {
        int h = head == "ROOT" ? unipos::kRootHead : unipos::ToIndex(unipos::ParseUniversalTagOrThrow(head));
        return p.Stop(h, dir == "left" ? unipos::Direction::kLeft : unipos::Direction::kRight, adjacent);
      }, "head"_a, "direction"_a, "adjacent"_a)
      .def("normalization_error", &unipos::DmvParameters::NormalizationError);

  py::class_<unipos::RuleSet>(m, "RuleSet")
      .def(py::init<>())
      .def("__len__", &unipos::RuleSet::size)
      .def("with_strength", &unipos::RuleSet::WithStrength, "strength"_a);
  m.def("parse_rules", &unipos::ParseRules, "text"_a, "default_strength"_a = 1.0);

  m.def("harmonic_init", [](const std::vector<std::vector<std::string>> &corpus, bool single_root) {
    return unipos::InitHarmonic(ToTagCorpus(corpus), single_root);
  }, "corpus"_a, "single_root"_a = true);
  m.def("inside_outside", [](const std::vector<std::string> &sentence, const unipos::DmvParameters &p,
                             const unipos::RuleSet *rules) {
    return CountsToDict(unipos::InsideOutside(ToTags(sentence), p, rules));
  }, "sentence"_a, "params"_a, "rules"_a = nullptr);
  m.def("em_train", [](const std::vector<std::vector<std::string>> &corpus, const unipos::DmvParameters &init,
                       int iterations, const unipos::RuleSet *rules) {
    unipos::EmOptions options;
    options.iterations = iterations;
    options.rules = rules;
    const auto tags = ToTagCorpus(corpus);
    auto result = unipos::TrainEm(tags, init, options);
    return py::make_tuple(result.params, result.log_likelihoods);
  }, "corpus"_a, "params"_a, "iterations"_a, "rules"_a = nullptr);
  m.def("decode", [](const std::vector<std::string> &sentence, const unipos::DmvParameters &p,
                     const unipos::RuleSet *rules) {
    return unipos::DecodeTree(ToTags(sentence), p, rules);
  }, "sentence"_a, "params"_a, "rules"_a = nullptr);
  m.def("directed_accuracy", [](const std::vector<std::vector<int>> &predicted,
                                const std::vector<std::vector<int>> &gold) {
    return unipos::DirectedAccuracy(predicted, gold);
  }, "predicted"_a, "gold"_a);
  m.def("perturb_tags", [](const std::vector<std::vector<std::string>> &corpus, double rate, std::uint64_t seed) {
    return FromTagCorpus(unipos::PerturbTags(ToTagCorpus(corpus), rate, seed));
  }, "corpus"_a, "error_rate"_a, "seed"_a);
}
