#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "unipos/dmv.h"
#include "unipos/error.h"
#include "unipos/experiment.h"
#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"
#include "unipos/trigram_hmm.h"

namespace unipos::cli {

namespace {

namespace fs = std::filesystem;

// Error raised while handling a specific file; keeps the original kind so
// the exit code can be chosen from it.
Error InFile(const std::string &path, const Error &e) {
  std::string where = path;
  if (e.line() > 0) where += ":" + std::to_string(e.line());
  return Error(e.kind(), where + ": " + ErrorKindName(e.kind()) + ": " + e.message());
}

template <typename F>
auto WithFile(const std::string &path, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error &e) {
    throw InFile(path, e);
  }
}

fs::path ResolveMapPath(const std::string &value) {
  if (fs::exists(value)) return value;
  if (const char *dir = std::getenv("UNIPOS_MAP_DIR")) {
    for (const fs::path candidate : {fs::path(dir) / value, fs::path(dir) / (value + ".map")}) {
      if (fs::exists(candidate)) return candidate;
    }
  }
  throw Error(ErrorKind::kIo, "mapping file '" + value + "' not found (set UNIPOS_MAP_DIR to search a directory)");
}

TagMapping LoadMapping(const std::string &value) {
  const fs::path path = ResolveMapPath(value);
  return WithFile(path.string(), [&] { return LoadMappingFile(path); });
}

Corpus LoadCorpus(const std::string &path, const std::string &format,
                  const ConllxReadOptions &options = {}) {
  const CorpusFormat fmt = ParseCorpusFormat(format);
  return WithFile(path, [&] { return ReadCorpusFile(path, fmt, options); });
}

// 1-based line of token `token` in sentence `sentence` of a corpus file.
int LocateToken(const std::string &path, std::size_t sentence, std::size_t token) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  int line_no = 0;
  std::size_t s = 0;
  std::size_t t = 0;
  bool inside = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (inside) ++s;
      inside = false;
      t = 0;
      continue;
    }
    if (line.front() == '#') continue;
    inside = true;
    if (s == sentence && t == token) return line_no;
    ++t;
  }
  return 0;
}

Corpus MapCorpus(const Corpus &corpus, const TagMapping &mapping, const std::string &path,
                 bool fallback_x) {
  if (!fallback_x) {
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      const auto &tokens = corpus[s].tokens;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (mapping.Contains(tokens[i].fine_tag)) continue;
        Error e(ErrorKind::kUnknownFineTag,
                "fine tag '" + tokens[i].fine_tag + "' of token '" + tokens[i].form + "' (sentence " +
                    std::to_string(s + 1) + ", token " + std::to_string(i + 1) + ") is not in " +
                    mapping.treebank_id(),
                LocateToken(path, s, i));
        throw InFile(path, e);
      }
    }
  }
  return WithFile(path, [&] { return ApplyMapping(corpus, mapping, fallback_x); });
}

// Runs `write` against a file, or `out` when the path is empty or "-".
void WriteOutput(const std::string &path, std::ostream &out, const std::function<void(std::ostream &)> &write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path);
  write(file);
  if (!file) throw Error(ErrorKind::kIo, "error writing " + path);
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

const std::vector<std::string> kFormats = {"conllx", "wordtag"};

struct MapArgs {
  std::string input, map, output, format = "conllx";
  bool fallback_x = false;
};

struct ValidateArgs {
  std::string input, map, format = "conllx";
};

struct TrainArgs {
  std::string input, format = "conllx", tag_column = "original", model, map;
  int max_suffix = kDefaultMaxSuffixLength;
  int rare_threshold = kDefaultRareWordThreshold;
  bool fallback_x = false;
};

struct TagArgs {
  std::string model, input, output, format = "conllx";
  double beam = kDefaultBeamFactor;
  bool exact = false;
};

struct EvalArgs {
  std::string model, gold, format = "conllx", tag_column = "original", map, gold_map;
  double beam = kDefaultBeamFactor;
  bool exact = false;
};

struct MatrixArgs {
  std::string train, test, map, report, format = "conllx";
  double split = 0.9;
  bool exact = false;
  double beam = kDefaultBeamFactor;
};

struct VarianceArgs {
  std::vector<std::string> reports;
};

struct InduceArgs {
  std::string input, map, rules, report, output;
  std::size_t max_len = 10;
  int iters = 50;
  double tag_noise = 0.0;
  std::uint64_t seed = 0;
  bool len_before_strip = false;
  bool multi_root = false;
  bool fallback_x = false;
  int jobs = 1;
};

TaggedCorpus TaggedFromCorpus(const Corpus &corpus, const std::string &tag_column, const std::string &map_value,
                              const std::string &path, bool fallback_x) {
  if (tag_column == "original") return ToTaggedCorpus(corpus, TagColumn::kFine);
  if (!map_value.empty()) {
    return ToTaggedCorpus(MapCorpus(corpus, LoadMapping(map_value), path, fallback_x), TagColumn::kUniversal);
  }
  // Without a mapping the universal tags come from CPOSTAG (conllx) or are
  // already in the tag column (wordtag).
  bool have_universal = std::all_of(corpus.begin(), corpus.end(), [](const Sentence &s) {
    return std::all_of(s.tokens.begin(), s.tokens.end(), [](const Token &t) { return t.universal_tag.has_value(); });
  });
  if (have_universal) return ToTaggedCorpus(corpus, TagColumn::kUniversal);
  TaggedCorpus tagged = ToTaggedCorpus(corpus, TagColumn::kFine);
  for (const TaggedSentence &sentence : tagged) {
    for (const std::string &tag : sentence.tags) {
      WithFile(path, [&] { return ParseUniversalTagOrThrow(tag); });
    }
  }
  return tagged;
}

int RunMap(const MapArgs &a, std::ostream &out) {
  const TagMapping mapping = LoadMapping(a.map);
  const Corpus mapped = MapCorpus(LoadCorpus(a.input, a.format), mapping, a.input, a.fallback_x);
  WriteOutput(a.output, out, [&](std::ostream &os) {
    if (a.format == "conllx") {
      WriteConllx(os, mapped);
    } else {
      WriteWordTag(os, mapped, /*universal=*/true);
    }
  });
  return kExitOk;
}

int RunValidate(const ValidateArgs &a, std::ostream &out) {
  const TagMapping mapping = LoadMapping(a.map);
  std::map<std::string, std::size_t, std::less<>> observed;
  for (const Sentence &sentence : LoadCorpus(a.input, a.format)) {
    for (const Token &token : sentence.tokens) ++observed[token.fine_tag];
  }
  const ValidationReport report = ValidateMapping(mapping, observed);
  out << "kind\tkey\tvalue\n";
  for (const std::string &tag : report.unknown_tags) out << "unknown\t" << tag << '\t' << observed[tag] << '\n';
  for (const std::string &tag : report.unused_tags) out << "unused\t" << tag << "\t0\n";
  for (UniversalTag tag : kAllUniversalTags) {
    out << "count\t" << ToString(tag) << '\t' << report.tag_histogram[static_cast<std::size_t>(ToIndex(tag))] << '\n';
  }
  return kExitOk;
}

int RunTrain(const TrainArgs &a, std::ostream &out) {
  ConllxReadOptions read;
  read.universal_from_cpostag = a.tag_column == "universal" && a.map.empty();
  const Corpus corpus = LoadCorpus(a.input, a.format, read);
  const TaggedCorpus tagged = TaggedFromCorpus(corpus, a.tag_column, a.map, a.input, a.fallback_x);
  HmmOptions options;
  options.max_suffix_length = a.max_suffix;
  options.rare_word_threshold = a.rare_threshold;
  const TrigramHmm model = WithFile(a.input, [&] { return TrigramHmm::Train(tagged, options); });
  WriteOutput(a.model, out, [&](std::ostream &os) { os << model.Serialize(); });
  return kExitOk;
}

TrigramHmm LoadModel(const std::string &path) {
  return WithFile(path, [&] { return TrigramHmm::Deserialize(ReadText(path)); });
}

int RunTag(const TagArgs &a, std::ostream &out) {
  const TrigramHmm model = LoadModel(a.model);
  Corpus corpus = LoadCorpus(a.input, a.format);
  const std::optional<double> beam = a.exact ? std::nullopt : std::optional<double>(a.beam);
  for (Sentence &sentence : corpus) {
    std::vector<std::string> words;
    for (const Token &token : sentence.tokens) words.push_back(token.form);
    const std::vector<std::string> tags = model.Tag(words, beam);
    for (std::size_t i = 0; i < tags.size(); ++i) sentence.tokens[i].fine_tag = tags[i];
  }
  WriteOutput(a.output, out, [&](std::ostream &os) {
    if (a.format == "conllx") {
      WriteConllx(os, corpus);
    } else {
      WriteWordTag(os, corpus);
    }
  });
  return kExitOk;
}

int RunEval(const EvalArgs &a, std::ostream &out) {
  const TrigramHmm model = LoadModel(a.model);
  ConllxReadOptions read;
  read.universal_from_cpostag = a.tag_column == "universal" && a.gold_map.empty();
  const Corpus corpus = LoadCorpus(a.gold, a.format, read);
  const TaggedCorpus gold = TaggedFromCorpus(corpus, a.tag_column, a.gold_map, a.gold, false);
  std::optional<TagMapping> eval_mapping;
  if (!a.map.empty()) eval_mapping = LoadMapping(a.map);
  const std::optional<double> beam = a.exact ? std::nullopt : std::optional<double>(a.beam);
  const double accuracy = WithFile(a.gold, [&] {
    return Evaluate(model, gold, eval_mapping ? &*eval_mapping : nullptr, beam);
  });
  std::size_t tokens = 0;
  for (const TaggedSentence &s : gold) tokens += s.tags.size();
  out << "tokens\taccuracy\n" << tokens << '\t' << Fixed(accuracy, 6) << '\n';
  return kExitOk;
}

int RunMatrixCommand(const MatrixArgs &a, std::ostream &out) {
  const TagMapping mapping = LoadMapping(a.map);
  Corpus train = LoadCorpus(a.train, a.format);
  Corpus test;
  if (a.test.empty()) {
    auto split = SplitCorpus(train, a.split);
    train = std::move(split.first);
    test = std::move(split.second);
  } else {
    test = LoadCorpus(a.test, a.format);
  }
  // Surface mapping gaps with file and line before training.
  MapCorpus(train, mapping, a.train, false);
  if (!a.test.empty()) MapCorpus(test, mapping, a.test, false);
  MatrixOptions options;
  if (!a.exact) options.beam_factor = a.beam;
  const ExperimentResult result = RunMatrix(train, test, mapping, options);
  const std::vector<ExperimentResult> rows = {result};
  WriteOutput(a.report, out, [&](std::ostream &os) { WriteReport(os, rows); });
  if (!a.report.empty() && a.report != "-") WriteReport(out, rows);
  return kExitOk;
}

int RunVarianceCommand(const VarianceArgs &a, std::ostream &out) {
  std::vector<ExperimentResult> rows;
  for (const std::string &path : a.reports) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
    auto part = WithFile(path, [&] { return ReadReport(in); });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const VarianceReport v = ComputeVariance(rows);
  out << "treebanks\tvar_O/O\tvar_U/U\tvar_O/U\n"
      << rows.size() << '\t' << Fixed(v.var_oo, 4) << '\t' << Fixed(v.var_uu, 4) << '\t' << Fixed(v.var_ou, 4)
      << '\n';
  return kExitOk;
}

int RunInduce(const InduceArgs &a, std::ostream &out, std::ostream &err) {
  ConllxReadOptions read;
  read.universal_from_cpostag = a.map.empty();
  Corpus corpus = LoadCorpus(a.input, "conllx", read);
  if (!a.map.empty()) corpus = MapCorpus(corpus, LoadMapping(a.map), a.input, a.fallback_x);
  std::optional<RuleSet> rules;
  if (!a.rules.empty()) rules = WithFile(a.rules, [&] { return LoadRulesFile(a.rules); });

  InductionOptions options;
  options.max_len = a.max_len;
  options.filter_before_strip = a.len_before_strip;
  options.iterations = a.iters;
  options.rules = rules ? &*rules : nullptr;
  options.tag_noise = a.tag_noise;
  options.seed = a.seed;
  options.single_root = !a.multi_root;
  options.jobs = a.jobs;
  const InductionResult result = WithFile(a.input, [&] { return RunInduction(corpus, options); });

  WriteOutput(a.report, out, [&](std::ostream &os) {
    os << "sentences\ttokens\titerations\tinitial_loglik\tfinal_loglik\tdirected_accuracy\n"
       << result.sentences << '\t' << result.tokens << '\t' << result.log_likelihoods.size() << '\t'
       << Fixed(result.log_likelihoods.front(), 6) << '\t' << Fixed(result.log_likelihoods.back(), 6) << '\t'
       << Fixed(result.directed_accuracy, 6) << '\n';
  });
  if (!a.output.empty()) {
    WriteOutput(a.output, out, [&](std::ostream &os) { WriteConllx(os, result.predicted); });
  }
  err << "induce: " << result.sentences << " sentences, directed accuracy "
      << Fixed(100.0 * result.directed_accuracy, 2) << "%\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Universal part-of-speech toolkit: tag mapping, trigram tagging and grammar induction", "unipos"};
  app.set_version_flag("--version", std::string("unipos ") + kVersion + " (mapping format " +
                                        std::to_string(kMappingFormatVersion) + ")");
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  MapArgs map_args;
  auto *map_cmd = app.add_subcommand("map", "Attach universal tags (CPOSTAG) using a mapping file");
  map_cmd->add_option("--input", map_args.input, "Input corpus")->required();
  map_cmd->add_option("--map", map_args.map, "Mapping file or name under UNIPOS_MAP_DIR")->required();
  map_cmd->add_option("--output", map_args.output, "Output corpus (default stdout)");
  map_cmd->add_option("--format", map_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));
  map_cmd->add_flag("--fallback-x", map_args.fallback_x, "Map unknown fine tags to X instead of failing");

  ValidateArgs validate_args;
  auto *validate_cmd = app.add_subcommand("validate", "Report unknown and unused fine tags");
  validate_cmd->add_option("--input", validate_args.input, "Input corpus")->required();
  validate_cmd->add_option("--map", validate_args.map, "Mapping file")->required();
  validate_cmd->add_option("--format", validate_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));

  TrainArgs train_args;
  auto *train_cmd = app.add_subcommand("train", "Train a trigram tagger");
  train_cmd->add_option("--input", train_args.input, "Training corpus")->required();
  train_cmd->add_option("--format", train_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));
  train_cmd->add_option("--tag-column", train_args.tag_column, "original or universal")
      ->check(CLI::IsMember({"original", "universal"}));
  train_cmd->add_option("--model", train_args.model, "Model output path")->required();
  train_cmd->add_option("--map", train_args.map, "Mapping used to derive universal tags");
  train_cmd->add_option("--max-suffix", train_args.max_suffix, "Longest suffix in the unknown-word model");
  train_cmd->add_option("--rare-threshold", train_args.rare_threshold, "Max frequency of suffix-model words");
  train_cmd->add_flag("--fallback-x", train_args.fallback_x, "Map unknown fine tags to X");

  TagArgs tag_args;
  auto *tag_cmd = app.add_subcommand("tag", "Tag a corpus with a trained model");
  tag_cmd->add_option("--model", tag_args.model, "Model file")->required();
  tag_cmd->add_option("--input", tag_args.input, "Corpus to tag")->required();
  tag_cmd->add_option("--output", tag_args.output, "Output path (default stdout)");
  tag_cmd->add_option("--format", tag_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));
  tag_cmd->add_option("--beam", tag_args.beam, "Beam factor (>= 1)")->check(CLI::Range(1.0, std::numeric_limits<double>::infinity()));
  tag_cmd->add_flag("--exact", tag_args.exact, "Disable beam pruning");

  EvalArgs eval_args;
  auto *eval_cmd = app.add_subcommand("eval", "Token accuracy against a gold corpus");
  eval_cmd->add_option("--model", eval_args.model, "Model file")->required();
  eval_cmd->add_option("--gold", eval_args.gold, "Gold corpus")->required();
  eval_cmd->add_option("--format", eval_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));
  eval_cmd->add_option("--tag-column", eval_args.tag_column, "original or universal")
      ->check(CLI::IsMember({"original", "universal"}));
  eval_cmd->add_option("--map", eval_args.map, "Map predictions and gold to universal tags before comparing");
  eval_cmd->add_option("--gold-map", eval_args.gold_map, "Mapping that derives universal gold tags");
  eval_cmd->add_option("--beam", eval_args.beam, "Beam factor (>= 1)")->check(CLI::Range(1.0, std::numeric_limits<double>::infinity()));
  eval_cmd->add_flag("--exact", eval_args.exact, "Disable beam pruning");

  auto *experiment_cmd = app.add_subcommand("experiment", "Tagset comparison experiments");
  experiment_cmd->require_subcommand(1);
  MatrixArgs matrix_args;
  auto *matrix_cmd = experiment_cmd->add_subcommand("matrix", "O/O, U/U and O/U accuracies for one treebank");
  matrix_cmd->add_option("--train", matrix_args.train, "Training corpus")->required();
  matrix_cmd->add_option("--test", matrix_args.test, "Test corpus (default: contiguous split of --train)");
  matrix_cmd->add_option("--split", matrix_args.split, "Training fraction when --test is absent");
  matrix_cmd->add_option("--map", matrix_args.map, "Mapping file")->required();
  matrix_cmd->add_option("--report", matrix_args.report, "TSV report path (default stdout)");
  matrix_cmd->add_option("--format", matrix_args.format, "conllx or wordtag")->check(CLI::IsMember(kFormats));
  matrix_cmd->add_option("--beam", matrix_args.beam, "Beam factor (>= 1)")->check(CLI::Range(1.0, std::numeric_limits<double>::infinity()));
  matrix_cmd->add_flag("--exact", matrix_args.exact, "Disable beam pruning");
  VarianceArgs variance_args;
  auto *variance_cmd = experiment_cmd->add_subcommand("variance", "Cross-treebank variance of matrix reports");
  variance_cmd->add_option("--report", variance_args.reports, "Matrix report(s)")->required();

  InduceArgs induce_args;
  auto *induce_cmd = app.add_subcommand("induce", "Unsupervised dependency induction over universal tags");
  induce_cmd->add_option("--input", induce_args.input, "CoNLL-X corpus with gold heads")->required();
  induce_cmd->add_option("--map", induce_args.map, "Mapping file (default: universal tags from CPOSTAG)");
  induce_cmd->add_option("--max-len", induce_args.max_len, "Maximum sentence length")->check(CLI::PositiveNumber);
  induce_cmd->add_option("--iters", induce_args.iters, "EM iterations")->check(CLI::PositiveNumber);
  induce_cmd->add_option("--rules", induce_args.rules, "Head-dependent rules file");
  induce_cmd->add_option("--tag-noise", induce_args.tag_noise, "Tag corruption rate")->check(CLI::Range(0.0, 1.0));
  induce_cmd->add_option("--seed", induce_args.seed, "Random seed");
  induce_cmd->add_option("--report", induce_args.report, "TSV report path (default stdout)");
  induce_cmd->add_option("--output", induce_args.output, "Write predicted trees as CoNLL-X");
  induce_cmd->add_flag("--len-before-strip", induce_args.len_before_strip,
                       "Apply the length filter before removing punctuation");
  induce_cmd->add_flag("--multi-root", induce_args.multi_root, "Allow several root dependents");
  induce_cmd->add_flag("--fallback-x", induce_args.fallback_x, "Map unknown fine tags to X");
  induce_cmd->add_option("--jobs", induce_args.jobs, "Worker threads for the E-step")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "unipos: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (map_cmd->parsed()) return RunMap(map_args, out);
    if (validate_cmd->parsed()) return RunValidate(validate_args, out);
    if (train_cmd->parsed()) return RunTrain(train_args, out);
    if (tag_cmd->parsed()) return RunTag(tag_args, out);
    if (eval_cmd->parsed()) return RunEval(eval_args, out);
    if (matrix_cmd->parsed()) return RunMatrixCommand(matrix_args, out);
    if (variance_cmd->parsed()) return RunVarianceCommand(variance_args, out);
    if (induce_cmd->parsed()) return RunInduce(induce_args, out, err);
  } catch (const Error &e) {
    err << "unipos: error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidArgument ? kExitUsage : kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace unipos::cli
