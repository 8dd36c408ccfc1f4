#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "doctest.h"
#include "generators.h"
#include "test_util.h"
#include "unipos/treebank.h"

namespace unipos {
namespace {

using testing::DataPath;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Sample() { return DataPath("samples/en-sample.conll").string(); }
std::string PtbMap() { return DataPath("maps/en-ptb.map").string(); }

TEST_CASE("cli: version and usage") {
  Result v = Run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("unipos 1.0.0") != std::string::npos);
  Result none = Run({});
  CHECK(none.code == cli::kExitUsage);
  Result bad = Run({"frobnicate"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("Usage") != std::string::npos);
  CHECK(Run({"map", "--help"}).code == 0);
  CHECK(Run({"map", "--input", Sample()}).code == cli::kExitUsage);
}

TEST_CASE("cli: map") {
  TempDir dir;
  Result r = Run({"map", "--input", Sample(), "--map", PtbMap(), "--output", (dir / "y.conll").string()});
  REQUIRE(r.code == 0);
  std::istringstream in(dir.Read("y.conll"));
  Corpus c = ReadConllx(in, {true});
  REQUIRE(c.size() == 3);
  CHECK(c[0].tokens[0].universal_tag == UniversalTag::kDet);
  CHECK(c[0].tokens[12].universal_tag == UniversalTag::kPunct);
  CHECK(c[0].tokens[5].fine_tag == "VBN");
}

TEST_CASE("cli: mapping gap is a data error") {
  TempDir dir;
  auto input = dir.Write("x.conll", "1\ta\t_\tDT\tDT\t_\t2\t_\t_\t_\n2\tb\t_\tQQ\tQQ\t_\t0\t_\t_\t_\n\n");
  Result r = Run({"map", "--input", input.string(), "--map", PtbMap()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("QQ") != std::string::npos);
  CHECK(r.err.find("x.conll:2") != std::string::npos);
  Result fallback = Run({"map", "--input", input.string(), "--map", PtbMap(), "--fallback-x"});
  CHECK(fallback.code == 0);
  CHECK(fallback.out.find("\tX\tQQ\t") != std::string::npos);
}

TEST_CASE("cli: map files resolve through UNIPOS_MAP_DIR") {
  ::setenv("UNIPOS_MAP_DIR", DataPath("maps").string().c_str(), 1);
  Result r = Run({"map", "--input", Sample(), "--map", "en-ptb"});
  ::unsetenv("UNIPOS_MAP_DIR");
  CHECK(r.code == 0);
  CHECK(Run({"map", "--input", Sample(), "--map", "en-ptb"}).code == cli::kExitData);
}

TEST_CASE("cli: validate") {
  Result r = Run({"validate", "--input", Sample(), "--map", PtbMap()});
  CHECK(r.code == 0);
  CHECK(r.out.find("unused\tCC") == std::string::npos);
  CHECK(r.out.find("unused\tWRB") != std::string::npos);
  CHECK(r.out.find("count\tNOUN\t") != std::string::npos);
}

TEST_CASE("cli: train, tag and eval") {
  TempDir dir;
  const std::string model = (dir / "m.hmm").string();
  REQUIRE(Run({"train", "--input", Sample(), "--model", model}).code == 0);
  Result tagged = Run({"tag", "--model", model, "--input", Sample(), "--output", (dir / "t.conll").string()});
  REQUIRE(tagged.code == 0);
  Result e = Run({"eval", "--model", model, "--gold", Sample()});
  CHECK(e.code == 0);
  CHECK(e.out.find("\t1.000000\n") != std::string::npos);
  Result u = Run({"train", "--input", Sample(), "--model", (dir / "u.hmm").string(),
                  "--tag-column", "universal", "--map", PtbMap()});
  CHECK(u.code == 0);
  CHECK(Run({"eval", "--model", model, "--gold", Sample(), "--map", PtbMap()}).code == 0);
  CHECK(Run({"tag", "--model", (dir / "missing.hmm").string(), "--input", Sample()}).code == cli::kExitData);
  CHECK(Run({"tag", "--model", model, "--input", Sample(), "--beam", "0.5"}).code == cli::kExitUsage);
}

TEST_CASE("cli: experiment matrix and variance") {
  TempDir dir;
  const std::string report = (dir / "r.tsv").string();
  Result m = Run({"experiment", "matrix", "--train", Sample(), "--test", Sample(), "--map", PtbMap(),
                  "--report", report});
  REQUIRE(m.code == 0);
  const std::string text = dir.Read("r.tsv");
  CHECK(text.find("en-ptb\t45\t100.00\t100.00\t100.00") != std::string::npos);
  auto second = dir.Write("r2.tsv", "treebank\ttags\tO/O\tU/U\tO/U\nx\t10\t90.00\t95.00\t96.00\n");
  Result v = Run({"experiment", "variance", "--report", report, "--report", second.string()});
  CHECK(v.code == 0);
  CHECK(v.out.find("\n2\t50.0000\t") != std::string::npos);
  CHECK(Run({"experiment", "variance", "--report", report}).code == cli::kExitData);
}

TEST_CASE("cli: induce") {
  TempDir dir;
  Corpus c = gen::SampleCorpus(gen::SyntheticGrammar(), 60, 5);
  {
    std::ofstream out(dir / "syn.conll");
    WriteConllx(out, c);
  }
  const std::string report = (dir / "induce.tsv").string();
  Result r = Run({"induce", "--input", (dir / "syn.conll").string(), "--iters", "3", "--report", report,
                  "--rules", DataPath("rules/default.rules").string(), "--tag-noise", "0.1", "--seed", "7",
                  "--output", (dir / "pred.conll").string()});
  REQUIRE(r.code == 0);
  const std::string text = dir.Read("induce.tsv");
  CHECK(text.rfind("sentences\ttokens\titerations\tinitial_loglik\tfinal_loglik\tdirected_accuracy\n", 0) == 0);
  CHECK(text.find("\n60\t") != std::string::npos);
  std::istringstream pred(dir.Read("pred.conll"));
  CHECK(ReadConllx(pred, {true}).size() == 60);

  Result mapped = Run({"induce", "--input", Sample(), "--map", PtbMap(), "--iters", "2"});
  CHECK(mapped.code == 0);
  CHECK(Run({"induce", "--input", Sample(), "--iters", "2"}).code == cli::kExitData);
  CHECK(Run({"induce", "--input", Sample(), "--map", PtbMap(), "--max-len", "0"}).code == cli::kExitUsage);
}

}  // namespace
}  // namespace unipos
