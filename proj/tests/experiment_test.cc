#include <sstream>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "unipos/error.h"
#include "unipos/experiment.h"
#include "unipos/tag_mapping.h"

namespace unipos {
namespace {

Sentence Tagged(std::initializer_list<std::pair<const char *, const char *>> pairs) {
  Sentence s;
  for (const auto &[w, t] : pairs) s.tokens.push_back(Token{w, t, {}, {}});
  return s;
}

TagMapping ToyMapping() {
  return TagMapping("toy", {{"DT", UniversalTag::kDet},
                            {"NN", UniversalTag::kNoun},
                            {"NNS", UniversalTag::kNoun},
                            {"VB", UniversalTag::kVerb}});
}

TEST_CASE("matrix on a deterministic corpus") {
  Corpus train;
  for (int i = 0; i < 3; ++i) {
    train.push_back(Tagged({{"the", "DT"}, {"dog", "NN"}, {"runs", "VB"}}));
    train.push_back(Tagged({{"the", "DT"}, {"dogs", "NNS"}, {"run", "VB"}}));
  }
  ExperimentResult r = RunMatrix(train, train, ToyMapping());
  CHECK(r.treebank_id == "toy");
  CHECK(r.n_fine_tags == 4);
  CHECK(r.acc_oo == 1.0);
  CHECK(r.acc_uu == 1.0);
  CHECK(r.acc_ou == 1.0);
}

TEST_CASE("confusable fine tags favour O/U") {
  // "sheep" is NN and NNS equally often in the same context, so the fine
  // tagger must get some of them wrong; both map to NOUN.
  Corpus train, test;
  for (int i = 0; i < 4; ++i) {
    train.push_back(Tagged({{"the", "DT"}, {"sheep", "NN"}, {"graze", "VB"}}));
    train.push_back(Tagged({{"the", "DT"}, {"sheep", "NNS"}, {"graze", "VB"}}));
  }
  test.push_back(Tagged({{"the", "DT"}, {"sheep", "NN"}, {"graze", "VB"}}));
  test.push_back(Tagged({{"the", "DT"}, {"sheep", "NNS"}, {"graze", "VB"}}));
  ExperimentResult r = RunMatrix(train, test, ToyMapping());
  CHECK(r.acc_ou > r.acc_oo);
  CHECK(r.acc_ou == 1.0);
  CHECK(r.acc_oo == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("variance conventions") {
  std::vector<double> v = {1, 2, 3, 4};
  CHECK(SampleVariance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(PopulationVariance(v) == doctest::Approx(1.25));
  std::vector<ExperimentResult> same(3, ExperimentResult{"x", 1, 0.9, 0.95, 0.97});
  VarianceReport r = ComputeVariance(same);
  CHECK(r.var_oo == 0.0);
  CHECK(r.var_ou == 0.0);
  CHECK_ERROR_KIND(ComputeVariance(std::vector<ExperimentResult>(1)), ErrorKind::kInsufficientData);
}

TEST_CASE("variance is over percentages") {
  std::vector<ExperimentResult> rs = {{"a", 1, 0.90, 0.90, 0.90}, {"b", 1, 0.92, 0.90, 0.91}};
  VarianceReport r = ComputeVariance(rs);
  CHECK(r.var_oo == doctest::Approx(2.0));
  CHECK(r.var_uu == doctest::Approx(0.0));
  CHECK(r.var_ou == doctest::Approx(0.5));
}

TEST_CASE("report round trip") {
  std::vector<ExperimentResult> rs = {{"en-ptb", 45, 0.967, 0.968, 0.977}, {"de-tiger", 54, 0.979, 0.981, 0.988}};
  std::ostringstream out;
  WriteReport(out, rs);
  CHECK(out.str().rfind("treebank\ttags\tO/O\tU/U\tO/U\n", 0) == 0);
  CHECK(out.str().find("en-ptb\t45\t96.70\t96.80\t97.70") != std::string::npos);
  std::istringstream in(out.str());
  auto back = ReadReport(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1].treebank_id == "de-tiger");
  CHECK(back[1].acc_ou == doctest::Approx(0.988));
  std::istringstream bad("treebank\ttags\tO/O\tU/U\tO/U\nx\t1\tabc\t1\t1\n");
  CHECK_ERROR_KIND(ReadReport(bad), ErrorKind::kParse);
}

TEST_CASE("split corpus") {
  Corpus c(10, Tagged({{"a", "NN"}}));
  auto [train, test] = SplitCorpus(c, 0.9);
  CHECK(train.size() == 9);
  CHECK(test.size() == 1);
  CHECK_ERROR_KIND(SplitCorpus(c, 1.5), ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace unipos
