#include <sstream>
#include <string>

#include "doctest.h"
#include "test_util.h"
#include "unipos/error.h"
#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"

namespace unipos {
namespace {

using testing::DataPath;

Corpus Read(const std::string &text, bool universal = false) {
  std::istringstream in(text);
  return ReadConllx(in, {universal});
}

std::string Write(const Corpus &corpus) {
  std::ostringstream out;
  WriteConllx(out, corpus);
  return out.str();
}

// Tokens from (tag, head) pairs; tag "." is punctuation.
Sentence Tree(std::initializer_list<std::pair<const char *, int>> tokens) {
  Sentence s;
  int i = 0;
  for (const auto &[tag, head] : tokens) {
    s.tokens.push_back(Token{"w" + std::to_string(++i), tag, ParseUniversalTag(tag), head});
  }
  return s;
}

TEST_CASE("read_conllx") {
  SUBCASE("two tokens") {
    Corpus c = Read("1\tThe\t_\tDT\tDT\t_\t2\tNMOD\t_\t_\n2\toboist\t_\tNN\tNN\t_\t0\tROOT\t_\t_\n");
    REQUIRE(c.size() == 1);
    REQUIRE(c[0].size() == 2);
    CHECK(c[0].tokens[0].form == "The");
    CHECK(c[0].tokens[0].fine_tag == "DT");
    CHECK(Heads(c[0]) == std::vector<int>{2, 0});
    CHECK_FALSE(c[0].tokens[0].universal_tag.has_value());
  }
  SUBCASE("empty stream") { CHECK(Read("").empty()); }
  SUBCASE("several blank lines between sentences") {
    Corpus c = Read("1\ta\t_\tX\tX\t_\t0\t_\t_\t_\n\n\n1\tb\t_\tX\tX\t_\t0\t_\t_\t_\n\n");
    CHECK(c.size() == 2);
  }
  SUBCASE("nine columns") {
    try {
      Read("1\ta\t_\tX\tX\t_\t0\t_\t_\t_\n2\tb\t_\tX\tX\t_\t0\t_\t_\n");
      FAIL("expected ParseError");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kParse);
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-sequential ids") {
    CHECK_ERROR_KIND(Read("1\ta\t_\tX\tX\t_\t0\t_\t_\t_\n3\tb\t_\tX\tX\t_\t1\t_\t_\t_\n"), ErrorKind::kParse);
  }
  SUBCASE("bad heads") {
    CHECK_ERROR_KIND(Read("1\ta\t_\tX\tX\t_\tx\t_\t_\t_\n"), ErrorKind::kParse);
    CHECK_ERROR_KIND(Read("1\ta\t_\tX\tX\t_\t5\t_\t_\t_\n"), ErrorKind::kParse);
    CHECK_ERROR_KIND(Read("1\ta\t_\tX\tX\t_\t1\t_\t_\t_\n"), ErrorKind::kParse);
  }
  SUBCASE("universal tags from CPOSTAG") {
    Corpus c = Read("1\ta\t_\tNOUN\tNN\t_\t0\t_\t_\t_\n", true);
    CHECK(c[0].tokens[0].universal_tag == UniversalTag::kNoun);
    CHECK_ERROR_KIND(Read("1\ta\t_\tNN\tNN\t_\t0\t_\t_\t_\n", true), ErrorKind::kInvalidUniversalTag);
  }
}

TEST_CASE("write_conllx") {
  SUBCASE("empty corpus") { CHECK(Write({}).empty()); }
  SUBCASE("universal tag in column 4") {
    Sentence s;
    s.tokens.push_back(Token{"dogs", "NNS", UniversalTag::kNoun, 0});
    const std::string text = Write({s});
    CHECK(text == "1\tdogs\t_\tNOUN\tNNS\t_\t0\t_\t_\t_\n\n");
  }
  SUBCASE("missing universal tag and head") {
    Sentence s;
    s.tokens.push_back(Token{"x", "", std::nullopt, std::nullopt});
    CHECK(Write({s}) == "1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n\n");
  }
  SUBCASE("round trip") {
    Corpus c = ReadCorpusFile(DataPath("samples/en-sample.conll"), CorpusFormat::kConllx);
    REQUIRE(c.size() == 3);
    TagMapping ptb = LoadMappingFile(DataPath("maps/en-ptb.map"));
    Corpus mapped = ApplyMapping(c, ptb);
    Corpus again = Read(Write(mapped), true);
    CHECK(again == mapped);
    CHECK(Write(again) == Write(mapped));
  }
}

TEST_CASE("word/tag format") {
  std::istringstream in("The\tDT\ndog\tNN\n\nbarks\n");
  Corpus c = ReadWordTag(in);
  REQUIRE(c.size() == 2);
  CHECK(c[0].tokens[1].fine_tag == "NN");
  CHECK(c[1].tokens[0].fine_tag.empty());
  std::ostringstream out;
  WriteWordTag(out, {c[0]});
  CHECK(out.str() == "The\tDT\ndog\tNN\n\n");
}

TEST_CASE("apply_mapping") {
  TagMapping ptb = LoadMappingFile(DataPath("maps/en-ptb.map"));
  SUBCASE("PTB example sentence") {
    Corpus c = ReadCorpusFile(DataPath("samples/en-sample.conll"), CorpusFormat::kConllx);
    Sentence mapped = ApplyMapping(c[0], ptb);
    std::string row;
    for (UniversalTag t : UniversalTags(mapped)) row += std::string(ToString(t)) + " ";
    CHECK(row == "DET NOUN NOUN NOUN VERB VERB DET ADJ NOUN ADP DET NOUN . ");
  }
  SUBCASE("empty sentence") { CHECK(ApplyMapping(Sentence{}, ptb).empty()); }
  SUBCASE("unmapped tag names the token") {
    Sentence s;
    s.tokens = {Token{"a", "DT", {}, {}}, Token{"b", "XYZ", {}, {}}};
    try {
      ApplyMapping(s, ptb);
      FAIL("expected UnknownFineTag");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kUnknownFineTag);
      CHECK(std::string(e.what()).find("XYZ") != std::string::npos);
      CHECK(std::string(e.what()).find("token 2") != std::string::npos);
    }
    CHECK(ApplyMapping(s, ptb, true).tokens[1].universal_tag == UniversalTag::kX);
  }
}

TEST_CASE("strip_punctuation") {
  SUBCASE("no punctuation is identity") {
    Sentence s = Tree({{"NOUN", 2}, {"VERB", 0}});
    CHECK(StripPunctuation(s) == s);
  }
  SUBCASE("orphans of a punctuation head go to the root") {
    // w1 <- w2, w2 (punct) <- root, w3 <- w2
    Sentence s = Tree({{"NOUN", 2}, {".", 0}, {"VERB", 2}});
    Sentence out = StripPunctuation(s);
    CHECK(out.size() == 2);
    CHECK(Heads(out) == std::vector<int>{0, 0});
    CHECK(out.tokens[0].form == "w1");
    CHECK(out.tokens[1].form == "w3");
  }
  SUBCASE("nearest non-punctuation ancestor") {
    // w1 <- w2 (punct) <- w3 <- root
    Sentence s = Tree({{"NOUN", 2}, {".", 3}, {"VERB", 0}});
    CHECK(Heads(StripPunctuation(s)) == std::vector<int>{2, 0});
  }
  SUBCASE("trailing period") {
    Sentence s = Tree({{"NOUN", 2}, {"VERB", 0}, {".", 0}});
    CHECK(Heads(StripPunctuation(s)) == std::vector<int>{2, 0});
  }
  SUBCASE("heads are re-indexed") {
    Sentence s = Tree({{".", 3}, {"NOUN", 3}, {"VERB", 0}});
    CHECK(Heads(StripPunctuation(s)) == std::vector<int>{2, 0});
  }
}

TEST_CASE("filter_by_length") {
  auto sentence = [](std::size_t n) {
    Sentence s;
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(Token{"w", "NN", UniversalTag::kNoun, 0});
    return s;
  };
  CHECK(FilterByLength({sentence(11)}, 10).empty());
  CHECK(FilterByLength({sentence(10)}, 10).size() == 1);
  CHECK(FilterByLength({}, 10).empty());
  CHECK_ERROR_KIND(FilterByLength({}, 0), ErrorKind::kInvalidArgument);
}

TEST_CASE("prepare_for_induction measures length after stripping") {
  Sentence s = Tree({{"NOUN", 2}, {"VERB", 0}, {".", 2}});
  CHECK(PrepareForInduction({s}, 2).size() == 1);
  CHECK(PrepareForInduction({s}, 2, true).empty());
  Sentence only_punct = Tree({{".", 0}});
  CHECK(PrepareForInduction({only_punct}, 10).empty());
}

TEST_CASE("validate_tree detects cycles") {
  Sentence s = Tree({{"NOUN", 2}, {"VERB", 1}});
  CHECK_ERROR_KIND(ValidateTree(s), ErrorKind::kInvalidTree);
  CHECK_NOTHROW(ValidateTree(Tree({{"NOUN", 2}, {"VERB", 0}})));
}

TEST_CASE("corpus format names") {
  CHECK(ParseCorpusFormat("conllx") == CorpusFormat::kConllx);
  CHECK(ParseCorpusFormat("wordtag") == CorpusFormat::kWordTag);
  CHECK_ERROR_KIND(ParseCorpusFormat("xml"), ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace unipos
