#ifndef UNIPOS_TREEBANK_H_
#define UNIPOS_TREEBANK_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unipos/tag_mapping.h"
#include "unipos/universal_tag.h"

namespace unipos {

struct Token {
  std::string form;
  std::string fine_tag;  // empty for raw text
  std::optional<UniversalTag> universal_tag;
  std::optional<int> head;  // 0 = artificial root, 1-based otherwise

  bool is_punct() const { return universal_tag == UniversalTag::kPunct; }

  friend bool operator==(const Token &, const Token &) = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool has_heads() const;

  friend bool operator==(const Sentence &, const Sentence &) = default;
};

using Corpus = std::vector<Sentence>;

enum class CorpusFormat { kConllx, kWordTag };

// Parses "conllx" or "wordtag"; throws Error(kInvalidArgument).
CorpusFormat ParseCorpusFormat(const std::string &name);

struct ConllxReadOptions {
  // Also parse CPOSTAG (column 4) into universal_tag. "_" leaves it unset.
  bool universal_from_cpostag = false;
};

// CoNLL-X: 10 TAB-separated columns per token, blank line between
// sentences. FORM, POSTAG and HEAD are kept; "_" in HEAD means no head.
Corpus ReadConllx(std::istream &in, const ConllxReadOptions &options = {});

// Unmodeled columns are written as "_"; CPOSTAG carries the universal tag.
void WriteConllx(std::ostream &out, const Corpus &corpus);

// Vertical `form\ttag` lines; a line with only a form has an empty tag.
Corpus ReadWordTag(std::istream &in);

// Writes the fine tag, or the universal rendering when `universal` is set.
void WriteWordTag(std::ostream &out, const Corpus &corpus,
                  bool universal = false);

Corpus ReadCorpusFile(const std::filesystem::path &path, CorpusFormat format,
                      const ConllxReadOptions &options = {});

// Sets universal_tag on every token. Unknown tags raise
// Error(kUnknownFineTag) naming the 1-based token index.
Sentence ApplyMapping(const Sentence &sentence, const TagMapping &mapping,
                      bool fallback_x = false);
Corpus ApplyMapping(const Corpus &corpus, const TagMapping &mapping,
                    bool fallback_x = false);

// Throws Error(kInvalidTree) on out-of-range heads or cycles.
void ValidateTree(const Sentence &sentence);

// Drops PUNCT tokens and re-indexes heads. A surviving token whose head was
// removed is attached to its nearest non-punctuation ancestor, or to the
// root when there is none.
Sentence StripPunctuation(const Sentence &sentence);

// Keeps sentences with at most `max_len` tokens.
Corpus FilterByLength(const Corpus &corpus, std::size_t max_len);

// Strip punctuation and apply the length filter. With `filter_before_strip`
// the length is measured on the unstripped sentence.
Corpus PrepareForInduction(const Corpus &corpus, std::size_t max_len,
                           bool filter_before_strip = false);

// Universal tags of a fully mapped sentence.
std::vector<UniversalTag> UniversalTags(const Sentence &sentence);

// Heads of a sentence with a complete head column.
std::vector<int> Heads(const Sentence &sentence);

}  // namespace unipos

#endif  // UNIPOS_TREEBANK_H_
