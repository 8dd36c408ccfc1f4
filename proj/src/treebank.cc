#include "unipos/treebank.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "unipos/error.h"

namespace unipos {

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

std::optional<int> ParseInt(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Checks the head column of a freshly read sentence; `first_line` is the line
// number of its first token.
void CheckHeads(const Sentence &sentence, int first_line) {
  if (sentence.empty()) return;
  bool any = false;
  bool all = true;
  for (const Token &token : sentence.tokens) {
    any = any || token.head.has_value();
    all = all && token.head.has_value();
  }
  if (any && !all) {
    throw Error(ErrorKind::kParse,
                "sentence mixes tokens with and without heads", first_line);
  }
  if (!any) return;
  const int n = static_cast<int>(sentence.size());
  for (int i = 0; i < n; ++i) {
    int head = *sentence.tokens[static_cast<std::size_t>(i)].head;
    if (head < 0 || head > n || head == i + 1) {
      throw Error(ErrorKind::kParse,
                  "head " + std::to_string(head) + " of token " +
                      std::to_string(i + 1) + " is out of range",
                  first_line + i);
    }
  }
}

}  // namespace

bool Sentence::has_heads() const {
  return !tokens.empty() && tokens.front().head.has_value();
}

CorpusFormat ParseCorpusFormat(const std::string &name) {
  if (name == "conllx") return CorpusFormat::kConllx;
  if (name == "wordtag") return CorpusFormat::kWordTag;
  throw Error(ErrorKind::kInvalidArgument, "unknown corpus format '" + name + "'");
}

Corpus ReadConllx(std::istream &in, const ConllxReadOptions &options) {
  Corpus corpus;
  Sentence current;
  int line_no = 0;
  int first_line = 0;
  std::string line;
  auto flush = [&]() {
    if (current.empty()) return;
    CheckHeads(current, first_line);
    corpus.push_back(std::move(current));
    current = Sentence{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (IsBlank(view)) {
      flush();
      continue;
    }
    if (view.front() == '#') continue;
    std::vector<std::string_view> fields = SplitTabs(view);
    if (fields.size() != 10) {
      throw Error(ErrorKind::kParse,
                  "expected 10 columns, found " + std::to_string(fields.size()),
                  line_no);
    }
    auto id = ParseInt(fields[0]);
    if (!id || *id != static_cast<int>(current.size()) + 1) {
      throw Error(ErrorKind::kParse,
                  "token id '" + std::string(fields[0]) + "' is out of sequence",
                  line_no);
    }
    if (current.empty()) first_line = line_no;
    Token token;
    token.form = std::string(fields[1]);
    if (fields[4] != "_") token.fine_tag = std::string(fields[4]);
    if (options.universal_from_cpostag && fields[3] != "_") {
      token.universal_tag = ParseUniversalTagOrThrow(fields[3], line_no);
    }
    if (fields[6] != "_") {
      auto head = ParseInt(fields[6]);
      if (!head) {
        throw Error(ErrorKind::kParse,
                    "head '" + std::string(fields[6]) + "' is not an integer",
                    line_no);
      }
      token.head = *head;
    }
    current.tokens.push_back(std::move(token));
  }
  flush();
  return corpus;
}

void WriteConllx(std::ostream &out, const Corpus &corpus) {
  for (const Sentence &sentence : corpus) {
    int id = 0;
    for (const Token &token : sentence.tokens) {
      out << ++id << '\t' << token.form << "\t_\t";
      if (token.universal_tag) {
        out << ToString(*token.universal_tag);
      } else {
        out << '_';
      }
      out << '\t' << (token.fine_tag.empty() ? "_" : token.fine_tag) << "\t_\t";
      if (token.head) {
        out << *token.head;
      } else {
        out << '_';
      }
      out << "\t_\t_\t_\n";
    }
    out << '\n';
  }
}

Corpus ReadWordTag(std::istream &in) {
  Corpus corpus;
  Sentence current;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (IsBlank(view)) {
      if (!current.empty()) corpus.push_back(std::move(current));
      current = Sentence{};
      continue;
    }
    std::vector<std::string_view> fields = SplitTabs(view);
    if (fields.size() > 2 || fields[0].empty()) {
      throw Error(ErrorKind::kParse, "expected 'form<TAB>tag'", line_no);
    }
    Token token;
    token.form = std::string(fields[0]);
    if (fields.size() == 2) token.fine_tag = std::string(fields[1]);
    current.tokens.push_back(std::move(token));
  }
  if (!current.empty()) corpus.push_back(std::move(current));
  return corpus;
}

void WriteWordTag(std::ostream &out, const Corpus &corpus, bool universal) {
  for (const Sentence &sentence : corpus) {
    for (const Token &token : sentence.tokens) {
      out << token.form << '\t';
      if (universal) {
        if (!token.universal_tag) {
          throw Error(ErrorKind::kInvalidArgument,
                      "token '" + token.form + "' has no universal tag");
        }
        out << ToString(*token.universal_tag);
      } else {
        out << token.fine_tag;
      }
      out << '\n';
    }
    out << '\n';
  }
}

Corpus ReadCorpusFile(const std::filesystem::path &path, CorpusFormat format,
                      const ConllxReadOptions &options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return format == CorpusFormat::kConllx ? ReadConllx(in, options)
                                         : ReadWordTag(in);
}

Sentence ApplyMapping(const Sentence &sentence, const TagMapping &mapping,
                      bool fallback_x) {
  Sentence out = sentence;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    Token &token = out.tokens[i];
    try {
      token.universal_tag = mapping.Map(token.fine_tag, fallback_x);
    } catch (const Error &e) {
      throw Error(e.kind(), e.message() + " (token " + std::to_string(i + 1) +
                                " '" + token.form + "')");
    }
  }
  return out;
}

Corpus ApplyMapping(const Corpus &corpus, const TagMapping &mapping,
                    bool fallback_x) {
  Corpus out;
  out.reserve(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    try {
      out.push_back(ApplyMapping(corpus[s], mapping, fallback_x));
    } catch (const Error &e) {
      throw Error(e.kind(),
                  "sentence " + std::to_string(s + 1) + ": " + e.message());
    }
  }
  return out;
}

void ValidateTree(const Sentence &sentence) {
  const int n = static_cast<int>(sentence.size());
  for (int i = 0; i < n; ++i) {
    const auto &head = sentence.tokens[static_cast<std::size_t>(i)].head;
    if (!head || *head < 0 || *head > n || *head == i + 1) {
      throw Error(ErrorKind::kInvalidTree,
                  "token " + std::to_string(i + 1) + " has an invalid head");
    }
  }
  // Every chain must reach the root within n steps.
  for (int i = 1; i <= n; ++i) {
    int node = i;
    int steps = 0;
    while (node != 0) {
      node = *sentence.tokens[static_cast<std::size_t>(node - 1)].head;
      if (++steps > n) {
        throw Error(ErrorKind::kInvalidTree,
                    "cycle through token " + std::to_string(i));
      }
    }
  }
}

Sentence StripPunctuation(const Sentence &sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (!sentence.tokens[i].universal_tag) {
      throw Error(ErrorKind::kInvalidArgument,
                  "token " + std::to_string(i + 1) + " has no universal tag");
    }
  }
  const bool with_heads = sentence.has_heads();
  if (with_heads) ValidateTree(sentence);

  const std::size_t n = sentence.size();
  std::vector<int> new_index(n + 1, 0);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sentence.tokens[i].is_punct()) new_index[i + 1] = ++next;
  }

  Sentence out;
  out.tokens.reserve(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < n; ++i) {
    const Token &token = sentence.tokens[i];
    if (token.is_punct()) continue;
    Token kept = token;
    if (with_heads) {
      int head = *token.head;
      while (head != 0 && sentence.tokens[static_cast<std::size_t>(head - 1)].is_punct()) {
        head = *sentence.tokens[static_cast<std::size_t>(head - 1)].head;
      }
      kept.head = new_index[static_cast<std::size_t>(head)];
    }
    out.tokens.push_back(std::move(kept));
  }
  return out;
}

Corpus FilterByLength(const Corpus &corpus, std::size_t max_len) {
  if (max_len < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_len must be at least 1");
  }
  Corpus out;
  for (const Sentence &sentence : corpus) {
    if (sentence.size() <= max_len) out.push_back(sentence);
  }
  return out;
}

Corpus PrepareForInduction(const Corpus &corpus, std::size_t max_len,
                           bool filter_before_strip) {
  Corpus filtered = filter_before_strip ? FilterByLength(corpus, max_len) : corpus;
  Corpus stripped;
  stripped.reserve(filtered.size());
  for (const Sentence &sentence : filtered) {
    Sentence s = StripPunctuation(sentence);
    if (!s.empty()) stripped.push_back(std::move(s));
  }
  return filter_before_strip ? stripped : FilterByLength(stripped, max_len);
}

std::vector<UniversalTag> UniversalTags(const Sentence &sentence) {
  std::vector<UniversalTag> tags;
  tags.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto &tag = sentence.tokens[i].universal_tag;
    if (!tag) {
      throw Error(ErrorKind::kInvalidArgument,
                  "token " + std::to_string(i + 1) + " has no universal tag");
    }
    tags.push_back(*tag);
  }
  return tags;
}

std::vector<int> Heads(const Sentence &sentence) {
  std::vector<int> heads;
  heads.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto &head = sentence.tokens[i].head;
    if (!head) {
      throw Error(ErrorKind::kInvalidArgument,
                  "token " + std::to_string(i + 1) + " has no head");
    }
    heads.push_back(*head);
  }
  return heads;
}

}  // namespace unipos
