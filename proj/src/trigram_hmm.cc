#include "unipos/trigram_hmm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "unipos/error.h"

namespace unipos {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDenseTransitions = std::size_t{1} << 23;
constexpr int kSerializationVersion = 1;

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

std::vector<double> Normalize(const std::vector<std::int64_t> &counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return out;
}

// Sample variance of a probability vector, the smoothing weight between
// successive suffix lengths.
double SuffixTheta(const std::vector<std::int64_t> &tag_counts) {
  std::vector<double> p = Normalize(tag_counts);
  if (p.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : p) mean += v;
  mean /= static_cast<double>(p.size());
  double sum = 0.0;
  for (double v : p) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(p.size() - 1);
}

char32_t FirstCodePoint(std::string_view s) {
  if (s.empty()) return 0;
  auto b0 = static_cast<unsigned char>(s[0]);
  if (b0 < 0x80) return b0;
  auto cont = [&](std::size_t i) -> char32_t {
    return i < s.size() ? static_cast<unsigned char>(s[i]) & 0x3Fu : 0u;
  };
  if ((b0 & 0xE0) == 0xC0) return ((b0 & 0x1Fu) << 6) | cont(1);
  if ((b0 & 0xF0) == 0xE0) return ((b0 & 0x0Fu) << 12) | (cont(1) << 6) | cont(2);
  return ((b0 & 0x07u) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
}

void CheckField(const std::string &value, const char *what) {
  if (value.empty() || value.find_first_of("\t\n\r") != std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " '" + value +
                    "' is empty or contains a tab or newline");
  }
}

std::string FormatDouble(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

TaggedCorpus ToTaggedCorpus(const Corpus &corpus, TagColumn column) {
  TaggedCorpus out;
  out.reserve(corpus.size());
  for (const Sentence &sentence : corpus) {
    TaggedSentence tagged;
    for (const Token &token : sentence.tokens) {
      tagged.words.push_back(token.form);
      if (column == TagColumn::kFine) {
        tagged.tags.push_back(token.fine_tag);
      } else {
        if (!token.universal_tag) {
          throw Error(ErrorKind::kInvalidArgument,
                      "token '" + token.form + "' has no universal tag");
        }
        tagged.tags.emplace_back(ToString(*token.universal_tag));
      }
    }
    out.push_back(std::move(tagged));
  }
  return out;
}

// --- NgramCounts -----------------------------------------------------------

NgramCounts::NgramCounts(int num_tags)
    : num_tags_(num_tags),
      unigram_(static_cast<std::size_t>(num_tags + 2), 0),
      bigram_(static_cast<std::size_t>((num_tags + 2) * (num_tags + 2)), 0),
      bigram_context_(static_cast<std::size_t>(num_tags + 2), 0) {}

void NgramCounts::AddSentence(std::span<const int> tags) {
  int a = start();
  int b = start();
  auto add = [&](int c) {
    AddTrigram(a, b, c, 1);
    SetBigram(b, c, Bigram(b, c) + 1);
    SetUnigram(c, Unigram(c) + 1);
    a = b;
    b = c;
  };
  for (int t : tags) add(t);
  add(end());
}

std::int64_t NgramCounts::Bigram(int a, int b) const {
  return bigram_[static_cast<std::size_t>(a * num_symbols() + b)];
}

std::int64_t NgramCounts::Trigram(int a, int b, int c) const {
  auto it = trigram_.find({a, b, c});
  return it == trigram_.end() ? 0 : it->second;
}

std::int64_t NgramCounts::TrigramContext(int a, int b) const {
  auto it = trigram_context_.find({a, b});
  return it == trigram_context_.end() ? 0 : it->second;
}

void NgramCounts::AddTrigram(int a, int b, int c, std::int64_t count) {
  trigram_[{a, b, c}] += count;
  trigram_context_[{a, b}] += count;
}

void NgramCounts::SetUnigram(int t, std::int64_t count) {
  auto &slot = unigram_[static_cast<std::size_t>(t)];
  total_ += count - slot;
  slot = count;
}

void NgramCounts::SetBigram(int a, int b, std::int64_t count) {
  auto &slot = bigram_[static_cast<std::size_t>(a * num_symbols() + b)];
  bigram_context_[static_cast<std::size_t>(a)] += count - slot;
  slot = count;
}

Lambdas DeletedInterpolation(const NgramCounts &counts) {
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den > 1 ? static_cast<double>(num - 1) / static_cast<double>(den - 1)
                   : 0.0;
  };
  std::array<double, 3> weight{};  // unigram, bigram, trigram
  for (const auto &[key, count] : counts.trigrams()) {
    const auto [a, b, c] = key;
    std::array<double, 3> r = {
        ratio(counts.Unigram(c), counts.Total()),
        ratio(counts.Bigram(b, c), counts.BigramContext(b)),
        ratio(count, counts.TrigramContext(a, b)),
    };
    double best = std::max({r[0], r[1], r[2]});
    int ties = static_cast<int>(std::count(r.begin(), r.end(), best));
    for (std::size_t k = 0; k < 3; ++k) {
      if (r[k] == best) weight[k] += static_cast<double>(count) / ties;
    }
  }
  double sum = weight[0] + weight[1] + weight[2];
  if (sum <= 0.0) return Lambdas{1.0, 0.0, 0.0};
  return Lambdas{weight[0] / sum, weight[1] / sum, weight[2] / sum};
}

// --- utilities -------------------------------------------------------------

bool IsCapitalized(std::string_view word) {
  char32_t cp = FirstCodePoint(word);
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;      // Latin-1
  if (cp >= 0x391 && cp <= 0x3A9) return true;                   // Greek
  if (cp >= 0x400 && cp <= 0x42F) return true;                   // Cyrillic
  return false;
}

std::vector<std::string_view> Utf8Suffixes(std::string_view word, int max_length) {
  std::vector<std::string_view> out;
  std::size_t pos = word.size();
  while (pos > 0 && static_cast<int>(out.size()) < max_length) {
    --pos;
    while (pos > 0 && (static_cast<unsigned char>(word[pos]) & 0xC0) == 0x80) --pos;
    out.push_back(word.substr(pos));
  }
  return out;
}

bool SuffixModel::empty() const {
  return std::all_of(tag_counts.begin(), tag_counts.end(),
                     [](std::int64_t c) { return c == 0; });
}

// --- TrigramHmm ------------------------------------------------------------

TrigramHmm TrigramHmm::Train(const TaggedCorpus &corpus, const HmmOptions &options) {
  if (options.max_suffix_length < 0 || options.rare_word_threshold < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative tagger option");
  }
  std::set<std::string> tagset;
  std::size_t tokens = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const TaggedSentence &sentence = corpus[s];
    if (sentence.words.size() != sentence.tags.size()) {
      throw Error(ErrorKind::kLengthMismatch,
                  "sentence " + std::to_string(s + 1) +
                      " has different word and tag counts");
    }
    for (std::size_t i = 0; i < sentence.words.size(); ++i) {
      CheckField(sentence.words[i], "word");
      CheckField(sentence.tags[i], "tag");
      tagset.insert(sentence.tags[i]);
    }
    tokens += sentence.words.size();
  }
  if (tokens == 0) throw Error(ErrorKind::kEmptyCorpus, "no tagged tokens to train on");

  TrigramHmm model;
  model.options_ = options;
  model.tags_.assign(tagset.begin(), tagset.end());
  for (int t = 0; t < model.num_tags(); ++t) {
    model.tag_ids_.emplace(model.tags_[static_cast<std::size_t>(t)], t);
  }
  model.counts_ = NgramCounts(model.num_tags());

  std::map<std::string, std::map<int, std::int64_t>> emissions;
  std::vector<int> ids;
  for (const TaggedSentence &sentence : corpus) {
    if (sentence.words.empty()) continue;
    ids.clear();
    for (std::size_t i = 0; i < sentence.words.size(); ++i) {
      int id = model.tag_ids_.at(sentence.tags[i]);
      ids.push_back(id);
      ++emissions[sentence.words[i]][id];
    }
    model.counts_.AddSentence(ids);
  }
  model.lambdas_ = DeletedInterpolation(model.counts_);

  for (auto &sm : model.suffix_) {
    sm.tag_counts.assign(static_cast<std::size_t>(model.num_tags()), 0);
  }
  for (const auto &[word, per_tag] : emissions) {
    auto &entry = model.emissions_[word];
    std::int64_t freq = 0;
    for (const auto &[tag, count] : per_tag) {
      entry.emplace_back(tag, count);
      freq += count;
    }
    if (freq > options.rare_word_threshold) continue;
    SuffixModel &sm = model.suffix_[IsCapitalized(word) ? 1 : 0];
    for (std::string_view suffix : Utf8Suffixes(word, options.max_suffix_length)) {
      auto &dist = sm.suffix_counts[std::string(suffix)];
      if (dist.empty()) dist.assign(static_cast<std::size_t>(model.num_tags()), 0);
      for (const auto &[tag, count] : per_tag) dist[static_cast<std::size_t>(tag)] += count;
    }
    for (const auto &[tag, count] : per_tag) sm.tag_counts[static_cast<std::size_t>(tag)] += count;
  }
  for (auto &sm : model.suffix_) sm.theta = SuffixTheta(sm.tag_counts);
  model.Finalize();
  return model;
}

void TrigramHmm::Finalize() {
  tag_token_counts_.assign(static_cast<std::size_t>(num_tags()), 0);
  for (const auto &[word, per_tag] : emissions_) {
    for (const auto &[tag, count] : per_tag) {
      tag_token_counts_[static_cast<std::size_t>(tag)] += count;
    }
  }
  log_transitions_.clear();
  const auto k = static_cast<std::size_t>(counts_.num_symbols());
  if (k * k * k <= kMaxDenseTransitions) {
    std::vector<double> cache(k * k * k, kNegInf);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        for (std::size_t c = 0; c < k; ++c) {
          cache[(a * k + b) * k + c] = SafeLog(TransitionProb(
              static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)));
        }
      }
    }
    log_transitions_ = std::move(cache);
  }
}

std::optional<int> TrigramHmm::TagId(std::string_view tag) const {
  auto it = tag_ids_.find(std::string(tag));
  if (it == tag_ids_.end()) return std::nullopt;
  return it->second;
}

bool TrigramHmm::IsKnown(std::string_view word) const {
  return emissions_.find(std::string(word)) != emissions_.end();
}

double TrigramHmm::TransitionProb(int t1, int t2, int t3) const {
  if (t3 == counts_.start()) return 0.0;
  const std::int64_t total = counts_.Total();
  double p1 = total > 0 ? static_cast<double>(counts_.Unigram(t3)) / static_cast<double>(total)
                        : 0.0;
  const std::int64_t ctx2 = counts_.BigramContext(t2);
  double p2 = ctx2 > 0 ? static_cast<double>(counts_.Bigram(t2, t3)) / static_cast<double>(ctx2)
                       : p1;
  const std::int64_t ctx3 = counts_.TrigramContext(t1, t2);
  double p3 = ctx3 > 0
                  ? static_cast<double>(counts_.Trigram(t1, t2, t3)) / static_cast<double>(ctx3)
                  : p2;
  return lambdas_.unigram * p1 + lambdas_.bigram * p2 + lambdas_.trigram * p3;
}

double TrigramHmm::TransitionLogProb(int t1, int t2, int t3) const {
  if (!log_transitions_.empty()) {
    const auto k = static_cast<std::size_t>(counts_.num_symbols());
    return log_transitions_[(static_cast<std::size_t>(t1) * k + static_cast<std::size_t>(t2)) * k +
                            static_cast<std::size_t>(t3)];
  }
  return SafeLog(TransitionProb(t1, t2, t3));
}

double TrigramHmm::EmissionProb(std::string_view word, int tag) const {
  auto it = emissions_.find(std::string(word));
  if (it == emissions_.end()) return 0.0;
  for (const auto &[t, count] : it->second) {
    if (t == tag) {
      return static_cast<double>(count) /
             static_cast<double>(tag_token_counts_[static_cast<std::size_t>(tag)]);
    }
  }
  return 0.0;
}

std::vector<double> TrigramHmm::SuffixDistribution(std::string_view word) const {
  const SuffixModel &sm = suffix_[IsCapitalized(word) ? 1 : 0];
  if (sm.empty()) return Normalize(tag_token_counts_);
  std::vector<double> p = Normalize(sm.tag_counts);
  for (std::string_view suffix : Utf8Suffixes(word, options_.max_suffix_length)) {
    auto it = sm.suffix_counts.find(std::string(suffix));
    if (it == sm.suffix_counts.end()) break;
    std::vector<double> local = Normalize(it->second);
    for (std::size_t t = 0; t < p.size(); ++t) {
      p[t] = (local[t] + sm.theta * p[t]) / (1.0 + sm.theta);
    }
  }
  return p;
}

std::vector<double> TrigramHmm::EmissionLogScores(std::string_view word) const {
  std::vector<double> scores(static_cast<std::size_t>(num_tags()), kNegInf);
  auto it = emissions_.find(std::string(word));
  if (it != emissions_.end()) {
    for (const auto &[tag, count] : it->second) {
      scores[static_cast<std::size_t>(tag)] =
          std::log(static_cast<double>(count) /
                   static_cast<double>(tag_token_counts_[static_cast<std::size_t>(tag)]));
    }
    return scores;
  }
  const SuffixModel &sm = suffix_[IsCapitalized(word) ? 1 : 0];
  std::vector<double> prior = Normalize(sm.empty() ? tag_token_counts_ : sm.tag_counts);
  std::vector<double> posterior = SuffixDistribution(word);
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (prior[t] > 0.0 && posterior[t] > 0.0) scores[t] = std::log(posterior[t] / prior[t]);
  }
  return scores;
}

std::vector<int> TrigramHmm::Decode(std::span<const std::string> words,
                                    std::optional<double> beam_factor) const {
  if (beam_factor && !(*beam_factor >= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "beam factor must be at least 1");
  }
  const std::size_t n = words.size();
  if (n == 0) return {};
  const int tags = num_tags();
  const int start = counts_.start();
  const auto width = static_cast<std::size_t>(tags);
  const std::size_t states = static_cast<std::size_t>(tags + 1) * width;  // (prev, cur)
  auto at = [width](int prev, int cur) {
    return static_cast<std::size_t>(prev) * width + static_cast<std::size_t>(cur);
  };
  const double margin = beam_factor ? std::log(*beam_factor)
                                    : std::numeric_limits<double>::infinity();

  std::vector<double> delta(states, kNegInf);
  std::vector<double> next(states, kNegInf);
  std::vector<int> backptr(n * states, 0);

  auto prune = [&](std::vector<double> &column) {
    double best = *std::max_element(column.begin(), column.end());
    if (best == kNegInf) return;
    for (double &v : column) {
      if (v < best - margin) v = kNegInf;
    }
  };

  std::vector<double> emit = EmissionLogScores(words[0]);
  for (int b = 0; b < tags; ++b) {
    delta[at(start, b)] = 0.0 + (TransitionLogProb(start, start, b) + emit[static_cast<std::size_t>(b)]);
  }
  prune(delta);

  for (std::size_t i = 1; i < n; ++i) {
    emit = EmissionLogScores(words[i]);
    std::fill(next.begin(), next.end(), kNegInf);
    int *bp = &backptr[i * states];
    for (int a = 0; a < tags; ++a) {
      for (int b = 0; b < tags; ++b) {
        const double e = emit[static_cast<std::size_t>(b)];
        if (e == kNegInf) continue;
        double best = kNegInf;
        int best_c = 0;
        for (int c = 0; c <= tags; ++c) {
          const double prev = delta[at(c, a)];
          if (prev == kNegInf) continue;
          const double score = prev + (TransitionLogProb(c, a, b) + e);
          if (score > best) {
            best = score;
            best_c = c;
          }
        }
        next[at(a, b)] = best;
        bp[at(a, b)] = best_c;
      }
    }
    std::swap(delta, next);
    prune(delta);
  }

  double best = kNegInf;
  int best_a = n == 1 ? start : 0;
  int best_b = 0;
  for (int a = 0; a <= tags; ++a) {
    for (int b = 0; b < tags; ++b) {
      const double prev = delta[at(a, b)];
      if (prev == kNegInf) continue;
      const double score = prev + TransitionLogProb(a, b, counts_.end());
      if (score > best) {
        best = score;
        best_a = a;
        best_b = b;
      }
    }
  }

  std::vector<int> out(n, 0);
  out[n - 1] = best_b;
  if (n >= 2) out[n - 2] = best_a;
  for (std::size_t i = n - 1; i >= 2; --i) {
    out[i - 2] = backptr[i * states + at(out[i - 1], out[i])];
  }
  return out;
}

std::vector<std::string> TrigramHmm::Tag(std::span<const std::string> words,
                                         std::optional<double> beam_factor) const {
  std::vector<std::string> out;
  for (int id : Decode(words, beam_factor)) out.push_back(tags_[static_cast<std::size_t>(id)]);
  return out;
}

// --- serialization ---------------------------------------------------------

std::string TrigramHmm::Serialize() const {
  std::string out;
  auto line = [&out](std::initializer_list<std::string> fields) {
    bool first = true;
    for (const std::string &f : fields) {
      if (!first) out += '\t';
      out += f;
      first = false;
    }
    out += '\n';
  };
  using std::to_string;
  line({"unipos-hmm", to_string(kSerializationVersion)});
  line({"option", "max_suffix_length", to_string(options_.max_suffix_length)});
  line({"option", "rare_word_threshold", to_string(options_.rare_word_threshold)});
  for (const std::string &tag : tags_) line({"tag", tag});
  line({"lambdas", FormatDouble(lambdas_.unigram), FormatDouble(lambdas_.bigram),
        FormatDouble(lambdas_.trigram)});
  for (int t = 0; t < counts_.num_symbols(); ++t) {
    if (counts_.Unigram(t) != 0) line({"unigram", to_string(t), to_string(counts_.Unigram(t))});
  }
  for (int a = 0; a < counts_.num_symbols(); ++a) {
    for (int b = 0; b < counts_.num_symbols(); ++b) {
      if (counts_.Bigram(a, b) != 0) {
        line({"bigram", to_string(a), to_string(b), to_string(counts_.Bigram(a, b))});
      }
    }
  }
  for (const auto &[key, count] : counts_.trigrams()) {
    line({"trigram", to_string(key[0]), to_string(key[1]), to_string(key[2]), to_string(count)});
  }
  std::vector<const std::string *> words;
  for (const auto &entry : emissions_) words.push_back(&entry.first);
  std::sort(words.begin(), words.end(),
            [](const std::string *x, const std::string *y) { return *x < *y; });
  for (const std::string *word : words) {
    for (const auto &[tag, count] : emissions_.at(*word)) {
      line({"emission", *word, to_string(tag), to_string(count)});
    }
  }
  for (int cap = 0; cap < 2; ++cap) {
    const SuffixModel &sm = suffix_[static_cast<std::size_t>(cap)];
    line({"theta", to_string(cap), FormatDouble(sm.theta)});
    for (std::size_t t = 0; t < sm.tag_counts.size(); ++t) {
      if (sm.tag_counts[t] != 0) {
        line({"suffix_tag", to_string(cap), to_string(t), to_string(sm.tag_counts[t])});
      }
    }
    std::vector<const std::string *> suffixes;
    for (const auto &entry : sm.suffix_counts) suffixes.push_back(&entry.first);
    std::sort(suffixes.begin(), suffixes.end(),
              [](const std::string *x, const std::string *y) { return *x < *y; });
    for (const std::string *suffix : suffixes) {
      const auto &dist = sm.suffix_counts.at(*suffix);
      for (std::size_t t = 0; t < dist.size(); ++t) {
        if (dist[t] != 0) {
          line({"suffix", to_string(cap), *suffix, to_string(t), to_string(dist[t])});
        }
      }
    }
  }
  line({"end"});
  return out;
}

TrigramHmm TrigramHmm::Deserialize(std::string_view text) {
  TrigramHmm model;
  int line_no = 0;
  bool saw_header = false;
  bool saw_end = false;
  bool counts_ready = false;
  std::size_t pos = 0;

  auto fail = [&line_no](const std::string &what) -> Error {
    return Error(ErrorKind::kParse, "model: " + what, line_no);
  };
  auto to_int = [&](std::string_view s) -> std::int64_t {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("bad integer '" + std::string(s) + "'");
    return v;
  };
  auto to_double = [&](std::string_view s) -> double {
    std::string copy(s);
    char *endp = nullptr;
    double v = std::strtod(copy.c_str(), &endp);
    if (copy.empty() || *endp != '\0') throw fail("bad number '" + copy + "'");
    return v;
  };
  auto ensure_counts = [&]() {
    if (!counts_ready) {
      if (model.tags_.empty()) throw fail("counts before tag list");
      model.counts_ = NgramCounts(model.num_tags());
      for (auto &sm : model.suffix_) sm.tag_counts.assign(model.tags_.size(), 0);
      counts_ready = true;
    }
  };
  auto tag_index = [&](std::string_view s, int limit) {
    std::int64_t v = to_int(s);
    if (v < 0 || v >= limit) throw fail("tag index out of range");
    return static_cast<int>(v);
  };

  while (pos < text.size() && !saw_end) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::vector<std::string_view> f;
    for (std::size_t p = 0;;) {
      std::size_t tab = line.find('\t', p);
      f.push_back(line.substr(p, tab == std::string_view::npos ? std::string_view::npos : tab - p));
      if (tab == std::string_view::npos) break;
      p = tab + 1;
    }
    const std::string_view kind = f[0];
    auto expect = [&](std::size_t n) {
      if (f.size() != n) throw fail("malformed '" + std::string(kind) + "' record");
    };
    if (!saw_header) {
      if (kind != "unipos-hmm" || f.size() != 2) throw fail("missing header");
      if (to_int(f[1]) != kSerializationVersion) throw fail("unsupported version");
      saw_header = true;
    } else if (kind == "option") {
      expect(3);
      if (f[1] == "max_suffix_length") {
        model.options_.max_suffix_length = static_cast<int>(to_int(f[2]));
      } else if (f[1] == "rare_word_threshold") {
        model.options_.rare_word_threshold = static_cast<int>(to_int(f[2]));
      } else {
        throw fail("unknown option");
      }
    } else if (kind == "tag") {
      expect(2);
      if (counts_ready) throw fail("tag after counts");
      std::string tag(f[1]);
      if (!model.tag_ids_.emplace(tag, model.num_tags()).second) throw fail("duplicate tag");
      model.tags_.push_back(std::move(tag));
    } else if (kind == "lambdas") {
      expect(4);
      model.lambdas_ = Lambdas{to_double(f[1]), to_double(f[2]), to_double(f[3])};
    } else if (kind == "unigram") {
      expect(3);
      ensure_counts();
      const int k = model.counts_.num_symbols();
      model.counts_.SetUnigram(tag_index(f[1], k), to_int(f[2]));
    } else if (kind == "bigram") {
      expect(4);
      ensure_counts();
      const int k = model.counts_.num_symbols();
      model.counts_.SetBigram(tag_index(f[1], k), tag_index(f[2], k), to_int(f[3]));
    } else if (kind == "trigram") {
      expect(5);
      ensure_counts();
      const int k = model.counts_.num_symbols();
      model.counts_.AddTrigram(tag_index(f[1], k), tag_index(f[2], k), tag_index(f[3], k),
                               to_int(f[4]));
    } else if (kind == "emission") {
      expect(4);
      ensure_counts();
      model.emissions_[std::string(f[1])].emplace_back(tag_index(f[2], model.num_tags()),
                                                       to_int(f[3]));
    } else if (kind == "theta") {
      expect(3);
      ensure_counts();
      model.suffix_[static_cast<std::size_t>(tag_index(f[1], 2))].theta = to_double(f[2]);
    } else if (kind == "suffix_tag") {
      expect(4);
      ensure_counts();
      model.suffix_[static_cast<std::size_t>(tag_index(f[1], 2))]
          .tag_counts[static_cast<std::size_t>(tag_index(f[2], model.num_tags()))] = to_int(f[3]);
    } else if (kind == "suffix") {
      expect(5);
      ensure_counts();
      auto &dist = model.suffix_[static_cast<std::size_t>(tag_index(f[1], 2))]
                       .suffix_counts[std::string(f[2])];
      if (dist.empty()) dist.assign(model.tags_.size(), 0);
      dist[static_cast<std::size_t>(tag_index(f[3], model.num_tags()))] = to_int(f[4]);
    } else if (kind == "end") {
      saw_end = true;
    } else {
      throw fail("unknown record '" + std::string(kind) + "'");
    }
  }
  if (!saw_end) throw fail("truncated model");
  ensure_counts();
  model.Finalize();
  return model;
}

// --- evaluation ------------------------------------------------------------

std::vector<std::vector<std::string>> TagCorpus(const TrigramHmm &model,
                                                const TaggedCorpus &corpus,
                                                std::optional<double> beam_factor) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const TaggedSentence &sentence : corpus) {
    out.push_back(model.Tag(sentence.words, beam_factor));
  }
  return out;
}

double TokenAccuracy(const std::vector<std::vector<std::string>> &predicted,
                     const TaggedCorpus &gold, const TagMapping *mapping) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorKind::kLengthMismatch, "predicted and gold corpora differ in size");
  }
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto &pred = predicted[s];
    const auto &ref = gold[s].tags;
    if (pred.size() != ref.size()) {
      throw Error(ErrorKind::kLengthMismatch,
                  "sentence " + std::to_string(s + 1) + " differs in length");
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      bool match = mapping ? mapping->Map(pred[i]) == mapping->Map(ref[i]) : pred[i] == ref[i];
      correct += match ? 1 : 0;
    }
    total += ref.size();
  }
  if (total == 0) throw Error(ErrorKind::kEmptyCorpus, "no tokens to evaluate");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double Evaluate(const TrigramHmm &model, const TaggedCorpus &gold,
                const TagMapping *eval_mapping, std::optional<double> beam_factor) {
  return TokenAccuracy(TagCorpus(model, gold, beam_factor), gold, eval_mapping);
}

}  // namespace unipos
