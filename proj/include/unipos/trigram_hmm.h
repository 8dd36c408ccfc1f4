#ifndef UNIPOS_TRIGRAM_HMM_H_
#define UNIPOS_TRIGRAM_HMM_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"

namespace unipos {

// Tagset-agnostic training/evaluation unit: parallel word and tag columns.
struct TaggedSentence {
  std::vector<std::string> words;
  std::vector<std::string> tags;
};

using TaggedCorpus = std::vector<TaggedSentence>;

enum class TagColumn { kFine, kUniversal };

TaggedCorpus ToTaggedCorpus(const Corpus &corpus, TagColumn column);

inline constexpr int kDefaultMaxSuffixLength = 10;
inline constexpr int kDefaultRareWordThreshold = 10;
inline constexpr double kDefaultBeamFactor = 1000.0;

struct HmmOptions {
  int max_suffix_length = kDefaultMaxSuffixLength;
  // Words seen at most this often feed the suffix model.
  int rare_word_threshold = kDefaultRareWordThreshold;
};

struct Lambdas {
  double unigram = 0.0;
  double bigram = 0.0;
  double trigram = 0.0;

  friend bool operator==(const Lambdas &, const Lambdas &) = default;
};

// Tag n-gram counts over sequences padded as START START t1 .. tn END.
// Tag ids are 0..num_tags-1; start() and end() are the boundary symbols.
// START is never counted as an outcome and END never as a context.
class NgramCounts {
 public:
  explicit NgramCounts(int num_tags = 0);

  void AddSentence(std::span<const int> tags);

  int num_tags() const { return num_tags_; }
  int start() const { return num_tags_; }
  int end() const { return num_tags_ + 1; }
  int num_symbols() const { return num_tags_ + 2; }

  std::int64_t Unigram(int t) const { return unigram_[static_cast<std::size_t>(t)]; }
  std::int64_t Bigram(int a, int b) const;
  std::int64_t Trigram(int a, int b, int c) const;
  // Number of bigrams / trigrams with the given history.
  std::int64_t BigramContext(int a) const { return bigram_context_[static_cast<std::size_t>(a)]; }
  std::int64_t TrigramContext(int a, int b) const;
  // Total outcome count: tokens plus one END per sentence.
  std::int64_t Total() const { return total_; }

  const std::map<std::array<int, 3>, std::int64_t> &trigrams() const { return trigram_; }
  const std::vector<std::int64_t> &unigrams() const { return unigram_; }
  const std::vector<std::int64_t> &bigrams() const { return bigram_; }

  // Adds a raw count; used when loading a serialized model.
  void AddTrigram(int a, int b, int c, std::int64_t count);
  void SetUnigram(int t, std::int64_t count);
  void SetBigram(int a, int b, std::int64_t count);

 private:
  int num_tags_;
  std::vector<std::int64_t> unigram_;
  std::vector<std::int64_t> bigram_;
  std::vector<std::int64_t> bigram_context_;
  std::map<std::array<int, 3>, std::int64_t> trigram_;
  std::map<std::array<int, 2>, std::int64_t> trigram_context_;
  std::int64_t total_ = 0;
};

// Leave-one-out weight estimation: every observed trigram adds its count to
// the order whose discounted relative frequency is largest (0/0 counts as
// 0). Tied maxima share the count equally.
Lambdas DeletedInterpolation(const NgramCounts &counts);

// Suffix statistics for one capitalization class.
struct SuffixModel {
  std::vector<std::int64_t> tag_counts;  // unconditioned, over rare tokens
  std::unordered_map<std::string, std::vector<std::int64_t>> suffix_counts;
  double theta = 0.0;

  bool empty() const;
};

class TrigramHmm {
 public:
  // Throws Error(kEmptyCorpus) for an empty corpus or one without tokens.
  static TrigramHmm Train(const TaggedCorpus &corpus,
                          const HmmOptions &options = {});

  // Inverse of Serialize. Throws Error(kParse) on malformed input.
  static TrigramHmm Deserialize(std::string_view text);

  // Canonical text form; identical models give identical bytes.
  std::string Serialize() const;

  const std::vector<std::string> &tagset() const { return tags_; }
  int num_tags() const { return static_cast<int>(tags_.size()); }
  std::optional<int> TagId(std::string_view tag) const;
  const NgramCounts &counts() const { return counts_; }
  const Lambdas &lambdas() const { return lambdas_; }
  const HmmOptions &options() const { return options_; }
  const SuffixModel &suffix_model(bool capitalized) const {
    return suffix_[capitalized ? 1 : 0];
  }

  bool IsKnown(std::string_view word) const;

  // Smoothed P(t3 | t1, t2). t1, t2 may be counts().start(); t3 may be
  // counts().end(). Histories never seen back off to the next lower order.
  double TransitionProb(int t1, int t2, int t3) const;
  double TransitionLogProb(int t1, int t2, int t3) const;

  // P(word | tag) over the training vocabulary; zero for unseen pairs.
  double EmissionProb(std::string_view word, int tag) const;

  // Per-tag emission scores used in decoding: log P(w|t) for known words,
  // log(P(t|suffix) / P(t)) for unknown ones.
  std::vector<double> EmissionLogScores(std::string_view word) const;

  // P(t | suffix of word) with successive abstraction over suffix lengths.
  std::vector<double> SuffixDistribution(std::string_view word) const;

  // Best tag ids for `words`. With `beam_factor`, states more than
  // log(beam_factor) below the best state of their column are pruned;
  // beam_factor must be at least 1.
  std::vector<int> Decode(std::span<const std::string> words,
                          std::optional<double> beam_factor = std::nullopt) const;

  std::vector<std::string> Tag(std::span<const std::string> words,
                               std::optional<double> beam_factor = std::nullopt) const;

 private:
  TrigramHmm() = default;
  void Finalize();

  HmmOptions options_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> tag_ids_;
  NgramCounts counts_;
  Lambdas lambdas_;
  // word -> (tag id, count), sorted by tag id
  std::unordered_map<std::string, std::vector<std::pair<int, std::int64_t>>> emissions_;
  std::vector<std::int64_t> tag_token_counts_;
  std::array<SuffixModel, 2> suffix_;
  std::vector<double> log_transitions_;  // dense cache, empty when too large
};

// True when the first character is an uppercase letter (ASCII, Latin-1,
// Greek or Cyrillic).
bool IsCapitalized(std::string_view word);

// Splits a UTF-8 string into code-point suffixes of length 1..max_length,
// shortest first.
std::vector<std::string_view> Utf8Suffixes(std::string_view word, int max_length);

// Token accuracy of `predicted` against `gold`. With `mapping`, both sides are
// mapped to universal tags first. Throws Error(kLengthMismatch).
double TokenAccuracy(const std::vector<std::vector<std::string>> &predicted,
                     const TaggedCorpus &gold,
                     const TagMapping *mapping = nullptr);

std::vector<std::vector<std::string>> TagCorpus(
    const TrigramHmm &model, const TaggedCorpus &corpus,
    std::optional<double> beam_factor = std::nullopt);

double Evaluate(const TrigramHmm &model, const TaggedCorpus &gold,
                const TagMapping *eval_mapping = nullptr,
                std::optional<double> beam_factor = std::nullopt);

}  // namespace unipos

#endif  // UNIPOS_TRIGRAM_HMM_H_
