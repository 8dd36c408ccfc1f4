#ifndef UNIPOS_DMV_H_
#define UNIPOS_DMV_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "unipos/treebank.h"
#include "unipos/universal_tag.h"

namespace unipos {

// Dependency model with valence over universal tags.
//
// Head ids are the universal tag indices 0..11 plus kRootHead for the
// artificial root, which sits left of the sentence and only takes right
// dependents. Each head generates its left and right dependents
// independently, nearest first: before every dependent it continues with
// probability 1 - stop(head, dir, adjacent), where `adjacent` is true while
// no dependent has been generated in that direction yet.

inline constexpr int kRootHead = kNumUniversalTags;
inline constexpr int kNumHeads = kNumUniversalTags + 1;

enum class Direction : int { kLeft = 0, kRight = 1 };

using TagSequence = std::vector<UniversalTag>;

template <typename T>
using HeadDirTable = std::array<std::array<T, 2>, kNumHeads>;

struct DmvParameters {
  // attach[head][dir][dependent]
  HeadDirTable<std::array<double, kNumUniversalTags>> attach{};
  // stop[head][dir][adjacent ? 1 : 0]
  HeadDirTable<std::array<double, 2>> stop{};
  // The root takes exactly one dependent; its stop row is pinned.
  bool single_root = true;

  double Attach(int head, Direction dir, int dep) const {
    return attach[head][static_cast<int>(dir)][dep];
  }
  double Stop(int head, Direction dir, bool adjacent) const {
    return stop[head][static_cast<int>(dir)][adjacent ? 1 : 0];
  }

  // Uniform attachments, stop probability 1/2; root rows pinned when
  // single_root is set.
  static DmvParameters Uniform(bool single_root = true);

  // Largest deviation from 1 over all attachment distributions, or from
  // [0, 1] over stop probabilities.
  double NormalizationError() const;
};

// Posterior expected counts of every DMV decision.
struct ExpectedCounts {
  HeadDirTable<std::array<double, kNumUniversalTags>> attach{};
  HeadDirTable<std::array<double, 2>> stop{};
  HeadDirTable<std::array<double, 2>> cont{};
  double log_likelihood = 0.0;

  ExpectedCounts &operator+=(const ExpectedCounts &other);
};

// Head/dependent pairs whose attachments are boosted by exp(strength)
// inside the chart.
class RuleSet {
 public:
  void Add(int head, UniversalTag dependent, double strength);

  // exp(strength) for a rule edge, nullopt otherwise.
  std::optional<double> Factor(int head, int dependent) const;
  std::optional<double> Strength(int head, int dependent) const;

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::map<std::pair<int, int>, double> &edges() const { return edges_; }

  // Copy of this rule set with every strength replaced.
  RuleSet WithStrength(double strength) const;

 private:
  std::map<std::pair<int, int>, double> edges_;
};

// Lines `HEAD\tDEPENDENT[\tstrength]`, `#` comments, ROOT only as head.
RuleSet ParseRules(std::string_view text, double default_strength = 1.0);
RuleSet LoadRulesFile(const std::filesystem::path &path, double default_strength = 1.0);

inline constexpr double kHarmonicSmoothing = 0.1;

// Attachment pseudo-counts 1/distance plus kHarmonicSmoothing over the tags
// seen in the corpus; stop and continue pseudo-counts are equal.
DmvParameters InitHarmonic(std::span<const TagSequence> corpus, bool single_root = true);

// Expected counts and log partition function over all projective trees.
// Throws Error(kInvalidArgument) for an empty sentence and
// Error(kInsufficientData) when the sentence has zero probability.
ExpectedCounts InsideOutside(std::span<const UniversalTag> sentence,
                             const DmvParameters &params,
                             const RuleSet *rules = nullptr);

inline constexpr double kEmSmoothing = 1e-6;

struct EmOptions {
  int iterations = 1;
  double smoothing = kEmSmoothing;
  const RuleSet *rules = nullptr;
  int jobs = 1;
};

struct EmResult {
  DmvParameters params;
  // log_likelihoods[i] is the corpus log likelihood under the parameters
  // that entered iteration i.
  std::vector<double> log_likelihoods;
};

ExpectedCounts CorpusExpectedCounts(std::span<const TagSequence> corpus,
                                    const DmvParameters &params,
                                    const RuleSet *rules = nullptr, int jobs = 1);

// Re-normalizes expected counts with additive smoothing.
DmvParameters MaximizationStep(const ExpectedCounts &counts, bool single_root,
                               double smoothing = kEmSmoothing);

EmResult TrainEm(std::span<const TagSequence> corpus, const DmvParameters &init,
                 const EmOptions &options);

// Highest scoring projective tree; heads are 1-based with 0 for the root.
// Ties prefer the smaller total arc length.
std::vector<int> DecodeTree(std::span<const UniversalTag> sentence,
                            const DmvParameters &params,
                            const RuleSet *rules = nullptr);

// Throws Error(kLengthMismatch) when the corpora are not aligned.
double DirectedAccuracy(std::span<const std::vector<int>> predicted,
                        std::span<const std::vector<int>> gold);

// Replaces each tag with probability `error_rate` by a different tag drawn
// from the corpus tag distribution. Deterministic for a given seed.
std::vector<TagSequence> PerturbTags(std::span<const TagSequence> corpus,
                                     double error_rate, std::uint64_t seed);

struct SampledTree {
  TagSequence tags;
  std::vector<int> heads;
};

// Draws a tree from the generative model; nullopt when it grows beyond
// `max_tokens`.
std::optional<SampledTree> SampleTree(const DmvParameters &params, std::mt19937_64 &rng,
                                      int max_tokens = 64);

struct InductionOptions {
  std::size_t max_len = 10;
  bool filter_before_strip = false;
  int iterations = 50;
  const RuleSet *rules = nullptr;
  double tag_noise = 0.0;
  std::uint64_t seed = 0;
  bool single_root = true;
  int jobs = 1;
};

struct InductionResult {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::vector<double> log_likelihoods;
  double directed_accuracy = 0.0;
  Corpus predicted;  // preprocessed sentences with predicted heads
  DmvParameters params;
};

// Strip punctuation, length-filter, optionally add tag noise, train from
// harmonic initialization and decode the same corpus. `corpus` must carry
// universal tags and gold heads.
InductionResult RunInduction(const Corpus &corpus, const InductionOptions &options);

}  // namespace unipos

#endif  // UNIPOS_DMV_H_
