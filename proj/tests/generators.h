// Random corpora and models shared by the unit and acceptance tests.
#ifndef UNIPOS_TESTS_GENERATORS_H_
#define UNIPOS_TESTS_GENERATORS_H_

#include <random>
#include <string>
#include <vector>

#include "unipos/dmv.h"
#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"
#include "unipos/trigram_hmm.h"

namespace unipos::gen {

inline int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Words are drawn per tag from a small lexicon with some ambiguity, so the
// trained model has non-trivial transitions and emissions.
inline TaggedCorpus RandomTaggedCorpus(std::mt19937_64 &rng, int num_tags, int sentences,
                                       int max_len) {
  static const char *kSuffixes[] = {"ing", "ed", "s", "ly", "er", "a"};
  TaggedCorpus corpus;
  for (int s = 0; s < sentences; ++s) {
    TaggedSentence sentence;
    const int n = Uniform(rng, 1, max_len);
    for (int i = 0; i < n; ++i) {
      const int tag = Uniform(rng, 0, num_tags - 1);
      const int word = Uniform(rng, 0, 5);
      // Half the lexicon is shared across tags.
      const int owner = word < 3 ? tag : Uniform(rng, 0, num_tags - 1);
      sentence.words.push_back((word % 2 ? "W" : "w") + std::to_string(owner * 7 + word) +
                               kSuffixes[(owner + word) % 6]);
      sentence.tags.push_back("T" + std::to_string(tag));
    }
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

// Test sentence mixing known words with unseen ones.
inline std::vector<std::string> RandomWords(std::mt19937_64 &rng, const TaggedCorpus &train, int n) {
  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) {
    if (Uniform(rng, 0, 3) == 0) {
      words.push_back("unseen" + std::to_string(Uniform(rng, 0, 99)) + (i % 2 ? "ing" : "S"));
    } else {
      const auto &s = train[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(train.size()) - 1))];
      words.push_back(s.words[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(s.words.size()) - 1))]);
    }
  }
  return words;
}

// Corpus over fine tags F0..F{k-1} with a random mapping onto universal tags.
struct FineCorpus {
  Corpus train;
  Corpus test;
  TagMapping mapping;
};

inline FineCorpus RandomFineCorpus(std::mt19937_64 &rng) {
  const int fine_tags = Uniform(rng, 2, 8);
  TagMapping::Entries entries;
  for (int f = 0; f < fine_tags; ++f) {
    entries.emplace("F" + std::to_string(f), kAllUniversalTags[static_cast<std::size_t>(Uniform(rng, 0, 11))]);
  }
  auto make = [&](int sentences) {
    Corpus corpus;
    for (int s = 0; s < sentences; ++s) {
      Sentence sentence;
      const int n = Uniform(rng, 1, 8);
      for (int i = 0; i < n; ++i) {
        const int f = Uniform(rng, 0, fine_tags - 1);
        const int w = Uniform(rng, 0, 9);
        sentence.tokens.push_back(Token{"x" + std::to_string((f + w) % 12), "F" + std::to_string(f), {}, {}});
      }
      corpus.push_back(std::move(sentence));
    }
    return corpus;
  };
  FineCorpus out{make(Uniform(rng, 5, 40)), make(Uniform(rng, 3, 15)), TagMapping("rand", std::move(entries))};
  return out;
}

// A DMV with a strong ROOT -> VERB -> NOUN backbone plus modifiers.
inline DmvParameters SyntheticGrammar() {
  auto idx = [](UniversalTag t) { return ToIndex(t); };
  DmvParameters p = DmvParameters::Uniform(true);
  for (auto &dirs : p.attach) {
    for (auto &row : dirs) row.fill(0.0);
  }
  auto set = [&](int head, Direction dir, std::initializer_list<std::pair<UniversalTag, double>> row) {
    auto &a = p.attach[head][static_cast<int>(dir)];
    a.fill(0.0);
    for (const auto &[t, w] : row) a[static_cast<std::size_t>(idx(t))] = w;
  };
  using enum UniversalTag;
  using enum Direction;
  set(kRootHead, kRight, {{kVerb, 1.0}});
  p.attach[kRootHead][0].fill(1.0 / kNumUniversalTags);
  set(idx(kVerb), kLeft, {{kNoun, 0.6}, {kPron, 0.3}, {kAdv, 0.1}});
  set(idx(kVerb), kRight, {{kNoun, 0.7}, {kAdp, 0.2}, {kAdv, 0.1}});
  set(idx(kNoun), kLeft, {{kDet, 0.6}, {kAdj, 0.4}});
  set(idx(kNoun), kRight, {{kAdp, 1.0}});
  set(idx(kAdp), kRight, {{kNoun, 1.0}});
  set(idx(kAdp), kLeft, {{kNoun, 1.0}});
  for (UniversalTag t : kAllUniversalTags) {
    for (int dir = 0; dir < 2; ++dir) {
      auto &row = p.attach[static_cast<std::size_t>(idx(t))][dir];
      bool empty = true;
      for (double v : row) empty = empty && v == 0.0;
      if (empty) row[static_cast<std::size_t>(idx(kNoun))] = 1.0;
      p.stop[static_cast<std::size_t>(idx(t))][dir] = {1.0, 1.0};
    }
  }
  // stop[head][dir] = {non-adjacent, adjacent}
  p.stop[idx(kVerb)][static_cast<int>(kLeft)] = {0.9, 0.2};
  p.stop[idx(kVerb)][static_cast<int>(kRight)] = {0.7, 0.3};
  p.stop[idx(kNoun)][static_cast<int>(kLeft)] = {0.8, 0.4};
  p.stop[idx(kNoun)][static_cast<int>(kRight)] = {1.0, 0.85};
  p.stop[idx(kAdp)][static_cast<int>(kRight)] = {1.0, 0.0};
  return p;
}

// Samples sentences of 1..max_len tokens with gold heads and universal tags.
inline Corpus SampleCorpus(const DmvParameters &grammar, std::size_t sentences, std::uint64_t seed,
                           std::size_t max_len = 10) {
  std::mt19937_64 rng(seed);
  Corpus corpus;
  while (corpus.size() < sentences) {
    auto tree = SampleTree(grammar, rng, static_cast<int>(max_len));
    if (!tree || tree->tags.empty()) continue;
    Sentence s;
    for (std::size_t i = 0; i < tree->tags.size(); ++i) {
      std::string tag(ToString(tree->tags[i]));
      s.tokens.push_back(Token{"w" + std::to_string(i), tag, tree->tags[i], tree->heads[i]});
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

}  // namespace unipos::gen

#endif  // UNIPOS_TESTS_GENERATORS_H_
