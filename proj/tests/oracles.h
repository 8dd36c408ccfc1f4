// Brute-force reference implementations used by the unit and acceptance
// tests. They share nothing with the production dynamic programs beyond the
// public model accessors.
#ifndef UNIPOS_TESTS_ORACLES_H_
#define UNIPOS_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "unipos/dmv.h"
#include "unipos/trigram_hmm.h"

namespace unipos::oracle {

// --- trigram HMM ------------------------------------------------------------

// Path score accumulated left to right in the order Viterbi uses, so the
// best path score is reproduced exactly.
inline double PathScore(const TrigramHmm &model, const std::vector<std::string> &words,
                        const std::vector<int> &tags) {
  const int start = model.counts().start();
  double score = 0.0;
  int a = start, b = start;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double e = model.EmissionLogScores(words[i])[static_cast<std::size_t>(tags[i])];
    score = score + (model.TransitionLogProb(a, b, tags[i]) + e);
    a = b;
    b = tags[i];
  }
  return score + model.TransitionLogProb(a, b, model.counts().end());
}

struct BruteForceResult {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> argmax;
  int ties = 0;  // number of sequences reaching `best`
};

inline BruteForceResult ExhaustiveDecode(const TrigramHmm &model,
                                         const std::vector<std::string> &words) {
  const int k = model.num_tags();
  BruteForceResult result;
  std::vector<int> seq(words.size(), 0);
  while (true) {
    const double s = PathScore(model, words, seq);
    if (s > result.best) {
      result.best = s;
      result.argmax = seq;
      result.ties = 1;
    } else if (s == result.best) {
      ++result.ties;
    }
    std::size_t i = 0;
    while (i < seq.size() && ++seq[i] == k) seq[i++] = 0;
    if (i == seq.size()) break;
  }
  return result;
}

// --- DMV --------------------------------------------------------------------

// Every projective head vector (1-based heads, 0 = root) for n tokens,
// including trees with several root dependents.
inline std::vector<std::vector<int>> ProjectiveTrees(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  auto head = [&](int i) { return heads[static_cast<std::size_t>(i - 1)]; };
  auto dominates = [&](int h, int d) {
    for (int x = d, steps = 0; steps <= n; ++steps) {
      if (x == h) return true;
      if (x == 0) return false;
      x = head(x);
    }
    return false;  // cycle
  };
  while (true) {
    bool ok = true;
    for (int d = 1; d <= n && ok; ++d) {
      if (head(d) == d || !dominates(0, d)) ok = false;
    }
    for (int d = 1; d <= n && ok; ++d) {
      const int h = head(d);
      for (int x = std::min(h, d) + 1; x < std::max(h, d) && ok; ++x) {
        if (!dominates(h, x)) ok = false;
      }
    }
    if (ok) out.push_back(heads);
    std::size_t i = 0;
    while (i < heads.size() && ++heads[i] == n + 1) heads[i++] = 0;
    if (i == heads.size()) break;
  }
  return out;
}

// Generative probability of one tree, with rule factors, together with the
// events it uses. `visit(kind, head, dir, x)` receives kind 0 for
// attach (x = dependent tag), 1 for stop and 2 for continue (x = adjacent).
inline double TreeProbability(const TagSequence &tags, const std::vector<int> &heads,
                              const DmvParameters &p, const RuleSet *rules = nullptr,
                              const std::function<void(int, int, int, int)> &visit = nullptr) {
  const int n = static_cast<int>(tags.size());
  auto id = [&](int pos) { return pos == 0 ? kRootHead : ToIndex(tags[static_cast<std::size_t>(pos - 1)]); };
  double prob = 1.0;
  for (int h = 0; h <= n; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      if (h == 0 && dir == 0) continue;
      // Dependents nearest first.
      std::vector<int> deps;
      if (dir == 0) {
        for (int d = h - 1; d >= 1; --d) if (heads[static_cast<std::size_t>(d - 1)] == h) deps.push_back(d);
      } else {
        for (int d = h + 1; d <= n; ++d) if (heads[static_cast<std::size_t>(d - 1)] == h) deps.push_back(d);
      }
      const int hid = id(h);
      for (std::size_t k = 0; k < deps.size(); ++k) {
        const int adj = k == 0 ? 1 : 0;
        const int dep = id(deps[k]);
        prob *= 1.0 - p.stop[hid][dir][adj];
        prob *= p.attach[hid][dir][dep];
        if (rules != nullptr) {
          if (auto f = rules->Factor(hid, dep)) prob *= *f;
        }
        if (visit) {
          visit(2, hid, dir, adj);
          visit(0, hid, dir, dep);
        }
      }
      const int adj = deps.empty() ? 1 : 0;
      prob *= p.stop[hid][dir][adj];
      if (visit) visit(1, hid, dir, adj);
    }
  }
  return prob;
}

struct EnumeratedCounts {
  double z = 0.0;
  ExpectedCounts counts;
};

inline EnumeratedCounts EnumerateCounts(const TagSequence &tags, const DmvParameters &p,
                                        const RuleSet *rules = nullptr) {
  EnumeratedCounts out;
  const auto trees = ProjectiveTrees(static_cast<int>(tags.size()));
  for (const auto &heads : trees) out.z += TreeProbability(tags, heads, p, rules);
  for (const auto &heads : trees) {
    struct Event { int kind, head, dir, x; };
    std::vector<Event> events;
    const double prob = TreeProbability(tags, heads, p, rules, [&](int kind, int h, int dir, int x) {
      events.push_back({kind, h, dir, x});
    });
    const double w = prob / out.z;
    for (const Event &e : events) {
      if (e.kind == 0) out.counts.attach[e.head][e.dir][e.x] += w;
      if (e.kind == 1) out.counts.stop[e.head][e.dir][e.x] += w;
      if (e.kind == 2) out.counts.cont[e.head][e.dir][e.x] += w;
    }
  }
  out.counts.log_likelihood = std::log(out.z);
  return out;
}

// Best tree by probability; returns all trees within a relative 1e-12 of it.
inline std::vector<std::vector<int>> BestTrees(const TagSequence &tags, const DmvParameters &p,
                                               const RuleSet *rules = nullptr) {
  std::vector<std::vector<int>> best;
  double best_prob = 0.0;
  for (const auto &heads : ProjectiveTrees(static_cast<int>(tags.size()))) {
    const double prob = TreeProbability(tags, heads, p, rules);
    if (prob > best_prob * (1.0 + 1e-12)) {
      best_prob = prob;
      best = {heads};
    } else if (prob >= best_prob * (1.0 - 1e-12) && prob > 0.0) {
      best.push_back(heads);
    }
  }
  return best;
}

// Random DMV parameters with Dirichlet-ish attachments and stops away from
// 0 and 1; root rows follow the single/multi-root convention.
inline DmvParameters RandomParameters(std::mt19937_64 &rng, bool single_root) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  DmvParameters p = DmvParameters::Uniform(single_root);
  for (int h = 0; h < kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      if (h == kRootHead && dir == 0) continue;
      double sum = 0.0;
      for (double &a : p.attach[h][dir]) sum += (a = u(rng));
      for (double &a : p.attach[h][dir]) a /= sum;
      if (h == kRootHead && single_root) continue;
      p.stop[h][dir] = {u(rng) * 0.9, u(rng) * 0.9};
    }
  }
  return p;
}

inline TagSequence RandomTags(std::mt19937_64 &rng, int n, int alphabet = kNumUniversalTags) {
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  TagSequence tags;
  for (int i = 0; i < n; ++i) tags.push_back(kAllUniversalTags[static_cast<std::size_t>(pick(rng))]);
  return tags;
}

inline double RelativeError(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Largest relative deviation over every count, with an absolute floor for
// counts that are essentially zero.
inline double MaxCountError(const ExpectedCounts &a, const ExpectedCounts &b) {
  double worst = 0.0;
  auto cmp = [&](double x, double y) {
    const double diff = std::abs(x - y);
    if (diff < 1e-14) return;
    worst = std::max(worst, RelativeError(x, y));
  };
  for (int h = 0; h < kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      for (int t = 0; t < kNumUniversalTags; ++t) cmp(a.attach[h][dir][t], b.attach[h][dir][t]);
      for (int adj = 0; adj < 2; ++adj) {
        cmp(a.stop[h][dir][adj], b.stop[h][dir][adj]);
        cmp(a.cont[h][dir][adj], b.cont[h][dir][adj]);
      }
    }
  }
  return worst;
}

}  // namespace unipos::oracle

#endif  // UNIPOS_TESTS_ORACLES_H_
