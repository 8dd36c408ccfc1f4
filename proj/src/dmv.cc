#include "unipos/dmv.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "unipos/error.h"

namespace unipos {

namespace {

constexpr int kLeft = static_cast<int>(Direction::kLeft);
constexpr int kRight = static_cast<int>(Direction::kRight);
constexpr int kNonAdj = 0;
constexpr int kAdj = 1;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void PinRoot(DmvParameters &params) {
  params.attach[kRootHead][kLeft].fill(1.0 / kNumUniversalTags);
  params.stop[kRootHead][kLeft] = {1.0, 1.0};
  if (params.single_root) {
    params.stop[kRootHead][kRight][kNonAdj] = 1.0;
    params.stop[kRootHead][kRight][kAdj] = 0.0;
  }
}

// Positions 0..n with 0 the root. Items are stored in (n+1)^2 tables indexed
// by (head, far end).
class Chart {
 public:
  Chart(std::span<const UniversalTag> tags, const DmvParameters &params, const RuleSet *rules)
      : n_(static_cast<int>(tags.size())), size_(n_ + 1), tags_(tags), params_(params),
        rules_(rules) {}

  int n() const { return n_; }
  int HeadId(int pos) const { return pos == 0 ? kRootHead : ToIndex(tags_[static_cast<std::size_t>(pos - 1)]); }
  int TagId(int pos) const { return ToIndex(tags_[static_cast<std::size_t>(pos - 1)]); }
  std::size_t At(int h, int e) const { return static_cast<std::size_t>(h * size_ + e); }
  std::vector<double> Table(double init) const { return std::vector<double>(static_cast<std::size_t>(size_ * size_), init); }

  double Stop(int pos, int dir, int adj) const { return params_.stop[HeadId(pos)][dir][adj]; }
  double Cont(int pos, int dir, int adj) const { return 1.0 - Stop(pos, dir, adj); }
  // Attachment probability times the rule factor for head -> dep.
  double ArcFactor(int head, int dep, int dir) const {
    double p = params_.attach[HeadId(head)][dir][TagId(dep)];
    if (rules_ != nullptr) {
      if (auto factor = rules_->Factor(HeadId(head), TagId(dep))) p *= *factor;
    }
    return p;
  }
  double ArcLogFactor(int head, int dep, int dir) const {
    double p = params_.attach[HeadId(head)][dir][TagId(dep)];
    double score = p > 0.0 ? std::log(p) : kNegInf;
    if (rules_ != nullptr) {
      if (auto strength = rules_->Strength(HeadId(head), TagId(dep))) score += *strength;
    }
    return score;
  }

 private:
  int n_;
  int size_;
  std::span<const UniversalTag> tags_;
  const DmvParameters &params_;
  const RuleSet *rules_;
};

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

// --- parameters ------------------------------------------------------------

DmvParameters DmvParameters::Uniform(bool single_root) {
  DmvParameters params;
  params.single_root = single_root;
  for (auto &head : params.attach) {
    for (auto &dist : head) dist.fill(1.0 / kNumUniversalTags);
  }
  for (auto &head : params.stop) {
    for (auto &row : head) row = {0.5, 0.5};
  }
  PinRoot(params);
  return params;
}

double DmvParameters::NormalizationError() const {
  double worst = 0.0;
  for (const auto &head : attach) {
    for (const auto &dist : head) {
      double sum = 0.0;
      for (double p : dist) {
        if (p < 0.0) worst = std::max(worst, -p);
        sum += p;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  for (const auto &head : stop) {
    for (const auto &row : head) {
      for (double p : row) {
        if (p < 0.0) worst = std::max(worst, -p);
        if (p > 1.0) worst = std::max(worst, p - 1.0);
      }
    }
  }
  return worst;
}

ExpectedCounts &ExpectedCounts::operator+=(const ExpectedCounts &other) {
  for (int h = 0; h < kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      for (int d = 0; d < kNumUniversalTags; ++d) attach[h][dir][d] += other.attach[h][dir][d];
      for (int a = 0; a < 2; ++a) {
        stop[h][dir][a] += other.stop[h][dir][a];
        cont[h][dir][a] += other.cont[h][dir][a];
      }
    }
  }
  log_likelihood += other.log_likelihood;
  return *this;
}

// --- rules -----------------------------------------------------------------

void RuleSet::Add(int head, UniversalTag dependent, double strength) {
  if (head < 0 || head >= kNumHeads) throw Error(ErrorKind::kInvalidArgument, "rule head out of range");
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw Error(ErrorKind::kInvalidArgument, "rule strength must be finite and nonnegative");
  }
  edges_[{head, ToIndex(dependent)}] = strength;
}

std::optional<double> RuleSet::Strength(int head, int dependent) const {
  auto it = edges_.find({head, dependent});
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> RuleSet::Factor(int head, int dependent) const {
  auto strength = Strength(head, dependent);
  if (!strength) return std::nullopt;
  return std::exp(*strength);
}

RuleSet RuleSet::WithStrength(double strength) const {
  RuleSet out;
  for (const auto &[edge, unused] : edges_) {
    out.Add(edge.first, static_cast<UniversalTag>(edge.second), strength);
  }
  return out;
}

RuleSet ParseRules(std::string_view text, double default_strength) {
  RuleSet rules;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    for (std::string f; std::getline(split, f, '\t');) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(ErrorKind::kParse, "expected 'HEAD<TAB>DEPENDENT[<TAB>strength]'", line_no);
    }
    int head = fields[0] == "ROOT" ? kRootHead : ToIndex(ParseUniversalTagOrThrow(fields[0], line_no));
    if (fields[1] == "ROOT") throw Error(ErrorKind::kParse, "ROOT cannot be a dependent", line_no);
    UniversalTag dep = ParseUniversalTagOrThrow(fields[1], line_no);
    double strength = default_strength;
    if (fields.size() == 3) {
      std::size_t used = 0;
      try {
        strength = std::stod(fields[2], &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used == 0 || used != fields[2].size()) {
        throw Error(ErrorKind::kParse, "bad strength '" + fields[2] + "'", line_no);
      }
    }
    if (!(strength >= 0.0) || !std::isfinite(strength)) {
      throw Error(ErrorKind::kParse, "strength must be finite and nonnegative", line_no);
    }
    rules.Add(head, dep, strength);
  }
  return rules;
}

RuleSet LoadRulesFile(const std::filesystem::path &path, double default_strength) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseRules(buffer.str(), default_strength);
}

// --- initialization --------------------------------------------------------

DmvParameters InitHarmonic(std::span<const TagSequence> corpus, bool single_root) {
  std::array<bool, kNumUniversalTags> seen{};
  HeadDirTable<std::array<double, kNumUniversalTags>> counts{};
  for (const TagSequence &sentence : corpus) {
    const int n = static_cast<int>(sentence.size());
    for (int i = 0; i < n; ++i) {
      const int head = ToIndex(sentence[static_cast<std::size_t>(i)]);
      seen[static_cast<std::size_t>(head)] = true;
      counts[kRootHead][kRight][head] += 1.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const int dir = j > i ? kRight : kLeft;
        counts[head][dir][ToIndex(sentence[static_cast<std::size_t>(j)])] += 1.0 / std::abs(i - j);
      }
    }
  }
  if (std::none_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::kEmptyCorpus, "harmonic initialization needs at least one token");
  }

  DmvParameters params;
  params.single_root = single_root;
  for (int h = 0; h < kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      double total = 0.0;
      for (int d = 0; d < kNumUniversalTags; ++d) {
        if (seen[static_cast<std::size_t>(d)]) total += counts[h][dir][d] + kHarmonicSmoothing;
      }
      for (int d = 0; d < kNumUniversalTags; ++d) {
        params.attach[h][dir][d] =
            seen[static_cast<std::size_t>(d)] ? (counts[h][dir][d] + kHarmonicSmoothing) / total : 0.0;
      }
      params.stop[h][dir] = {0.5, 0.5};
    }
  }
  PinRoot(params);
  return params;
}

// --- inside-outside --------------------------------------------------------

ExpectedCounts InsideOutside(std::span<const UniversalTag> sentence, const DmvParameters &params,
                             const RuleSet *rules) {
  if (sentence.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot parse an empty sentence");
  const Chart chart(sentence, params, rules);
  const int n = chart.n();

  // Right half-constituents of h spanning h..j (R1: at least one right
  // dependent; the no-dependent case only exists for j == h), their sealed
  // versions Rs, the mirrored left items L1/Ls spanning i..h, and the
  // incomplete arc items IR[h][d] (d > h) and IL[h][d] (d < h).
  std::vector<double> R1 = chart.Table(0.0), Rs = chart.Table(0.0);
  std::vector<double> L1 = chart.Table(0.0), Ls = chart.Table(0.0);
  std::vector<double> IR = chart.Table(0.0), IL = chart.Table(0.0);
  auto at = [&](int h, int e) { return chart.At(h, e); };

  for (int h = 0; h <= n; ++h) {
    Rs[at(h, h)] = chart.Stop(h, kRight, kAdj);
    if (h > 0) Ls[at(h, h)] = chart.Stop(h, kLeft, kAdj);
  }
  for (int w = 1; w <= n; ++w) {
    for (int a = 0; a + w <= n; ++a) {
      const int b = a + w;
      {
        double sum = 0.0;
        for (int k = a; k < b; ++k) {
          double left = R1[at(a, k)] * chart.Cont(a, kRight, kNonAdj);
          if (k == a) left += chart.Cont(a, kRight, kAdj);
          sum += left * Ls[at(b, k + 1)];
        }
        IR[at(a, b)] = sum * chart.ArcFactor(a, b, kRight);
      }
      if (a > 0) {
        double sum = 0.0;
        for (int k = a; k < b; ++k) {
          double right = L1[at(b, k + 1)] * chart.Cont(b, kLeft, kNonAdj);
          if (k + 1 == b) right += chart.Cont(b, kLeft, kAdj);
          sum += right * Rs[at(a, k)];
        }
        IL[at(b, a)] = sum * chart.ArcFactor(b, a, kLeft);
      }
      {
        double sum = 0.0;
        for (int d = a + 1; d <= b; ++d) sum += IR[at(a, d)] * Rs[at(d, b)];
        R1[at(a, b)] = sum;
        Rs[at(a, b)] = sum * chart.Stop(a, kRight, kNonAdj);
      }
      if (a > 0) {
        double sum = 0.0;
        for (int d = a; d < b; ++d) sum += Ls[at(d, a)] * IL[at(b, d)];
        L1[at(b, a)] = sum;
        Ls[at(b, a)] = sum * chart.Stop(b, kLeft, kNonAdj);
      }
    }
  }

  const double z = Rs[at(0, n)];
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw Error(ErrorKind::kInsufficientData,
                "sentence has zero probability under the model (length " + std::to_string(n) + ")");
  }

  ExpectedCounts counts;
  counts.log_likelihood = std::log(z);
  // Adjoints: d Z / d item, accumulated in reverse order of the inside pass.
  std::vector<double> R1b = chart.Table(0.0), Rsb = chart.Table(0.0);
  std::vector<double> L1b = chart.Table(0.0), Lsb = chart.Table(0.0);
  std::vector<double> IRb = chart.Table(0.0), ILb = chart.Table(0.0);
  Rsb[at(0, n)] = 1.0;
  const double inv_z = 1.0 / z;

  for (int w = n; w >= 1; --w) {
    for (int a = n - w; a >= 0; --a) {
      const int b = a + w;
      const int ha = chart.HeadId(a);
      const int hb = b > 0 ? chart.HeadId(b) : 0;
      if (a > 0) {
        const double g = Lsb[at(b, a)];
        counts.stop[hb][kLeft][kNonAdj] += g * Ls[at(b, a)] * inv_z;
        L1b[at(b, a)] += g * chart.Stop(b, kLeft, kNonAdj);
        const double g1 = L1b[at(b, a)];
        for (int d = a; d < b; ++d) {
          Lsb[at(d, a)] += g1 * IL[at(b, d)];
          ILb[at(b, d)] += g1 * Ls[at(d, a)];
        }
      }
      {
        const double g = Rsb[at(a, b)];
        counts.stop[ha][kRight][kNonAdj] += g * Rs[at(a, b)] * inv_z;
        R1b[at(a, b)] += g * chart.Stop(a, kRight, kNonAdj);
        const double g1 = R1b[at(a, b)];
        for (int d = a + 1; d <= b; ++d) {
          IRb[at(a, d)] += g1 * Rs[at(d, b)];
          Rsb[at(d, b)] += g1 * IR[at(a, d)];
        }
      }
      if (a > 0) {
        const double g = ILb[at(b, a)];
        const double factor = chart.ArcFactor(b, a, kLeft);
        counts.attach[hb][kLeft][chart.TagId(a)] += g * IL[at(b, a)] * inv_z;
        const double cont_adj = chart.Cont(b, kLeft, kAdj);
        const double cont_non = chart.Cont(b, kLeft, kNonAdj);
        for (int k = a; k < b; ++k) {
          const double rs = Rs[at(a, k)];
          double right = L1[at(b, k + 1)] * cont_non;
          if (k + 1 == b) {
            right += cont_adj;
            counts.cont[hb][kLeft][kAdj] += g * cont_adj * rs * factor * inv_z;
          }
          counts.cont[hb][kLeft][kNonAdj] += g * L1[at(b, k + 1)] * cont_non * rs * factor * inv_z;
          L1b[at(b, k + 1)] += g * cont_non * rs * factor;
          Rsb[at(a, k)] += g * right * factor;
        }
      }
      {
        const double g = IRb[at(a, b)];
        const double factor = chart.ArcFactor(a, b, kRight);
        counts.attach[ha][kRight][chart.TagId(b)] += g * IR[at(a, b)] * inv_z;
        const double cont_adj = chart.Cont(a, kRight, kAdj);
        const double cont_non = chart.Cont(a, kRight, kNonAdj);
        for (int k = a; k < b; ++k) {
          const double ls = Ls[at(b, k + 1)];
          double left = R1[at(a, k)] * cont_non;
          if (k == a) {
            left += cont_adj;
            counts.cont[ha][kRight][kAdj] += g * cont_adj * ls * factor * inv_z;
          }
          counts.cont[ha][kRight][kNonAdj] += g * R1[at(a, k)] * cont_non * ls * factor * inv_z;
          R1b[at(a, k)] += g * cont_non * ls * factor;
          Lsb[at(b, k + 1)] += g * left * factor;
        }
      }
    }
  }
  for (int h = 0; h <= n; ++h) {
    counts.stop[chart.HeadId(h)][kRight][kAdj] += Rsb[at(h, h)] * Rs[at(h, h)] * inv_z;
    if (h > 0) counts.stop[chart.HeadId(h)][kLeft][kAdj] += Lsb[at(h, h)] * Ls[at(h, h)] * inv_z;
  }
  return counts;
}

// --- EM --------------------------------------------------------------------

ExpectedCounts CorpusExpectedCounts(std::span<const TagSequence> corpus, const DmvParameters &params,
                                    const RuleSet *rules, int jobs) {
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(corpus.size(), 1));
  std::vector<ExpectedCounts> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      const std::size_t begin = corpus.size() * w / workers;
      const std::size_t end = corpus.size() * (w + 1) / workers;
      for (std::size_t s = begin; s < end; ++s) {
        if (corpus[s].empty()) continue;
        partial[w] += InsideOutside(corpus[s], params, rules);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto &t : threads) t.join();
  }
  ExpectedCounts total;
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
    total += partial[w];
  }
  return total;
}

DmvParameters MaximizationStep(const ExpectedCounts &counts, bool single_root, double smoothing) {
  DmvParameters params;
  params.single_root = single_root;
  for (int h = 0; h < kNumHeads; ++h) {
    for (int dir = 0; dir < 2; ++dir) {
      double total = 0.0;
      for (int d = 0; d < kNumUniversalTags; ++d) total += counts.attach[h][dir][d] + smoothing;
      for (int d = 0; d < kNumUniversalTags; ++d) {
        params.attach[h][dir][d] = (counts.attach[h][dir][d] + smoothing) / total;
      }
      for (int adj = 0; adj < 2; ++adj) {
        const double s = counts.stop[h][dir][adj] + smoothing;
        const double c = counts.cont[h][dir][adj] + smoothing;
        params.stop[h][dir][adj] = s / (s + c);
      }
    }
  }
  PinRoot(params);
  return params;
}

EmResult TrainEm(std::span<const TagSequence> corpus, const DmvParameters &init, const EmOptions &options) {
  if (options.iterations < 1) throw Error(ErrorKind::kInvalidArgument, "EM needs at least one iteration");
  if (!(options.smoothing >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "smoothing must be nonnegative");
  EmResult result{init, {}};
  for (int it = 0; it < options.iterations; ++it) {
    ExpectedCounts counts = CorpusExpectedCounts(corpus, result.params, options.rules, options.jobs);
    result.log_likelihoods.push_back(counts.log_likelihood);
    result.params = MaximizationStep(counts, init.single_root, options.smoothing);
  }
  return result;
}

// --- decoding --------------------------------------------------------------

namespace {

// Viterbi score with total arc length as the tie-breaker (shorter wins).
struct Score {
  double log_prob = kNegInf;
  int arc_length = 0;

  bool BetterThan(const Score &other) const {
    if (log_prob != other.log_prob) return log_prob > other.log_prob;
    return arc_length < other.arc_length;
  }
  Score Plus(const Score &other, double extra, int extra_length = 0) const {
    return Score{log_prob + other.log_prob + extra, arc_length + other.arc_length + extra_length};
  }
};

}  // namespace

std::vector<int> DecodeTree(std::span<const UniversalTag> sentence, const DmvParameters &params,
                            const RuleSet *rules) {
  if (sentence.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot parse an empty sentence");
  const Chart chart(sentence, params, rules);
  const int n = chart.n();
  const auto cells = static_cast<std::size_t>((n + 1) * (n + 1));
  auto at = [&](int h, int e) { return chart.At(h, e); };
  auto log_stop = [&](int pos, int dir, int adj) { return SafeLog(chart.Stop(pos, dir, adj)); };
  auto log_cont = [&](int pos, int dir, int adj) { return SafeLog(chart.Cont(pos, dir, adj)); };

  std::vector<Score> R1(cells), Rs(cells), L1(cells), Ls(cells), IR(cells), IL(cells);
  std::vector<int> bR1(cells, -1), bL1(cells, -1), bIR(cells, -1), bIL(cells, -1);
  const Score unit{0.0, 0};

  for (int h = 0; h <= n; ++h) {
    Rs[at(h, h)] = Score{log_stop(h, kRight, kAdj), 0};
    if (h > 0) Ls[at(h, h)] = Score{log_stop(h, kLeft, kAdj), 0};
  }
  for (int w = 1; w <= n; ++w) {
    for (int a = 0; a + w <= n; ++a) {
      const int b = a + w;
      {
        const double arc = chart.ArcLogFactor(a, b, kRight);
        Score best;
        for (int k = a; k < b; ++k) {
          const Score &half = k == a ? unit : R1[at(a, k)];
          const double cont = log_cont(a, kRight, k == a ? kAdj : kNonAdj);
          Score s = half.Plus(Ls[at(b, k + 1)], cont + arc, w);
          if (bIR[at(a, b)] < 0 || s.BetterThan(best)) {
            best = s;
            bIR[at(a, b)] = k;
          }
        }
        IR[at(a, b)] = best;
      }
      if (a > 0) {
        const double arc = chart.ArcLogFactor(b, a, kLeft);
        Score best;
        for (int k = a; k < b; ++k) {
          const Score &half = k + 1 == b ? unit : L1[at(b, k + 1)];
          const double cont = log_cont(b, kLeft, k + 1 == b ? kAdj : kNonAdj);
          Score s = half.Plus(Rs[at(a, k)], cont + arc, w);
          if (bIL[at(b, a)] < 0 || s.BetterThan(best)) {
            best = s;
            bIL[at(b, a)] = k;
          }
        }
        IL[at(b, a)] = best;
      }
      {
        Score best;
        for (int d = a + 1; d <= b; ++d) {
          Score s = IR[at(a, d)].Plus(Rs[at(d, b)], 0.0);
          if (bR1[at(a, b)] < 0 || s.BetterThan(best)) {
            best = s;
            bR1[at(a, b)] = d;
          }
        }
        R1[at(a, b)] = best;
        Rs[at(a, b)] = best.Plus(unit, log_stop(a, kRight, kNonAdj));
      }
      if (a > 0) {
        Score best;
        for (int d = a; d < b; ++d) {
          Score s = Ls[at(d, a)].Plus(IL[at(b, d)], 0.0);
          if (bL1[at(b, a)] < 0 || s.BetterThan(best)) {
            best = s;
            bL1[at(b, a)] = d;
          }
        }
        L1[at(b, a)] = best;
        Ls[at(b, a)] = best.Plus(unit, log_stop(b, kLeft, kNonAdj));
      }
    }
  }

  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  // Explicit stack of (item kind, head, far end) to follow back-pointers.
  enum Kind { kRs, kR1, kIR, kLs, kL1, kIL };
  std::vector<std::array<int, 3>> stack = {{kRs, 0, n}};
  while (!stack.empty()) {
    auto [kind, h, e] = stack.back();
    stack.pop_back();
    switch (kind) {
      case kRs:
        if (h != e) stack.push_back({kR1, h, e});
        break;
      case kR1: {
        const int d = bR1[at(h, e)];
        stack.push_back({kIR, h, d});
        stack.push_back({kRs, d, e});
        break;
      }
      case kIR: {
        heads[static_cast<std::size_t>(e - 1)] = h;
        const int k = bIR[at(h, e)];
        if (k > h) stack.push_back({kR1, h, k});
        stack.push_back({kLs, e, k + 1});
        break;
      }
      case kLs:
        if (h != e) stack.push_back({kL1, h, e});
        break;
      case kL1: {
        const int d = bL1[at(h, e)];
        stack.push_back({kLs, d, e});
        stack.push_back({kIL, h, d});
        break;
      }
      case kIL: {
        heads[static_cast<std::size_t>(e - 1)] = h;
        const int k = bIL[at(h, e)];
        if (k + 1 < h) stack.push_back({kL1, h, k + 1});
        stack.push_back({kRs, e, k});
        break;
      }
    }
  }
  return heads;
}

// --- evaluation and corpora ------------------------------------------------

double DirectedAccuracy(std::span<const std::vector<int>> predicted, std::span<const std::vector<int>> gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorKind::kLengthMismatch, "predicted and gold corpora differ in size");
  }
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (predicted[s].size() != gold[s].size()) {
      throw Error(ErrorKind::kLengthMismatch, "sentence " + std::to_string(s + 1) + " differs in length");
    }
    for (std::size_t i = 0; i < gold[s].size(); ++i) correct += predicted[s][i] == gold[s][i] ? 1 : 0;
    total += gold[s].size();
  }
  if (total == 0) throw Error(ErrorKind::kEmptyCorpus, "no tokens to evaluate");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<TagSequence> PerturbTags(std::span<const TagSequence> corpus, double error_rate,
                                     std::uint64_t seed) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "error rate must lie in [0, 1]");
  }
  std::array<double, kNumUniversalTags> freq{};
  for (const TagSequence &sentence : corpus) {
    for (UniversalTag t : sentence) freq[static_cast<std::size_t>(ToIndex(t))] += 1.0;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<TagSequence> out(corpus.begin(), corpus.end());
  for (TagSequence &sentence : out) {
    for (UniversalTag &tag : sentence) {
      if (!(uniform(rng) < error_rate)) continue;
      const auto gold = static_cast<std::size_t>(ToIndex(tag));
      const double mass = std::accumulate(freq.begin(), freq.end(), 0.0) - freq[gold];
      if (mass <= 0.0) continue;
      double u = uniform(rng) * mass;
      std::size_t pick = gold;
      for (std::size_t t = 0; t < freq.size(); ++t) {
        if (t == gold || freq[t] == 0.0) continue;
        pick = t;
        if (u < freq[t]) break;
        u -= freq[t];
      }
      tag = kAllUniversalTags[pick];
    }
  }
  return out;
}

std::optional<SampledTree> SampleTree(const DmvParameters &params, std::mt19937_64 &rng, int max_tokens) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto draw = [&](const std::array<double, kNumUniversalTags> &dist) {
    double u = uniform(rng);
    int last = 0;
    for (int t = 0; t < kNumUniversalTags; ++t) {
      if (dist[static_cast<std::size_t>(t)] <= 0.0) continue;
      last = t;
      if (u < dist[static_cast<std::size_t>(t)]) return t;
      u -= dist[static_cast<std::size_t>(t)];
    }
    return last;
  };

  struct Node {
    int head_id;
    std::vector<int> left;   // nearest first
    std::vector<int> right;  // nearest first
  };
  std::vector<Node> nodes = {{kRootHead, {}, {}}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int dir : {kLeft, kRight}) {
      if (nodes[i].head_id == kRootHead && dir == kLeft) continue;
      bool adjacent = true;
      while (uniform(rng) >= params.stop[nodes[i].head_id][dir][adjacent ? kAdj : kNonAdj]) {
        if (static_cast<int>(nodes.size()) > max_tokens) return std::nullopt;
        const int tag = draw(params.attach[nodes[i].head_id][dir]);
        nodes.push_back({tag, {}, {}});
        auto &deps = dir == kLeft ? nodes[i].left : nodes[i].right;
        deps.push_back(static_cast<int>(nodes.size()) - 1);
        adjacent = false;
      }
    }
  }
  if (nodes.size() < 2) return std::nullopt;

  // In-order linearization: far-left dependents, head, right dependents.
  std::vector<int> order;
  std::vector<std::pair<int, bool>> stack = {{0, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      order.push_back(id);
      continue;
    }
    const Node &node = nodes[static_cast<std::size_t>(id)];
    for (auto it = node.right.rbegin(); it != node.right.rend(); ++it) stack.push_back({*it, false});
    stack.push_back({id, true});
    for (int dep : node.left) stack.push_back({dep, false});
  }
  std::vector<int> position(nodes.size(), 0);
  for (std::size_t p = 0; p < order.size(); ++p) position[static_cast<std::size_t>(order[p])] = static_cast<int>(p);

  SampledTree tree;
  tree.heads.assign(nodes.size() - 1, 0);
  for (std::size_t p = 1; p < order.size(); ++p) {
    tree.tags.push_back(kAllUniversalTags[static_cast<std::size_t>(nodes[static_cast<std::size_t>(order[p])].head_id)]);
  }
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    for (const auto *deps : {&nodes[id].left, &nodes[id].right}) {
      for (int dep : *deps) {
        tree.heads[static_cast<std::size_t>(position[static_cast<std::size_t>(dep)] - 1)] =
            position[id];
      }
    }
  }
  return tree;
}

InductionResult RunInduction(const Corpus &corpus, const InductionOptions &options) {
  InductionResult result;
  result.predicted = PrepareForInduction(corpus, options.max_len, options.filter_before_strip);
  if (result.predicted.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "no sentences left after preprocessing");
  }
  std::vector<TagSequence> tags;
  std::vector<std::vector<int>> gold;
  for (const Sentence &sentence : result.predicted) {
    tags.push_back(UniversalTags(sentence));
    gold.push_back(Heads(sentence));
    result.tokens += sentence.size();
  }
  result.sentences = result.predicted.size();
  if (options.tag_noise > 0.0) tags = PerturbTags(tags, options.tag_noise, options.seed);

  const DmvParameters init = InitHarmonic(tags, options.single_root);
  EmOptions em;
  em.iterations = options.iterations;
  em.rules = options.rules;
  em.jobs = options.jobs;
  EmResult trained = TrainEm(tags, init, em);

  std::vector<std::vector<int>> predicted;
  for (std::size_t s = 0; s < tags.size(); ++s) {
    predicted.push_back(DecodeTree(tags[s], trained.params, options.rules));
    Sentence &out = result.predicted[s];
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.tokens[i].universal_tag = tags[s][i];
      out.tokens[i].head = predicted.back()[i];
    }
  }
  result.directed_accuracy = DirectedAccuracy(predicted, gold);
  result.log_likelihoods = std::move(trained.log_likelihoods);
  result.params = trained.params;
  return result;
}

}  // namespace unipos
