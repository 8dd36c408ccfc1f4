#include "unipos/experiment.h"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "unipos/error.h"

namespace unipos {

ExperimentResult RunMatrix(const Corpus &train, const Corpus &test,
                           const TagMapping &mapping, const MatrixOptions &options) {
  ExperimentResult result;
  result.treebank_id = mapping.treebank_id();
  result.n_fine_tags = static_cast<int>(mapping.size());

  const TaggedCorpus train_fine = ToTaggedCorpus(train, TagColumn::kFine);
  const TaggedCorpus test_fine = ToTaggedCorpus(test, TagColumn::kFine);
  const TaggedCorpus train_universal =
      ToTaggedCorpus(ApplyMapping(train, mapping), TagColumn::kUniversal);
  const TaggedCorpus test_universal =
      ToTaggedCorpus(ApplyMapping(test, mapping), TagColumn::kUniversal);

  const TrigramHmm fine_model = TrigramHmm::Train(train_fine, options.hmm);
  const auto fine_predictions = TagCorpus(fine_model, test_fine, options.beam_factor);
  result.acc_oo = TokenAccuracy(fine_predictions, test_fine);
  result.acc_ou = TokenAccuracy(fine_predictions, test_fine, &mapping);

  const TrigramHmm universal_model = TrigramHmm::Train(train_universal, options.hmm);
  result.acc_uu = Evaluate(universal_model, test_universal, nullptr, options.beam_factor);
  return result;
}

std::pair<Corpus, Corpus> SplitCorpus(const Corpus &corpus, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train fraction must lie in (0, 1)");
  }
  if (corpus.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "need at least two sentences to split");
  }
  auto cut = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(corpus.size())));
  cut = std::clamp<std::size_t>(cut, 1, corpus.size() - 1);
  Corpus train(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(cut));
  Corpus test(corpus.begin() + static_cast<std::ptrdiff_t>(cut), corpus.end());
  return {std::move(train), std::move(test)};
}

double SampleVariance(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "variance needs at least two values");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(values.size() - 1);
}

double PopulationVariance(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  return SampleVariance(values) * (n - 1.0) / n;
}

VarianceReport ComputeVariance(std::span<const ExperimentResult> results) {
  if (results.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "variance needs at least two treebanks");
  }
  // Accuracies are sorted before summation so the result does not depend on
  // the order of the rows.
  auto column = [&](double ExperimentResult::*field) {
    std::vector<double> values;
    for (const ExperimentResult &r : results) values.push_back(100.0 * (r.*field));
    std::sort(values.begin(), values.end());
    return SampleVariance(values);
  };
  // Sample variance, (n - 1) denominator. Of the two usual conventions it
  // is the one that matches reference numbers for 25 treebanks.
  return VarianceReport{column(&ExperimentResult::acc_oo), column(&ExperimentResult::acc_uu),
                        column(&ExperimentResult::acc_ou)};
}

void WriteReport(std::ostream &out, std::span<const ExperimentResult> results) {
  out << "treebank\ttags\tO/O\tU/U\tO/U\n";
  char buffer[32];
  auto pct = [&](double v) {
    std::snprintf(buffer, sizeof(buffer), "%.2f", 100.0 * v);
    return std::string(buffer);
  };
  for (const ExperimentResult &r : results) {
    out << r.treebank_id << '\t' << r.n_fine_tags << '\t' << pct(r.acc_oo) << '\t'
        << pct(r.acc_uu) << '\t' << pct(r.acc_ou) << '\n';
  }
}

std::vector<ExperimentResult> ReadReport(std::istream &in) {
  std::vector<ExperimentResult> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("treebank\t", 0) == 0) continue;
    std::istringstream fields(line);
    ExperimentResult r;
    std::string oo, uu, ou;
    if (!std::getline(fields, r.treebank_id, '\t') || !(fields >> r.n_fine_tags >> oo >> uu >> ou)) {
      throw Error(ErrorKind::kParse, "malformed report row", line_no);
    }
    try {
      r.acc_oo = std::stod(oo) / 100.0;
      r.acc_uu = std::stod(uu) / 100.0;
      r.acc_ou = std::stod(ou) / 100.0;
    } catch (const std::exception &) {
      throw Error(ErrorKind::kParse, "non-numeric accuracy", line_no);
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace unipos
