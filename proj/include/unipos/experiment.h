#ifndef UNIPOS_EXPERIMENT_H_
#define UNIPOS_EXPERIMENT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unipos/tag_mapping.h"
#include "unipos/treebank.h"
#include "unipos/trigram_hmm.h"

namespace unipos {

// One row of the tagset comparison: accuracies as fractions in [0, 1].
struct ExperimentResult {
  std::string treebank_id;
  int n_fine_tags = 0;
  double acc_oo = 0.0;  // train and test on fine tags
  double acc_uu = 0.0;  // train and test on universal tags
  double acc_ou = 0.0;  // train on fine tags, map both sides to universal
};

struct MatrixOptions {
  HmmOptions hmm;
  std::optional<double> beam_factor;
};

ExperimentResult RunMatrix(const Corpus &train, const Corpus &test,
                           const TagMapping &mapping,
                           const MatrixOptions &options = {});

// Contiguous split: the first `train_fraction` of the sentences train.
std::pair<Corpus, Corpus> SplitCorpus(const Corpus &corpus,
                                      double train_fraction = 0.9);

struct VarianceReport {
  double var_oo = 0.0;
  double var_uu = 0.0;
  double var_ou = 0.0;
};

// Variance of accuracy percentages across treebanks, with the (n - 1)
// denominator. Throws Error(kInsufficientData) for fewer than two results.
VarianceReport ComputeVariance(std::span<const ExperimentResult> results);

double SampleVariance(std::span<const double> values);
double PopulationVariance(std::span<const double> values);

// TSV with header `treebank  tags  O/O  U/U  O/U`; accuracies in percent.
void WriteReport(std::ostream &out, std::span<const ExperimentResult> results);
std::vector<ExperimentResult> ReadReport(std::istream &in);

}  // namespace unipos

#endif  // UNIPOS_EXPERIMENT_H_
