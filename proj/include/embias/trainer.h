#ifndef EMBIAS_TRAINER_H_
#define EMBIAS_TRAINER_H_

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "embias/embedding.h"

namespace embias {

struct DatedDocument {
  int year = 0;
  std::vector<std::string> tokens;
};

// Lines "YYYY<TAB>space separated tokens"; tokens are lowercased and empty
// documents are skipped.
std::vector<DatedDocument> ParseCorpus(std::istream &in);
// Either a corpus file as above, or a directory whose files are named by
// year (e.g. 1999.txt) with one document per line.
std::vector<DatedDocument> LoadCorpus(const std::filesystem::path &path);

struct CorpusSlice {
  int center = 0;
  std::vector<std::vector<std::string>> documents;
};

// Windows labelled by center year holding every document dated within
// [center - window/2, center + window/2] (integer division). Centers start at
// `first_center` (default: earliest year + window/2) and advance by `step`;
// slices with no documents are omitted.
std::vector<CorpusSlice> SliceCorpus(const std::vector<DatedDocument> &docs,
                                     int window_years, int step_years,
                                     std::optional<int> first_center = {});

struct CooccurrenceCounts {
  std::vector<std::string> vocab;          // sorted
  std::vector<std::int64_t> word_counts;   // token counts, parallel to vocab
  std::map<std::pair<int, int>, std::int64_t> pairs;  // symmetric
  std::int64_t total_pairs = 0;

  std::int64_t count(const std::string &a, const std::string &b) const;
};

// Symmetric, unweighted counts of word pairs within +/- window tokens of each
// other inside a document. Words seen fewer than min_count times are dropped
// first, without closing up the gaps they leave.
CooccurrenceCounts CountCooccurrences(
    const std::vector<std::vector<std::string>> &documents, int window,
    std::int64_t min_count = 1);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// max(0, log(P(w,c) / (P(w) * P_alpha(c)))) with marginals taken from the
// pair counts and the context marginal raised to alpha and renormalized.
SparseMatrix Ppmi(const CooccurrenceCounts &counts, double alpha = 0.75);

struct SvdFactors {
  Eigen::MatrixXd u;       // rows x k
  Eigen::VectorXd sigma;   // k, descending
  Eigen::MatrixXd v;       // cols x k
};

// Leading `k` singular triplets; each left singular vector's largest
// magnitude component is made positive (with v flipped to match).
SvdFactors TruncatedSvd(const Eigen::MatrixXd &m, int k);

// Rows U_k * sqrt(Sigma_k), l2-normalized. Words whose row is all zero are
// left out of the embedding.
Embedding SvdEmbed(const SparseMatrix &ppmi, const std::vector<std::string> &vocab,
                   int dim, std::string label = "");

struct TrainerParams {
  int dim = 100;
  int window = 4;
  std::int64_t min_count = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  double smoothing_alpha = 0.75;
  std::uint64_t seed = 1;
  int workers = 1;  // > 1 trains Hogwild-style and is not reproducible
};

struct SgnsResult {
  Embedding embedding;
  std::vector<double> epoch_loss;  // mean loss per (center, context) pair
};

// Skip-gram with negative sampling over the documents. Negatives follow the
// unigram distribution raised to smoothing_alpha; the learning rate decays
// linearly to zero; output vectors are l2-normalized.
SgnsResult TrainSgns(const std::vector<std::vector<std::string>> &documents,
                     const TrainerParams &params, std::string label = "");

}  // namespace embias

#endif  // EMBIAS_TRAINER_H_
