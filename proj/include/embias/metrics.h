#ifndef EMBIAS_METRICS_H_
#define EMBIAS_METRICS_H_

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "embias/embedding.h"
#include "embias/wordlist.h"

namespace embias {

// Sign convention used everywhere: a positive score means the word sits
// closer to group two than to group one.
enum class Metric { kNorm, kCosine };

Metric ParseMetricName(std::string_view name);
const char *MetricName(Metric metric);

// Component-wise mean of the group's in-vocabulary members. Deliberately not
// renormalized.
struct GroupVector {
  std::string name;
  Vector vector;
  std::vector<std::string> members;  // words that contributed
  std::vector<std::string> missing;  // words absent from the embedding
};

GroupVector MakeGroupVector(const Embedding &emb, const WordList &group);

// Norm metric: |w - v1| - |w - v2|. Cosine metric: w.v2 - w.v1.
double WordBias(std::span<const double> w, const GroupVector &g1,
                const GroupVector &g2, Metric metric);
// Throws DomainError if `word` is out of vocabulary.
double WordBias(const Embedding &emb, std::string_view word,
                const GroupVector &g1, const GroupVector &g2, Metric metric);

struct BiasRow {
  std::string word;
  std::vector<double> scores;  // one per group for three-way tables
};

struct BiasTable {
  Metric metric = Metric::kNorm;
  std::vector<std::string> groups;  // two or three group names
  std::string embedding_label;
  std::vector<BiasRow> rows;
  std::vector<std::string> dropped;  // neutral words absent from the embedding

  std::vector<std::string> words() const;
  std::vector<double> column(std::size_t group = 0) const;
};

struct RelativeNormDistance {
  double sum = 0.0;   // literal sum over present neutral words
  double mean = 0.0;  // sum / count
  BiasTable per_word;
};

// Sums per-word bias over the neutral words present in `emb`, accumulating
// in list order. Throws when no neutral word is present.
RelativeNormDistance ComputeRelativeNormDistance(const Embedding &emb,
                                                 const WordList &neutral,
                                                 const WordList &g1,
                                                 const WordList &g2,
                                                 Metric metric);

// Per word w and group i: 0.5 * (|w - v_j| + |w - v_k|) - |w - v_i|.
// Higher means more associated with group i.
BiasTable ThreeWayBias(const Embedding &emb, const WordList &neutral,
                       const std::array<WordList, 3> &groups);

enum class Direction {
  kHighest,  // most positive first (group two, or group i for three-way)
  kLowest,   // most negative first (group one)
};

// Top-k words of `column` in the requested direction; ties by word.
std::vector<std::string> RankByBias(const BiasTable &table, std::size_t k,
                                    Direction direction,
                                    std::size_t column = 0);

// Pearson r between per-word norm and cosine scores over the neutral words
// present in `emb`. Needs >= 3 such words.
double MetricAgreement(const Embedding &emb, const WordList &neutral,
                       const WordList &g1, const WordList &g2);

// Mean over dimensions of the variance of group members' coordinates; a
// rough indicator of how stable a group's average vector is.
double GroupDimensionVariance(const Embedding &emb, const WordList &group);

// CSV "word,score[,score_g2,score_g3]" preceded by '#' metadata lines.
void WriteBiasTableCsv(const BiasTable &table,
                       const std::vector<std::pair<std::string, std::string>>
                           &extra_metadata,
                       std::ostream &out);

}  // namespace embias

#endif  // EMBIAS_METRICS_H_
