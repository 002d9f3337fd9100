#ifndef EMBIAS_TEMPORAL_H_
#define EMBIAS_TEMPORAL_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "embias/embedding.h"
#include "embias/metrics.h"
#include "embias/wordlist.h"

namespace embias {

struct TimePoint {
  int time = 0;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
};

struct TimeSeries {
  std::vector<TimePoint> points;
};

enum class Aggregate { kSum, kMean };

Aggregate ParseAggregateName(std::string_view name);
const char *AggregateName(Aggregate aggregate);

struct BootstrapOptions {
  std::size_t resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// One point per slice: the aggregate of per-word biases. `neutral` must be
// present in every slice (filter with RestrictToVocab(kAllSlices) first).
// With `bootstrap`, neutral words are resampled per slice for a percentile
// interval.
TimeSeries BiasSeries(const EmbeddingSeries &series, const WordList &neutral,
                      const WordList &g1, const WordList &g2, Metric metric,
                      Aggregate aggregate = Aggregate::kMean,
                      const std::optional<BootstrapOptions> &bootstrap = {});

struct CorrelationMatrix {
  std::vector<int> labels;
  std::vector<std::vector<double>> values;  // symmetric, unit diagonal
  std::vector<std::vector<std::size_t>> overlap;  // words used per pair
};

// Entry (i, j) is Pearson r between the per-word bias vectors of slices i and
// j over the neutral words present in both. Needs >= 2 slices.
CorrelationMatrix BiasCorrelationMatrix(const EmbeddingSeries &series,
                                        const WordList &neutral,
                                        const WordList &g1, const WordList &g2,
                                        Metric metric);

struct TrendResult {
  double slope = 0.0;
  double std_error = 0.0;
  double p = 1.0;
  // All values identical: slope 0 and p reported as 1.
  bool zero_variance = false;
};

// OLS of value on (time - mean time) with a two-sided t-test for the slope.
TrendResult TrendTest(const TimeSeries &ts);

struct RankPoint {
  int time = 0;
  std::optional<std::size_t> rank;  // 1 = most group-two-biased; empty if OOV
  std::size_t of = 0;               // neutral words ranked in this slice
};

std::vector<RankPoint> WordRankTrajectory(const EmbeddingSeries &series,
                                          const std::string &word,
                                          const WordList &neutral,
                                          const WordList &g1,
                                          const WordList &g2, Metric metric);

void WriteTimeSeriesCsv(const TimeSeries &ts,
                        const std::vector<std::pair<std::string, std::string>>
                            &metadata,
                        std::ostream &out);
void WriteCorrelationCsv(const CorrelationMatrix &m,
                         const std::vector<std::pair<std::string, std::string>>
                             &metadata,
                         std::ostream &out);
// Heatmap colored by a linear ramp between two colors (light at -1, dark at
// +1) with the value printed in each cell.
void WriteCorrelationSvg(const CorrelationMatrix &m, const std::string &title,
                         std::ostream &out);

}  // namespace embias

#endif  // EMBIAS_TEMPORAL_H_
