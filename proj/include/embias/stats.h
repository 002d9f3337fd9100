#ifndef EMBIAS_STATS_H_
#define EMBIAS_STATS_H_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "embias/error.h"

namespace embias {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double RegularizedIncompleteBeta(double a, double b, double x);

// Two-sided Student-t tail probability P(|T| > |t|) with `dof` degrees of
// freedom. Infinite |t| gives 0; NaN gives NaN.
double StudentTwoSidedP(double t, double dof);

// Upper quantile: the t with P(T > t) = upper_tail.
double StudentQuantile(double upper_tail, double dof);

// Upper tail of the F distribution, P(F > f).
double FisherUpperTail(double f, double dof1, double dof2);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

// Sample Pearson correlation with a two-sided t-test p-value. Requires equal
// lengths >= 3 and nonzero variance in both inputs.
PearsonResult Pearson(std::span<const double> x, std::span<const double> y);

struct OlsFit {
  std::vector<std::string> names;  // "const" first when an intercept is fit
  std::vector<double> coefs;
  std::vector<double> stderrs;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  std::vector<double> residuals;
  std::vector<double> fitted;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  double log_likelihood = 0.0;
  double sigma2 = 0.0;  // residual variance, SSR / dof
  std::size_t n = 0;
  std::size_t dof = 0;
  bool has_intercept = false;

  // Coefficient lookup by column name; throws DomainError when absent.
  std::size_t index(const std::string &name) const;
  double predict(std::span<const double> row) const;
};

// Ordinary least squares of `y` on the columns of `columns` (each the same
// length as y). Solved by column-pivoted Householder QR; classical standard
// errors. Requires n > #coefs and full column rank.
OlsFit Ols(std::span<const double> y,
           const std::vector<std::vector<double>> &columns,
           std::vector<std::string> names = {}, bool add_intercept = true);

// Text table shaped like the usual regression summary: header block, then
// coef / std err / t / P>|t| / 95% interval per coefficient.
void WriteOlsTable(const OlsFit &fit, const std::string &dependent,
                   std::ostream &out);
std::string OlsToJson(const OlsFit &fit, const std::string &dependent);

struct BootstrapResult {
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
};

// Deterministic 64-bit generator for resample `index` under `seed`. Each
// (seed, index) pair owns an independent stream so results do not depend on
// how resamples are spread over threads.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t index);
  std::uint64_t Next();
  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t Below(std::uint64_t bound);
  // Uniform double in [0, 1).
  double Uniform();

 private:
  std::uint64_t s_[4];
};

// Nearest-rank percentile interval over `stats` (sorted in place).
std::pair<double, double> PercentileInterval(std::vector<double> &stats,
                                             double level);

// Percentile bootstrap: resample `items` with replacement n_resamples times,
// evaluate `statistic` on each, take the nearest-rank (1-level)/2 and
// (1+level)/2 order statistics. Exceptions from `statistic` are rethrown
// tagged with the resample index.
template <typename T>
BootstrapResult BootstrapCi(
    const std::vector<T> &items,
    const std::function<double(const std::vector<T> &)> &statistic,
    std::size_t n_resamples = 1000, double level = 0.95,
    std::uint64_t seed = 0, unsigned threads = 0) {
  if (items.empty()) throw DomainError("bootstrap needs at least one item");
  if (n_resamples == 0) throw DomainError("bootstrap needs n_resamples >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("bootstrap level must lie in (0, 1)");
  }
  BootstrapResult result;
  result.point_estimate = statistic(items);
  result.n_resamples = n_resamples;
  result.seed = seed;
  result.level = level;

  std::vector<double> stats(n_resamples);
  std::vector<std::exception_ptr> errors(n_resamples);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<T> sample(items.size());
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng rng(seed, i);
      for (auto &slot : sample) slot = items[rng.Below(items.size())];
      try {
        stats[i] = statistic(sample);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, (n_resamples + 63) / 64));
  if (threads <= 1) {
    work(0, n_resamples);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_resamples + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(n_resamples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto &th : pool) th.join();
  }
  for (std::size_t i = 0; i < n_resamples; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception &e) {
      throw Error("bootstrap", "statistic failed on resample " +
                                   std::to_string(i) + ": " + e.what());
    }
  }
  std::tie(result.ci_low, result.ci_high) = PercentileInterval(stats, level);
  return result;
}

struct ResidualReport {
  std::vector<std::string> words;
  OlsFit joint;             // bias ~ crowd + logprop
  OlsFit bias_on_logprop;   // bias ~ logprop
  OlsFit crowd_on_logprop;  // crowd ~ logprop
  PearsonResult residual_correlation;
};

// Joint regression of bias on crowd scores and log proportions, plus the
// correlation between residuals of bias ~ logprop and crowd ~ logprop.
// Inputs are aligned per word; at least 10 words are required.
ResidualReport ResidualStereotypeAnalysis(std::vector<std::string> words,
                                          std::span<const double> bias,
                                          std::span<const double> crowd,
                                          std::span<const double> logprop);

}  // namespace embias

#endif  // EMBIAS_STATS_H_
