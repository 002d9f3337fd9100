#include "embias/stats.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

namespace embias {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double BetaContinuedFraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 0.5 * kEps) return h;
  }
  throw Error("numeric", "incomplete beta continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid
// cancellation when x is close to 1.
double IncompleteBeta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, y) / b;
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs x in [0,1]");
  return IncompleteBeta(a, b, x, 1.0 - x);
}

double StudentTwoSidedP(double t, double dof) {
  if (!(dof > 0.0)) throw DomainError("Student t needs dof > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = dof / (dof + t2);
  const double y = t2 / (dof + t2);
  return IncompleteBeta(0.5 * dof, 0.5, x, y);
}

double StudentQuantile(double upper_tail, double dof) {
  if (!(upper_tail > 0.0 && upper_tail < 1.0)) {
    throw DomainError("quantile tail must lie in (0,1)");
  }
  if (upper_tail == 0.5) return 0.0;
  if (upper_tail > 0.5) return -StudentQuantile(1.0 - upper_tail, dof);
  // P(T > t) = p/2 where p is the two-sided tail.
  const double target = 2.0 * upper_tail;
  double lo = 0.0, hi = 1.0;
  while (StudentTwoSidedP(hi, dof) > target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (StudentTwoSidedP(mid, dof) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double FisherUpperTail(double f, double dof1, double dof2) {
  if (!(dof1 > 0.0 && dof2 > 0.0)) throw DomainError("F needs dof > 0");
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double denom = dof2 + dof1 * f;
  return IncompleteBeta(0.5 * dof2, 0.5 * dof1, dof2 / denom, dof1 * f / denom);
}

PearsonResult Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DomainError("pearson: length mismatch (" + std::to_string(x.size()) +
                      " vs " + std::to_string(y.size()) + ")");
  }
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("pearson needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DomainError("pearson: zero variance in an input");
  }
  PearsonResult res;
  res.n = n;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double one_minus = 1.0 - res.r * res.r;
  if (one_minus <= 0.0) {
    res.p = 0.0;
  } else {
    const double t = res.r * std::sqrt((n - 2) / one_minus);
    res.p = StudentTwoSidedP(t, static_cast<double>(n - 2));
  }
  return res;
}

std::size_t OlsFit::index(const std::string &name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DomainError("no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double OlsFit::predict(std::span<const double> row) const {
  const std::size_t offset = has_intercept ? 1 : 0;
  if (row.size() + offset != coefs.size()) {
    throw DomainError("predict: expected " +
                      std::to_string(coefs.size() - offset) + " covariates");
  }
  double v = has_intercept ? coefs[0] : 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) v += coefs[i + offset] * row[i];
  return v;
}

OlsFit Ols(std::span<const double> y,
           const std::vector<std::vector<double>> &columns,
           std::vector<std::string> names, bool add_intercept) {
  const std::size_t n = y.size();
  const std::size_t p = columns.size() + (add_intercept ? 1 : 0);
  if (p == 0) throw DomainError("ols needs at least one coefficient");
  if (n <= p) {
    throw DomainError("ols needs more observations (" + std::to_string(n) +
                      ") than coefficients (" + std::to_string(p) + ")");
  }
  if (names.empty()) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      names.push_back("x" + std::to_string(j + 1));
    }
  }
  if (names.size() != columns.size()) {
    throw DomainError("ols: one name per design column required");
  }

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  std::size_t col = 0;
  if (add_intercept) X.col(col++).setOnes();
  for (const auto &c : columns) {
    if (c.size() != n) throw DomainError("ols: column length differs from y");
    for (std::size_t i = 0; i < n; ++i) X(i, col) = c[i];
    ++col;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw DomainError("ols: non-finite response");
    Y(i) = y[i];
  }
  if (!X.allFinite()) throw DomainError("ols: non-finite design value");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (static_cast<std::size_t>(qr.rank()) < p) {
    throw DomainError("ols: design matrix is rank deficient (rank " +
                      std::to_string(qr.rank()) + " < " + std::to_string(p) +
                      ")");
  }
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd fitted = X * beta;
  const Eigen::VectorXd resid = Y - fitted;

  const Eigen::MatrixXd R =
      qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = R.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  const auto &perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * cov_perm * perm.transpose();

  OlsFit fit;
  fit.n = n;
  fit.dof = n - p;
  fit.has_intercept = add_intercept;
  if (add_intercept) fit.names.push_back("const");
  for (auto &nm : names) fit.names.push_back(std::move(nm));

  const double ssr = resid.squaredNorm();
  fit.sigma2 = ssr / fit.dof;
  for (std::size_t j = 0; j < p; ++j) {
    const double se = std::sqrt(fit.sigma2 * xtx_inv(j, j));
    fit.coefs.push_back(beta(j));
    fit.stderrs.push_back(se);
    const double t = beta(j) / se;
    fit.t_stats.push_back(t);
    fit.p_values.push_back(StudentTwoSidedP(t, static_cast<double>(fit.dof)));
  }
  fit.residuals.assign(resid.data(), resid.data() + n);
  fit.fitted.assign(fitted.data(), fitted.data() + n);

  double sst;
  if (add_intercept) {
    sst = (Y.array() - Y.mean()).square().sum();
  } else {
    sst = Y.squaredNorm();
  }
  const double df_model = static_cast<double>(p - (add_intercept ? 1 : 0));
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
  fit.adj_r_squared =
      1.0 - (1.0 - fit.r_squared) * (n - (add_intercept ? 1.0 : 0.0)) / fit.dof;
  if (df_model > 0 && ssr > 0.0) {
    fit.f_statistic = ((sst - ssr) / df_model) / fit.sigma2;
    fit.f_p_value = FisherUpperTail(fit.f_statistic, df_model,
                                    static_cast<double>(fit.dof));
  } else {
    fit.f_statistic = std::numeric_limits<double>::infinity();
    fit.f_p_value = 0.0;
  }
  const double two_pi = 2.0 * 3.14159265358979323846;
  fit.log_likelihood = -0.5 * n * (std::log(two_pi) + std::log(ssr / n) + 1.0);
  return fit;
}

void WriteOlsTable(const OlsFit &fit, const std::string &dependent,
                   std::ostream &out) {
  const double k = static_cast<double>(fit.coefs.size());
  const double aic = -2.0 * fit.log_likelihood + 2.0 * k;
  const double bic = -2.0 * fit.log_likelihood + k * std::log(double(fit.n));
  const double tq = StudentQuantile(0.025, static_cast<double>(fit.dof));
  std::ostringstream s;
  s << std::left;
  auto kv = [&](const std::string &k1, const std::string &v1,
                const std::string &k2, const std::string &v2) {
    s << std::setw(20) << k1 << std::setw(30) << v1 << std::setw(22) << k2
      << v2 << '\n';
  };
  auto num = [](double v, int prec, bool sci = false) {
    std::ostringstream o;
    if (sci) o << std::scientific;
    else o << std::fixed;
    o << std::setprecision(prec) << v;
    return o.str();
  };
  const std::string rule(78, '=');
  s << rule << '\n';
  kv("Dep. Variable:", dependent, "R-squared:", num(fit.r_squared, 3));
  kv("Model:", "OLS", "Adj. R-squared:", num(fit.adj_r_squared, 3));
  kv("Method:", "Least Squares", "F-statistic:", num(fit.f_statistic, 2));
  kv("No. Observations:", std::to_string(fit.n), "Prob (F-statistic):",
     num(fit.f_p_value, 2, true));
  kv("Df Residuals:", std::to_string(fit.dof), "Log-Likelihood:",
     num(fit.log_likelihood, 3));
  kv("Df Model:",
     std::to_string(fit.coefs.size() - (fit.has_intercept ? 1 : 0)), "AIC:",
     num(aic, 1));
  kv("", "", "BIC:", num(bic, 1));
  s << rule << '\n';
  s << std::setw(28) << "" << std::right << std::setw(10) << "coef"
    << std::setw(10) << "std err" << std::setw(10) << "t" << std::setw(10)
    << "P>|t|" << std::setw(20) << "[95.0% Conf. Int.]" << '\n';
  s << std::string(78, '-') << '\n';
  for (std::size_t j = 0; j < fit.coefs.size(); ++j) {
    const double lo = fit.coefs[j] - tq * fit.stderrs[j];
    const double hi = fit.coefs[j] + tq * fit.stderrs[j];
    s << std::left << std::setw(28) << fit.names[j] << std::right
      << std::setw(10) << num(fit.coefs[j], 4) << std::setw(10)
      << num(fit.stderrs[j], 3) << std::setw(10) << num(fit.t_stats[j], 3)
      << std::setw(10) << num(fit.p_values[j], 3) << std::setw(10)
      << num(lo, 3) << std::setw(10) << num(hi, 3) << '\n';
  }
  s << rule << '\n';
  out << s.str();
}

std::string OlsToJson(const OlsFit &fit, const std::string &dependent) {
  const double tq = StudentQuantile(0.025, static_cast<double>(fit.dof));
  nlohmann::ordered_json j;
  j["dependent"] = dependent;
  j["n"] = fit.n;
  j["dof"] = fit.dof;
  j["r_squared"] = fit.r_squared;
  j["adj_r_squared"] = fit.adj_r_squared;
  j["f_statistic"] = fit.f_statistic;
  j["f_p_value"] = fit.f_p_value;
  j["log_likelihood"] = fit.log_likelihood;
  auto &coefs = j["coefficients"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fit.coefs.size(); ++i) {
    coefs.push_back({{"name", fit.names[i]},
                     {"coef", fit.coefs[i]},
                     {"std_err", fit.stderrs[i]},
                     {"t", fit.t_stats[i]},
                     {"p", fit.p_values[i]},
                     {"ci_low", fit.coefs[i] - tq * fit.stderrs[i]},
                     {"ci_high", fit.coefs[i] + tq * fit.stderrs[i]}});
  }
  return j.dump(2);
}

namespace {

std::uint64_t SplitMix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = seed;
  std::uint64_t b = index ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t state = SplitMix64(a) ^ Rotl(SplitMix64(b), 17);
  for (auto &word : s_) word = SplitMix64(state);
}

// xoshiro256**
std::uint64_t StreamRng::Next() {
  const std::uint64_t result = Rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = Rotl(s_[3], 45);
  return result;
}

std::uint64_t StreamRng::Below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("StreamRng::Below(0)");
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = Next();
    if (r >= limit) return r % bound;
  }
}

double StreamRng::Uniform() { return (Next() >> 11) * 0x1.0p-53; }

std::pair<double, double> PercentileInterval(std::vector<double> &stats,
                                             double level) {
  if (stats.empty()) throw DomainError("percentile interval of no values");
  std::sort(stats.begin(), stats.end());
  const double n = static_cast<double>(stats.size());
  auto rank = [&](double q) {
    // Nearest rank ceil(q * n), guarded against q * n landing a hair above
    // an integer through rounding.
    const double r = std::ceil(q * n - 1e-9);
    return static_cast<std::size_t>(std::clamp(r, 1.0, n)) - 1;
  };
  return {stats[rank((1.0 - level) / 2.0)], stats[rank((1.0 + level) / 2.0)]};
}

ResidualReport ResidualStereotypeAnalysis(std::vector<std::string> words,
                                          std::span<const double> bias,
                                          std::span<const double> crowd,
                                          std::span<const double> logprop) {
  const std::size_t n = words.size();
  if (bias.size() != n || crowd.size() != n || logprop.size() != n) {
    throw DomainError("residual analysis inputs must be aligned per word");
  }
  if (n < 10) {
    throw DomainError("residual analysis needs >= 10 words present in all "
                      "three inputs, got " + std::to_string(n));
  }
  ResidualReport report;
  report.words = std::move(words);
  const std::vector<double> crowd_v(crowd.begin(), crowd.end());
  const std::vector<double> logprop_v(logprop.begin(), logprop.end());
  report.joint = Ols(bias, {crowd_v, logprop_v}, {"crowd", "logprop"});
  report.bias_on_logprop = Ols(bias, {logprop_v}, {"logprop"});
  report.crowd_on_logprop = Ols(crowd, {logprop_v}, {"logprop"});
  report.residual_correlation = Pearson(report.bias_on_logprop.residuals,
                                        report.crowd_on_logprop.residuals);
  return report;
}

}  // namespace embias
