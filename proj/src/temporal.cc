#include "embias/temporal.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "embias/error.h"
#include "embias/stats.h"
#include "embias/text.h"

namespace embias {

Aggregate ParseAggregateName(std::string_view name) {
  if (name == "sum") return Aggregate::kSum;
  if (name == "mean") return Aggregate::kMean;
  throw DomainError("unknown aggregate '" + std::string(name) +
                    "' (expected sum or mean)");
}

const char *AggregateName(Aggregate aggregate) {
  return aggregate == Aggregate::kSum ? "sum" : "mean";
}

namespace {

double Reduce(const std::vector<double> &scores, Aggregate aggregate) {
  double sum = 0.0;
  for (double s : scores) sum += s;
  return aggregate == Aggregate::kSum ? sum : sum / scores.size();
}

}  // namespace

TimeSeries BiasSeries(const EmbeddingSeries &series, const WordList &neutral,
                      const WordList &g1, const WordList &g2, Metric metric,
                      Aggregate aggregate,
                      const std::optional<BootstrapOptions> &bootstrap) {
  if (series.empty()) throw DomainError("bias series needs at least one slice");
  TimeSeries ts;
  for (const auto &[time, emb] : series) {
    try {
      const auto rnd = ComputeRelativeNormDistance(emb, neutral, g1, g2, metric);
      if (!rnd.per_word.dropped.empty()) {
        throw DomainError("neutral word '" + rnd.per_word.dropped.front() +
                          "' missing; restrict the list to words present in "
                          "all slices first");
      }
      TimePoint point;
      point.time = time;
      point.value = aggregate == Aggregate::kSum ? rnd.sum : rnd.mean;
      if (bootstrap) {
        const auto scores = rnd.per_word.column();
        auto boot = BootstrapCi<double>(
            scores,
            [aggregate](const std::vector<double> &s) {
              return Reduce(s, aggregate);
            },
            bootstrap->resamples, bootstrap->level, bootstrap->seed);
        point.ci_low = boot.ci_low;
        point.ci_high = boot.ci_high;
      }
      ts.points.push_back(point);
    } catch (const Error &e) {
      throw Error(e.kind(), "slice " + std::to_string(time) + ": " + e.what());
    }
  }
  return ts;
}

CorrelationMatrix BiasCorrelationMatrix(const EmbeddingSeries &series,
                                        const WordList &neutral,
                                        const WordList &g1, const WordList &g2,
                                        Metric metric) {
  const std::size_t n = series.size();
  if (n < 2) throw DomainError("correlation matrix needs >= 2 slices");
  std::vector<std::unordered_map<std::string, double>> scores(n);
  for (std::size_t s = 0; s < n; ++s) {
    try {
      const auto rnd = ComputeRelativeNormDistance(series.embedding(s), neutral,
                                                   g1, g2, metric);
      for (const auto &row : rnd.per_word.rows) {
        scores[s].emplace(row.word, row.scores[0]);
      }
    } catch (const Error &e) {
      throw Error(e.kind(),
                  "slice " + std::to_string(series.time(s)) + ": " + e.what());
    }
  }
  CorrelationMatrix m;
  m.values.assign(n, std::vector<double>(n, 1.0));
  m.overlap.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    m.labels.push_back(series.time(i));
    m.overlap[i][i] = scores[i].size();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> x, y;
      for (const auto &word : neutral.words) {
        auto a = scores[i].find(word);
        auto b = scores[j].find(word);
        if (a == scores[i].end() || b == scores[j].end()) continue;
        x.push_back(a->second);
        y.push_back(b->second);
      }
      const std::string pair = "(" + std::to_string(series.time(i)) + ", " +
                               std::to_string(series.time(j)) + ")";
      if (x.size() < 3) {
        throw DomainError("slices " + pair + " share only " +
                          std::to_string(x.size()) + " neutral words");
      }
      double r;
      try {
        r = Pearson(x, y).r;
      } catch (const DomainError &e) {
        throw DomainError("slices " + pair + ": " + e.what());
      }
      m.values[i][j] = m.values[j][i] = r;
      m.overlap[i][j] = m.overlap[j][i] = x.size();
    }
  }
  return m;
}

TrendResult TrendTest(const TimeSeries &ts) {
  const std::size_t n = ts.points.size();
  if (n < 3) throw DomainError("trend test needs >= 3 points");
  TrendResult res;
  std::vector<double> t(n), v(n);
  double mean_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = ts.points[i].time;
    v[i] = ts.points[i].value;
    mean_t += t[i];
  }
  mean_t /= n;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) {
    res.zero_variance = true;
    return res;
  }
  for (double &x : t) x -= mean_t;
  const OlsFit fit = Ols(v, {t}, {"time"});
  res.slope = fit.coefs[1];
  res.std_error = fit.stderrs[1];
  res.p = fit.p_values[1];
  if (std::isnan(res.p)) res.p = 1.0;
  return res;
}

std::vector<RankPoint> WordRankTrajectory(const EmbeddingSeries &series,
                                          const std::string &word,
                                          const WordList &neutral,
                                          const WordList &g1,
                                          const WordList &g2, Metric metric) {
  if (std::find(neutral.words.begin(), neutral.words.end(), word) ==
      neutral.words.end()) {
    throw DomainError("'" + word + "' is not in neutral list '" +
                      neutral.name + "'");
  }
  std::vector<RankPoint> out;
  bool seen = false;
  for (const auto &[time, emb] : series) {
    RankPoint point;
    point.time = time;
    if (emb.contains(word)) {
      const auto rnd = ComputeRelativeNormDistance(emb, neutral, g1, g2, metric);
      const auto order = RankByBias(rnd.per_word, rnd.per_word.rows.size(),
                                    Direction::kHighest);
      point.of = order.size();
      auto it = std::find(order.begin(), order.end(), word);
      point.rank = static_cast<std::size_t>(it - order.begin()) + 1;
      seen = true;
    }
    out.push_back(point);
  }
  if (!seen) {
    throw DomainError("'" + word + "' is in no slice's vocabulary");
  }
  return out;
}

void WriteTimeSeriesCsv(const TimeSeries &ts,
                        const std::vector<std::pair<std::string, std::string>>
                            &metadata,
                        std::ostream &out) {
  for (const auto &[k, v] : metadata) out << "# " << k << ": " << v << '\n';
  out << "time,value,ci_low,ci_high\n";
  for (const auto &p : ts.points) {
    out << p.time << ',' << FormatDouble(p.value) << ','
        << (p.ci_low ? FormatDouble(*p.ci_low) : "") << ','
        << (p.ci_high ? FormatDouble(*p.ci_high) : "") << '\n';
  }
}

void WriteCorrelationCsv(const CorrelationMatrix &m,
                         const std::vector<std::pair<std::string, std::string>>
                             &metadata,
                         std::ostream &out) {
  for (const auto &[k, v] : metadata) out << "# " << k << ": " << v << '\n';
  out << "time";
  for (int label : m.labels) out << ',' << label;
  out << '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out << m.labels[i];
    for (double v : m.values[i]) out << ',' << FormatDouble(v);
    out << '\n';
  }
}

void WriteCorrelationSvg(const CorrelationMatrix &m, const std::string &title,
                         std::ostream &out) {
  const int cell = 48, margin = 60, top = 40;
  const int n = static_cast<int>(m.labels.size());
  const int width = margin + n * cell + 20;
  const int height = top + margin + n * cell;
  // Ramp endpoints: light yellow at -1, dark blue at +1.
  const int lo[3] = {255, 255, 204}, hi[3] = {37, 52, 148};
  auto color = [&](double v) {
    const double f = std::clamp((v + 1.0) / 2.0, 0.0, 1.0);
    std::ostringstream c;
    c << "rgb(";
    for (int k = 0; k < 3; ++k) {
      c << static_cast<int>(std::lround(lo[k] + f * (hi[k] - lo[k])))
        << (k < 2 ? "," : ")");
    }
    return c.str();
  };
  auto escape = [](const std::string &s) {
    std::string o;
    for (char ch : s) {
      switch (ch) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '"': o += "&quot;"; break;
        default: o.push_back(ch);
      }
    }
    return o;
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"14\">"
      << escape(title) << "</text>\n";
  for (int i = 0; i < n; ++i) {
    const int y = top + i * cell;
    out << "<text x=\"" << margin - 6 << "\" y=\"" << y + cell / 2 + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << m.labels[i]
        << "</text>\n";
    for (int j = 0; j < n; ++j) {
      const int x = margin + j * cell;
      const double v = m.values[i][j];
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << color(v)
          << "\" stroke=\"white\"/>\n";
      std::ostringstream txt;
      txt << std::fixed << std::setprecision(2) << v;
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\" font-size=\"11\" fill=\""
          << (v > 0.2 ? "white" : "black") << "\">" << txt.str()
          << "</text>\n";
    }
  }
  for (int j = 0; j < n; ++j) {
    out << "<text x=\"" << margin + j * cell + cell / 2 << "\" y=\""
        << top + n * cell + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << m.labels[j] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace embias
