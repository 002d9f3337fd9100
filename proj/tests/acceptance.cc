// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance --offline   criteria 1-6, no external data
//   acceptance --data      criteria 7-11, reads $EMBIAS_DATA_DIR
//
// Exit status is 1 if anything failed, 77 if every criterion run was skipped,
// 0 otherwise.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "embias/embedding.h"
#include "embias/error.h"
#include "embias/external.h"
#include "embias/metrics.h"
#include "embias/stats.h"
#include "embias/temporal.h"
#include "embias/text.h"
#include "embias/trainer.h"
#include "embias/wordlist.h"
#include "fixtures.h"
#include "oracle.h"
#include "published_lists.h"
#include "t_reference.h"

namespace fs = std::filesystem;
using namespace embias;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

// Collects failed checks; the first few messages become the detail line.
class Checker {
 public:
  void Check(bool ok, const std::string &what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (failures_ <= 3) messages_.push_back(what);
    }
  }
  void Near(double got, double want, double tol, const std::string &what) {
    Check(std::abs(got - want) <= tol,
          what + " = " + FormatDouble(got) + ", want " + FormatDouble(want) + " +/- " +
              FormatDouble(tol));
  }
  Outcome Result(const std::string &summary) const {
    if (failures_ == 0) return {Status::kPass, summary};
    std::string d = std::to_string(failures_) + " of " + std::to_string(checks_) + " checks failed";
    for (const auto &m : messages_) d += "; " + m;
    return {Status::kFail, d};
  }

 private:
  int checks_ = 0, failures_ = 0;
  std::vector<std::string> messages_;
};

Vector Row(const Embedding &e, const std::string &w) {
  auto v = e.vector(w);
  return {v.begin(), v.end()};
}

Vector OracleGroup(const Embedding &e, const WordList &g) {
  std::vector<Vector> members;
  for (const auto &w : g.words) {
    if (e.contains(w)) members.push_back(Row(e, w));
  }
  return oracle::Mean(members);
}

// ---------------------------------------------------------------- offline

Outcome OracleEquivalence() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> nwords(3, 6), ndim(1, 4);
  std::normal_distribution<double> normal;
  Checker c;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nwords(gen), dim = ndim(gen);
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (auto &x : v) x = normal(gen);
      rows.push_back({"w" + std::to_string(i), v});
    }
    const Embedding e = fixtures::Make(rows);
    std::vector<std::string> words;
    for (const auto &r : rows) words.push_back(r.first);
    std::shuffle(words.begin(), words.end(), gen);
    // three nonempty groups (possibly overlapping) and the rest neutral
    const WordList g1 = fixtures::List("a", {words[0]});
    const WordList g2 = fixtures::List("b", {words[1], words[n - 1]});
    const WordList g3 = fixtures::List("c", {words[2 % n], words[0]});
    const WordList neutral =
        fixtures::List("n", std::vector<std::string>(words.begin(), words.end()));
    const Vector v1 = OracleGroup(e, g1), v2 = OracleGroup(e, g2), v3 = OracleGroup(e, g3);

    for (Metric m : {Metric::kNorm, Metric::kCosine}) {
      const auto rnd = ComputeRelativeNormDistance(e, neutral, g1, g2, m);
      double sum = 0;
      for (const auto &w : neutral.words) {
        const double want = m == Metric::kNorm ? oracle::NormBias(Row(e, w), v1, v2)
                                               : oracle::CosineBias(Row(e, w), v1, v2);
        sum += want;
        c.Near(WordBias(e, w, MakeGroupVector(e, g1), MakeGroupVector(e, g2), m), want, 1e-12,
               "word_bias trial " + std::to_string(trial));
      }
      c.Near(rnd.sum, sum, 1e-12, "relative_norm_distance trial " + std::to_string(trial));
    }
    const auto three = ThreeWayBias(e, neutral, {g1, g2, g3});
    for (const auto &row : three.rows) {
      const Vector w = Row(e, row.word);
      c.Near(row.scores[0], oracle::ThreeWay(w, v1, v2, v3), 1e-12, "three_way");
      c.Near(row.scores[1], oracle::ThreeWay(w, v2, v1, v3), 1e-12, "three_way");
      c.Near(row.scores[2], oracle::ThreeWay(w, v3, v1, v2), 1e-12, "three_way");
    }
  }
  return c.Result("200 random embeddings agree with brute force to 1e-12");
}

Outcome MetricLaws() {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  Checker c;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({"w" + std::to_string(i),
                                                {normal(gen), normal(gen), normal(gen)}});
    const Embedding e = fixtures::Make(rows);
    const auto g1 = MakeGroupVector(e, fixtures::List("a", {"w0", "w1"}));
    const auto g2 = MakeGroupVector(e, fixtures::List("b", {"w2"}));
    for (Metric m : {Metric::kNorm, Metric::kCosine}) {
      for (const char *w : {"w3", "w4", "w5"}) {
        const double ab = WordBias(e, w, g1, g2, m), ba = WordBias(e, w, g2, g1, m);
        c.Check(std::abs(ab + ba) <= 1e-12, "antisymmetry");
        c.Check(WordBias(e, w, g1, g1, m) == 0.0, "identical groups give zero");
      }
    }
  }
  // correlation matrix over three random slices
  std::vector<EmbeddingSeries::Entry> slices;
  for (int t = 0; t < 3; ++t) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({"w" + std::to_string(i), {normal(gen), normal(gen)}});
    slices.emplace_back(1900 + 10 * t, fixtures::Make(rows));
  }
  const EmbeddingSeries series(std::move(slices));
  const auto m = BiasCorrelationMatrix(
      series, fixtures::List("n", {"w2", "w3", "w4", "w5", "w6", "w7"}),
      fixtures::List("a", {"w0"}), fixtures::List("b", {"w1"}), Metric::kNorm);
  for (std::size_t i = 0; i < 3; ++i) {
    c.Check(m.values[i][i] == 1.0, "unit diagonal");
    for (std::size_t j = 0; j < 3; ++j) {
      c.Check(std::abs(m.values[i][j] - m.values[j][i]) <= 1e-12, "symmetry");
    }
  }
  for (double p = 0.01; p < 1.0; p += 0.01) {
    c.Check(std::abs(LogProp(p) + LogProp(1.0 - p)) <= 1e-12, "log_prop oddness");
    c.Check(CondLogProp(100 * p, 37.0) == -CondLogProp(37.0, 100 * p),
            "cond_log_prop antisymmetry");
  }
  return c.Result("antisymmetry, identical groups, matrix symmetry, log_prop laws");
}

Outcome OlsOracle() {
  Checker c;
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(25), y(25);
    for (int i = 0; i < 25; ++i) {
      x[i] = normal(gen);
      y[i] = 1.5 - 0.7 * x[i] + normal(gen);
    }
    const auto fit = Ols(y, {x});
    const auto ref = oracle::SimpleOls(x, y);
    c.Near(fit.coefs[1], ref.slope, 1e-10, "slope");
    c.Near(fit.coefs[0], ref.intercept, 1e-10, "intercept");
    c.Near(fit.stderrs[1], ref.slope_se, 1e-10, "slope se");
    c.Near(fit.stderrs[0], ref.intercept_se, 1e-10, "intercept se");
    c.Near(fit.r_squared, ref.r2, 1e-10, "r2");
  }
  TimeSeries line;
  for (int t = 1900; t <= 1990; t += 10) line.points.push_back({t, 2.0 * t, {}, {}});
  const auto trend = TrendTest(line);
  c.Near(trend.slope, 2.0, 1e-12, "trend slope");
  const auto fit = Ols(std::vector<double>{3800, 3820, 3840, 3860},
                       {std::vector<double>{1900, 1910, 1920, 1930}});
  for (double r : fit.residuals) c.Check(std::abs(r) <= 1e-9, "exact-line residual");

  int rows = 0;
  for (const auto &row : tref::kTwoSided) {
    if (row.dof != 5 && row.dof != 64 && row.dof != 621) continue;
    ++rows;
    const double p = StudentTwoSidedP(row.t, row.dof);
    c.Check(std::abs(p - row.p) / row.p <= 1e-8,
            "t p-value at dof " + FormatDouble(row.dof) + " t " + FormatDouble(row.t));
  }
  c.Check(rows >= 6, "reference table covers dof 5, 64, 621");
  return c.Result("closed form to 1e-10, exact-line trend, " + std::to_string(rows) +
                  " t-table rows to 1e-8 relative");
}

Outcome BootstrapDeterminism() {
  Checker c;
  std::vector<double> items;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 40; ++i) items.push_back(normal(gen));
  auto mean = [](const std::vector<double> &v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const auto a = BootstrapCi<double>(items, mean, 1000, 0.95, 99, 1);
  const auto b = BootstrapCi<double>(items, mean, 1000, 0.95, 99, 4);
  const auto again = BootstrapCi<double>(items, mean, 1000, 0.95, 99);
  c.Check(a.ci_low == b.ci_low && a.ci_high == b.ci_high, "thread count changes interval");
  c.Check(a.ci_low == again.ci_low && a.ci_high == again.ci_high, "rerun changes interval");
  c.Check(a.ci_low < a.ci_high, "nondegenerate interval");
  const auto k = BootstrapCi<double>(items, [](const auto &) { return 0.25; }, 500, 0.9, 3);
  c.Check(k.ci_low == 0.25 && k.ci_high == 0.25, "constant statistic has zero width");
  return c.Result("same seed gives bit-identical intervals; constant statistic zero width");
}

Outcome Trainer() {
  Checker c;
  CooccurrenceCounts toy;
  toy.vocab = {"a", "b"};
  toy.word_counts = {4, 4};
  toy.pairs = {{{0, 1}, 4}, {{1, 0}, 4}};
  toy.total_pairs = 8;
  const auto m = Ppmi(toy, 1.0);
  c.Check(m.coeff(0, 1) == std::log(2.0), "PPMI toy value is log 2");

  const auto he = fixtures::List("he", fixtures::kHeWords);
  const auto she = fixtures::List("she", fixtures::kSheWords);
  auto nurse_bias = [&](const Embedding &e) {
    return WordBias(e, "nurse", MakeGroupVector(e, he), MakeGroupVector(e, she), Metric::kNorm);
  };
  TrainerParams p;
  p.dim = 20;
  p.window = 2;
  p.min_count = 1;
  p.epochs = 5;
  int positive = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    p.seed = seed;
    positive += nurse_bias(TrainSgns(fixtures::PlantedCorpus(static_cast<unsigned>(seed)), p)
                               .embedding) > 0;
  }
  c.Check(positive >= 19, "SGNS recovered the planted bias in " + std::to_string(positive) + "/20 seeds");

  const auto counts = CountCooccurrences(fixtures::PlantedCorpus(1), 2);
  const auto svd1 = SvdEmbed(Ppmi(counts), counts.vocab, 10);
  const auto svd2 = SvdEmbed(Ppmi(counts), counts.vocab, 10);
  c.Check(svd1 == svd2, "PPMI-SVD is deterministic");
  c.Check(nurse_bias(svd1) > 0, "PPMI-SVD recovers the planted bias");

  // round trip; float-representable values so the binary format is exact
  std::mt19937_64 gen(3);
  std::normal_distribution<float> normal;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> v(7);
    for (auto &x : v) x = normal(gen);
    rows.push_back({"tok" + std::to_string(i), v});
  }
  const Embedding e = fixtures::Make(rows, "rt");
  for (auto f : {EmbeddingFormat::kWord2VecText, EmbeddingFormat::kWord2VecBinary,
                 EmbeddingFormat::kGloveText}) {
    std::stringstream buf;
    WriteEmbedding(e, f, buf);
    const Embedding back = ParseEmbedding(f, buf, "rt");
    std::stringstream again;
    WriteEmbedding(back, f, again);
    c.Check(back == e, std::string("parse(write(e)) == e for ") + FormatName(f));
    c.Check(again.str() == buf.str(), std::string("write is stable for ") + FormatName(f));
  }
  return c.Result("PPMI log 2 exact; SGNS " + std::to_string(positive) +
                  "/20 seeds; SVD deterministic and positive; round trips exact");
}

Outcome GoldenLists() {
  Checker c;
  int n = 0;
  for (const auto &entry : published::kLists) {
    ++n;
    std::vector<std::string> words, repeats;
    std::set<std::string> seen;
    for (auto piece : Split(entry.text, ',')) {
      const std::string w(Trim(piece));
      (seen.insert(w).second ? words : repeats).push_back(w);
    }
    std::string expected;
    if (!repeats.empty()) {
      expected = "# repeated entries in the source list dropped: ";
      for (std::size_t i = 0; i < repeats.size(); ++i) expected += (i ? ", " : "") + repeats[i];
      expected += "\n";
    }
    for (const auto &w : words) expected += w + "\n";
    std::ifstream in(FixtureDir() / "wordlists" / (std::string(entry.fixture) + ".txt"),
                     std::ios::binary);
    std::stringstream actual;
    actual << in.rdbuf();
    c.Check(in.good() || in.eof(), std::string("missing fixture ") + entry.fixture);
    c.Check(actual.str() == expected, std::string("fixture differs: ") + entry.fixture);
  }
  return c.Result(std::to_string(n) + " bundled lists byte-match the published lists");
}

// ------------------------------------------------------------------- data

struct Data {
  fs::path dir;
  std::optional<Embedding> googlenews;
  std::optional<EmbeddingSeries> coha;
  std::optional<OccupationTable> census;
};

WordList Bundled(const std::string &name) { return ResolveWordList(name); }

Outcome Missing(const std::string &what) {
  return {Status::kSkip, "needs " + what + " under $EMBIAS_DATA_DIR"};
}

// Women log proportion in `year` regressed on man/woman bias.
OlsFit GenderFit(const Embedding &e, const OccupationTable &census, int year,
                 const WordList &neutral) {
  const auto rnd =
      ComputeRelativeNormDistance(e, neutral, Bundled("man"), Bundled("woman"), Metric::kNorm);
  const auto joined = JoinBiasExternal(rnd.per_word, census.LogProps(year, "women"));
  return FitScaleAlignment(joined.pairs);
}

int LatestYear(const OccupationTable &census) { return *census.years().rbegin(); }

Outcome GoogleNewsRegression(const Data &d) {
  if (!d.googlenews) return Missing("googlenews.bin");
  if (!d.census) return Missing("census.csv");
  const int year = LatestYear(*d.census);
  const auto fit = GenderFit(*d.googlenews, *d.census, year, Bundled("occupations"));
  Checker c;
  c.Near(fit.coefs[1], 19.08, 1.0, "slope");
  c.Near(fit.r_squared, 0.462, 0.03, "r2");
  c.Check(fit.f_p_value < 1e-8, "p = " + FormatDouble(fit.f_p_value));
  return c.Result("census " + std::to_string(year) + ", n " + std::to_string(fit.n) +
                  ", slope " + FormatDouble(fit.coefs[1]) + ", r2 " +
                  FormatDouble(fit.r_squared) + ", p " + FormatDouble(fit.f_p_value));
}

Outcome ProfessionalSubset(const Data &d) {
  if (!d.googlenews) return Missing("googlenews.bin");
  if (!d.census) return Missing("census.csv");
  const auto fit = GenderFit(*d.googlenews, *d.census, LatestYear(*d.census),
                             Bundled("professional_occupations"));
  Checker c;
  c.Near(fit.r_squared, 0.548, 0.05, "r2");
  c.Check(fit.f_p_value < 1e-4, "p = " + FormatDouble(fit.f_p_value));
  return c.Result("n " + std::to_string(fit.n) + ", r2 " + FormatDouble(fit.r_squared) +
                  ", p " + FormatDouble(fit.f_p_value));
}

Outcome MetricAgreementRows(const Data &d) {
  if (!d.googlenews) return Missing("googlenews.bin");
  struct RowSpec {
    const char *neutral, *g1, *g2;
    double target;
  };
  const RowSpec rows[] = {{"occupations", "man", "woman", 0.998},
                          {"adjectives", "man", "woman", 0.998},
                          {"occupations", "white_surnames", "asian_surnames", 0.973},
                          {"adjectives", "white_surnames", "asian_surnames", 0.993}};
  Checker c;
  std::string summary;
  for (const auto &r : rows) {
    const double got =
        MetricAgreement(*d.googlenews, Bundled(r.neutral), Bundled(r.g1), Bundled(r.g2));
    const std::string label = std::string(r.neutral) + " " + r.g1 + "/" + r.g2;
    c.Check(got >= 0.95, label + " below 0.95");
    c.Near(got, r.target, 0.01, label);
    summary += (summary.empty() ? "" : ", ") + label + " " + FormatDouble(got);
  }
  return c.Result(summary);
}

Outcome CohaPooled(const Data &d) {
  if (!d.coha) return Missing("coha/manifest.tsv");
  if (!d.census) return Missing("census.csv");
  const WordList occ = Bundled("occupations");
  std::vector<JoinedPair> pairs;
  const auto years = d.census->years();
  for (const auto &[time, e] : *d.coha) {
    if (!years.contains(time)) continue;
    const auto rnd =
        ComputeRelativeNormDistance(e, occ, Bundled("man"), Bundled("woman"), Metric::kNorm);
    const auto j = JoinBiasExternal(rnd.per_word, d.census->LogProps(time, "women"));
    pairs.insert(pairs.end(), j.pairs.begin(), j.pairs.end());
  }
  const auto fit = FitScaleAlignment(pairs);
  const double share = BiasToProportion(fit, -0.05);
  Checker c;
  c.Near(fit.coefs[1], 36.0, 2.0, "slope");
  c.Near(fit.r_squared, 0.235, 0.03, "r2");
  c.Near(share, 0.12, 0.03, "proportion at bias -0.05");
  return c.Result("n " + std::to_string(fit.n) + ", slope " + FormatDouble(fit.coefs[1]) +
                  ", r2 " + FormatDouble(fit.r_squared) + ", bias -0.05 -> " +
                  FormatDouble(100 * share) + "%");
}

Outcome CohaQualitative(const Data &d) {
  if (!d.coha) return Missing("coha/manifest.tsv");
  const auto &series = *d.coha;
  const WordList man = Bundled("man"), woman = Bundled("woman");
  Checker c;

  const WordList occ = Bundled("occupations");
  for (const auto &[time, e] : series) {
    const auto rnd = ComputeRelativeNormDistance(e, occ, man, woman, Metric::kNorm);
    const auto top = RankByBias(rnd.per_word, 1, Direction::kHighest);
    c.Check(!top.empty() && top[0] == "nurse",
            "top woman occupation in " + std::to_string(time) + " is " +
                (top.empty() ? "none" : top[0]));
  }

  const WordList adjectives = RestrictToVocab(Bundled("adjectives"), series,
                                              VocabPolicy::kAnySlice).list;
  const auto traj = WordRankTrajectory(series, "hysterical", adjectives, man, woman, Metric::kNorm);
  std::optional<std::size_t> r1920, r1990;
  for (const auto &p : traj) {
    if (p.time == 1920) r1920 = p.rank;
    if (p.time == 1990) r1990 = p.rank;
  }
  c.Check(r1920 && *r1920 <= 5, "hysterical 1920 rank " + (r1920 ? std::to_string(*r1920) : "n/a"));
  c.Check(r1990 && *r1990 > 100, "hysterical 1990 rank " + (r1990 ? std::to_string(*r1990) : "n/a"));

  const auto m = BiasCorrelationMatrix(series, adjectives, man, woman, Metric::kNorm);
  double within = 0, cross = NAN;
  int n_within = 0;
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < m.labels.size(); ++j) {
      const bool early_i = m.labels[i] <= 1960, early_j = m.labels[j] <= 1960;
      if (early_i == early_j) {
        within += m.values[i][j];
        ++n_within;
      }
      if (m.labels[i] == 1960 && m.labels[j] == 1970) cross = m.values[i][j];
    }
  }
  within /= std::max(1, n_within);
  c.Check(!std::isnan(cross) && cross < within,
          "corr(1960,1970) " + FormatDouble(cross) + " vs within-block " + FormatDouble(within));

  const WordList intel = RestrictToVocab(Bundled("intelligence_adjectives"), series,
                                         VocabPolicy::kAllSlices).list;
  const auto trend = TrendTest(BiasSeries(series, intel, man, woman, Metric::kNorm));
  c.Check(trend.slope > 0 && trend.p < 0.01,
          "intelligence trend slope " + FormatDouble(trend.slope) + " p " + FormatDouble(trend.p));
  return c.Result("nurse tops every decade; hysterical 1920 rank " +
                  (r1920 ? std::to_string(*r1920) : "n/a") + ", 1990 rank " +
                  (r1990 ? std::to_string(*r1990) : "n/a") + "; corr(1960,1970) " +
                  FormatDouble(cross) + " < " + FormatDouble(within) +
                  "; intelligence trend p " + FormatDouble(trend.p));
}

// ------------------------------------------------------------------ driver

using Criterion = std::function<Outcome()>;

struct Tally {
  int pass = 0, fail = 0, skip = 0;
};

void Report(int id, const std::string &name, const Criterion &fn, Tally &t) {
  Outcome o;
  try {
    o = fn();
  } catch (const Error &e) {
    o = {Status::kFail, e.kind() + ": " + e.what()};
  } catch (const std::exception &e) {
    o = {Status::kFail, e.what()};
  }
  const char *tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
  (o.status == Status::kPass ? t.pass : o.status == Status::kFail ? t.fail : t.skip)++;
  std::cout << tag << ' ' << id << ' ' << name << ": " << o.detail << std::endl;
}

}  // namespace

int main(int argc, char **argv) {
  bool offline = true, data = true;
  if (argc > 1) {
    const std::string mode = argv[1];
    offline = mode == "--offline";
    data = mode == "--data";
    if (!offline && !data) {
      std::cerr << "usage: acceptance [--offline | --data]\n";
      return 2;
    }
  }
  Tally t;
  if (offline) {
    Report(1, "oracle equivalence", OracleEquivalence, t);
    Report(2, "metric laws", MetricLaws, t);
    Report(3, "OLS oracle", OlsOracle, t);
    Report(4, "bootstrap determinism", BootstrapDeterminism, t);
    Report(5, "trainer", Trainer, t);
    Report(6, "golden word lists", GoldenLists, t);
  }
  if (data) {
    Data d;
    const char *env = std::getenv("EMBIAS_DATA_DIR");
    if (env && *env) d.dir = env;
    auto load = [&](const char *what, auto fn) {
      try {
        fn();
      } catch (const Error &e) {
        std::cerr << "loading " << what << ": " << e.kind() << ": " << e.what() << "\n";
      }
    };
    if (!d.dir.empty()) {
      if (fs::exists(d.dir / "googlenews.bin")) {
        load("googlenews.bin", [&] {
          d.googlenews = Normalize(ReadEmbeddingFile(EmbeddingFormat::kWord2VecBinary,
                                                     d.dir / "googlenews.bin", "googlenews"));
        });
      }
      if (fs::exists(d.dir / "coha" / "manifest.tsv")) {
        load("coha", [&] { d.coha = LoadSeries(ReadManifestFile(d.dir / "coha" / "manifest.tsv")); });
      }
      if (fs::exists(d.dir / "census.csv")) {
        load("census.csv", [&] { d.census = LoadOccupationTable(d.dir / "census.csv"); });
      }
    }
    Report(7, "Google News gender regression", [&] { return GoogleNewsRegression(d); }, t);
    Report(8, "professional occupations", [&] { return ProfessionalSubset(d); }, t);
    Report(9, "metric agreement", [&] { return MetricAgreementRows(d); }, t);
    Report(10, "COHA pooled model", [&] { return CohaPooled(d); }, t);
    Report(11, "COHA qualitative golds", [&] { return CohaQualitative(d); }, t);
  }
  std::cout << t.pass << " passed, " << t.fail << " failed, " << t.skip << " skipped\n";
  if (t.fail > 0) return 1;
  if (t.pass == 0 && t.skip > 0) return 77;
  return 0;
}
