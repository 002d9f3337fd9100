// embias: command-line front end for the embedding bias toolkit.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "embias/embedding.h"
#include "embias/error.h"
#include "embias/external.h"
#include "embias/metrics.h"
#include "embias/stats.h"
#include "embias/temporal.h"
#include "embias/text.h"
#include "embias/trainer.h"
#include "embias/wordlist.h"
#include "json.hpp"
#include "provenance.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace embias::cli {
namespace {

struct Options {
  std::string emb, emb_format, manifest;
  std::string neutral, g1, g2, g3;
  std::string metric = "norm", agg = "mean";
  std::string out, format = "csv";
  std::uint64_t seed = 0;
  std::size_t bootstrap = 0;
  std::size_t k = 10;

  // regress / residuals
  std::string census, group = "women", group2, stereo, crowd;
  int census_year = 0, survey_year = 0;
  std::vector<std::string> exclude;
  std::vector<double> prob_at;

  // trajectory
  std::string word;

  // names
  std::string surnames, ethnicity, frequencies;
  std::size_t pool = 50;
  long long max_rank = 5000;
  double min_per_slice = 0.0;

  // diag
  std::vector<std::string> lists;

  // train
  std::string corpus, method = "svd", emit_format = "word2vec-text";
  int window_years = 3, step_years = 0, first_center = 0;
  TrainerParams params;
};

// Provenance plus the format check shared by every subcommand.
class Run {
 public:
  Run(int argc, char **argv, const std::string &sub, const Options &o)
      : prov(argc, argv, sub), opt(o) {}

  Provenance prov;
  const Options &opt;

  void RequireFormat(std::initializer_list<const char *> allowed) const {
    for (const char *f : allowed) {
      if (opt.format == f) return;
    }
    std::string list;
    for (const char *f : allowed) list += std::string(list.empty() ? "" : ", ") + f;
    throw Error("usage", "--format must be one of: " + list);
  }

  std::string CsvHeader() const {
    std::string out;
    for (const auto &[k, v] : prov.entries()) out += "# " + k + ": " + v + "\n";
    return out;
  }

  void Emit(const std::string &content) const { WriteOutput(opt.out, content); }

  void EmitJson(json body) const {
    json doc;
    doc["provenance"] = prov.ToJson();
    for (auto &[k, v] : body.items()) doc[k] = v;
    Emit(doc.dump(2) + "\n");
  }
};

fs::path ListPath(const std::string &spec) {
  if (fs::is_regular_file(spec)) return spec;
  return FixtureDir() / "wordlists" / (spec + ".txt");
}

WordList List(Run &run, const std::string &role, const std::string &spec) {
  if (spec.empty()) throw Error("usage", "--" + role + " is required");
  WordList list = ResolveWordList(spec);
  run.prov.AddInput(role, spec, ListPath(spec));
  return list;
}

EmbeddingFormat GuessFormat(const std::string &path, const std::string &given) {
  if (!given.empty()) return ParseFormatName(given);
  return fs::path(path).extension() == ".bin" ? EmbeddingFormat::kWord2VecBinary
                                              : EmbeddingFormat::kWord2VecText;
}

Embedding LoadEmbedding(Run &run) {
  const auto &o = run.opt;
  if (o.emb.empty()) throw Error("usage", "--emb is required");
  const auto format = GuessFormat(o.emb, o.emb_format);
  Embedding raw = ReadEmbeddingFile(format, o.emb, fs::path(o.emb).stem().string());
  run.prov.AddInput("emb", o.emb, o.emb);
  run.prov.Add("emb_format", FormatName(format));
  if (raw.case_collisions() > 0) {
    run.prov.Add("case_collisions",
                 std::to_string(raw.case_collisions()) +
                     " later entries dropped after lowercasing (first kept)");
  }
  return Normalize(raw);
}

EmbeddingSeries LoadManifest(Run &run) {
  const auto &o = run.opt;
  if (o.manifest.empty()) throw Error("usage", "--manifest is required");
  const SeriesManifest m = ReadManifestFile(o.manifest);
  run.prov.AddInput("manifest", o.manifest, o.manifest);
  for (const auto &e : m.entries) {
    run.prov.AddInput("slice " + std::to_string(e.time), e.path.string(), e.path);
  }
  return LoadSeries(m);
}

// --emb as a one-slice series, or --manifest.
EmbeddingSeries LoadEither(Run &run) {
  if (!run.opt.emb.empty() && !run.opt.manifest.empty()) {
    throw Error("usage", "give either --emb or --manifest, not both");
  }
  if (!run.opt.manifest.empty()) return LoadManifest(run);
  Embedding e = LoadEmbedding(run);
  std::vector<EmbeddingSeries::Entry> entries;
  entries.emplace_back(0, std::move(e));
  return EmbeddingSeries(std::move(entries));
}

Metric MetricOf(Run &run) {
  const Metric m = ParseMetricName(run.opt.metric);
  run.prov.Add("metric", MetricName(m));
  return m;
}

std::string Join(const std::vector<std::string> &v, const char *sep = " ") {
  std::string out;
  for (const auto &s : v) out += (out.empty() ? "" : sep) + s;
  return out.empty() ? "(none)" : out;
}

std::string Sign(const WordList &g1, const WordList &g2) {
  return "positive = closer to " + g2.name + " than " + g1.name;
}

json TableJson(const BiasTable &t) {
  json rows = json::array();
  for (const auto &r : t.rows) {
    json row;
    row["word"] = r.word;
    if (t.groups.size() == 2) {
      row["score"] = r.scores[0];
    } else {
      for (std::size_t g = 0; g < t.groups.size(); ++g) row[t.groups[g]] = r.scores[g];
    }
    rows.push_back(row);
  }
  json j;
  j["metric"] = MetricName(t.metric);
  j["groups"] = t.groups;
  j["embedding"] = t.embedding_label;
  j["dropped"] = t.dropped;
  j["rows"] = rows;
  return j;
}

BiasTable ComputeTable(Run &run, const Embedding &emb, Metric metric,
                       RelativeNormDistance *rnd_out = nullptr) {
  const auto &o = run.opt;
  const WordList neutral = List(run, "neutral", o.neutral);
  const WordList g1 = List(run, "g1", o.g1);
  const WordList g2 = List(run, "g2", o.g2);
  if (!o.g3.empty()) {
    const WordList g3 = List(run, "g3", o.g3);
    run.prov.Add("sign", "per group: positive = closer to that group than to the other two");
    return ThreeWayBias(emb, neutral, {g1, g2, g3});
  }
  run.prov.Add("sign", Sign(g1, g2));
  auto rnd = ComputeRelativeNormDistance(emb, neutral, g1, g2, metric);
  if (rnd_out) *rnd_out = rnd;
  return rnd.per_word;
}

void CmdBias(Run &run) {
  run.RequireFormat({"csv", "json"});
  const Embedding emb = LoadEmbedding(run);
  const Metric metric = MetricOf(run);
  RelativeNormDistance rnd;
  const BiasTable table = ComputeTable(run, emb, metric, &rnd);
  if (table.groups.size() == 2) {
    run.prov.Add("sum", FormatDouble(rnd.sum));
    run.prov.Add("mean", FormatDouble(rnd.mean));
  }
  run.prov.Add("words", std::to_string(table.rows.size()));
  if (run.opt.format == "json") {
    run.EmitJson(TableJson(table));
    return;
  }
  // the table writer emits its own metric and sign lines
  std::vector<std::pair<std::string, std::string>> meta;
  for (const auto &e : run.prov.entries()) {
    if (e.first != "metric" && e.first != "sign") meta.push_back(e);
  }
  std::ostringstream out;
  WriteBiasTableCsv(table, meta, out);
  run.Emit(out.str());
}

void CmdRank(Run &run) {
  run.RequireFormat({"csv", "json"});
  const Embedding emb = LoadEmbedding(run);
  const Metric metric = MetricOf(run);
  const BiasTable table = ComputeTable(run, emb, metric);
  run.prov.Add("k", std::to_string(run.opt.k));

  // One column per group, most associated first.
  std::vector<std::vector<std::string>> columns;
  std::vector<std::size_t> score_col;
  if (table.groups.size() == 2) {
    columns.push_back(RankByBias(table, run.opt.k, Direction::kLowest));
    columns.push_back(RankByBias(table, run.opt.k, Direction::kHighest));
    score_col = {0, 0};
  } else {
    for (std::size_t g = 0; g < 3; ++g) {
      columns.push_back(RankByBias(table, run.opt.k, Direction::kHighest, g));
      score_col.push_back(g);
    }
  }
  std::map<std::string, const BiasRow *> by_word;
  for (const auto &r : table.rows) by_word[r.word] = &r;

  if (run.opt.format == "json") {
    json j;
    for (std::size_t g = 0; g < columns.size(); ++g) {
      json col = json::array();
      for (const auto &w : columns[g]) {
        col.push_back({{"word", w}, {"score", by_word[w]->scores[score_col[g]]}});
      }
      j[table.groups[g]] = col;
    }
    run.EmitJson(j);
    return;
  }
  std::ostringstream out;
  out << run.CsvHeader() << "rank";
  for (const auto &g : table.groups) out << ',' << CsvEscape(g) << ',' << CsvEscape(g + "_score");
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1;
    for (std::size_t g = 0; g < columns.size(); ++g) {
      const auto &w = columns[g][i];
      out << ',' << CsvEscape(w) << ',' << FormatDouble(by_word[w]->scores[score_col[g]]);
    }
    out << '\n';
  }
  run.Emit(out.str());
}

struct SeriesInputs {
  EmbeddingSeries series;
  WordList neutral, g1, g2;
  Metric metric;
};

SeriesInputs LoadSeriesInputs(Run &run, VocabPolicy policy) {
  SeriesInputs in{LoadManifest(run), {}, {}, {}, Metric::kNorm};
  in.metric = MetricOf(run);
  const WordList neutral = List(run, "neutral", run.opt.neutral);
  in.g1 = List(run, "g1", run.opt.g1);
  in.g2 = List(run, "g2", run.opt.g2);
  run.prov.Add("sign", Sign(in.g1, in.g2));
  auto restricted = RestrictToVocab(neutral, in.series, policy);
  in.neutral = restricted.list;
  run.prov.Add("vocab_policy", policy == VocabPolicy::kAllSlices ? "all_slices" : "any_slice");
  run.prov.Add("neutral_dropped", Join(restricted.dropped));
  return in;
}

void CmdSeries(Run &run) {
  run.RequireFormat({"csv", "json"});
  auto in = LoadSeriesInputs(run, VocabPolicy::kAllSlices);
  const Aggregate agg = ParseAggregateName(run.opt.agg);
  run.prov.Add("aggregate", AggregateName(agg));
  run.prov.Add("seed", std::to_string(run.opt.seed));
  std::optional<BootstrapOptions> boot;
  if (run.opt.bootstrap > 0) {
    boot = BootstrapOptions{run.opt.bootstrap, 0.95, run.opt.seed};
    run.prov.Add("bootstrap", std::to_string(run.opt.bootstrap) +
                                  " resamples, 95% percentile interval");
  }
  const TimeSeries ts = BiasSeries(in.series, in.neutral, in.g1, in.g2, in.metric, agg, boot);
  std::optional<TrendResult> trend;
  if (ts.points.size() >= 3) {
    trend = TrendTest(ts);
    run.prov.Add("trend_slope", FormatDouble(trend->slope));
    run.prov.Add("trend_std_error", FormatDouble(trend->std_error));
    run.prov.Add("trend_p", FormatDouble(trend->p));
    if (trend->zero_variance) run.prov.Add("trend_note", "zero variance");
  }
  if (run.opt.format == "json") {
    json points = json::array();
    for (const auto &p : ts.points) {
      json jp{{"time", p.time}, {"value", p.value}};
      if (p.ci_low) jp["ci_low"] = *p.ci_low;
      if (p.ci_high) jp["ci_high"] = *p.ci_high;
      points.push_back(jp);
    }
    run.EmitJson({{"points", points}});
    return;
  }
  std::ostringstream out;
  WriteTimeSeriesCsv(ts, run.prov.entries(), out);
  run.Emit(out.str());
}

void CmdTrajectory(Run &run) {
  run.RequireFormat({"csv", "json"});
  auto in = LoadSeriesInputs(run, VocabPolicy::kAnySlice);
  if (run.opt.word.empty()) throw Error("usage", "--word is required");
  run.prov.Add("word", run.opt.word);
  const auto traj = WordRankTrajectory(in.series, ToLower(run.opt.word), in.neutral,
                                       in.g1, in.g2, in.metric);
  if (run.opt.format == "json") {
    json points = json::array();
    for (const auto &p : traj) {
      json jp{{"time", p.time}, {"of", p.of}};
      jp["rank"] = p.rank ? json(*p.rank) : json(nullptr);
      points.push_back(jp);
    }
    run.EmitJson({{"points", points}});
    return;
  }
  std::ostringstream out;
  out << run.CsvHeader() << "time,rank,of\n";
  for (const auto &p : traj) {
    out << p.time << ',' << (p.rank ? std::to_string(*p.rank) : "") << ',' << p.of << '\n';
  }
  run.Emit(out.str());
}

void CmdCorr(Run &run) {
  run.RequireFormat({"csv", "json", "svg"});
  auto in = LoadSeriesInputs(run, VocabPolicy::kAnySlice);
  const CorrelationMatrix m =
      BiasCorrelationMatrix(in.series, in.neutral, in.g1, in.g2, in.metric);
  if (run.opt.format == "svg") {
    std::ostringstream out;
    out << "<!--\n";
    for (const auto &[k, v] : run.prov.entries()) {
      std::string safe = v;
      for (std::size_t p; (p = safe.find("--")) != std::string::npos;) safe.replace(p, 2, "- -");
      out << k << ": " << safe << '\n';
    }
    out << "-->\n";
    std::ostringstream svg;
    WriteCorrelationSvg(m, "Pearson correlation of " + std::string(MetricName(in.metric)) +
                               " bias scores (" + in.g1.name + " vs " + in.g2.name + ", " +
                               in.neutral.name + ")",
                        svg);
    run.Emit(svg.str() + out.str());
    return;
  }
  if (run.opt.format == "json") {
    run.EmitJson({{"labels", m.labels}, {"values", m.values}, {"overlap", m.overlap}});
    return;
  }
  std::ostringstream out;
  WriteCorrelationCsv(m, run.prov.entries(), out);
  run.Emit(out.str());
}

std::set<std::string> ExcludeSet(Run &run) {
  std::set<std::string> out;
  for (const auto &e : run.opt.exclude) {
    for (auto w : Split(e, ',')) {
      if (!Trim(w).empty()) out.insert(ToLower(Trim(w)));
    }
  }
  if (!out.empty()) {
    run.prov.Add("exclude", Join(std::vector<std::string>(out.begin(), out.end())));
  }
  return out;
}

// External values for one year (census) or the survey (stereotype scores).
std::map<std::string, double> ExternalFor(Run &run, const OccupationTable *census,
                                          const StereotypeScores *stereo, int year,
                                          std::vector<std::string> *skipped) {
  if (stereo) return stereo->Transformed();
  if (!run.opt.group2.empty()) {
    return census->CondLogProps(year, run.opt.group, run.opt.group2, skipped);
  }
  return census->LogProps(year, run.opt.group, skipped);
}

void WriteFitCsv(Run &run, const OlsFit &fit) {
  const double q = StudentQuantile(0.025, static_cast<double>(fit.dof));
  for (auto [k, v] : std::vector<std::pair<const char *, double>>{
           {"r_squared", fit.r_squared},
           {"adj_r_squared", fit.adj_r_squared},
           {"f_statistic", fit.f_statistic},
           {"f_p_value", fit.f_p_value},
           {"log_likelihood", fit.log_likelihood}}) {
    run.prov.Add(k, FormatDouble(v));
  }
  run.prov.Add("n", std::to_string(fit.n));
  run.prov.Add("dof", std::to_string(fit.dof));
  std::ostringstream out;
  out << run.CsvHeader() << "term,coef,std_err,t,p,ci_low,ci_high\n";
  for (std::size_t i = 0; i < fit.coefs.size(); ++i) {
    out << CsvEscape(fit.names[i]) << ',' << FormatDouble(fit.coefs[i]) << ','
        << FormatDouble(fit.stderrs[i]) << ',' << FormatDouble(fit.t_stats[i]) << ','
        << FormatDouble(fit.p_values[i]) << ','
        << FormatDouble(fit.coefs[i] - q * fit.stderrs[i]) << ','
        << FormatDouble(fit.coefs[i] + q * fit.stderrs[i]) << '\n';
  }
  run.Emit(out.str());
}

void EmitFit(Run &run, const OlsFit &fit, const std::string &dependent) {
  if (run.opt.format == "json") {
    json j;
    j["fit"] = json::parse(OlsToJson(fit, dependent));
    run.EmitJson(j);
  } else if (run.opt.format == "text") {
    std::ostringstream out;
    for (const auto &[k, v] : run.prov.entries()) out << "# " << k << ": " << v << '\n';
    WriteOlsTable(fit, dependent, out);
    run.Emit(out.str());
  } else {
    WriteFitCsv(run, fit);
  }
}

void CmdRegress(Run &run) {
  run.RequireFormat({"csv", "json", "text"});
  const auto &o = run.opt;
  if (o.census.empty() == o.stereo.empty()) {
    throw Error("usage", "give exactly one of --census or --stereo");
  }
  std::optional<OccupationTable> census;
  std::optional<StereotypeScores> stereo;
  std::string dependent;
  if (!o.census.empty()) {
    census = LoadOccupationTable(o.census);
    run.prov.AddInput("census", o.census, o.census);
    run.prov.Add("census_group", o.group);
    if (!o.group2.empty()) run.prov.Add("census_group2", o.group2);
    dependent = o.group2.empty() ? o.group + " log proportion"
                                 : o.group + " vs " + o.group2 + " conditional log proportion";
  } else {
    if (o.survey_year == 0) throw Error("usage", "--stereo needs --survey-year");
    stereo = LoadStereotypeScores(o.stereo, o.survey_year);
    run.prov.AddInput("stereo", o.stereo, o.stereo);
    run.prov.Add("survey_year", std::to_string(o.survey_year));
    dependent = "stereotype score";
  }
  const auto exclude = ExcludeSet(run);
  const EmbeddingSeries series = LoadEither(run);
  const Metric metric = MetricOf(run);
  const bool pooled = !o.manifest.empty();

  std::vector<JoinedPair> pairs;
  std::vector<std::string> skipped_slices, unmatched;
  bool first = true;
  for (const auto &[time, emb] : series) {
    int year = pooled ? time : o.census_year;
    if (census && !pooled && year == 0) {
      const auto years = census->years();
      if (years.size() != 1) throw Error("usage", "census has several years; pass --census-year");
      year = *years.begin();
    }
    if (census && !census->years().contains(year)) {
      if (!pooled) throw DomainError("census has no rows for year " + std::to_string(year));
      skipped_slices.push_back(std::to_string(time));
      continue;
    }
    std::vector<std::string> skipped;
    const auto external = ExternalFor(run, census ? &*census : nullptr,
                                      stereo ? &*stereo : nullptr, year, &skipped);
    // Without --neutral the join words are the external table's words.
    Run scratch = run;
    if (o.neutral.empty()) {
      std::ostringstream words;
      for (const auto &[w, v] : external) words << w << '\n';
      std::istringstream in(words.str());
      const WordList neutral = ParseWordList(in, "external_words");
      const WordList g1 = List(scratch, "g1", o.g1), g2 = List(scratch, "g2", o.g2);
      scratch.prov.Add("sign", Sign(g1, g2));
      auto rnd = ComputeRelativeNormDistance(emb, neutral, g1, g2, metric);
      auto j = JoinBiasExternal(rnd.per_word, external, exclude);
      pairs.insert(pairs.end(), j.pairs.begin(), j.pairs.end());
      unmatched.insert(unmatched.end(), rnd.per_word.dropped.begin(),
                       rnd.per_word.dropped.end());
    } else {
      auto rnd = ComputeTable(scratch, emb, metric);
      auto j = JoinBiasExternal(rnd, external, exclude);
      pairs.insert(pairs.end(), j.pairs.begin(), j.pairs.end());
      unmatched.insert(unmatched.end(), j.unmatched.begin(), j.unmatched.end());
    }
    if (first) {
      // word-list inputs are identical for every slice; record them once
      for (const auto &e : scratch.prov.entries()) {
        if (e.first.starts_with("input ") || e.first == "sign") run.prov.Add(e.first, e.second);
      }
      first = false;
    }
    if (pooled) run.prov.Add("slice " + std::to_string(time) + " pairs",
                             std::to_string(pairs.size()));
  }
  if (!skipped_slices.empty()) run.prov.Add("slices_without_census", Join(skipped_slices));
  std::sort(unmatched.begin(), unmatched.end());
  unmatched.erase(std::unique(unmatched.begin(), unmatched.end()), unmatched.end());
  run.prov.Add("unmatched", Join(unmatched));
  const OlsFit fit = FitScaleAlignment(pairs);
  for (double b : o.prob_at) {
    run.prov.Add("proportion at bias " + FormatDouble(b), FormatDouble(BiasToProportion(fit, b)));
  }
  EmitFit(run, fit, dependent);
}

std::map<std::string, double> ReadCrowd(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open crowd scores " + path);
  std::string line;
  std::getline(in, line);
  auto header = ParseCsvLine(line);
  if (header.size() != 2 || Trim(header[0]) != "word" || Trim(header[1]) != "score") {
    throw ParseError(ParseError::Reason::kMalformedHeader, 1, true,
                     "crowd score CSV header must be 'word,score'");
  }
  std::map<std::string, double> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    auto f = ParseCsvLine(line);
    double v;
    if (f.size() != 2 || !ParseDouble(Trim(f[1]), &v)) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true, "bad crowd score");
    }
    out[ToLower(Trim(f[0]))] = v;
  }
  return out;
}

void CmdResiduals(Run &run) {
  run.RequireFormat({"csv", "json"});
  const auto &o = run.opt;
  if (o.census.empty() || o.crowd.empty()) {
    throw Error("usage", "residuals needs --census and --crowd");
  }
  const OccupationTable census = LoadOccupationTable(o.census);
  run.prov.AddInput("census", o.census, o.census);
  const auto crowd = ReadCrowd(o.crowd);
  run.prov.AddInput("crowd", o.crowd, o.crowd);
  int year = o.census_year;
  if (year == 0) {
    const auto years = census.years();
    if (years.size() != 1) throw Error("usage", "census has several years; pass --census-year");
    year = *years.begin();
  }
  run.prov.Add("census_year", std::to_string(year));
  run.prov.Add("census_group", o.group);
  const auto logprops = census.LogProps(year, o.group);
  const Embedding emb = LoadEmbedding(run);
  const BiasTable table = ComputeTable(run, emb, MetricOf(run));

  std::vector<std::string> words;
  std::vector<double> bias, crowd_v, lp;
  for (const auto &r : table.rows) {
    auto c = crowd.find(r.word);
    auto l = logprops.find(r.word);
    if (c == crowd.end() || l == logprops.end()) continue;
    words.push_back(r.word);
    bias.push_back(r.scores[0]);
    crowd_v.push_back(c->second);
    lp.push_back(l->second);
  }
  const auto rep = ResidualStereotypeAnalysis(words, bias, crowd_v, lp);
  run.prov.Add("words", std::to_string(words.size()));
  run.prov.Add("residual_r", FormatDouble(rep.residual_correlation.r));
  run.prov.Add("residual_p", FormatDouble(rep.residual_correlation.p));
  if (o.format == "json") {
    json j;
    j["joint"] = json::parse(OlsToJson(rep.joint, "bias"));
    j["bias_on_logprop"] = json::parse(OlsToJson(rep.bias_on_logprop, "bias"));
    j["crowd_on_logprop"] = json::parse(OlsToJson(rep.crowd_on_logprop, "crowd"));
    j["residual_correlation"] = {{"r", rep.residual_correlation.r},
                                 {"p", rep.residual_correlation.p},
                                 {"n", rep.residual_correlation.n}};
    run.EmitJson(j);
    return;
  }
  WriteFitCsv(run, rep.joint);
}

void CmdAgree(Run &run) {
  run.RequireFormat({"csv", "json"});
  const EmbeddingSeries series = LoadEither(run);
  const WordList neutral = List(run, "neutral", run.opt.neutral);
  const WordList g1 = List(run, "g1", run.opt.g1), g2 = List(run, "g2", run.opt.g2);
  json rows = json::array();
  std::ostringstream body;
  body << "slice,embedding,pearson_r\n";
  for (const auto &[time, emb] : series) {
    const double r = MetricAgreement(emb, neutral, g1, g2);
    rows.push_back({{"slice", time}, {"embedding", emb.label()}, {"pearson_r", r}});
    body << time << ',' << CsvEscape(emb.label()) << ',' << FormatDouble(r) << '\n';
  }
  if (run.opt.format == "json") {
    run.EmitJson({{"rows", rows}});
    return;
  }
  run.Emit(run.CsvHeader() + body.str());
}

SliceFrequencies ReadFrequencies(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open frequencies " + path);
  std::string line;
  std::getline(in, line);
  if (ParseCsvLine(line) != std::vector<std::string>{"time", "word", "count"}) {
    throw ParseError(ParseError::Reason::kMalformedHeader, 1, true,
                     "frequency CSV header must be 'time,word,count'");
  }
  SliceFrequencies out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto f = ParseCsvLine(line);
    long long t;
    double c;
    if (f.size() != 3 || !ParseInt(Trim(f[0]), &t) || !ParseDouble(Trim(f[2]), &c)) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true, "bad frequency row");
    }
    out[static_cast<int>(t)][ToLower(Trim(f[1]))] = c;
  }
  return out;
}

void CmdNames(Run &run) {
  run.RequireFormat({"csv", "json"});
  const auto &o = run.opt;
  if (o.surnames.empty() || o.ethnicity.empty()) {
    throw Error("usage", "names needs --surnames and --ethnicity");
  }
  const SurnameTable table = LoadSurnameTable(o.surnames);
  run.prov.AddInput("surnames", o.surnames, o.surnames);
  const EmbeddingSeries series = LoadEither(run);
  SurnameSelection sel;
  sel.ethnicity = o.ethnicity;
  sel.k = o.k;
  sel.candidate_pool = o.pool;
  sel.max_overall_rank = o.max_rank;
  sel.min_per_slice = o.min_per_slice;
  SliceFrequencies freq;
  if (!o.frequencies.empty()) {
    freq = ReadFrequencies(o.frequencies);
    run.prov.AddInput("frequencies", o.frequencies, o.frequencies);
    sel.frequencies = &freq;
  }
  for (auto [k, v] : std::vector<std::pair<const char *, std::string>>{
           {"ethnicity", o.ethnicity},
           {"k", std::to_string(o.k)},
           {"candidate_pool", std::to_string(o.pool)},
           {"max_overall_rank", std::to_string(o.max_rank)},
           {"min_per_slice", FormatDouble(o.min_per_slice)},
           {"presence", o.frequencies.empty() ? "vocabulary membership" : "external counts"}}) {
    run.prov.Add(k, v);
  }
  const WordList list = SelectSurnames(table, series, sel);
  if (o.format == "json") {
    run.EmitJson({{"name", list.name}, {"words", list.words}});
    return;
  }
  std::string out = run.CsvHeader();
  for (const auto &w : list.words) out += w + "\n";
  run.Emit(out);
}

void CmdDiag(Run &run) {
  run.RequireFormat({"csv", "json"});
  const EmbeddingSeries series = LoadEither(run);
  std::vector<WordList> lists;
  for (const auto &spec : run.opt.lists) {
    for (auto s : Split(spec, ',')) {
      if (!Trim(s).empty()) lists.push_back(List(run, "list", std::string(Trim(s))));
    }
  }
  if (lists.empty()) throw Error("usage", "--lists is required");
  json rows = json::array();
  std::ostringstream body;
  body << "slice,list,present,total,dim_variance\n";
  for (const auto &[time, emb] : series) {
    for (const auto &l : lists) {
      std::size_t present = 0;
      for (const auto &w : l.words) present += emb.contains(w);
      std::string var;
      double v = 0.0;
      if (present > 0) {
        v = GroupDimensionVariance(emb, l);
        var = FormatDouble(v);
      }
      rows.push_back({{"slice", time}, {"list", l.name}, {"present", present},
                      {"total", l.words.size()},
                      {"dim_variance", present ? json(v) : json(nullptr)}});
      body << time << ',' << CsvEscape(l.name) << ',' << present << ',' << l.words.size()
           << ',' << var << '\n';
    }
  }
  if (run.opt.format == "json") {
    run.EmitJson({{"rows", rows}});
    return;
  }
  run.Emit(run.CsvHeader() + body.str());
}

void CmdTrain(Run &run) {
  const auto &o = run.opt;
  if (o.corpus.empty() || o.out.empty()) throw Error("usage", "train needs --corpus and --out");
  if (o.method != "svd" && o.method != "sgns") throw Error("usage", "--method must be svd or sgns");
  const auto emit = ParseFormatName(o.emit_format);
  if (emit == EmbeddingFormat::kGloveText) {
    throw Error("usage", "--emit-format must be word2vec-text or word2vec-binary");
  }
  const auto docs = LoadCorpus(o.corpus);
  if (fs::is_regular_file(o.corpus)) run.prov.AddInput("corpus", o.corpus, o.corpus);
  else run.prov.Add("input corpus", o.corpus + " (directory)");
  const int step = o.step_years > 0 ? o.step_years : o.window_years;
  const auto slices = SliceCorpus(docs, o.window_years, step,
                                  o.first_center ? std::optional<int>(o.first_center)
                                                 : std::nullopt);
  TrainerParams p = o.params;
  p.seed = o.seed;
  for (auto [k, v] : std::vector<std::pair<const char *, std::string>>{
           {"method", o.method},
           {"window_years", std::to_string(o.window_years)},
           {"step_years", std::to_string(step)},
           {"dim", std::to_string(p.dim)},
           {"window", std::to_string(p.window)},
           {"min_count", std::to_string(p.min_count)},
           {"smoothing_alpha", FormatDouble(p.smoothing_alpha)},
           {"seed", std::to_string(p.seed)}}) {
    run.prov.Add(k, v);
  }
  if (o.method == "sgns") {
    run.prov.Add("negatives", std::to_string(p.negatives));
    run.prov.Add("epochs", std::to_string(p.epochs));
    run.prov.Add("learning_rate", FormatDouble(p.learning_rate));
    run.prov.Add("workers", std::to_string(p.workers) +
                                (p.workers > 1 ? " (not reproducible)" : ""));
  } else {
    run.prov.Add("svd_exponent", "0.5");
  }

  StagedDirectory dir(o.out);
  const char *ext = emit == EmbeddingFormat::kWord2VecBinary ? ".bin" : ".txt";
  std::ostringstream manifest;
  std::vector<std::string> losses;
  for (const auto &slice : slices) {
    const std::string label = std::to_string(slice.center);
    Embedding emb = [&] {
      try {
        if (o.method == "svd") {
          const auto counts = CountCooccurrences(slice.documents, p.window, p.min_count);
          return SvdEmbed(Ppmi(counts, p.smoothing_alpha), counts.vocab, p.dim, label);
        }
        auto r = TrainSgns(slice.documents, p, label);
        std::string l;
        for (double x : r.epoch_loss) l += (l.empty() ? "" : " ") + FormatDouble(x);
        losses.push_back(label + ": " + l);
        return std::move(r.embedding);
      } catch (const Error &e) {
        throw Error(e.kind(), "slice " + label + ": " + e.what());
      }
    }();
    std::ofstream out(dir.staging() / (label + ext), std::ios::binary);
    WriteEmbedding(emb, emit, out);
    if (!out) throw IoError("failed writing slice " + label);
    manifest << label << '\t' << FormatName(emit) << '\t' << label << ext << '\n';
  }
  for (const auto &l : losses) run.prov.Add("epoch_loss " + l.substr(0, l.find(':')), l.substr(l.find(':') + 2));
  {
    std::ofstream out(dir.staging() / "manifest.tsv");
    out << run.CsvHeader() << manifest.str();
    if (!out) throw IoError("failed writing manifest");
  }
  dir.Commit();
  std::cout << "wrote " << slices.size() << " slices to " << o.out << "\n";
}

std::string OneLine(std::string s) {
  for (char &c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace
}  // namespace embias::cli

int main(int argc, char **argv) {
  using namespace embias::cli;
  Options o;
  CLI::App app{"Measure group-association bias in word embeddings and its change over time"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "embias 0.1.0");

  auto emb_opts = [&](CLI::App *c) {
    c->add_option("--emb", o.emb, "embedding file");
    c->add_option("--emb-format", o.emb_format,
                  "word2vec-text, word2vec-binary or glove-text (default: by extension)");
  };
  auto group_opts = [&](CLI::App *c, bool three) {
    c->add_option("--neutral", o.neutral, "neutral word list (file or bundled name)");
    c->add_option("--g1", o.g1, "group one word list");
    c->add_option("--g2", o.g2, "group two word list");
    if (three) c->add_option("--g3", o.g3, "optional third group (three-way bias)");
    c->add_option("--metric", o.metric, "norm or cosine")->capture_default_str();
  };
  auto out_opts = [&](CLI::App *c, const std::string &formats) {
    c->add_option("--out", o.out, "output file (default: stdout)");
    c->add_option("--format", o.format, formats)->capture_default_str();
  };

  auto *bias = app.add_subcommand("bias", "per-word bias table for one embedding");
  emb_opts(bias);
  group_opts(bias, true);
  out_opts(bias, "csv or json");

  auto *rank = app.add_subcommand("rank", "top-k words per group");
  emb_opts(rank);
  group_opts(rank, true);
  rank->add_option("-k,--k", o.k, "words per group")->capture_default_str();
  out_opts(rank, "csv or json");

  auto *series = app.add_subcommand("series", "bias over time with optional bootstrap CIs");
  series->add_option("--manifest", o.manifest, "series manifest")->required();
  group_opts(series, false);
  series->add_option("--agg", o.agg, "sum or mean")->capture_default_str();
  series->add_option("--bootstrap", o.bootstrap, "bootstrap resamples (0 = none)");
  series->add_option("--seed", o.seed, "random seed")->capture_default_str();
  out_opts(series, "csv or json");

  auto *traj = app.add_subcommand("trajectory", "rank of one word across slices");
  traj->add_option("--manifest", o.manifest, "series manifest")->required();
  group_opts(traj, false);
  traj->add_option("--word", o.word, "word to follow")->required();
  out_opts(traj, "csv or json");

  auto *corr = app.add_subcommand("corr", "slice-by-slice correlation of per-word bias");
  corr->add_option("--manifest", o.manifest, "series manifest")->required();
  group_opts(corr, false);
  out_opts(corr, "csv, json or svg");

  auto *regress = app.add_subcommand("regress", "regress census or stereotype scores on bias");
  emb_opts(regress);
  regress->add_option("--manifest", o.manifest, "pool every slice against its census year");
  group_opts(regress, false);
  regress->add_option("--census", o.census, "census CSV occupation,year,group,percent");
  regress->add_option("--group", o.group, "census group for log proportions")->capture_default_str();
  regress->add_option("--group2", o.group2, "second census group (conditional log proportion)");
  regress->add_option("--census-year", o.census_year, "census year for a single embedding");
  regress->add_option("--stereo", o.stereo, "stereotype CSV adjective,raw_score");
  regress->add_option("--survey-year", o.survey_year, "1977 or 1990");
  regress->add_option("--exclude", o.exclude, "words left out of the fit (comma separated)");
  regress->add_option("--prob-at", o.prob_at, "report the implied proportion at this bias");
  out_opts(regress, "csv, json or text");

  auto *resid = app.add_subcommand("residuals", "joint regression and residual correlation");
  emb_opts(resid);
  group_opts(resid, false);
  resid->add_option("--census", o.census, "census CSV");
  resid->add_option("--group", o.group, "census group")->capture_default_str();
  resid->add_option("--census-year", o.census_year, "census year");
  resid->add_option("--crowd", o.crowd, "crowd scores CSV word,score");
  out_opts(resid, "csv or json");

  auto *agree = app.add_subcommand("agree", "correlation between norm and cosine metrics");
  emb_opts(agree);
  agree->add_option("--manifest", o.manifest, "one row per slice");
  group_opts(agree, false);
  out_opts(agree, "csv or json");

  auto *names = app.add_subcommand("names", "select surnames for an ethnicity");
  emb_opts(names);
  names->add_option("--manifest", o.manifest, "series manifest");
  names->add_option("--surnames", o.surnames, "surname CSV name,rank,count,pct...");
  names->add_option("--ethnicity", o.ethnicity, "percentage column, e.g. pctapi");
  names->add_option("-k,--k", o.k, "names to select")->default_val(20);
  names->add_option("--pool", o.pool, "candidate pool size")->capture_default_str();
  names->add_option("--max-rank", o.max_rank, "overall rank cap")->capture_default_str();
  names->add_option("--min-per-slice", o.min_per_slice, "minimum presence in every slice");
  names->add_option("--frequencies", o.frequencies, "CSV time,word,count refining presence");
  out_opts(names, "csv or json");

  auto *diag = app.add_subcommand("diag", "per-slice word list coverage and dimension variance");
  emb_opts(diag);
  diag->add_option("--manifest", o.manifest, "series manifest");
  diag->add_option("--lists", o.lists, "word lists (comma separated)");
  out_opts(diag, "csv or json");

  auto *train = app.add_subcommand("train", "slice a dated corpus and train one embedding per slice");
  train->add_option("--corpus", o.corpus, "corpus file or directory")->required();
  train->add_option("--out", o.out, "output directory (created)")->required();
  train->add_option("--method", o.method, "svd or sgns")->capture_default_str();
  train->add_option("--window-years", o.window_years, "years per slice")->capture_default_str();
  train->add_option("--step-years", o.step_years, "years between slice centers (default: window)");
  train->add_option("--first-center", o.first_center, "first slice center year");
  train->add_option("--dim", o.params.dim)->capture_default_str();
  train->add_option("--window", o.params.window, "context window in tokens")->capture_default_str();
  train->add_option("--min-count", o.params.min_count)->capture_default_str();
  train->add_option("--negatives", o.params.negatives)->capture_default_str();
  train->add_option("--epochs", o.params.epochs)->capture_default_str();
  train->add_option("--lr", o.params.learning_rate)->capture_default_str();
  train->add_option("--alpha", o.params.smoothing_alpha, "context smoothing")->capture_default_str();
  train->add_option("--workers", o.params.workers, "SGNS threads (>1 is not reproducible)")
      ->capture_default_str();
  train->add_option("--seed", o.seed)->default_val(1);
  train->add_option("--emit-format", o.emit_format, "word2vec-text or word2vec-binary")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: usage: " << OneLine(e.what()) << "\n";
    return 2;
  }

  static const std::map<CLI::App *, void (*)(Run &)> kCommands{
      {bias, CmdBias},     {rank, CmdRank},         {series, CmdSeries},
      {traj, CmdTrajectory}, {corr, CmdCorr},       {regress, CmdRegress},
      {resid, CmdResiduals}, {agree, CmdAgree},     {names, CmdNames},
      {diag, CmdDiag},     {train, CmdTrain}};
  CLI::App *sub = app.get_subcommands().front();
  try {
    Run run(argc, argv, sub->get_name(), o);
    kCommands.at(sub)(run);
  } catch (const embias::Error &e) {
    std::cerr << "error: " << e.kind() << ": " << OneLine(e.what()) << "\n";
    return e.kind() == "usage" ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << OneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}
