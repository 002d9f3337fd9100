#include "embias/external.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "embias/error.h"
#include "embias/text.h"

namespace embias {

double LogProp(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("log proportion undefined for p = " + FormatDouble(p) +
                      " (need 0 < p < 1)");
  }
  return std::log(p / (1.0 - p));
}

double CondLogProp(double pct1, double pct2) {
  if (!(pct1 > 0.0 && pct2 > 0.0)) {
    throw DomainError("conditional log proportion needs both percentages > 0");
  }
  // log((a/(a+b)) / (b/(a+b))) == log(a/b); written this way the result is
  // exactly antisymmetric in its arguments.
  return std::log(pct1) - std::log(pct2);
}

double TransformStereotype(int survey_year, double raw) {
  switch (survey_year) {
    case 1990: return 500.0 - 10.0 * raw;
    case 1977: return 500.0 - raw;
    default:
      throw DomainError("no stereotype score transform for survey year " +
                        std::to_string(survey_year) + " (1977 or 1990)");
  }
}

OccupationTable::OccupationTable(std::vector<OccupationRow> rows)
    : rows_(std::move(rows)) {
  for (const auto &r : rows_) {
    if (!std::isfinite(r.percent) || r.percent < 0.0 || r.percent > 100.0) {
      throw DomainError("occupation '" + r.occupation + "' " +
                        std::to_string(r.year) + " " + r.group +
                        ": percent outside [0,100]");
    }
    if (!index_.emplace(std::make_tuple(r.occupation, r.year, r.group),
                        r.percent)
             .second) {
      throw DomainError("duplicate census row for (" + r.occupation + ", " +
                        std::to_string(r.year) + ", " + r.group + ")");
    }
  }
}

std::optional<double> OccupationTable::percent(const std::string &occupation,
                                               int year,
                                               const std::string &group) const {
  auto it = index_.find(std::make_tuple(occupation, year, group));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::set<int> OccupationTable::years() const {
  std::set<int> out;
  for (const auto &r : rows_) out.insert(r.year);
  return out;
}

std::map<std::string, double> OccupationTable::LogProps(
    int year, const std::string &group, std::vector<std::string> *skipped) const {
  std::map<std::string, double> out;
  for (const auto &r : rows_) {
    if (r.year != year || r.group != group) continue;
    const double p = r.percent / 100.0;
    if (p <= 0.0 || p >= 1.0) {
      if (skipped) skipped->push_back(r.occupation);
      continue;
    }
    out[r.occupation] = LogProp(p);
  }
  return out;
}

std::map<std::string, double> OccupationTable::CondLogProps(
    int year, const std::string &group1, const std::string &group2,
    std::vector<std::string> *skipped) const {
  std::map<std::string, double> out;
  for (const auto &r : rows_) {
    if (r.year != year || r.group != group1) continue;
    auto other = percent(r.occupation, year, group2);
    if (!other || r.percent <= 0.0 || *other <= 0.0) {
      if (skipped) skipped->push_back(r.occupation);
      continue;
    }
    out[r.occupation] = CondLogProp(r.percent, *other);
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> ReadCsv(
    std::istream &in, const std::vector<std::string> &expected_header) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV input is empty");
  auto header = ParseCsvLine(line);
  for (auto &h : header) h = std::string(Trim(h));
  if (header != expected_header) {
    std::string want;
    for (const auto &h : expected_header) want += (want.empty() ? "" : ",") + h;
    throw ParseError(ParseError::Reason::kMalformedHeader, 1, true,
                     "expected CSV header '" + want + "'");
  }
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    auto fields = ParseCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "expected " + std::to_string(header.size()) +
                           " fields");
    }
    for (auto &f : fields) f = std::string(Trim(f));
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

OccupationTable ParseOccupationTable(std::istream &in) {
  std::vector<OccupationRow> rows;
  int line_no = 1;
  for (auto &f : ReadCsv(in, {"occupation", "year", "group", "percent"})) {
    ++line_no;
    OccupationRow r;
    r.occupation = ToLower(f[0]);
    long long year;
    if (!ParseInt(f[1], &year) || !ParseDouble(f[3], &r.percent)) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "bad year or percent for '" + r.occupation + "'");
    }
    r.year = static_cast<int>(year);
    r.group = f[2];
    rows.push_back(std::move(r));
  }
  return OccupationTable(std::move(rows));
}

OccupationTable LoadOccupationTable(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open census table " + path.string());
  return ParseOccupationTable(in);
}

std::map<std::string, double> StereotypeScores::Transformed() const {
  std::map<std::string, double> out;
  for (const auto &r : rows) out[r.adjective] = r.transformed_score;
  return out;
}

StereotypeScores ParseStereotypeScores(std::istream &in, int survey_year) {
  TransformStereotype(survey_year, 0.0);  // validates the year up front
  StereotypeScores scores;
  scores.survey_year = survey_year;
  std::unordered_set<std::string> seen;
  int line_no = 1;
  for (auto &f : ReadCsv(in, {"adjective", "raw_score"})) {
    ++line_no;
    StereotypeRow r;
    r.adjective = ToLower(f[0]);
    if (!ParseDouble(f[1], &r.raw_score) || !std::isfinite(r.raw_score)) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "bad score for '" + r.adjective + "'");
    }
    if (!seen.insert(r.adjective).second) {
      throw DomainError("duplicate stereotype score for '" + r.adjective + "'");
    }
    r.transformed_score = TransformStereotype(survey_year, r.raw_score);
    scores.rows.push_back(std::move(r));
  }
  return scores;
}

StereotypeScores LoadStereotypeScores(const std::filesystem::path &path,
                                      int survey_year) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stereotype scores " + path.string());
  return ParseStereotypeScores(in, survey_year);
}

std::map<std::string, std::vector<std::string>> ParseOccupationMapping(
    std::istream &in) {
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    if (Trim(view).empty()) continue;
    auto fields = Split(view, '\t');
    if (fields.size() != 2) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "mapping lines are label<TAB>word[,word...]");
    }
    auto &words = out[std::string(Trim(fields[0]))];
    for (auto w : Split(fields[1], ',')) {
      if (!Trim(w).empty()) words.push_back(ToLower(Trim(w)));
    }
  }
  return out;
}

JoinResult JoinBiasExternal(const BiasTable &bias,
                            const std::map<std::string, double> &external,
                            const std::set<std::string> &exclude,
                            std::size_t column) {
  JoinResult out;
  std::map<std::string, double> scores;
  for (const auto &row : bias.rows) scores[row.word] = row.scores.at(column);
  for (const auto &[word, score] : scores) {
    if (exclude.contains(word)) {
      out.excluded.push_back(word);
      continue;
    }
    auto it = external.find(word);
    if (it == external.end()) {
      out.unmatched.push_back(word);
      continue;
    }
    out.pairs.push_back({word, score, it->second});
  }
  if (out.pairs.empty()) {
    throw DomainError("bias table and external data share no words");
  }
  return out;
}

OlsFit FitScaleAlignment(const std::vector<JoinedPair> &pairs) {
  if (pairs.size() < 3) {
    throw DomainError("scale alignment needs >= 3 pairs, got " +
                      std::to_string(pairs.size()));
  }
  std::vector<double> y, x;
  for (const auto &p : pairs) {
    x.push_back(p.bias);
    y.push_back(p.external);
  }
  return Ols(y, {x}, {"bias"});
}

double BiasToProportion(const OlsFit &fit, double bias) {
  const double lp = fit.predict(std::span<const double>(&bias, 1));
  return 1.0 / (1.0 + std::exp(-lp));
}

}  // namespace embias
