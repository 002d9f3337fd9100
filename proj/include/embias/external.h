#ifndef EMBIAS_EXTERNAL_H_
#define EMBIAS_EXTERNAL_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "embias/metrics.h"
#include "embias/stats.h"

namespace embias {

// log(p / (1 - p)), natural log. Requires 0 < p < 1.
double LogProp(double p);

// LogProp(pct1 / (pct1 + pct2)). Percentages must both be positive.
double CondLogProp(double pct1, double pct2);

// Linear rescaling of raw adjective stereotype scores so both survey years
// share one axis: 1990 -> 500 - 10r, 1977 -> 500 - r.
double TransformStereotype(int survey_year, double raw);

struct OccupationRow {
  std::string occupation;
  int year = 0;
  std::string group;
  double percent = 0.0;  // [0, 100]
};

class OccupationTable {
 public:
  OccupationTable() = default;
  // Throws on duplicate (occupation, year, group) or bad percentages.
  explicit OccupationTable(std::vector<OccupationRow> rows);

  const std::vector<OccupationRow> &rows() const { return rows_; }
  std::optional<double> percent(const std::string &occupation, int year,
                                const std::string &group) const;
  std::set<int> years() const;

  // occupation -> LogProp(percent / 100) for `group` in `year`. Occupations
  // at exactly 0% or 100% are skipped and listed in `*skipped`.
  std::map<std::string, double> LogProps(
      int year, const std::string &group,
      std::vector<std::string> *skipped = nullptr) const;
  // occupation -> CondLogProp(group1 %, group2 %) in `year`.
  std::map<std::string, double> CondLogProps(
      int year, const std::string &group1, const std::string &group2,
      std::vector<std::string> *skipped = nullptr) const;

 private:
  std::vector<OccupationRow> rows_;
  std::map<std::tuple<std::string, int, std::string>, double> index_;
};

// CSV with header "occupation,year,group,percent".
OccupationTable ParseOccupationTable(std::istream &in);
OccupationTable LoadOccupationTable(const std::filesystem::path &path);

struct StereotypeRow {
  std::string adjective;
  double raw_score = 0.0;
  double transformed_score = 0.0;
};

struct StereotypeScores {
  int survey_year = 0;
  std::vector<StereotypeRow> rows;

  std::map<std::string, double> Transformed() const;
};

// CSV with header "adjective,raw_score".
StereotypeScores ParseStereotypeScores(std::istream &in, int survey_year);
StereotypeScores LoadStereotypeScores(const std::filesystem::path &path,
                                      int survey_year);

// Tab-separated "source_label<TAB>word[,word...]" lines mapping census
// occupation codes onto single-word occupations; '#' comments.
std::map<std::string, std::vector<std::string>> ParseOccupationMapping(
    std::istream &in);

struct JoinedPair {
  std::string word;
  double bias = 0.0;
  double external = 0.0;
};

struct JoinResult {
  std::vector<JoinedPair> pairs;          // sorted by word
  std::vector<std::string> excluded;      // removed by the exclusion list
  std::vector<std::string> unmatched;     // bias words with no external value
};

// Inner join of a bias table column with an external word -> value map.
JoinResult JoinBiasExternal(const BiasTable &bias,
                            const std::map<std::string, double> &external,
                            const std::set<std::string> &exclude = {},
                            std::size_t column = 0);

// Single OLS of external value on bias across all supplied pairs (typically
// pooled over decades).
OlsFit FitScaleAlignment(const std::vector<JoinedPair> &pairs);

// Proportion implied by a bias score under a fit whose response is a log
// proportion: logistic(intercept + slope * bias).
double BiasToProportion(const OlsFit &fit, double bias);

}  // namespace embias

#endif  // EMBIAS_EXTERNAL_H_
