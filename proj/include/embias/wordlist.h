#ifndef EMBIAS_WORDLIST_H_
#define EMBIAS_WORDLIST_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embias/embedding.h"

namespace embias {

struct WordList {
  std::string name;
  std::vector<std::string> words;
};

// One word per line, lowercased; blank lines and '#' comments skipped.
// Throws DomainError on duplicates (after lowercasing) or an empty list.
WordList ParseWordList(std::istream &in, std::string name);
WordList LoadWordList(const std::filesystem::path &path, std::string name);

// Directory holding the bundled fixtures: $EMBIAS_FIXTURES when set,
// otherwise the source tree's data/ directory.
std::filesystem::path FixtureDir();

// Resolves `spec` as a file path if one exists, else as a bundled list name
// under FixtureDir()/wordlists/<spec>.txt.
WordList ResolveWordList(const std::string &spec);

enum class VocabPolicy { kAllSlices, kAnySlice };

struct RestrictedList {
  WordList list;
  std::vector<std::string> dropped;
};

// Keeps words present in every slice (kAllSlices) or in at least one
// (kAnySlice), preserving list order. Throws if nothing survives.
RestrictedList RestrictToVocab(const WordList &list,
                               const EmbeddingSeries &series,
                               VocabPolicy policy);

struct SurnameRow {
  std::string name;
  long long rank = 0;
  double count = 0;
  std::map<std::string, double> percent;  // column name -> [0, 100]
};

struct SurnameTable {
  std::vector<SurnameRow> rows;
};

struct SurnameColumns {
  std::string name = "name";
  std::string rank = "rank";
  std::string count = "count";
};

// CSV with a header row. Every column other than name/rank/count whose
// header starts with "pct" is read as an ethnicity percentage; suppressed
// cells such as "(S)" read as 0.
SurnameTable ParseSurnameTable(std::istream &in,
                               const SurnameColumns &columns = {});
SurnameTable LoadSurnameTable(const std::filesystem::path &path,
                              const SurnameColumns &columns = {});

// Optional per-slice frequency counts refining the presence proxy:
// time label -> word -> count.
using SliceFrequencies = std::map<int, std::map<std::string, double>>;

struct SurnameSelection {
  std::string ethnicity;
  std::size_t k = 20;
  std::size_t candidate_pool = 50;
  long long max_overall_rank = 5000;
  // Minimum presence a candidate needs in every slice. With the default
  // 0/1 presence proxy any value in (0, 1] means "in every slice".
  double min_per_slice = 0.0;
  const SliceFrequencies *frequencies = nullptr;
};

// Two-step surname selection. Candidates are the union of the top
// `candidate_pool` names by ethnicity percentage (restricted to overall rank
// <= max_overall_rank) and the top `candidate_pool` by count * percentage.
// Among candidates meeting `min_per_slice` everywhere, returns the k with the
// highest average presence across slices; ties break lexicographically.
WordList SelectSurnames(const SurnameTable &table, const EmbeddingSeries &series,
                        const SurnameSelection &options);

}  // namespace embias

#endif  // EMBIAS_WORDLIST_H_
