#include "embias/wordlist.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "embias/error.h"
#include "embias/text.h"

#ifndef EMBIAS_DEFAULT_FIXTURE_DIR
#define EMBIAS_DEFAULT_FIXTURE_DIR "data"
#endif

namespace embias {

WordList ParseWordList(std::istream &in, std::string name) {
  WordList list{std::move(name), {}};
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    std::string word = ToLower(view);
    if (!seen.insert(word).second) {
      throw DomainError("word list '" + list.name + "': duplicate word '" +
                        word + "' at line " + std::to_string(line_no));
    }
    list.words.push_back(std::move(word));
  }
  if (list.words.empty()) {
    throw DomainError("word list '" + list.name + "' is empty");
  }
  return list;
}

WordList LoadWordList(const std::filesystem::path &path, std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word list " + path.string());
  return ParseWordList(in, std::move(name));
}

std::filesystem::path FixtureDir() {
  if (const char *env = std::getenv("EMBIAS_FIXTURES"); env && *env) {
    return env;
  }
  return EMBIAS_DEFAULT_FIXTURE_DIR;
}

WordList ResolveWordList(const std::string &spec) {
  std::filesystem::path p(spec);
  if (std::filesystem::is_regular_file(p)) {
    return LoadWordList(p, p.stem().string());
  }
  auto fixture = FixtureDir() / "wordlists" / (spec + ".txt");
  if (!std::filesystem::is_regular_file(fixture)) {
    throw IoError("word list '" + spec +
                  "' is neither a file nor a bundled list (looked in " +
                  fixture.string() + ")");
  }
  return LoadWordList(fixture, spec);
}

RestrictedList RestrictToVocab(const WordList &list,
                               const EmbeddingSeries &series,
                               VocabPolicy policy) {
  if (series.empty()) throw DomainError("cannot restrict to an empty series");
  RestrictedList out;
  out.list.name = list.name;
  for (const auto &word : list.words) {
    std::size_t present = 0;
    for (const auto &[time, emb] : series) present += emb.contains(word);
    const bool keep = policy == VocabPolicy::kAllSlices
                          ? present == series.size()
                          : present > 0;
    (keep ? out.list.words : out.dropped).push_back(word);
  }
  if (out.list.words.empty()) {
    throw DomainError("no word of list '" + list.name +
                      "' survives vocabulary filtering");
  }
  return out;
}

SurnameTable ParseSurnameTable(std::istream &in, const SurnameColumns &columns) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("surname table is empty");
  const auto header = ParseCsvLine(line);
  int name_col = -1, rank_col = -1, count_col = -1;
  std::vector<std::pair<int, std::string>> pct_cols;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string h(Trim(header[i]));
    if (h == columns.name) name_col = i;
    else if (h == columns.rank) rank_col = i;
    else if (h == columns.count) count_col = i;
    else if (h.rfind("pct", 0) == 0) pct_cols.emplace_back(i, h);
  }
  if (name_col < 0 || rank_col < 0 || count_col < 0) {
    throw DomainError("surname table header lacks '" + columns.name + "', '" +
                      columns.rank + "' or '" + columns.count + "'");
  }
  SurnameTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = ParseCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "surname table row has " +
                           std::to_string(fields.size()) + " fields, header " +
                           std::to_string(header.size()));
    }
    SurnameRow row;
    row.name = ToLower(Trim(fields[name_col]));
    double count;
    if (!ParseInt(Trim(fields[rank_col]), &row.rank) ||
        !ParseDouble(Trim(fields[count_col]), &count) || count < 0) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "bad rank or count for '" + row.name + "'");
    }
    row.count = count;
    for (const auto &[col, col_name] : pct_cols) {
      double pct = 0.0;
      const auto cell = Trim(fields[col]);
      if (!ParseDouble(cell, &pct)) pct = 0.0;  // "(S)": suppressed cell
      if (pct < 0.0 || pct > 100.0) {
        throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                         col_name + " outside [0,100] for '" + row.name + "'");
      }
      row.percent[col_name] = pct;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SurnameTable LoadSurnameTable(const std::filesystem::path &path,
                              const SurnameColumns &columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open surname table " + path.string());
  return ParseSurnameTable(in, columns);
}

namespace {

double Presence(const EmbeddingSeries::Entry &slice, const std::string &word,
                const SliceFrequencies *frequencies) {
  if (frequencies) {
    auto it = frequencies->find(slice.first);
    if (it == frequencies->end()) return 0.0;
    auto w = it->second.find(word);
    return w == it->second.end() ? 0.0 : w->second;
  }
  return slice.second.contains(word) ? 1.0 : 0.0;
}

// Indices of the top `n` rows by `score`, descending, ties by name.
template <typename Score>
std::vector<std::size_t> TopBy(const std::vector<std::size_t> &eligible,
                               const SurnameTable &table, std::size_t n,
                               Score score) {
  std::vector<std::size_t> idx = eligible;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double sa = score(table.rows[a]), sb = score(table.rows[b]);
    if (sa != sb) return sa > sb;
    return table.rows[a].name < table.rows[b].name;
  });
  if (idx.size() > n) idx.resize(n);
  return idx;
}

}  // namespace

WordList SelectSurnames(const SurnameTable &table, const EmbeddingSeries &series,
                        const SurnameSelection &options) {
  if (series.empty()) throw DomainError("surname selection needs a series");
  const std::string &col = options.ethnicity;
  if (table.rows.empty() || !table.rows.front().percent.contains(col)) {
    throw DomainError("surname table has no column '" + col + "'");
  }
  auto pct = [&](const SurnameRow &r) { return r.percent.at(col); };

  std::vector<std::size_t> all(table.rows.size()), common;
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
    if (table.rows[i].rank <= options.max_overall_rank) common.push_back(i);
  }
  std::set<std::string> candidates;
  for (auto i : TopBy(common, table, options.candidate_pool, pct)) {
    candidates.insert(table.rows[i].name);
  }
  for (auto i : TopBy(all, table, options.candidate_pool,
                      [&](const SurnameRow &r) { return r.count * pct(r); })) {
    candidates.insert(table.rows[i].name);
  }

  struct Scored {
    std::string name;
    double mean_presence;
  };
  std::vector<Scored> survivors;
  for (const auto &name : candidates) {
    double total = 0.0;
    bool ok = true;
    for (const auto &slice : series) {
      const double p = Presence(slice, name, options.frequencies);
      if (options.min_per_slice > 0.0 && p < options.min_per_slice) ok = false;
      total += p;
    }
    if (ok) survivors.push_back({name, total / series.size()});
  }
  if (survivors.size() < options.k) {
    throw DomainError("only " + std::to_string(survivors.size()) + " of " +
                      std::to_string(candidates.size()) + " candidates for '" +
                      col + "' meet the per-slice minimum; " +
                      std::to_string(options.k - survivors.size()) +
                      " short of k = " + std::to_string(options.k));
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const Scored &a, const Scored &b) {
              if (a.mean_presence != b.mean_presence) {
                return a.mean_presence > b.mean_presence;
              }
              return a.name < b.name;
            });
  const std::string stem = col.starts_with("pct") ? col.substr(3) : col;
  WordList out{stem + "_surnames", {}};
  for (std::size_t i = 0; i < options.k; ++i) out.words.push_back(survivors[i].name);
  return out;
}

}  // namespace embias
