#include "embias/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "embias/error.h"
#include "embias/stats.h"
#include "embias/text.h"

namespace embias {

namespace {

double Distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void CheckDims(std::span<const double> w, const GroupVector &g) {
  if (w.size() != g.vector.size()) {
    throw DomainError("group vector '" + g.name + "' has dimension " +
                      std::to_string(g.vector.size()) + ", word has " +
                      std::to_string(w.size()));
  }
}

}  // namespace

Metric ParseMetricName(std::string_view name) {
  if (name == "norm") return Metric::kNorm;
  if (name == "cosine") return Metric::kCosine;
  throw DomainError("unknown metric '" + std::string(name) +
                    "' (expected norm or cosine)");
}

const char *MetricName(Metric metric) {
  return metric == Metric::kNorm ? "norm" : "cosine";
}

GroupVector MakeGroupVector(const Embedding &emb, const WordList &group) {
  GroupVector g;
  g.name = group.name;
  g.vector.assign(emb.dim(), 0.0);
  for (const auto &word : group.words) {
    auto idx = emb.index_of(word);
    if (!idx) {
      g.missing.push_back(word);
      continue;
    }
    const auto row = emb.row(*idx);
    for (int d = 0; d < emb.dim(); ++d) g.vector[d] += row[d];
    g.members.push_back(word);
  }
  if (g.members.empty()) {
    throw DomainError("no word of group '" + group.name +
                      "' is in embedding '" + emb.label() + "'");
  }
  const double n = static_cast<double>(g.members.size());
  for (double &v : g.vector) v /= n;
  return g;
}

double WordBias(std::span<const double> w, const GroupVector &g1,
                const GroupVector &g2, Metric metric) {
  CheckDims(w, g1);
  CheckDims(w, g2);
  if (metric == Metric::kNorm) {
    return Distance(w, g1.vector) - Distance(w, g2.vector);
  }
  return Dot(w, g2.vector) - Dot(w, g1.vector);
}

double WordBias(const Embedding &emb, std::string_view word,
                const GroupVector &g1, const GroupVector &g2, Metric metric) {
  return WordBias(emb.vector(word), g1, g2, metric);
}

std::vector<std::string> BiasTable::words() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto &r : rows) out.push_back(r.word);
  return out;
}

std::vector<double> BiasTable::column(std::size_t group) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &r : rows) out.push_back(r.scores.at(group));
  return out;
}

RelativeNormDistance ComputeRelativeNormDistance(const Embedding &emb,
                                                 const WordList &neutral,
                                                 const WordList &g1,
                                                 const WordList &g2,
                                                 Metric metric) {
  const GroupVector v1 = MakeGroupVector(emb, g1);
  const GroupVector v2 = MakeGroupVector(emb, g2);
  RelativeNormDistance out;
  BiasTable &table = out.per_word;
  table.metric = metric;
  table.groups = {g1.name, g2.name};
  table.embedding_label = emb.label();
  for (const auto &word : neutral.words) {
    auto idx = emb.index_of(word);
    if (!idx) {
      table.dropped.push_back(word);
      continue;
    }
    const double score = WordBias(emb.row(*idx), v1, v2, metric);
    table.rows.push_back({word, {score}});
    out.sum += score;
  }
  if (table.rows.empty()) {
    throw DomainError("no neutral word of '" + neutral.name +
                      "' is in embedding '" + emb.label() + "'");
  }
  out.mean = out.sum / static_cast<double>(table.rows.size());
  return out;
}

BiasTable ThreeWayBias(const Embedding &emb, const WordList &neutral,
                       const std::array<WordList, 3> &groups) {
  std::array<GroupVector, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = MakeGroupVector(emb, groups[i]);
  BiasTable table;
  table.metric = Metric::kNorm;
  table.groups = {groups[0].name, groups[1].name, groups[2].name};
  table.embedding_label = emb.label();
  for (const auto &word : neutral.words) {
    auto idx = emb.index_of(word);
    if (!idx) {
      table.dropped.push_back(word);
      continue;
    }
    const auto w = emb.row(*idx);
    std::array<double, 3> dist;
    for (int i = 0; i < 3; ++i) dist[i] = Distance(w, v[i].vector);
    BiasRow row{word, {}};
    for (int i = 0; i < 3; ++i) {
      const double others = dist[(i + 1) % 3] + dist[(i + 2) % 3];
      row.scores.push_back(0.5 * others - dist[i]);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) {
    throw DomainError("no neutral word of '" + neutral.name +
                      "' is in embedding '" + emb.label() + "'");
  }
  return table;
}

std::vector<std::string> RankByBias(const BiasTable &table, std::size_t k,
                                    Direction direction, std::size_t column) {
  std::vector<const BiasRow *> rows;
  rows.reserve(table.rows.size());
  for (const auto &r : table.rows) rows.push_back(&r);
  const bool highest = direction == Direction::kHighest;
  auto better = [&](const BiasRow *a, const BiasRow *b) {
    const double sa = a->scores.at(column), sb = b->scores.at(column);
    if (sa != sb) return highest ? sa > sb : sa < sb;
    return a->word < b->word;
  };
  k = std::min(k, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + k, rows.end(), better);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(rows[i]->word);
  return out;
}

double MetricAgreement(const Embedding &emb, const WordList &neutral,
                       const WordList &g1, const WordList &g2) {
  const auto norm = ComputeRelativeNormDistance(emb, neutral, g1, g2,
                                                Metric::kNorm);
  const auto cosine = ComputeRelativeNormDistance(emb, neutral, g1, g2,
                                                  Metric::kCosine);
  if (norm.per_word.rows.size() < 3) {
    throw DomainError("metric agreement needs >= 3 neutral words in "
                      "vocabulary, found " +
                      std::to_string(norm.per_word.rows.size()));
  }
  return Pearson(norm.per_word.column(), cosine.per_word.column()).r;
}

double GroupDimensionVariance(const Embedding &emb, const WordList &group) {
  const GroupVector g = MakeGroupVector(emb, group);
  const double n = static_cast<double>(g.members.size());
  double total = 0.0;
  for (int d = 0; d < emb.dim(); ++d) {
    double ss = 0.0;
    for (const auto &word : g.members) {
      const double diff = emb.vector(word)[d] - g.vector[d];
      ss += diff * diff;
    }
    total += ss / n;
  }
  return total / emb.dim();
}

void WriteBiasTableCsv(const BiasTable &table,
                       const std::vector<std::pair<std::string, std::string>>
                           &extra_metadata,
                       std::ostream &out) {
  out << "# metric: " << MetricName(table.metric) << '\n';
  out << "# groups:";
  for (const auto &g : table.groups) out << ' ' << g;
  out << '\n';
  if (table.groups.size() == 2) {
    out << "# sign: positive = closer to " << table.groups[1] << " than "
        << table.groups[0] << '\n';
  } else {
    out << "# sign: positive = closer to that group than to the mean of the "
           "other two\n";
  }
  out << "# embedding: " << table.embedding_label << '\n';
  out << "# dropped:";
  for (const auto &w : table.dropped) out << ' ' << w;
  out << '\n';
  for (const auto &[k, v] : extra_metadata) out << "# " << k << ": " << v << '\n';
  out << "word,score";
  for (std::size_t g = 1; g < table.groups.size() && table.groups.size() > 2;
       ++g) {
    out << ",score_g" << g + 1;
  }
  out << '\n';
  for (const auto &row : table.rows) {
    out << CsvEscape(row.word);
    for (double s : row.scores) out << ',' << FormatDouble(s);
    out << '\n';
  }
}

}  // namespace embias
