#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "embias/embedding.h"
#include "embias/error.h"
#include "embias/text.h"

namespace embias {

namespace {

using Reason = ParseError::Reason;

// Collects parsed rows, lowercasing words and dropping case collisions.
class EmbeddingBuilder {
 public:
  explicit EmbeddingBuilder(int dim) : dim_(dim) {}

  void Add(std::string_view word, const double *values) {
    std::string lower = ToLower(word);
    if (!seen_.insert(lower).second) {
      ++collisions_;
      return;
    }
    words_.push_back(std::move(lower));
    data_.insert(data_.end(), values, values + dim_);
  }

  Embedding Build(std::string label) {
    Embedding e(std::move(label), dim_, std::move(words_), std::move(data_));
    e.set_case_collisions(collisions_);
    return e;
  }

 private:
  int dim_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_set<std::string> seen_;
  std::size_t collisions_ = 0;
};

bool NextLine(std::istream &in, std::string *line) {
  if (!std::getline(in, *line)) return false;
  if (!line->empty() && line->back() == '\r') line->pop_back();
  return true;
}

void ParseValues(const std::vector<std::string_view> &fields, int dim,
                 std::uint64_t line_no, std::vector<double> *values) {
  if (static_cast<int>(fields.size()) - 1 != dim) {
    throw ParseError(Reason::kDimensionMismatch, line_no, true,
                     "expected " + std::to_string(dim) + " values, found " +
                         std::to_string(fields.size() - 1));
  }
  values->resize(dim);
  for (int i = 0; i < dim; ++i) {
    double v;
    if (!ParseDouble(fields[i + 1], &v)) {
      throw ParseError(Reason::kMalformedRecord, line_no, true,
                       "bad number '" + std::string(fields[i + 1]) + "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError(Reason::kNonFinite, line_no, true,
                       "word '" + std::string(fields[0]) + "'");
    }
    (*values)[i] = v;
  }
}

std::pair<long long, int> ParseHeader(std::string_view line,
                                      std::uint64_t offset, bool is_line) {
  auto fields = SplitWhitespace(Trim(line));
  long long count = 0, dim = 0;
  if (fields.size() != 2 || !ParseInt(fields[0], &count) ||
      !ParseInt(fields[1], &dim) || count < 0 || dim < 1 ||
      dim > (1 << 20)) {
    throw ParseError(Reason::kMalformedHeader, offset, is_line,
                     "expected '<vocab_count> <dim>', got '" +
                         std::string(line) + "'");
  }
  return {count, static_cast<int>(dim)};
}

Embedding ParseWord2VecText(std::istream &in, std::string label) {
  std::string line;
  if (!NextLine(in, &line)) {
    throw ParseError(Reason::kMalformedHeader, 1, true, "empty input");
  }
  auto [count, dim] = ParseHeader(line, 1, true);
  EmbeddingBuilder builder(dim);
  std::vector<double> values;
  std::uint64_t line_no = 1;
  long long read = 0;
  while (read < count) {
    if (!NextLine(in, &line)) {
      throw ParseError(Reason::kTruncated, line_no + 1, true,
                       "header promised " + std::to_string(count) +
                           " entries, found " + std::to_string(read));
    }
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    ParseValues(fields, dim, line_no, &values);
    builder.Add(fields[0], values.data());
    ++read;
  }
  while (NextLine(in, &line)) {
    ++line_no;
    if (!Trim(line).empty()) {
      throw ParseError(Reason::kCountMismatch, line_no, true,
                       "more entries than the header's " +
                           std::to_string(count));
    }
  }
  return builder.Build(std::move(label));
}

Embedding ParseGloveText(std::istream &in, std::string label) {
  std::string line;
  std::uint64_t line_no = 0;
  int dim = 0;
  std::optional<EmbeddingBuilder> builder;
  std::vector<double> values;
  while (NextLine(in, &line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (dim == 0) {
      if (fields.size() < 2) {
        throw ParseError(Reason::kMalformedRecord, line_no, true,
                         "first line carries no vector");
      }
      dim = static_cast<int>(fields.size()) - 1;
      builder.emplace(dim);
    }
    ParseValues(fields, dim, line_no, &values);
    builder->Add(fields[0], values.data());
  }
  if (!builder) {
    throw ParseError(Reason::kTruncated, line_no + 1, true, "no entries");
  }
  return builder->Build(std::move(label));
}

Embedding ParseWord2VecBinary(std::istream &in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(Reason::kMalformedHeader, 0, false, "empty input");
  }
  auto [count, dim] = ParseHeader(line, 0, false);
  std::uint64_t offset = line.size() + 1;

  EmbeddingBuilder builder(dim);
  std::vector<char> raw(static_cast<std::size_t>(dim) * 4);
  std::vector<double> values(dim);
  std::string word;
  for (long long entry = 0; entry < count; ++entry) {
    word.clear();
    const std::uint64_t word_offset = offset;
    for (;;) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) {
        throw ParseError(Reason::kTruncated, offset, false,
                         "inside entry " + std::to_string(entry));
      }
      ++offset;
      if (c == ' ') break;
      if (c == '\n' && word.empty()) continue;
      word.push_back(static_cast<char>(c));
    }
    if (word.empty()) {
      throw ParseError(Reason::kMalformedRecord, word_offset, false,
                       "empty word");
    }
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw ParseError(Reason::kTruncated, offset + in.gcount(), false,
                       "vector for '" + word + "' cut short");
    }
    for (int i = 0; i < dim; ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, raw.data() + 4 * i, 4);
      if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap32(bits);
      }
      const float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f)) {
        throw ParseError(Reason::kNonFinite, offset + 4 * i, false,
                         "word '" + word + "'");
      }
      values[i] = static_cast<double>(f);
    }
    offset += raw.size();
    builder.Add(word, values.data());
  }
  for (int c; (c = in.get()) != std::char_traits<char>::eof(); ++offset) {
    if (c != '\n' && c != '\r' && c != ' ') {
      throw ParseError(Reason::kCountMismatch, offset, false,
                       "data after the header's " + std::to_string(count) +
                           " entries");
    }
  }
  return builder.Build(std::move(label));
}

}  // namespace

EmbeddingFormat ParseFormatName(std::string_view name) {
  if (name == "word2vec-text") return EmbeddingFormat::kWord2VecText;
  if (name == "word2vec-binary") return EmbeddingFormat::kWord2VecBinary;
  if (name == "glove-text") return EmbeddingFormat::kGloveText;
  throw DomainError("unknown embedding format '" + std::string(name) +
                    "' (expected word2vec-text, word2vec-binary, glove-text)");
}

const char *FormatName(EmbeddingFormat format) {
  switch (format) {
    case EmbeddingFormat::kWord2VecText: return "word2vec-text";
    case EmbeddingFormat::kWord2VecBinary: return "word2vec-binary";
    case EmbeddingFormat::kGloveText: return "glove-text";
  }
  return "?";
}

Embedding::Embedding(std::string label, int dim, std::vector<std::string> words,
                     std::vector<double> matrix)
    : label_(std::move(label)),
      dim_(dim),
      words_(std::move(words)),
      matrix_(std::move(matrix)) {
  if (dim_ < 1) throw DomainError("embedding dimension must be >= 1");
  if (matrix_.size() != words_.size() * static_cast<std::size_t>(dim_)) {
    throw DomainError("embedding matrix has " + std::to_string(matrix_.size()) +
                      " values, expected " +
                      std::to_string(words_.size() * dim_));
  }
  for (double v : matrix_) {
    if (!std::isfinite(v)) throw DomainError("non-finite embedding component");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw DomainError("duplicate word '" + words_[i] + "' in embedding");
    }
  }
}

std::optional<std::size_t> Embedding::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> Embedding::vector(std::string_view word) const {
  auto idx = index_of(word);
  if (!idx) {
    throw DomainError("word '" + std::string(word) + "' not in embedding '" +
                      label_ + "'");
  }
  return row(*idx);
}

Embedding ParseEmbedding(EmbeddingFormat format, std::istream &in,
                         std::string label) {
  switch (format) {
    case EmbeddingFormat::kWord2VecText:
      return ParseWord2VecText(in, std::move(label));
    case EmbeddingFormat::kWord2VecBinary:
      return ParseWord2VecBinary(in, std::move(label));
    case EmbeddingFormat::kGloveText:
      return ParseGloveText(in, std::move(label));
  }
  throw DomainError("unknown embedding format");
}

Embedding ReadEmbeddingFile(EmbeddingFormat format,
                            const std::filesystem::path &path,
                            std::string label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return ParseEmbedding(format, in, std::move(label));
  } catch (const ParseError &e) {
    throw e.WithContext(path.string());
  }
}

void WriteEmbedding(const Embedding &embedding, EmbeddingFormat format,
                    std::ostream &out) {
  const int dim = embedding.dim();
  if (format != EmbeddingFormat::kGloveText) {
    out << embedding.size() << ' ' << dim << '\n';
  }
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const auto row = embedding.row(i);
    out << embedding.words()[i];
    if (format == EmbeddingFormat::kWord2VecBinary) {
      out << ' ';
      for (double v : row) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        if constexpr (std::endian::native == std::endian::big) {
          bits = __builtin_bswap32(bits);
        }
        char buf[4];
        std::memcpy(buf, &bits, 4);
        out.write(buf, 4);
      }
    } else {
      for (double v : row) out << ' ' << FormatDouble(v);
    }
    out << '\n';
  }
}

Embedding Normalize(const Embedding &raw) {
  const int dim = raw.dim();
  std::vector<double> out(raw.matrix());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double sq = 0.0;
    for (double v : raw.row(i)) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm == 0.0) {
      throw DomainError("zero vector for word '" + raw.words()[i] +
                        "' cannot be normalized");
    }
    if (std::abs(norm - 1.0) <= 1e-12) continue;
    double *dst = out.data() + i * dim;
    for (int d = 0; d < dim; ++d) dst[d] /= norm;
  }
  Embedding e(raw.label(), dim, raw.words(), std::move(out));
  e.set_case_collisions(raw.case_collisions());
  return e;
}

EmbeddingSeries::EmbeddingSeries(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first <= entries_[i - 1].first) {
      throw DomainError("series time labels must be strictly increasing (" +
                        std::to_string(entries_[i - 1].first) + " then " +
                        std::to_string(entries_[i].first) + ")");
    }
  }
}

SeriesManifest ParseManifest(std::istream &in,
                             const std::filesystem::path &base_dir) {
  SeriesManifest manifest;
  std::set<int> labels;
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
    auto fields = Split(view, '\t');
    if (fields.size() != 3) {
      throw ParseError(Reason::kMalformedRecord, line_no, true,
                       "manifest lines are label<TAB>format<TAB>path");
    }
    long long label;
    if (!ParseInt(Trim(fields[0]), &label)) {
      throw ParseError(Reason::kMalformedRecord, line_no, true,
                       "time label must be an integer");
    }
    ManifestEntry entry;
    entry.time = static_cast<int>(label);
    entry.format = ParseFormatName(Trim(fields[1]));
    std::filesystem::path p(std::string(Trim(fields[2])));
    entry.path = p.is_absolute() ? p : base_dir / p;
    if (!labels.insert(entry.time).second) {
      throw DomainError("duplicate time label " + std::to_string(entry.time) +
                        " in manifest");
    }
    if (!std::filesystem::exists(entry.path)) {
      throw IoError("manifest entry " + std::to_string(entry.time) +
                    ": no such file " + entry.path.string());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

SeriesManifest ReadManifestFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return ParseManifest(in, path.parent_path());
}

EmbeddingSeries LoadSeries(const SeriesManifest &manifest) {
  std::vector<ManifestEntry> entries = manifest.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto &a, const auto &b) { return a.time < b.time; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].time == entries[i - 1].time) {
      throw DomainError("duplicate time label " +
                        std::to_string(entries[i].time) + " in manifest");
    }
  }
  std::vector<std::future<Embedding>> jobs;
  jobs.reserve(entries.size());
  for (const auto &entry : entries) {
    jobs.push_back(std::async(std::launch::async, [entry] {
      return Normalize(ReadEmbeddingFile(entry.format, entry.path,
                                         std::to_string(entry.time)));
    }));
  }
  std::vector<EmbeddingSeries::Entry> loaded;
  loaded.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      loaded.emplace_back(entries[i].time, jobs[i].get());
    } catch (const Error &e) {
      throw Error(e.kind(), "slice " + std::to_string(entries[i].time) + ": " +
                                e.what());
    }
  }
  return EmbeddingSeries(std::move(loaded));
}

}  // namespace embias
