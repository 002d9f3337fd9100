#ifndef EMBIAS_EMBEDDING_H_
#define EMBIAS_EMBEDDING_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace embias {

using Vector = std::vector<double>;

enum class EmbeddingFormat { kWord2VecText, kWord2VecBinary, kGloveText };

EmbeddingFormat ParseFormatName(std::string_view name);
const char *FormatName(EmbeddingFormat format);

// Vocabulary plus a dense |vocab| x dim matrix of doubles for one time slice.
// Immutable once built; rows are addressed by the index of the word's first
// occurrence in the source.
class Embedding {
 public:
  // `matrix` is row-major with words.size() * dim entries. Words must be
  // unique. Throws DomainError on shape problems or non-finite values.
  Embedding(std::string label, int dim, std::vector<std::string> words,
            std::vector<double> matrix);

  const std::string &label() const { return label_; }
  int dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

  bool contains(std::string_view word) const {
    return index_.find(std::string(word)) != index_.end();
  }
  std::optional<std::size_t> index_of(std::string_view word) const;

  std::span<const double> row(std::size_t i) const {
    return {matrix_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  // Throws DomainError if `word` is not in the vocabulary.
  std::span<const double> vector(std::string_view word) const;

  const std::vector<double> &matrix() const { return matrix_; }

  // Number of later entries dropped because they collided with an earlier
  // word after lowercasing (first occurrence wins).
  std::size_t case_collisions() const { return case_collisions_; }
  void set_case_collisions(std::size_t n) { case_collisions_ = n; }

  bool operator==(const Embedding &other) const {
    return dim_ == other.dim_ && words_ == other.words_ &&
           matrix_ == other.matrix_;
  }

 private:
  std::string label_;
  int dim_;
  std::vector<std::string> words_;
  std::vector<double> matrix_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t case_collisions_ = 0;
};

// Reads one embedding in the given on-disk format. Words are lowercased;
// on collision the first vector is kept. Vectors are not normalized.
Embedding ParseEmbedding(EmbeddingFormat format, std::istream &in,
                         std::string label = "");
Embedding ReadEmbeddingFile(EmbeddingFormat format,
                            const std::filesystem::path &path,
                            std::string label = "");

// Binary output narrows to 32-bit floats; text output prints the shortest
// decimal that round-trips each double.
void WriteEmbedding(const Embedding &embedding, EmbeddingFormat format,
                    std::ostream &out);

// Scales every row to unit l2 norm. Rows already within 1e-12 of unit norm
// are copied unchanged, so Normalize(Normalize(e)) == Normalize(e) exactly.
// Throws DomainError naming the first zero row.
Embedding Normalize(const Embedding &raw);

class EmbeddingSeries {
 public:
  using Entry = std::pair<int, Embedding>;

  EmbeddingSeries() = default;
  // Labels must be strictly increasing.
  explicit EmbeddingSeries(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry &operator[](std::size_t i) const { return entries_[i]; }
  int time(std::size_t i) const { return entries_[i].first; }
  const Embedding &embedding(std::size_t i) const { return entries_[i].second; }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::vector<Entry> entries_;
};

struct ManifestEntry {
  int time = 0;
  EmbeddingFormat format = EmbeddingFormat::kWord2VecText;
  std::filesystem::path path;
};

struct SeriesManifest {
  std::vector<ManifestEntry> entries;
};

// Parses "label<TAB>format<TAB>path" lines; '#' starts a comment. Relative
// paths resolve against `base_dir`. Checks that labels are unique and that
// every path exists.
SeriesManifest ParseManifest(std::istream &in,
                             const std::filesystem::path &base_dir);
SeriesManifest ReadManifestFile(const std::filesystem::path &path);

// Parses and normalizes every entry (files in parallel) and orders the
// result by time label. Errors are rethrown with the offending label.
EmbeddingSeries LoadSeries(const SeriesManifest &manifest);

}  // namespace embias

#endif  // EMBIAS_EMBEDDING_H_
