#ifndef EMBIAS_TOOLS_PROVENANCE_H_
#define EMBIAS_TOOLS_PROVENANCE_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace embias::cli {

// Hex SHA-256 of a file's bytes.
std::string Sha256File(const std::filesystem::path &path);

// Ordered key/value metadata written at the top of every output.
class Provenance {
 public:
  Provenance(int argc, char **argv, const std::string &subcommand);

  void Add(const std::string &key, const std::string &value);
  // Records `label: <as given> sha256=<hex>`.
  void AddInput(const std::string &label, const std::string &given,
                const std::filesystem::path &resolved);

  const std::vector<std::pair<std::string, std::string>> &entries() const {
    return entries_;
  }
  nlohmann::ordered_json ToJson() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Writes `content` to `path` via a temporary sibling and a rename, so a
// failed run never leaves a partial file. An empty path means stdout.
void WriteOutput(const std::string &path, const std::string &content);

// Same idea for a directory of files: everything is written into a temporary
// sibling directory that is renamed into place at the end.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  const std::filesystem::path &staging() const { return staging_; }
  void Commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

}  // namespace embias::cli

#endif  // EMBIAS_TOOLS_PROVENANCE_H_
