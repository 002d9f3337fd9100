#include "provenance.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <fstream>
#include <iostream>
#include <memory>

#include "embias/error.h"

namespace embias::cli {

namespace fs = std::filesystem;

std::string Sha256File(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("internal", "sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), in.gcount());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

namespace {

std::string ShellQuote(const std::string &arg) {
  if (!arg.empty() && arg.find_first_not_of(
                          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                          "0123456789-_./=,:+") == std::string::npos) {
    return arg;
  }
  std::string out = "'";
  for (char c : arg) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

}  // namespace

Provenance::Provenance(int argc, char **argv, const std::string &subcommand) {
  std::string command = "embias";
  for (int i = 1; i < argc; ++i) command += " " + ShellQuote(argv[i]);
  Add("tool", "embias 0.1.0");
  Add("command", command);
  Add("subcommand", subcommand);
}

void Provenance::Add(const std::string &key, const std::string &value) {
  std::string clean = value;
  for (char &c : clean) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  entries_.emplace_back(key, clean);
}

void Provenance::AddInput(const std::string &label, const std::string &given,
                          const fs::path &resolved) {
  Add("input " + label, given + " sha256=" + Sha256File(resolved));
}

nlohmann::ordered_json Provenance::ToJson() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &[k, v] : entries_) j[k] = v;
  return j;
}

void WriteOutput(const std::string &path, const std::string &content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const fs::path target(path);
  const fs::path tmp =
      target.string() + ".tmp-" + std::to_string(static_cast<long>(getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + target.string());
  }
}

StagedDirectory::StagedDirectory(fs::path target) : target_(std::move(target)) {
  if (fs::exists(target_) &&
      (!fs::is_directory(target_) || !fs::is_empty(target_))) {
    throw IoError("output directory " + target_.string() +
                  " exists and is not empty");
  }
  staging_ = target_.string() + ".tmp-" +
             std::to_string(static_cast<long>(getpid()));
  fs::remove_all(staging_);
  if (!fs::create_directories(staging_)) {
    throw IoError("cannot create " + staging_.string());
  }
}

StagedDirectory::~StagedDirectory() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagedDirectory::Commit() {
  std::error_code ec;
  if (fs::exists(target_)) fs::remove(target_, ec);
  fs::rename(staging_, target_, ec);
  if (ec) throw IoError("cannot move output directory into place at " + target_.string());
  committed_ = true;
}

}  // namespace embias::cli
