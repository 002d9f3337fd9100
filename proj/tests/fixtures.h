#ifndef EMBIAS_TESTS_FIXTURES_H_
#define EMBIAS_TESTS_FIXTURES_H_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "embias/embedding.h"
#include "embias/wordlist.h"

namespace fixtures {

inline embias::Embedding Make(
    const std::vector<std::pair<std::string, std::vector<double>>> &rows,
    std::string label = "") {
  std::vector<std::string> words;
  std::vector<double> data;
  const int dim = static_cast<int>(rows.front().second.size());
  for (const auto &[w, v] : rows) {
    words.push_back(w);
    data.insert(data.end(), v.begin(), v.end());
  }
  return embias::Embedding(std::move(label), dim, std::move(words),
                           std::move(data));
}

inline embias::WordList List(std::string name, std::vector<std::string> words) {
  return {std::move(name), std::move(words)};
}

// he=(1,0), she=(0,1), nurse=(0.6,0.8).
inline embias::Embedding TwoD() {
  return Make({{"he", {1, 0}}, {"she", {0, 1}}, {"nurse", {0.6, 0.8}}});
}

inline const std::vector<std::string> kHeWords = {"he", "him", "his", "man"};
inline const std::vector<std::string> kSheWords = {"she", "her", "hers", "woman"};

// Sentences of filler words with gendered words clustered by gender; "nurse"
// appears next to a she-word ten times as often as next to a he-word.
inline std::vector<std::vector<std::string>> PlantedCorpus(unsigned seed,
                                                           int sentences = 1500) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> filler(0, 39), pick4(0, 3), coin(0, 10);
  auto fill = [&](std::vector<std::string> &s, int n) {
    for (int i = 0; i < n; ++i) s.push_back("w" + std::to_string(filler(gen)));
  };
  std::vector<std::vector<std::string>> docs;
  for (int i = 0; i < sentences; ++i) {
    std::vector<std::string> s;
    fill(s, 2);
    switch (i % 3) {
      case 0:
        for (int j = 0; j < 3; ++j) s.push_back(kHeWords[pick4(gen)]);
        break;
      case 1:
        for (int j = 0; j < 3; ++j) s.push_back(kSheWords[pick4(gen)]);
        break;
      default: {
        const auto &g = coin(gen) == 0 ? kHeWords : kSheWords;
        s.push_back(g[pick4(gen)]);
        s.push_back("nurse");
        s.push_back(g[pick4(gen)]);
      }
    }
    fill(s, 2);
    docs.push_back(std::move(s));
  }
  return docs;
}

}  // namespace fixtures

#endif  // EMBIAS_TESTS_FIXTURES_H_
