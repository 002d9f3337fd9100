#include "embias/trainer.h"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "embias/error.h"
#include "embias/stats.h"
#include "embias/text.h"

namespace embias {

std::vector<DatedDocument> ParseCorpus(std::istream &in) {
  std::vector<DatedDocument> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    long long year;
    if (tab == std::string::npos || !ParseInt(Trim(line.substr(0, tab)), &year)) {
      throw ParseError(ParseError::Reason::kMalformedRecord, line_no, true,
                       "corpus lines are YYYY<TAB>tokens");
    }
    DatedDocument doc;
    doc.year = static_cast<int>(year);
    for (auto tok : SplitWhitespace(std::string_view(line).substr(tab + 1))) {
      if (!tok.empty() && tok.back() == '\r') tok.remove_suffix(1);
      if (!tok.empty()) doc.tokens.push_back(ToLower(tok));
    }
    if (!doc.tokens.empty()) docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<DatedDocument> LoadCorpus(const std::filesystem::path &path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<DatedDocument> docs;
    for (const auto &file : files) {
      long long year;
      if (!ParseInt(file.stem().string(), &year)) continue;
      std::ifstream in(file);
      if (!in) throw IoError("cannot open " + file.string());
      std::string line;
      while (std::getline(in, line)) {
        DatedDocument doc{static_cast<int>(year), {}};
        for (auto tok : SplitWhitespace(line)) {
          if (!tok.empty() && tok.back() == '\r') tok.remove_suffix(1);
          if (!tok.empty()) doc.tokens.push_back(ToLower(tok));
        }
        if (!doc.tokens.empty()) docs.push_back(std::move(doc));
      }
    }
    return docs;
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return ParseCorpus(in);
}

std::vector<CorpusSlice> SliceCorpus(const std::vector<DatedDocument> &docs,
                                     int window_years, int step_years,
                                     std::optional<int> first_center) {
  if (window_years < 1 || step_years < 1) {
    throw DomainError("slice window and step must both be >= 1");
  }
  if (docs.empty()) throw DomainError("cannot slice an empty corpus");
  const int half = window_years / 2;
  int min_year = docs.front().year, max_year = docs.front().year;
  for (const auto &d : docs) {
    min_year = std::min(min_year, d.year);
    max_year = std::max(max_year, d.year);
  }
  std::vector<CorpusSlice> slices;
  for (int center = first_center.value_or(min_year + half);
       center - half <= max_year; center += step_years) {
    CorpusSlice slice{center, {}};
    for (const auto &d : docs) {
      if (d.year >= center - half && d.year <= center + half) {
        slice.documents.push_back(d.tokens);
      }
    }
    if (!slice.documents.empty()) slices.push_back(std::move(slice));
  }
  return slices;
}

std::int64_t CooccurrenceCounts::count(const std::string &a,
                                       const std::string &b) const {
  auto ia = std::lower_bound(vocab.begin(), vocab.end(), a);
  auto ib = std::lower_bound(vocab.begin(), vocab.end(), b);
  if (ia == vocab.end() || *ia != a || ib == vocab.end() || *ib != b) return 0;
  auto it = pairs.find({static_cast<int>(ia - vocab.begin()),
                        static_cast<int>(ib - vocab.begin())});
  return it == pairs.end() ? 0 : it->second;
}

CooccurrenceCounts CountCooccurrences(
    const std::vector<std::vector<std::string>> &documents, int window,
    std::int64_t min_count) {
  if (window < 1) throw DomainError("co-occurrence window must be >= 1");
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto &doc : documents) {
    for (const auto &tok : doc) ++freq[tok];
  }
  CooccurrenceCounts out;
  for (const auto &[word, n] : freq) {
    if (n >= min_count) out.vocab.push_back(word);
  }
  std::sort(out.vocab.begin(), out.vocab.end());
  std::unordered_map<std::string, int> id;
  for (std::size_t i = 0; i < out.vocab.size(); ++i) {
    id.emplace(out.vocab[i], static_cast<int>(i));
    out.word_counts.push_back(freq[out.vocab[i]]);
  }

  std::unordered_map<std::uint64_t, std::int64_t> acc;
  auto key = [](int a, int b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  std::vector<int> ids;
  for (const auto &doc : documents) {
    ids.clear();
    for (const auto &tok : doc) {
      auto it = id.find(tok);
      ids.push_back(it == id.end() ? -1 : it->second);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0) continue;
      const std::size_t end = std::min(ids.size(), i + window + 1);
      for (std::size_t j = i + 1; j < end; ++j) {
        if (ids[j] < 0) continue;
        ++acc[key(ids[i], ids[j])];
        ++acc[key(ids[j], ids[i])];
      }
    }
  }
  for (const auto &[k, n] : acc) {
    out.pairs.emplace(std::make_pair(static_cast<int>(k >> 32),
                                     static_cast<int>(k & 0xffffffffu)),
                      n);
    out.total_pairs += n;
  }
  return out;
}

SparseMatrix Ppmi(const CooccurrenceCounts &counts, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("context smoothing alpha must lie in (0, 1]");
  }
  const int n = static_cast<int>(counts.vocab.size());
  SparseMatrix m(n, n);
  if (counts.total_pairs <= 0) return m;
  std::vector<double> row_sum(n, 0.0), col_sum(n, 0.0);
  for (const auto &[key, c] : counts.pairs) {
    row_sum[key.first] += c;
    col_sum[key.second] += c;
  }
  std::vector<double> ctx(n);
  double ctx_total = 0.0;
  for (int i = 0; i < n; ++i) {
    ctx[i] = alpha == 1.0 ? col_sum[i] : std::pow(col_sum[i], alpha);
    ctx_total += ctx[i];
  }
  const double total = static_cast<double>(counts.total_pairs);
  std::vector<Eigen::Triplet<double>> entries;
  for (const auto &[key, c] : counts.pairs) {
    const double p_wc = c / total;
    const double p_w = row_sum[key.first] / total;
    const double p_c = ctx[key.second] / ctx_total;
    const double pmi = std::log(p_wc / (p_w * p_c));
    if (pmi > 0.0) entries.emplace_back(key.first, key.second, pmi);
  }
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

SvdFactors TruncatedSvd(const Eigen::MatrixXd &m, int k) {
  const int max_k = static_cast<int>(std::min(m.rows(), m.cols()));
  if (k < 1 || k > max_k) {
    throw DomainError("SVD dimension " + std::to_string(k) +
                      " outside [1, " + std::to_string(max_k) + "]");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.u = svd.matrixU().leftCols(k);
  f.v = svd.matrixV().leftCols(k);
  f.sigma = svd.singularValues().head(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index arg;
    f.u.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.u(arg, j) < 0.0) {
      f.u.col(j) *= -1.0;
      f.v.col(j) *= -1.0;
    }
  }
  return f;
}

Embedding SvdEmbed(const SparseMatrix &ppmi, const std::vector<std::string> &vocab,
                   int dim, std::string label) {
  if (static_cast<std::size_t>(ppmi.rows()) != vocab.size()) {
    throw DomainError("PPMI rows do not match the vocabulary");
  }
  std::vector<int> keep;
  for (int r = 0; r < ppmi.rows(); ++r) {
    if (ppmi.row(r).nonZeros() > 0) keep.push_back(r);
  }
  if (keep.empty()) throw DomainError("PPMI matrix has no positive entries");
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(keep.size()), ppmi.cols());
  dense.setZero();
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (SparseMatrix::InnerIterator it(ppmi, keep[i]); it; ++it) {
      dense(static_cast<Eigen::Index>(i), it.col()) = it.value();
    }
  }
  const SvdFactors f = TruncatedSvd(dense, dim);
  const Eigen::MatrixXd rows = f.u * f.sigma.cwiseSqrt().asDiagonal();
  std::vector<std::string> words;
  std::vector<double> data;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto r = rows.row(static_cast<Eigen::Index>(i));
    if (r.squaredNorm() == 0.0) continue;
    words.push_back(vocab[keep[i]]);
    for (int d = 0; d < dim; ++d) data.push_back(r(d));
  }
  return Normalize(Embedding(std::move(label), dim, std::move(words),
                             std::move(data)));
}

namespace {

double LogSigmoidNeg(double x) {
  // -log(sigmoid(x)), stable for large |x|.
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SgnsResult TrainSgns(const std::vector<std::vector<std::string>> &documents,
                     const TrainerParams &params, std::string label) {
  if (params.dim < 1 || params.window < 1 || params.negatives < 0 ||
      params.epochs < 1 || params.workers < 1 || !(params.learning_rate > 0)) {
    throw DomainError("invalid trainer parameters");
  }
  if (!(params.smoothing_alpha > 0.0 && params.smoothing_alpha <= 1.0)) {
    throw DomainError("smoothing alpha must lie in (0, 1]");
  }
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto &doc : documents) {
    for (const auto &tok : doc) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::int64_t>> vocab;
  for (const auto &[w, n] : freq) {
    if (n >= params.min_count) vocab.emplace_back(w, n);
  }
  if (vocab.empty()) {
    throw DomainError("corpus is empty after min_count filtering");
  }
  std::sort(vocab.begin(), vocab.end(), [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  const int v = static_cast<int>(vocab.size());
  const int dim = params.dim;
  std::unordered_map<std::string, int> id;
  for (int i = 0; i < v; ++i) id.emplace(vocab[i].first, i);

  std::vector<std::vector<int>> corpus;
  std::int64_t total_tokens = 0;
  for (const auto &doc : documents) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto &tok : doc) {
      auto it = id.find(tok);
      ids.push_back(it == id.end() ? -1 : it->second);
      total_tokens += it != id.end();
    }
    corpus.push_back(std::move(ids));
  }

  std::vector<double> cdf(v);
  double acc = 0.0;
  for (int i = 0; i < v; ++i) {
    acc += std::pow(static_cast<double>(vocab[i].second), params.smoothing_alpha);
    cdf[i] = acc;
  }
  for (double &c : cdf) c /= acc;

  std::vector<double> in_vec(static_cast<std::size_t>(v) * dim);
  std::vector<double> out_vec(static_cast<std::size_t>(v) * dim, 0.0);
  {
    StreamRng rng(params.seed, 0xffffffffULL);
    for (double &x : in_vec) x = (rng.Uniform() - 0.5) / dim;
  }

  const double total_steps =
      static_cast<double>(params.epochs) * static_cast<double>(total_tokens);
  std::atomic<std::int64_t> processed{0};
  SgnsResult result{Embedding("", 1, {}, {}), {}};

  // Shared parameters are touched through relaxed atomic_refs so that the
  // multi-worker mode is race-free (if not reproducible).
  auto load = [](double &x) {
    return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
  };
  auto store = [](double &x, double val) {
    std::atomic_ref<double>(x).store(val, std::memory_order_relaxed);
  };

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::vector<double> loss(params.workers, 0.0);
    std::vector<std::int64_t> pair_count(params.workers, 0);
    auto worker = [&](int w) {
      StreamRng rng(params.seed, static_cast<std::uint64_t>(epoch) *
                                     params.workers + w);
      std::vector<double> grad(dim), center(dim);
      for (std::size_t d = w; d < corpus.size(); d += params.workers) {
        const auto &ids = corpus[d];
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (ids[i] < 0) continue;
          const std::int64_t done =
              processed.fetch_add(1, std::memory_order_relaxed);
          const double lr = params.learning_rate *
                            std::max(1e-4, 1.0 - done / total_steps);
          double *wv = in_vec.data() + static_cast<std::size_t>(ids[i]) * dim;
          const std::size_t lo = i >= static_cast<std::size_t>(params.window)
                                     ? i - params.window
                                     : 0;
          const std::size_t hi = std::min(ids.size(), i + params.window + 1);
          for (std::size_t j = lo; j < hi; ++j) {
            if (j == i || ids[j] < 0) continue;
            for (int k = 0; k < dim; ++k) center[k] = load(wv[k]);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (int s = 0; s <= params.negatives; ++s) {
              int target;
              double label_v;
              if (s == 0) {
                target = ids[j];
                label_v = 1.0;
              } else {
                const double u = rng.Uniform();
                target = static_cast<int>(
                    std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                if (target >= v) target = v - 1;
                if (target == ids[j]) continue;
                label_v = 0.0;
              }
              double *cv = out_vec.data() + static_cast<std::size_t>(target) * dim;
              double dot = 0.0;
              for (int k = 0; k < dim; ++k) dot += center[k] * load(cv[k]);
              loss[w] += label_v > 0 ? LogSigmoidNeg(dot) : LogSigmoidNeg(-dot);
              const double g = (label_v - Sigmoid(dot)) * lr;
              for (int k = 0; k < dim; ++k) {
                const double c = load(cv[k]);
                grad[k] += g * c;
                store(cv[k], c + g * center[k]);
              }
            }
            for (int k = 0; k < dim; ++k) store(wv[k], load(wv[k]) + grad[k]);
            ++pair_count[w];
          }
        }
      }
    };
    if (params.workers == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < params.workers; ++w) pool.emplace_back(worker, w);
      for (auto &t : pool) t.join();
    }
    double l = 0.0;
    std::int64_t pairs = 0;
    for (int w = 0; w < params.workers; ++w) {
      l += loss[w];
      pairs += pair_count[w];
    }
    result.epoch_loss.push_back(pairs > 0 ? l / pairs : 0.0);
  }

  std::vector<std::string> words;
  words.reserve(v);
  for (const auto &[w, n] : vocab) words.push_back(w);
  result.embedding =
      Normalize(Embedding(std::move(label), dim, std::move(words), std::move(in_vec)));
  return result;
}

}  // namespace embias
