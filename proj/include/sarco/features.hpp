#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sarco/core.hpp"
#include "sarco/syntax.hpp"

namespace sarco {

/// Lowercased token stream for feature extraction. Punctuation runs and
/// emoticons ride along as ordinary tokens: "!!!" is a unigram.
inline std::vector<std::string> feature_tokens(const std::string& text, const Lexicon& lex) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(text, lex)) out.push_back(t.lower);
  return out;
}

class NgramVocab {
 public:
  int n_max = 3;
  int min_df = 1;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return index.size(); }

  /// n-gram key: tokens joined by a single space.
  static std::string key(const std::vector<std::string>& toks, std::size_t start,
                         std::size_t n) {
    std::string k = toks[start];
    for (std::size_t i = 1; i < n; ++i) {
      k += ' ';
      k += toks[start + i];
    }
    return k;
  }
};

/// Builds the 1..n_max-gram vocabulary over training posts only; tokens
/// outside it are silently dropped at featurization time.
inline NgramVocab fit_ngram_vocab(const std::vector<std::vector<std::string>>& posts,
                                  int n_max = 3, int min_df = 1) {
  if (posts.empty()) throw Error("fit_ngram_vocab: empty training set");
  if (n_max < 1) throw Error("fit_ngram_vocab: n_max must be >= 1");
  NgramVocab vocab;
  vocab.n_max = n_max;
  vocab.min_df = min_df;
  std::unordered_map<std::string, int> df;
  for (const auto& toks : posts) {
    std::unordered_map<std::string, bool> seen;
    for (int n = 1; n <= n_max; ++n) {
      if (toks.size() < static_cast<std::size_t>(n)) break;
      for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string k = NgramVocab::key(toks, i, static_cast<std::size_t>(n));
        if (!seen.emplace(std::move(k), true).second) continue;
      }
    }
    for (const auto& [k, _] : seen) ++df[k];
  }
  // assign ids in sorted key order so vocabularies are reproducible
  std::vector<const std::string*> keys;
  for (const auto& [k, count] : df)
    if (count >= min_df) keys.push_back(&k);
  std::sort(keys.begin(), keys.end(), [](const std::string* a, const std::string* b) {
    return *a < *b;
  });
  for (const auto* k : keys) vocab.index.emplace(*k, static_cast<int>(vocab.index.size()));
  return vocab;
}

/// Sparse n-gram counts over the fitted vocabulary.
inline std::vector<std::pair<int, double>> ngram_counts(
    const std::vector<std::string>& toks, const NgramVocab& vocab) {
  std::unordered_map<int, double> acc;
  for (int n = 1; n <= vocab.n_max; ++n) {
    if (toks.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      auto it = vocab.index.find(NgramVocab::key(toks, i, static_cast<std::size_t>(n)));
      if (it != vocab.index.end()) acc[it->second] += 1.0;
    }
  }
  std::vector<std::pair<int, double>> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Plain-text embedding table: one "word v1 ... vd" line per word.
class EmbeddingTable {
 public:
  int dim = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;

  static EmbeddingTable load(std::istream& in, const std::string& name) {
    EmbeddingTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string word;
      ss >> word;
      std::vector<float> vec;
      double v;
      while (ss >> v) vec.push_back(static_cast<float>(v));
      if (word.empty() || vec.empty())
        throw Error(name + ":" + std::to_string(lineno) + ": malformed embedding row");
      if (table.dim == 0) table.dim = static_cast<int>(vec.size());
      if (static_cast<int>(vec.size()) != table.dim)
        throw Error(name + ":" + std::to_string(lineno) + ": dimension mismatch (" +
                    std::to_string(vec.size()) + " vs " + std::to_string(table.dim) + ")");
      table.vectors.emplace(std::move(word), std::move(vec));
    }
    return table;
  }

  static EmbeddingTable load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embedding file: " + path);
    return load(in, path);
  }
};

struct EmbeddingAverage {
  std::vector<double> vec;
  bool all_oov = false;
};

/// Componentwise mean of the in-table token vectors; a post with no
/// known token maps to the zero vector with the all_oov flag raised.
inline EmbeddingAverage embed_average(const std::vector<std::string>& toks,
                                      const EmbeddingTable& table) {
  EmbeddingAverage out;
  out.vec.assign(static_cast<std::size_t>(table.dim), 0.0);
  std::size_t known = 0;
  for (const auto& t : toks) {
    auto it = table.vectors.find(t);
    if (it == table.vectors.end()) continue;
    ++known;
    for (std::size_t d = 0; d < out.vec.size(); ++d) out.vec[d] += it->second[d];
  }
  if (known == 0) {
    out.all_oov = true;
    return out;
  }
  for (double& v : out.vec) v /= static_cast<double>(known);
  return out;
}

/// Sparse n-gram half plus optional dense embedding half. Dense values
/// occupy feature ids [sparse_dim, sparse_dim + dense.size()).
struct FeatureVector {
  std::vector<std::pair<int, double>> sparse;
  std::vector<double> dense;
};

}  // namespace sarco
