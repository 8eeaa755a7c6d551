#include <catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "sarco/features.hpp"

using namespace sarco;
using testutil::lexicon;

TEST_CASE("unigram bigram trigram counts on a short post") {
  std::vector<std::vector<std::string>> posts = {
      feature_tokens("give me a break", lexicon())};
  NgramVocab v = fit_ngram_vocab(posts, 3, 1);
  // 4 unigrams + 3 bigrams + 2 trigrams
  CHECK(v.size() == 9);
  CHECK(v.index.count("give"));
  CHECK(v.index.count("give me"));
  CHECK(v.index.count("me a break"));
}

TEST_CASE("punctuation runs are ordinary features") {
  std::vector<std::vector<std::string>> posts = {
      feature_tokens("wow !!! just wow", lexicon())};
  NgramVocab v = fit_ngram_vocab(posts, 3, 1);
  CHECK(v.index.count("!!!"));
  CHECK(v.index.count("wow !!!"));
  auto counts = ngram_counts(posts[0], v);
  double wow_count = 0;
  for (const auto& [id, value] : counts)
    if (id == v.index.at("wow")) wow_count = value;
  CHECK(wow_count == 2.0);
}

TEST_CASE("tokens outside the fitted vocabulary are dropped") {
  std::vector<std::vector<std::string>> train = {feature_tokens("known words only", lexicon())};
  NgramVocab v = fit_ngram_vocab(train, 2, 1);
  auto dev = feature_tokens("unknown stuff with known words", lexicon());
  auto counts = ngram_counts(dev, v);
  for (const auto& [id, value] : counts) CHECK(id < static_cast<int>(v.size()));
  double total = 0;
  for (const auto& [id, value] : counts) total += value;
  CHECK(total == 3.0);  // "known", "words", "known words"
}

TEST_CASE("min_df prunes rare n-grams") {
  std::vector<std::vector<std::string>> posts = {
      feature_tokens("alpha beta", lexicon()),
      feature_tokens("alpha gamma", lexicon()),
  };
  NgramVocab v = fit_ngram_vocab(posts, 1, 2);
  CHECK(v.index.count("alpha") == 1);
  CHECK(v.index.count("beta") == 0);
  CHECK(v.index.count("gamma") == 0);
}

TEST_CASE("empty training set is rejected") {
  CHECK_THROWS_AS(fit_ngram_vocab({}, 3, 1), Error);
}

TEST_CASE("n-gram counts equal a brute-force sliding recount") {
  std::mt19937_64 rng(3);
  std::vector<std::string> words = {"a", "b", "c", "dd", "!!", ":)"};
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> toks;
    std::size_t len = rng() % 12;
    for (std::size_t i = 0; i < len; ++i) toks.push_back(words[rng() % words.size()]);
    if (toks.empty()) continue;
    NgramVocab v = fit_ngram_vocab({toks}, 3, 1);
    auto counts = ngram_counts(toks, v);
    std::map<std::string, double> by_key;
    for (const auto& [id, value] : counts)
      for (const auto& [key, kid] : v.index)
        if (kid == id) by_key[key] = value;
    // brute force: enumerate all windows
    std::map<std::string, double> brute;
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key = toks[i];
        for (std::size_t j = 1; j < n; ++j) key += " " + toks[i + j];
        brute[key] += 1.0;
      }
    CHECK(by_key == brute);
  }
}

// ---- embeddings ----

static EmbeddingTable table3() {
  std::istringstream in(
      "alpha 1 2 3\n"
      "beta 3 4 5\n"
      "gamma -1 0 1\n");
  return EmbeddingTable::load(in, "mem");
}

TEST_CASE("embedding table loads and rejects ragged rows") {
  EmbeddingTable t = table3();
  CHECK(t.dim == 3);
  CHECK(t.vectors.size() == 3);
  std::istringstream bad(
      "alpha 1 2 3\n"
      "beta 1 2\n");
  CHECK_THROWS_WITH(EmbeddingTable::load(bad, "mem"),
                    Catch::Matchers::ContainsSubstring("dimension mismatch"));
}

TEST_CASE("single known token returns its own vector") {
  EmbeddingTable t = table3();
  auto avg = embed_average({"alpha", "zzz"}, t);
  CHECK_FALSE(avg.all_oov);
  CHECK(avg.vec == std::vector<double>{1, 2, 3});
}

TEST_CASE("two known tokens average componentwise") {
  EmbeddingTable t = table3();
  auto avg = embed_average({"alpha", "beta"}, t);
  CHECK(avg.vec == std::vector<double>{2, 3, 4});
}

TEST_CASE("all-oov posts map to flagged zero vector") {
  EmbeddingTable t = table3();
  auto avg = embed_average({"zzz", "qqq"}, t);
  CHECK(avg.all_oov);
  CHECK(avg.vec == std::vector<double>{0, 0, 0});
}

TEST_CASE("embedding average is permutation-invariant and scale-equivariant") {
  EmbeddingTable t = table3();
  std::vector<std::string> toks = {"alpha", "beta", "gamma", "beta"};
  auto a = embed_average(toks, t);
  std::vector<std::string> shuffled = {"beta", "gamma", "beta", "alpha"};
  auto b = embed_average(shuffled, t);
  for (std::size_t d = 0; d < a.vec.size(); ++d)
    CHECK(a.vec[d] == Catch::Approx(b.vec[d]));

  EmbeddingTable scaled = t;
  for (auto& [word, vec] : scaled.vectors)
    for (auto& x : vec) x *= 4.0f;
  auto c = embed_average(toks, scaled);
  for (std::size_t d = 0; d < a.vec.size(); ++d)
    CHECK(c.vec[d] == Catch::Approx(4.0 * a.vec[d]));
}
