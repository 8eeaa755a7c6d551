#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarco/corpus.hpp"
#include "sarco/features.hpp"
#include "sarco/sgd.hpp"

namespace sarco {

struct FeatureConfig {
  bool ngrams = true;
  int n_max = 3;
  int min_df = 1;
  bool embeddings = false;
  const EmbeddingTable* table = nullptr;

  void validate() const {
    if (!ngrams && !embeddings) throw Error("feature config selects no features");
    if (embeddings && !table) throw Error("embedding features need a loaded table");
  }
  std::string describe() const {
    std::string s;
    if (ngrams) s += "ngrams(n<=" + std::to_string(n_max) + ",min_df=" + std::to_string(min_df) + ")";
    if (embeddings) s += std::string(s.empty() ? "" : "+") + "w2v(dim=" +
                         std::to_string(table ? table->dim : 0) + ")";
    return s;
  }
};

struct ClassMetrics {
  long long tp = 0, fp = 0, fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct FoldMetrics {
  ClassMetrics per_class[2];  // indexed by label_index
};

struct EvalReport {
  int k = 0;
  std::uint64_t seed = 0;
  Hyperparams hp;
  std::string feature_desc;
  std::vector<FoldMetrics> folds;
  bool degenerate = false;  // some fold saw a single-class test side

  FoldMetrics pooled() const {
    FoldMetrics p;
    for (const auto& f : folds)
      for (int c = 0; c < 2; ++c) {
        p.per_class[c].tp += f.per_class[c].tp;
        p.per_class[c].fp += f.per_class[c].fp;
        p.per_class[c].fn += f.per_class[c].fn;
      }
    return p;
  }
};

namespace detail {

inline FeatureVector featurize_post(const std::vector<std::string>& toks,
                                    const FeatureConfig& fc, const NgramVocab* vocab) {
  FeatureVector fv;
  if (fc.ngrams) fv.sparse = ngram_counts(toks, *vocab);
  if (fc.embeddings) fv.dense = embed_average(toks, *fc.table).vec;
  return fv;
}

}  // namespace detail

/// 10-fold (by default) cross-validation. The n-gram vocabulary is
/// fitted per fold on the train side only, so no test token leaks into
/// the feature space.
inline EvalReport cross_validate(const Corpus& corpus, const Lexicon& lex, int k,
                                 const FeatureConfig& fc, const Hyperparams& hp,
                                 std::uint64_t seed) {
  fc.validate();
  FoldAssignment folds = split_folds(corpus, k, seed);

  // tokenize once
  std::vector<std::vector<std::string>> toks;
  std::vector<Label> labels;
  std::vector<int> fold_of;
  toks.reserve(corpus.size());
  for (const auto& p : corpus) {
    toks.push_back(feature_tokens(p.response.text, lex));
    labels.push_back(*p.label);
    fold_of.push_back(folds.fold_of(p.response.id));
  }

  EvalReport report;
  report.k = k;
  report.seed = seed;
  report.hp = hp;
  report.feature_desc = fc.describe();

  for (int f = 0; f < k; ++f) {
    std::vector<std::vector<std::string>> train_toks;
    std::vector<Label> train_labels;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (fold_of[i] == f) {
        test_idx.push_back(i);
      } else {
        train_toks.push_back(toks[i]);
        train_labels.push_back(labels[i]);
      }
    }
    NgramVocab vocab;
    if (fc.ngrams) vocab = fit_ngram_vocab(train_toks, fc.n_max, fc.min_df);
    std::size_t sparse_dim = fc.ngrams ? vocab.size() : 0;
    std::size_t dense_dim = fc.embeddings ? static_cast<std::size_t>(fc.table->dim) : 0;

    std::vector<FeatureVector> train_x;
    train_x.reserve(train_toks.size());
    for (const auto& t : train_toks)
      train_x.push_back(detail::featurize_post(t, fc, &vocab));
    LinearModel model = train(train_x, train_labels, sparse_dim, dense_dim, hp);

    FoldMetrics fm;
    bool saw[2] = {false, false};
    for (std::size_t i : test_idx) {
      Label pred = model.predict(detail::featurize_post(toks[i], fc, &vocab));
      Label gold = labels[i];
      saw[label_index(gold)] = true;
      for (Label cls : {Label::Sarcastic, Label::NotSarcastic}) {
        ClassMetrics& m = fm.per_class[label_index(cls)];
        if (pred == cls && gold == cls) ++m.tp;
        else if (pred == cls && gold != cls) ++m.fp;
        else if (pred != cls && gold == cls) ++m.fn;
      }
    }
    if (!saw[0] || !saw[1]) report.degenerate = true;
    report.folds.push_back(fm);
  }
  return report;
}

struct CurvePoint {
  std::size_t size_per_class = 0;
  double f_sarc = 0.0;
  double f_notsarc = 0.0;
  bool degenerate = false;
};

/// F-measure as a function of dataset size: evaluates cross_validate on
/// seeded random subsets of s posts per class for s = step, 2*step, ...,
/// plus the terminal full per-class size.
inline std::vector<CurvePoint> learning_curve(const Corpus& corpus, const Lexicon& lex,
                                              std::size_t step, const FeatureConfig& fc,
                                              const Hyperparams& hp, std::uint64_t seed,
                                              int k = 10) {
  if (step == 0) throw Error("learning_curve: step must be positive");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.at(i);
    if (!p.label) throw Error("learning_curve: unlabeled post " + p.response.id);
    by_class[label_index(*p.label)].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    // constant-label corpus: no curve can be computed, report one
    // degenerate point rather than crash
    CurvePoint pt;
    pt.size_per_class = by_class[0].size() + by_class[1].size();
    pt.degenerate = true;
    return {pt};
  }
  std::size_t per_class = std::min(by_class[0].size(), by_class[1].size());
  if (step > per_class)
    throw Error("learning_curve: step " + std::to_string(step) +
                " exceeds per-class size " + std::to_string(per_class));

  std::vector<std::size_t> sizes;
  for (std::size_t s = step; s < per_class; s += step) sizes.push_back(s);
  sizes.push_back(per_class);

  std::vector<CurvePoint> out;
  for (std::size_t s : sizes) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (s + 1)));
    Corpus subset;
    for (auto& idx : by_class) {
      std::vector<std::size_t> pick = idx;
      deterministic_shuffle(pick, rng);
      pick.resize(s);
      std::sort(pick.begin(), pick.end());  // keep ingestion order inside the subset
      for (std::size_t i : pick) subset.add(corpus.at(i));
    }
    EvalReport rep = cross_validate(subset, lex, k, fc, hp, seed);
    FoldMetrics pooled = rep.pooled();
    CurvePoint pt;
    pt.size_per_class = s;
    pt.f_sarc = pooled.per_class[label_index(Label::Sarcastic)].f1();
    pt.f_notsarc = pooled.per_class[label_index(Label::NotSarcastic)].f1();
    pt.degenerate = rep.degenerate;
    out.push_back(pt);
  }
  return out;
}

inline void save_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
  out << "size,f_sarc,f_notsarc\n";
  char buf[96];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", pt.size_per_class, pt.f_sarc,
                  pt.f_notsarc);
    out << buf;
  }
}

inline nlohmann::json eval_report_json(const EvalReport& r) {
  nlohmann::json j;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["features"] = r.feature_desc;
  j["hyperparams"] = {{"l2_lambda", r.hp.l2_lambda},
                      {"eta0", r.hp.eta0},
                      {"power", r.hp.power},
                      {"epochs", r.hp.epochs},
                      {"seed", r.hp.seed}};
  j["degenerate"] = r.degenerate;
  auto cls_json = [](const ClassMetrics& m) {
    return nlohmann::json{{"precision", m.precision()}, {"recall", m.recall()},
                          {"f1", m.f1()},               {"tp", m.tp},
                          {"fp", m.fp},                 {"fn", m.fn}};
  };
  FoldMetrics pooled = r.pooled();
  j["pooled"] = {{"sarc", cls_json(pooled.per_class[0])},
                 {"notsarc", cls_json(pooled.per_class[1])}};
  j["folds"] = nlohmann::json::array();
  for (const auto& f : r.folds)
    j["folds"].push_back({{"sarc", cls_json(f.per_class[0])},
                          {"notsarc", cls_json(f.per_class[1])}});
  return j;
}

/// Two per-class P/R/F rows per feature set.
inline void eval_report_tsv(const EvalReport& r, std::ostream& out) {
  FoldMetrics pooled = r.pooled();
  out << "#features\tclass\tP\tR\tF\n";
  char buf[160];
  for (Label cls : {Label::Sarcastic, Label::NotSarcastic}) {
    const ClassMetrics& m = pooled.per_class[label_index(cls)];
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.2f\t%.2f\t%.2f\n", r.feature_desc.c_str(),
                  to_string(cls), m.precision(), m.recall(), m.f1());
    out << buf;
  }
}

}  // namespace sarco
