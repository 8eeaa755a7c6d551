#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sarco/corpus.hpp"
#include "sarco/patterns.hpp"

namespace sarco {

/// One-class pattern detector. HIT means "this post shows at least
/// theta_n match sites of my pattern set"; for the not-sarcastic filter
/// a HIT means "remove".
struct WeakDetector {
  Label target = Label::Sarcastic;
  PatternSet patterns;
  int theta_n = 1;
};

enum class Verdict { Hit, Abstain };

inline std::size_t match_site_count(const std::vector<LexicoSyntacticPattern>& sites,
                                    const PatternSet& patterns) {
  std::size_t n = 0;
  for (const auto& p : sites)
    if (patterns.count(p)) ++n;
  return n;
}

inline Verdict classify(const std::vector<LexicoSyntacticPattern>& sites,
                        const WeakDetector& d) {
  return match_site_count(sites, d.patterns) >= static_cast<std::size_t>(d.theta_n)
             ? Verdict::Hit
             : Verdict::Abstain;
}

inline Verdict classify(const std::string& text, const WeakDetector& d,
                        const Lexicon& lex, const TemplateOptions& opts = {}) {
  return classify(post_match_sites(text, lex, opts), d);
}

/// Two-detector resolution: the class with more match sites wins; an
/// exact tie (including both abstaining) yields no label.
inline std::optional<Label> classify_pair(const std::vector<LexicoSyntacticPattern>& sites,
                                          const WeakDetector& sarc,
                                          const WeakDetector& notsarc) {
  bool hit_s = classify(sites, sarc) == Verdict::Hit;
  bool hit_n = classify(sites, notsarc) == Verdict::Hit;
  if (hit_s && !hit_n) return sarc.target;
  if (hit_n && !hit_s) return notsarc.target;
  if (!hit_s && !hit_n) return std::nullopt;
  std::size_t ns = match_site_count(sites, sarc.patterns);
  std::size_t nn = match_site_count(sites, notsarc.patterns);
  if (ns > nn) return sarc.target;
  if (nn > ns) return notsarc.target;
  return std::nullopt;
}

struct ThresholdConfig {
  long long theta_f = 2;
  double theta_p = 0.75;
  int theta_n = 1;

  void validate() const {
    if (theta_f < 1) throw Error("theta_f must be >= 1");
    if (!(theta_p > 0.0 && theta_p <= 1.0)) throw Error("theta_p must lie in (0, 1]");
    if (theta_n < 1) throw Error("theta_n must be >= 1");
  }
};

/// One evaluated grid point. precision/recall carry defined-flags since
/// empty pattern sets and positive-free dev sets occur in practice.
struct PRPoint {
  ThresholdConfig config;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0, fp = 0, fn = 0;
  bool precision_defined = false;
  bool recall_defined = false;

  bool fully_defined() const { return precision_defined && recall_defined; }
};

struct GridSpec {
  std::vector<long long> theta_f;
  std::vector<double> theta_p;
  std::vector<int> theta_n;

  /// theta_f 2..6 step 1, theta_p 0.60..0.85 step 0.05, theta_n {1,2,3}:
  /// 5 x 6 x 3 = 90 configurations.
  static GridSpec standard() {
    GridSpec g;
    for (long long f = 2; f <= 6; ++f) g.theta_f.push_back(f);
    for (int i = 0; i <= 5; ++i) g.theta_p.push_back(0.60 + 0.05 * i);
    g.theta_n = {1, 2, 3};
    return g;
  }
};

struct GridResult {
  std::vector<PRPoint> points;
  std::optional<PRPoint> best_precision;  // ties: higher recall, then smaller theta_n
  std::optional<PRPoint> best_f1;         // ties: higher precision, then smaller theta_n
  bool dev_has_positives = true;
};

namespace detail {

inline bool better_precision(const PRPoint& a, const PRPoint& b) {
  if (a.precision != b.precision) return a.precision > b.precision;
  if (a.recall != b.recall) return a.recall > b.recall;
  if (a.config.theta_n != b.config.theta_n) return a.config.theta_n < b.config.theta_n;
  if (a.config.theta_f != b.config.theta_f) return a.config.theta_f < b.config.theta_f;
  return a.config.theta_p < b.config.theta_p;
}

inline bool better_f1(const PRPoint& a, const PRPoint& b) {
  if (a.f1 != b.f1) return a.f1 > b.f1;
  if (a.precision != b.precision) return a.precision > b.precision;
  if (a.config.theta_n != b.config.theta_n) return a.config.theta_n < b.config.theta_n;
  if (a.config.theta_f != b.config.theta_f) return a.config.theta_f < b.config.theta_f;
  return a.config.theta_p < b.config.theta_p;
}

}  // namespace detail

/// Learns pattern statistics on train, then evaluates every grid point
/// on dev. Train and dev must not share post ids.
inline GridResult grid_search(const Corpus& train, const Corpus& dev, Label cls,
                              const GridSpec& grid, const Lexicon& lex,
                              const TemplateOptions& opts = {}) {
  for (const auto& p : dev)
    if (train.contains(p.response.id))
      throw Error("grid_search: train and dev share post " + p.response.id);

  PatternStats stats = count_patterns(train, lex, opts);

  // analyze dev once; each config then only counts set membership
  std::vector<std::vector<LexicoSyntacticPattern>> dev_sites;
  std::vector<bool> dev_positive;
  dev_sites.reserve(dev.size());
  long long positives = 0;
  for (const auto& p : dev) {
    if (!p.label) throw Error("grid_search: unlabeled dev post " + p.response.id);
    dev_sites.push_back(post_match_sites(p.response.text, lex, opts));
    bool pos = *p.label == cls;
    dev_positive.push_back(pos);
    if (pos) ++positives;
  }

  GridResult result;
  result.dev_has_positives = positives > 0;
  for (long long tf : grid.theta_f) {
    for (double tp_ : grid.theta_p) {
      PatternSet set = threshold_patterns(stats, cls, tf, tp_);
      for (int tn : grid.theta_n) {
        PRPoint pt;
        pt.config = {tf, tp_, tn};
        for (std::size_t i = 0; i < dev_sites.size(); ++i) {
          bool hit = match_site_count(dev_sites[i], set) >=
                     static_cast<std::size_t>(tn);
          if (hit && dev_positive[i]) ++pt.tp;
          else if (hit) ++pt.fp;
          else if (dev_positive[i]) ++pt.fn;
        }
        if (pt.tp + pt.fp > 0) {
          pt.precision = static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
          pt.precision_defined = true;
        }
        if (pt.tp + pt.fn > 0) {
          pt.recall = static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fn);
          pt.recall_defined = true;
        }
        if (pt.fully_defined() && pt.precision + pt.recall > 0.0)
          pt.f1 = 2.0 * pt.precision * pt.recall / (pt.precision + pt.recall);
        result.points.push_back(pt);
      }
    }
  }

  for (const PRPoint& pt : result.points) {
    if (!pt.fully_defined()) continue;
    if (!result.best_precision || detail::better_precision(pt, *result.best_precision))
      result.best_precision = pt;
    if (!result.best_f1 || detail::better_f1(pt, *result.best_f1))
      result.best_f1 = pt;
  }
  return result;
}

/// Non-dominated subset: no kept point is beaten in both precision and
/// recall (strictly in one, weakly in the other) by any defined point.
inline std::vector<PRPoint> pr_frontier(const std::vector<PRPoint>& points) {
  std::vector<PRPoint> frontier;
  for (const PRPoint& a : points) {
    if (!a.fully_defined()) continue;
    bool dominated = false;
    for (const PRPoint& b : points) {
      if (!b.fully_defined()) continue;
      bool geq = b.precision >= a.precision && b.recall >= a.recall;
      bool strict = b.precision > a.precision || b.recall > a.recall;
      if (geq && strict) {
        dominated = true;
        break;
      }
    }
    if (!dominated) frontier.push_back(a);
  }
  std::sort(frontier.begin(), frontier.end(), [](const PRPoint& a, const PRPoint& b) {
    if (a.precision != b.precision) return a.precision > b.precision;
    return a.recall > b.recall;
  });
  return frontier;
}

/// The corpus-skewing filter: one not-sarcastic cue suffices to drop a
/// post, so theta_n is pinned at 1.
inline WeakDetector build_ns_filter(const PatternStats& stats, long long theta_f,
                                    double theta_p) {
  WeakDetector d;
  d.target = Label::NotSarcastic;
  d.patterns = threshold_patterns(stats, Label::NotSarcastic, theta_f, theta_p);
  d.theta_n = 1;
  return d;
}

/// Splits a corpus into (kept, removed) by detector verdict. The two
/// sides partition the input and keep its order.
inline std::pair<Corpus, Corpus> apply_filter(const Corpus& corpus, const WeakDetector& d,
                                              const Lexicon& lex,
                                              const TemplateOptions& opts = {}) {
  Corpus kept, removed;
  for (const auto& p : corpus) {
    if (classify(p.response.text, d, lex, opts) == Verdict::Hit)
      removed.add(p);
    else
      kept.add(p);
  }
  return {std::move(kept), std::move(removed)};
}

/// Stratified train/dev split (seeded). train_frac defaults to the
/// 80/20 protocol used for the grid search.
inline std::pair<Corpus, Corpus> split_train_dev(const Corpus& corpus, double train_frac,
                                                 std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw Error("split_train_dev: train_frac must lie in (0, 1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.at(i);
    if (!p.label) throw Error("split_train_dev: unlabeled post " + p.response.id);
    by_class[label_index(*p.label)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(corpus.size(), false);
  for (auto& idx : by_class) {
    deterministic_shuffle(idx, rng);
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(train_frac * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) in_train[idx[i]] = i < n_train;
  }
  Corpus train, dev;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (in_train[i]) train.add(corpus.at(i));
    else dev.add(corpus.at(i));
  }
  return {std::move(train), std::move(dev)};
}

inline void save_pr_points_csv(const std::vector<PRPoint>& points, std::ostream& out) {
  out << "theta_f,theta_p,theta_n,precision,recall,f1,tp,fp,fn\n";
  char buf[160];
  for (const PRPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%lld,%.2f,%d,%.6f,%.6f,%.6f,%lld,%lld,%lld\n",
                  p.config.theta_f, p.config.theta_p, p.config.theta_n, p.precision,
                  p.recall, p.f1, p.tp, p.fp, p.fn);
    out << buf;
  }
}

}  // namespace sarco
