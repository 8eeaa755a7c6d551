// Acceptance suite: one line per criterion, PASS/FAIL/SKIP, exit 1 on
// any FAIL. Criteria 1-7 run at desk scale; criterion 8 needs the
// released corpus (SARCO_CORPUS_DIR) and an embedding table
// (SARCO_EMBEDDINGS) and is skipped when they are absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "sarco/annotation.hpp"
#include "sarco/corpus.hpp"
#include "sarco/patterns.hpp"
#include "sarco/sgd.hpp"
#include "sarco/supervised.hpp"
#include "sarco/weak.hpp"

using namespace sarco;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail
            << "\n";
  if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
  std::cout << "SKIP criterion " << criterion << ": " << detail << "\n";
}

const Lexicon& lexicon() {
  static Lexicon lex = Lexicon::load_dir(std::string(SARCO_DATA_DIR) + "/lexicon");
  return lex;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Random forum-flavoured posts that exercise many templates.
class PostGenerator {
 public:
  explicit PostGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string post(std::size_t max_tokens) {
    static const std::vector<std::string> vocab = {
        "the",   "a",      "your",  "my",       "i",       "you",     "they",
        "people", "point",  "idea",  "evidence", "theory",  "game",    "help",
        "thanks", "guess",  "need",  "try",      "read",    "play",    "support",
        "explain", "is",    "was",   "have",     "can't",   "do",      "might",
        "be",     "asked",  "left",  "good",     "wrong",   "stupid",  "really",
        "again",  "yes",    "ah",    "then",     "once",    "for",     "of",
        "to",     "about",  "in",    "evolution", "gun",    "law",     "millions",
        "!!!",    "...",    "?",     ".",        ",",       ":)",      "wow",
        "oh",     "wait",   "nothing", "capable", "interested"};
    std::size_t len = 1 + rng_() % max_tokens;
    std::string text;
    for (std::size_t i = 0; i < len; ++i) {
      if (!text.empty()) text += ' ';
      text += vocab[rng_() % vocab.size()];
    }
    return text;
  }

  Corpus corpus(std::size_t max_posts, std::size_t max_tokens, const std::string& prefix) {
    Corpus c;
    std::size_t n = 2 + rng_() % (max_posts - 1);
    for (std::size_t i = 0; i < n; ++i) {
      QuoteResponsePair pair;
      pair.response.id = prefix + std::to_string(i);
      pair.response.text = post(max_tokens);
      pair.label = rng_() % 2 ? Label::Sarcastic : Label::NotSarcastic;
      c.add(pair);
    }
    return c;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ---- criterion 1: pattern statistics vs brute-force recount ----

void criterion1() {
  auto start = Clock::now();
  PostGenerator gen(101);
  bool all_equal = true;
  std::string detail;
  for (int round = 0; round < 50 && all_equal; ++round) {
    Corpus c = gen.corpus(200, 30, "r" + std::to_string(round) + "_");
    PatternStats stats = count_patterns(c, lexicon());

    // independent naive recount into plain maps
    std::map<std::pair<int, std::string>, std::pair<long long, long long>> brute;
    for (const auto& pair : c) {
      for (const Sentence& s : analyze(pair.response.text, lexicon())) {
        for (const auto& p : instantiate_templates(s)) {
          auto& cell = brute[{static_cast<int>(p.template_id), p.anchor}];
          if (*pair.label == Label::Sarcastic) ++cell.first;
          else ++cell.second;
        }
      }
    }
    if (brute.size() != stats.cells.size()) {
      all_equal = false;
      detail = "pattern inventory size mismatch round " + std::to_string(round);
      break;
    }
    for (const auto& [key, counts] : brute) {
      LexicoSyntacticPattern p{static_cast<TemplateId>(key.first), key.second};
      auto it = stats.cells.find(p);
      long long freq = counts.first + counts.second;
      if (it == stats.cells.end() || it->second.freq != freq ||
          it->second.class_freq[0] != counts.first ||
          it->second.class_freq[1] != counts.second) {
        all_equal = false;
        detail = "count mismatch on " + key.second;
        break;
      }
      double want_s = double(counts.first) / double(freq);
      double want_n = double(counts.second) / double(freq);
      if (std::abs(stats.prob(p, Label::Sarcastic) - want_s) > 1e-12 ||
          std::abs(stats.prob(p, Label::NotSarcastic) - want_n) > 1e-12) {
        all_equal = false;
        detail = "probability mismatch on " + key.second;
        break;
      }
    }
  }
  double elapsed = seconds_since(start);
  bool in_time = elapsed < 10.0;
  std::ostringstream msg;
  msg << "count_patterns equals brute-force recount on 50 random corpora ("
      << std::fixed;
  msg.precision(2);
  msg << elapsed << "s)";
  if (!all_equal) msg << " [" << detail << "]";
  if (!in_time) msg << " [over 10s budget]";
  report(1, all_equal && in_time, msg.str());
}

// ---- criterion 2: planted-pattern recovery ----

void criterion2() {
  std::vector<std::string> fillers = {
      "the evidence was weak and everyone saw it.",
      "people argue about the same issue daily.",
      "this thread went nowhere fast.",
      "reading it twice did not improve it.",
  };
  Corpus c;
  int n = 0;
  auto add = [&](const std::string& text, Label l) {
    QuoteResponsePair p;
    p.response.id = "p" + std::to_string(n++);
    p.response.text = text;
    p.label = l;
    c.add(p);
  };
  for (int i = 0; i < 100; ++i) {
    std::string filler = fillers[static_cast<std::size_t>(i) % fillers.size()];
    if (i < 90) add("thanks for the help. " + filler, Label::Sarcastic);
    else add(filler, Label::Sarcastic);
    if (i < 10) add("thanks for the help. " + filler, Label::NotSarcastic);
    else add(filler, Label::NotSarcastic);
  }
  PatternStats stats = count_patterns(c, lexicon());
  LexicoSyntacticPattern planted{TemplateId::ActVpPrepNp, "thanks for"};
  PatternSet set = threshold_patterns(stats, Label::Sarcastic, 2, 0.75);
  bool in_set = set.count(planted) == 1;
  auto reportRows = emit_pattern_report(stats, Label::Sarcastic);
  bool tops = !reportRows.empty() && reportRows[0].anchor == "thanks for" &&
              reportRows[0].template_id == TemplateId::ActVpPrepNp;
  report(2, in_set && tops,
         std::string("planted ActVP-Prep anchor 'thanks for' ") +
             (in_set ? "passes thresholds (2, 0.75)" : "MISSING from thresholded set") +
             (tops ? " and tops the report" : " but does not top the report"));
}

// ---- criterion 3: monotonicity and frontier dominance ----

void criterion3() {
  PostGenerator gen(303);
  Corpus train = gen.corpus(200, 25, "t");
  Corpus dev = gen.corpus(150, 25, "d");
  PatternStats stats = count_patterns(train, lexicon());

  bool antitone = true;
  std::mt19937_64& rng = gen.rng();
  for (int round = 0; round < 100 && antitone; ++round) {
    long long f1 = 1 + static_cast<long long>(rng() % 6);
    long long f2 = f1 + static_cast<long long>(rng() % 4);
    double p1 = 0.05 * static_cast<double>(6 + rng() % 14);  // 0.30 .. 0.95
    double p2 = std::min(1.0, p1 + 0.05 * static_cast<double>(rng() % 5));
    Label cls = rng() % 2 ? Label::Sarcastic : Label::NotSarcastic;
    PatternSet loose = threshold_patterns(stats, cls, f1, p1);
    PatternSet tight = threshold_patterns(stats, cls, f2, p2);
    for (const auto& p : tight)
      if (!loose.count(p)) antitone = false;
  }

  // HIT sets shrink as theta_n rises
  bool hits_antitone = true;
  PatternSet set = threshold_patterns(stats, Label::Sarcastic, 1, 0.5);
  std::vector<std::vector<LexicoSyntacticPattern>> dev_sites;
  for (const auto& p : dev) dev_sites.push_back(post_match_sites(p.response.text, lexicon()));
  std::set<std::size_t> prev;
  for (int tn = 1; tn <= 3; ++tn) {
    std::set<std::size_t> hits;
    for (std::size_t i = 0; i < dev_sites.size(); ++i)
      if (match_site_count(dev_sites[i], set) >= static_cast<std::size_t>(tn))
        hits.insert(i);
    if (tn > 1)
      for (std::size_t i : hits)
        if (!prev.count(i)) hits_antitone = false;
    prev = hits;
  }

  GridResult res = grid_search(train, dev, Label::Sarcastic, GridSpec::standard(),
                               lexicon());
  bool grid_size_ok = res.points.size() == 90;
  auto frontier = pr_frontier(res.points);
  bool non_dominated = true;
  for (const auto& f : frontier) {
    for (const auto& p : res.points) {
      if (!p.fully_defined()) continue;
      if (p.precision >= f.precision && p.recall >= f.recall &&
          (p.precision > f.precision || p.recall > f.recall))
        non_dominated = false;
    }
  }
  std::ostringstream msg;
  msg << "threshold antitone over 100 random pairs: " << (antitone ? "yes" : "NO")
      << "; HIT sets antitone in theta_n: " << (hits_antitone ? "yes" : "NO")
      << "; frontier non-dominated over " << res.points.size()
      << "-point grid: " << (non_dominated ? "yes" : "NO");
  report(3, antitone && hits_antitone && grid_size_ok && non_dominated, msg.str());
}

// ---- criterion 4: filter partitions ----

void criterion4() {
  PostGenerator gen(404);
  Corpus train = gen.corpus(150, 25, "t");
  Corpus pool = gen.corpus(200, 40, "p");
  PatternStats stats = count_patterns(train, lexicon());
  WeakDetector filter = build_ns_filter(stats, 2, 0.7);

  auto [kept, removed] = apply_filter(pool, filter, lexicon());
  bool partition = kept.size() + removed.size() == pool.size();
  std::set<std::string> seen;
  for (const auto& p : kept) partition &= seen.insert(p.response.id).second;
  for (const auto& p : removed) partition &= seen.insert(p.response.id).second;
  for (const auto& p : pool) partition &= seen.count(p.response.id) == 1;
  // brute-force membership rescan
  std::set<std::string> removed_ids;
  for (const auto& p : removed) removed_ids.insert(p.response.id);
  for (const auto& p : pool) {
    bool hit = match_site_count(post_match_sites(p.response.text, lexicon()),
                                filter.patterns) >= 1;
    if (hit != (removed_ids.count(p.response.id) == 1)) partition = false;
  }

  Corpus once = word_count_filter(pool, lexicon(), 10, 150);
  Corpus twice = word_count_filter(once, lexicon(), 10, 150);
  bool idempotent = once.size() == twice.size();
  for (std::size_t i = 0; idempotent && i < once.size(); ++i)
    idempotent = once.at(i).response.id == twice.at(i).response.id;
  bool subset = true;
  for (const auto& p : once)
    if (!pool.contains(p.response.id)) subset = false;

  std::ostringstream msg;
  msg << "apply_filter partitions " << pool.size() << " posts (kept " << kept.size()
      << ", removed " << removed.size() << ") with rescan agreement; word_count_filter at "
      << "bounds 10/150 idempotent: " << (idempotent ? "yes" : "NO");
  report(4, partition && idempotent && subset, msg.str());
}

// ---- criterion 5: aggregation table reproduction ----

void criterion5() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sarco_acceptance";
  fs::create_directories(dir);
  fs::path ann_path = dir / "round1_annotations.jsonl";
  {
    std::ofstream out(ann_path, std::ios::binary);
    int written = 0;
    auto write_record = [&](int sarc_votes) {
      out << R"({"post_id": "p)" << written++ << R"(", "judgments": [)";
      for (int a = 0; a < 9; ++a) {
        if (a) out << ", ";
        out << R"({"annotator": "w)" << a << R"(", "label": ")"
            << (a < sarc_votes ? "sarc" : "notsarc") << R"("})";
      }
      out << "]}\n";
    };
    // 2,220 posts at >= 6 sarcastic votes (with some spread), 1,202 at
    // exactly 5, the rest below
    for (int i = 0; i < 1500; ++i) write_record(6);
    for (int i = 0; i < 500; ++i) write_record(7);
    for (int i = 0; i < 220; ++i) write_record(9);
    for (int i = 0; i < 1202; ++i) write_record(5);
    for (int i = 0; i < 4000; ++i) write_record(4);
    for (int i = 0; i < 3618; ++i) write_record(i % 4);
  }
  auto records = load_annotations(ann_path.string());
  bool size_ok = records.size() == 11040;

  AggregationRule strict{6, 9, 5};
  RatioResult r = sarcasm_ratio(records, strict);
  bool strict_ok = r.sarcastic == 2220 && r.total == 11040 && r.set_aside == 1202;
  bool ratio_ok = std::lround(r.ratio * 1000.0) == 201;

  std::size_t set_aside_count = 0;
  for (const auto& rec : records)
    if (aggregate(rec, strict) == AggregateLabel::SetAside) ++set_aside_count;
  bool set_aside_ok = set_aside_count == 1202;

  AggregationRule relaxed{5, 9, std::nullopt};
  RatioResult rr = sarcasm_ratio(records, relaxed);
  bool relaxed_ok = rr.sarcastic == 3422 && std::lround(rr.ratio * 100.0) == 31;

  std::ostringstream msg;
  msg << "constructed annotation file: " << r.sarcastic << "/" << r.total
      << " sarcastic at 6-of-9 (ratio " << std::fixed;
  msg.precision(3);
  msg << r.ratio << "), " << set_aside_count << " set aside at 5, relaxed ratio ";
  msg.precision(2);
  msg << rr.ratio;
  report(5, size_ok && strict_ok && ratio_ok && set_aside_ok && relaxed_ok, msg.str());
  std::error_code ec;
  fs::remove_all(dir, ec);
}

// ---- criterion 6: gradient and optimization checks ----

void criterion6() {
  auto start = Clock::now();
  std::mt19937_64 rng(606);
  auto uniform = [&]() { return double(rng() % 20001) / 10000.0 - 1.0; };

  bool gradients_ok = true;
  int checked = 0;
  while (checked < 100) {
    std::size_t dim = 2 + rng() % 5;
    std::size_t n = 3 + rng() % 8;
    std::vector<FeatureVector> xs;
    std::vector<Label> ys;
    for (std::size_t i = 0; i < n; ++i) {
      FeatureVector fv;
      for (std::size_t j = 0; j < dim; ++j) fv.sparse.emplace_back(int(j), uniform());
      xs.push_back(fv);
      ys.push_back(rng() % 2 ? Label::Sarcastic : Label::NotSarcastic);
    }
    std::vector<double> w(dim);
    for (auto& x : w) x = uniform();
    double bias = uniform();
    double lambda = 1e-3 * double(1 + rng() % 10);

    bool differentiable = true;
    for (std::size_t i = 0; i < n; ++i) {
      double margin = label_sign(ys[i]) * (detail::dot_sparse(w, xs[i], dim) + bias);
      if (std::abs(1.0 - margin) < 1e-3) differentiable = false;
    }
    if (!differentiable) continue;
    ++checked;

    Gradient analytic = hinge_l2_subgradient(w, bias, xs, ys, lambda, dim);
    const double h = 1e-6;
    auto close = [](double a, double b) {
      double diff = std::abs(a - b);
      return diff < 1e-4 * std::max(std::abs(a), std::abs(b)) || diff < 1e-6;
    };
    std::vector<double> probe = w;
    for (std::size_t j = 0; j < dim; ++j) {
      probe[j] = w[j] + h;
      double up = hinge_l2_objective(probe, bias, xs, ys, lambda, dim);
      probe[j] = w[j] - h;
      double down = hinge_l2_objective(probe, bias, xs, ys, lambda, dim);
      probe[j] = w[j];
      if (!close(analytic.w[j], (up - down) / (2 * h))) gradients_ok = false;
    }
    double bgrad = (hinge_l2_objective(w, bias + h, xs, ys, lambda, dim) -
                    hinge_l2_objective(w, bias - h, xs, ys, lambda, dim)) /
                   (2 * h);
    if (!close(analytic.bias, bgrad)) gradients_ok = false;
  }

  // separable toy set: full accuracy within 5 epochs
  std::vector<FeatureVector> xs;
  std::vector<Label> ys;
  for (int i = 0; i < 25; ++i) {
    FeatureVector pos, neg;
    pos.sparse = {{0, 2.0 + 0.2 * (i % 5)}, {1, 1.0}};
    neg.sparse = {{0, -2.0 - 0.2 * (i % 5)}, {1, -1.0}};
    xs.push_back(pos);
    ys.push_back(Label::Sarcastic);
    xs.push_back(neg);
    ys.push_back(Label::NotSarcastic);
  }
  Hyperparams hp;
  hp.epochs = 5;
  LinearModel model = train(xs, ys, 2, 0, hp);
  bool separable_ok = true;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (model.predict(xs[i]) != ys[i]) separable_ok = false;

  bool norm_ok = true;
  double prev_norm = 1e18;
  for (double lambda : {0.0, 1e-4, 1e-3, 1e-2, 1e-1}) {
    hp.l2_lambda = lambda;
    double norm = l2_norm(train(xs, ys, 2, 0, hp).weights);
    if (norm > prev_norm + 1e-12) norm_ok = false;
    prev_norm = norm;
  }

  double elapsed = seconds_since(start);
  bool in_time = elapsed < 5.0;
  std::ostringstream msg;
  msg << "subgradient matches finite differences at 100 points: "
      << (gradients_ok ? "yes" : "NO") << "; separable toy 100% in 5 epochs: "
      << (separable_ok ? "yes" : "NO") << "; ||w|| non-increasing in lambda: "
      << (norm_ok ? "yes" : "NO") << " (" << std::fixed;
  msg.precision(2);
  msg << elapsed << "s)";
  report(6, gradients_ok && separable_ok && norm_ok && in_time, msg.str());
}

// ---- criterion 7: cross-validation protocol ----

void criterion7() {
  Corpus c;
  for (int i = 0; i < 30; ++i) {
    QuoteResponsePair s, n;
    s.response.id = "s" + std::to_string(i);
    s.response.text = "wonderfultoken says the same thing";
    s.label = Label::Sarcastic;
    n.response.id = "n" + std::to_string(i);
    n.response.text = "ordinarytoken says the same thing";
    n.label = Label::NotSarcastic;
    c.add(s);
    c.add(n);
  }
  FoldAssignment fa = split_folds(c, 10, 42);
  bool one_fold_each = fa.assignment.size() == c.size();
  std::map<int, int> fold_sizes;
  for (const auto& p : c) {
    int f = fa.fold_of(p.response.id);
    one_fold_each &= f >= 0 && f < 10;
    fold_sizes[f]++;
  }
  for (const auto& [f, size] : fold_sizes) one_fold_each &= size == 6;

  EvalReport rep = cross_validate(c, lexicon(), 10, {}, {}, 42);
  FoldMetrics pooled = rep.pooled();
  bool perfect = pooled.per_class[0].f1() == 1.0 && pooled.per_class[1].f1() == 1.0;
  long long covered = pooled.per_class[0].tp + pooled.per_class[0].fn;
  bool coverage = covered == 30;

  std::ostringstream msg;
  msg << "each of " << c.size() << " posts in exactly one test fold; perfect-signal F = "
      << pooled.per_class[0].f1() << "/" << pooled.per_class[1].f1() << " (sarc/notsarc)";
  report(7, one_fold_each && perfect && coverage, msg.str());
}

// ---- criterion 8: conditional reproduction on released data ----

void criterion8() {
  const char* corpus_dir = std::getenv("SARCO_CORPUS_DIR");
  const char* embeddings = std::getenv("SARCO_EMBEDDINGS");
  if (!corpus_dir || !embeddings) {
    report_skip(8,
                "released corpus not present (set SARCO_CORPUS_DIR and SARCO_EMBEDDINGS); "
                "criteria 1-7 constitute the acceptance suite");
    return;
  }
  namespace fs = std::filesystem;
  fs::path root(corpus_dir);
  bool ok = true;
  std::ostringstream msg;
  try {
    Corpus gen = load_corpus((root / "gen.jsonl").string(), CorpusFormat::Jsonl);
    Corpus rq = load_corpus((root / "rq.jsonl").string(), CorpusFormat::Jsonl);
    Corpus hyp = load_corpus((root / "hyp.jsonl").string(), CorpusFormat::Jsonl);

    // Table 5 Gen n-grams row, +-0.05 absolute
    EvalReport ng = cross_validate(gen, lexicon(), 10, {}, {}, 42);
    FoldMetrics pooled = ng.pooled();
    const ClassMetrics& sarc = pooled.per_class[label_index(Label::Sarcastic)];
    bool t5 = std::abs(sarc.precision() - 0.73) <= 0.05 &&
              std::abs(sarc.recall() - 0.70) <= 0.05 && std::abs(sarc.f1() - 0.72) <= 0.05;
    msg << "gen n-grams sarc P/R/F " << sarc.precision() << "/" << sarc.recall() << "/"
        << sarc.f1() << (t5 ? " within" : " OUTSIDE") << " +-0.05; ";
    ok &= t5;

    // W2V sarcastic F 0.74
    EmbeddingTable table = EmbeddingTable::load(embeddings);
    FeatureConfig w2v;
    w2v.ngrams = false;
    w2v.embeddings = true;
    w2v.table = &table;
    EvalReport wv = cross_validate(gen, lexicon(), 10, w2v, {}, 42);
    double f_w2v = wv.pooled().per_class[0].f1();
    bool t5w = std::abs(f_w2v - 0.74) <= 0.05;
    msg << "w2v sarc F " << f_w2v << (t5w ? " within" : " OUTSIDE") << " +-0.05; ";
    ok &= t5w;

    // Table 6: sarcastic patterns at freq>=2, prob>=0.75, +-10%
    PatternStats stats = count_patterns(gen, lexicon());
    std::size_t n_pat = threshold_patterns(stats, Label::Sarcastic, 2, 0.75).size();
    bool t6 = n_pat >= 1184 && n_pat <= 1448;
    msg << n_pat << " sarc patterns vs 1316 +-10%" << (t6 ? "" : " OUTSIDE") << "; ";
    ok &= t6;

    // Fig. 3: recall at precision 0.75 for RQ and Hyp, +-0.03
    auto recall_at = [&](const Corpus& c) {
      auto [train, dev] = split_train_dev(c, 0.8, 42);
      GridResult res =
          grid_search(train, dev, Label::Sarcastic, GridSpec::standard(), lexicon());
      double best = -1.0;
      for (const auto& p : res.points)
        if (p.fully_defined() && p.precision >= 0.75) best = std::max(best, p.recall);
      return best;
    };
    double r_rq = recall_at(rq), r_hyp = recall_at(hyp);
    bool f3 = std::abs(r_rq - 0.07) <= 0.03 && std::abs(r_hyp - 0.08) <= 0.03;
    msg << "recall at P>=0.75: RQ " << r_rq << ", Hyp " << r_hyp
        << (f3 ? " within" : " OUTSIDE") << " +-0.03";
    ok &= f3;
  } catch (const std::exception& e) {
    ok = false;
    msg << "error: " << e.what();
  }
  report(8, ok, msg.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "acceptance suite complete\n";
  return 0;
}
