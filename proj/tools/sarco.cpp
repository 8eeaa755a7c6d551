// sarco: corpus construction and classification pipeline driver.
//
// Every subcommand reads/writes plain files, takes all randomness from
// --seed, and drops a manifest (inputs, digests, config, versions) next
// to its primary output so any table or figure can be reproduced.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarco/annotation.hpp"
#include "sarco/corpus.hpp"
#include "sarco/cues.hpp"
#include "sarco/manifest.hpp"
#include "sarco/patterns.hpp"
#include "sarco/supervised.hpp"
#include "sarco/weak.hpp"

namespace {

using namespace sarco;

struct Common {
  std::string lexicon_dir;
  std::uint64_t seed = 42;
  std::string manifest_path;  // default: <primary out>.manifest.json

  void add_to(CLI::App* cmd) {
    const char* env = std::getenv("SARCO_LEXICON_DIR");
    lexicon_dir = env ? env : "data/lexicon";
    cmd->add_option("--lexicon-dir", lexicon_dir,
                    "Lexicon directory (default $SARCO_LEXICON_DIR or data/lexicon)");
    cmd->add_option("--seed", seed, "Seed for every random choice in this run");
    cmd->add_option("--manifest", manifest_path,
                    "Manifest path (default: <out>.manifest.json)");
  }
};

Label parse_label_arg(const std::string& s) {
  auto l = parse_label(s);
  if (!l) throw Error("unknown class '" + s + "', expected sarc or notsarc");
  return *l;
}

AggregationRule parse_rule(const std::string& spec, std::optional<int> set_aside) {
  auto slash = spec.find('/');
  if (slash == std::string::npos) throw Error("rule must look like k/n, e.g. 6/9");
  AggregationRule rule;
  rule.required_sarc = std::stoi(spec.substr(0, slash));
  rule.out_of = std::stoi(spec.substr(slash + 1));
  rule.set_aside_at = set_aside;
  rule.validate();
  return rule;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file: " + path);
  return out;
}

void finish(RunManifest& manifest, const Common& common) {
  manifest.seed = common.seed;
  std::string path = common.manifest_path;
  if (path.empty()) {
    path = manifest.outputs.empty() ? manifest.subcommand + ".manifest.json"
                                    : manifest.outputs.front() + ".manifest.json";
  }
  manifest.write(path);
}

// matches file: cue<TAB>post_id rows, cue order preserved
void save_matches(const CueMatches& m, std::ostream& out) {
  out << "#cue\tpost_id\n";
  for (const auto& cue : m.cue_order)
    for (const auto& id : m.ids.at(cue)) out << cue << '\t' << id << '\n';
}

CueMatches load_matches(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open matches file: " + path);
  CueMatches m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": expected cue<TAB>post_id");
    std::string cue = line.substr(0, tab);
    if (!m.ids.count(cue)) m.cue_order.push_back(cue);
    m.ids[cue].push_back(line.substr(tab + 1));
  }
  return m;
}

std::unordered_map<std::string, Label> aggregate_to_labels(
    const std::vector<AnnotationRecord>& records, const AggregationRule& rule) {
  std::unordered_map<std::string, Label> labels;
  for (const auto& r : records) {
    AggregateLabel l = aggregate(r, rule);
    if (l == AggregateLabel::Sarcastic) labels[r.post_id] = Label::Sarcastic;
    else if (l == AggregateLabel::NotSarcastic) labels[r.post_id] = Label::NotSarcastic;
    // set-aside posts stay unlabeled
  }
  return labels;
}

int run(int argc, char** argv) {
  CLI::App app{"sarcasm corpus construction and classification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value config file");
  app.set_version_flag("--version", kToolVersion);

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "Load a corpus file, emit canonical JSONL");
  struct {
    std::string in, format = "jsonl", out;
    Common common;
  } ing;
  ingest->add_option("--in", ing.in, "Input corpus")->required();
  ingest->add_option("--format", ing.format, "Input format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  ingest->add_option("--out", ing.out, "Output JSONL path")->required();
  ing.common.add_to(ingest);
  ingest->callback([&] {
    auto fmt = corpus_format_from_string(ing.format);
    Corpus c = load_corpus(ing.in, *fmt);
    save_corpus_jsonl(c, ing.out);
    RunManifest m;
    m.subcommand = "ingest";
    m.config = {{"format", ing.format}};
    m.add_input(ing.in);
    m.outputs = {ing.out};
    m.syntax_version = "-";
    finish(m, ing.common);
  });

  // ---- filter-length ----
  auto* flen = app.add_subcommand("filter-length", "Keep posts within a word-count range");
  struct {
    std::string in, out;
    std::size_t min = 10, max = 150;
    Common common;
  } fl;
  flen->add_option("--in", fl.in)->required();
  flen->add_option("--out", fl.out)->required();
  flen->add_option("--min", fl.min, "Minimum words, inclusive");
  flen->add_option("--max", fl.max, "Maximum words, inclusive");
  fl.common.add_to(flen);
  flen->callback([&] {
    Lexicon lex = Lexicon::load_dir(fl.common.lexicon_dir);
    Corpus c = load_corpus(fl.in, CorpusFormat::Jsonl);
    Corpus kept = word_count_filter(c, lex, fl.min, fl.max);
    save_corpus_jsonl(kept, fl.out);
    RunManifest m;
    m.subcommand = "filter-length";
    m.config = {{"min", fl.min}, {"max", fl.max}};
    m.add_input(fl.in);
    m.outputs = {fl.out};
    m.syntax_version = lex.version();
    finish(m, fl.common);
  });

  // ---- learn-patterns ----
  auto* learn =
      app.add_subcommand("learn-patterns", "Instantiate templates over a labeled corpus");
  struct {
    std::string in, out;
    bool no_adv_adv = false;
    Common common;
  } lp;
  learn->add_option("--in", lp.in, "Labeled JSONL corpus")->required();
  learn->add_option("--out", lp.out, "Pattern statistics TSV")->required();
  learn->add_flag("--no-adv-adv", lp.no_adv_adv, "Drop the Adv-Adv template");
  lp.common.add_to(learn);
  learn->callback([&] {
    Lexicon lex = Lexicon::load_dir(lp.common.lexicon_dir);
    TemplateOptions opts;
    opts.adv_adv = !lp.no_adv_adv;
    Corpus c = load_corpus(lp.in, CorpusFormat::Jsonl);
    PatternStats stats = count_patterns(c, lex, opts);
    auto out = open_out(lp.out);
    save_stats_tsv(stats, out);
    RunManifest m;
    m.subcommand = "learn-patterns";
    m.config = {{"adv_adv", !lp.no_adv_adv}};
    m.add_input(lp.in);
    m.outputs = {lp.out};
    m.syntax_version = lex.version();
    finish(m, lp.common);
  });

  // ---- threshold ----
  auto* thr =
      app.add_subcommand("threshold", "Select patterns by frequency and probability");
  struct {
    std::string stats, cls = "sarc", out;
    long long theta_f = 2;
    double theta_p = 0.75;
    Common common;
  } th;
  thr->add_option("--stats", th.stats, "Pattern statistics TSV")->required();
  thr->add_option("--class", th.cls, "Target class: sarc or notsarc");
  thr->add_option("--theta-f", th.theta_f, "Minimum pattern frequency");
  thr->add_option("--theta-p", th.theta_p, "Minimum class probability");
  thr->add_option("--out", th.out, "Pattern set TSV")->required();
  th.common.add_to(thr);
  thr->callback([&] {
    Label cls = parse_label_arg(th.cls);
    std::ifstream in(th.stats, std::ios::binary);
    if (!in) throw Error("cannot open stats file: " + th.stats);
    PatternStats stats = load_stats_tsv(in, th.stats);
    PatternSet set = threshold_patterns(stats, cls, th.theta_f, th.theta_p);
    auto out = open_out(th.out);
    save_pattern_set_tsv(set, stats, cls, out);
    RunManifest m;
    m.subcommand = "threshold";
    m.config = {{"class", th.cls}, {"theta_f", th.theta_f}, {"theta_p", th.theta_p}};
    m.add_input(th.stats);
    m.outputs = {th.out};
    m.syntax_version = "-";
    finish(m, th.common);
  });

  // ---- classify-weak ----
  auto* clf = app.add_subcommand("classify-weak", "Run a pattern detector over a corpus");
  struct {
    std::string in, patterns, out;
    int theta_n = 1;
    Common common;
  } cw;
  clf->add_option("--in", cw.in)->required();
  clf->add_option("--patterns", cw.patterns, "Thresholded pattern set TSV")->required();
  clf->add_option("--theta-n", cw.theta_n, "Match sites required for a HIT");
  clf->add_option("--out", cw.out, "Per-post verdict TSV")->required();
  cw.common.add_to(clf);
  clf->callback([&] {
    Lexicon lex = Lexicon::load_dir(cw.common.lexicon_dir);
    std::ifstream pin(cw.patterns, std::ios::binary);
    if (!pin) throw Error("cannot open pattern set: " + cw.patterns);
    LoadedPatternSet set = load_pattern_set_tsv(pin, cw.patterns);
    WeakDetector det;
    det.target = set.cls.value_or(Label::Sarcastic);
    det.patterns = set.patterns;
    det.theta_n = cw.theta_n;
    Corpus c = load_corpus(cw.in, CorpusFormat::Jsonl);
    auto out = open_out(cw.out);
    out << "#post_id\tverdict\tmatch_sites\n";
    for (const auto& p : c) {
      auto sites = post_match_sites(p.response.text, lex);
      std::size_t n = match_site_count(sites, det.patterns);
      out << p.response.id << '\t'
          << (n >= static_cast<std::size_t>(det.theta_n) ? "HIT" : "ABSTAIN") << '\t' << n
          << '\n';
    }
    RunManifest m;
    m.subcommand = "classify-weak";
    m.config = {{"theta_n", cw.theta_n}};
    m.add_input(cw.in);
    m.add_input(cw.patterns);
    m.outputs = {cw.out};
    m.syntax_version = lex.version();
    finish(m, cw.common);
  });

  // ---- gridsearch ----
  auto* grid =
      app.add_subcommand("gridsearch", "Sweep theta_f/theta_p/theta_n, report P/R points");
  struct {
    std::string in, dev, cls = "sarc", out, frontier, best;
    double train_frac = 0.8;
    Common common;
  } gs;
  grid->add_option("--in", gs.in, "Training corpus (split 80/20 unless --dev given)")
      ->required();
  grid->add_option("--dev", gs.dev, "Separate dev corpus");
  grid->add_option("--class", gs.cls);
  grid->add_option("--train-frac", gs.train_frac, "Train fraction for the split");
  grid->add_option("--out", gs.out, "All grid points CSV")->required();
  grid->add_option("--frontier", gs.frontier, "Non-dominated points CSV");
  grid->add_option("--best", gs.best, "Best configs JSON");
  gs.common.add_to(grid);
  grid->callback([&] {
    Lexicon lex = Lexicon::load_dir(gs.common.lexicon_dir);
    Label cls = parse_label_arg(gs.cls);
    Corpus train, dev;
    RunManifest m;
    m.subcommand = "gridsearch";
    m.add_input(gs.in);
    if (gs.dev.empty()) {
      Corpus whole = load_corpus(gs.in, CorpusFormat::Jsonl);
      std::tie(train, dev) = split_train_dev(whole, gs.train_frac, gs.common.seed);
    } else {
      train = load_corpus(gs.in, CorpusFormat::Jsonl);
      dev = load_corpus(gs.dev, CorpusFormat::Jsonl);
      m.add_input(gs.dev);
    }
    GridResult res = grid_search(train, dev, cls, GridSpec::standard(), lex);
    if (!res.dev_has_positives)
      std::cerr << "warning: dev set has no " << to_string(cls)
                << " posts; recall undefined everywhere\n";
    {
      auto out = open_out(gs.out);
      save_pr_points_csv(res.points, out);
    }
    m.outputs = {gs.out};
    if (!gs.frontier.empty()) {
      auto out = open_out(gs.frontier);
      save_pr_points_csv(pr_frontier(res.points), out);
      m.outputs.push_back(gs.frontier);
    }
    if (!gs.best.empty()) {
      nlohmann::json j;
      auto point_json = [](const PRPoint& p) {
        return nlohmann::json{{"theta_f", p.config.theta_f}, {"theta_p", p.config.theta_p},
                              {"theta_n", p.config.theta_n}, {"precision", p.precision},
                              {"recall", p.recall},          {"f1", p.f1}};
      };
      j["best_precision"] =
          res.best_precision ? point_json(*res.best_precision) : nlohmann::json(nullptr);
      j["best_f1"] = res.best_f1 ? point_json(*res.best_f1) : nlohmann::json(nullptr);
      auto out = open_out(gs.best);
      out << j.dump(2) << '\n';
      m.outputs.push_back(gs.best);
    }
    m.config = {{"class", gs.cls},
                {"train_frac", gs.train_frac},
                {"dev", gs.dev.empty() ? "split" : gs.dev}};
    m.syntax_version = lex.version();
    finish(m, gs.common);
  });

  // ---- build-ns-filter ----
  auto* nsf = app.add_subcommand("build-ns-filter",
                                 "High-precision not-sarcastic filter (theta_n = 1)");
  struct {
    std::string stats, out;
    long long theta_f = 2;
    double theta_p = 0.8;
    Common common;
  } nf;
  nsf->add_option("--stats", nf.stats)->required();
  nsf->add_option("--theta-f", nf.theta_f);
  nsf->add_option("--theta-p", nf.theta_p);
  nsf->add_option("--out", nf.out, "Pattern set TSV (HIT means remove)")->required();
  nf.common.add_to(nsf);
  nsf->callback([&] {
    std::ifstream in(nf.stats, std::ios::binary);
    if (!in) throw Error("cannot open stats file: " + nf.stats);
    PatternStats stats = load_stats_tsv(in, nf.stats);
    WeakDetector det = build_ns_filter(stats, nf.theta_f, nf.theta_p);
    auto out = open_out(nf.out);
    save_pattern_set_tsv(det.patterns, stats, Label::NotSarcastic, out);
    RunManifest m;
    m.subcommand = "build-ns-filter";
    m.config = {{"theta_f", nf.theta_f}, {"theta_p", nf.theta_p}, {"theta_n", 1}};
    m.add_input(nf.stats);
    m.outputs = {nf.out};
    m.syntax_version = "-";
    finish(m, nf.common);
  });

  // ---- apply-filter ----
  auto* apf = app.add_subcommand("apply-filter", "Partition a corpus by detector verdict");
  struct {
    std::string in, patterns, kept, removed;
    int theta_n = 1;
    Common common;
  } af;
  apf->add_option("--in", af.in)->required();
  apf->add_option("--patterns", af.patterns)->required();
  apf->add_option("--theta-n", af.theta_n);
  apf->add_option("--kept", af.kept, "Posts without a HIT")->required();
  apf->add_option("--removed", af.removed, "Posts with a HIT")->required();
  af.common.add_to(apf);
  apf->callback([&] {
    Lexicon lex = Lexicon::load_dir(af.common.lexicon_dir);
    std::ifstream pin(af.patterns, std::ios::binary);
    if (!pin) throw Error("cannot open pattern set: " + af.patterns);
    LoadedPatternSet set = load_pattern_set_tsv(pin, af.patterns);
    WeakDetector det;
    det.target = set.cls.value_or(Label::NotSarcastic);
    det.patterns = set.patterns;
    det.theta_n = af.theta_n;
    Corpus c = load_corpus(af.in, CorpusFormat::Jsonl);
    auto [kept, removed] = apply_filter(c, det, lex);
    save_corpus_jsonl(kept, af.kept);
    save_corpus_jsonl(removed, af.removed);
    RunManifest m;
    m.subcommand = "apply-filter";
    m.config = {{"theta_n", af.theta_n}};
    m.add_input(af.in);
    m.add_input(af.patterns);
    m.outputs = {af.kept, af.removed};
    m.syntax_version = lex.version();
    finish(m, af.common);
  });

  // ---- retrieve-cues ----
  auto* ret = app.add_subcommand("retrieve-cues", "Match cue regexes over a corpus");
  struct {
    std::string in, cues, out;
    std::size_t max_words = 150;
    Common common;
  } rc;
  ret->add_option("--in", rc.in)->required();
  ret->add_option("--cues", rc.cues, "Cue JSONL file")->required();
  ret->add_option("--max-words", rc.max_words);
  ret->add_option("--out", rc.out, "Matches TSV (cue, post_id)")->required();
  rc.common.add_to(ret);
  ret->callback([&] {
    Lexicon lex = Lexicon::load_dir(rc.common.lexicon_dir);
    Corpus c = load_corpus(rc.in, CorpusFormat::Jsonl);
    auto cues = load_cues(rc.cues);
    CueMatches matches = retrieve(c, cues, lex, rc.max_words);
    auto out = open_out(rc.out);
    save_matches(matches, out);
    RunManifest m;
    m.subcommand = "retrieve-cues";
    m.config = {{"max_words", rc.max_words}};
    m.add_input(rc.in);
    m.add_input(rc.cues);
    m.outputs = {rc.out};
    m.syntax_version = lex.version();
    finish(m, rc.common);
  });

  // ---- rq-candidates ----
  auto* rqc = app.add_subcommand("rq-candidates",
                                 "Posts with a mid-post question before a statement");
  struct {
    std::string in, out;
    Common common;
  } rq;
  rqc->add_option("--in", rq.in)->required();
  rqc->add_option("--out", rq.out, "One post id per line")->required();
  rq.common.add_to(rqc);
  rqc->callback([&] {
    Lexicon lex = Lexicon::load_dir(rq.common.lexicon_dir);
    Corpus c = load_corpus(rq.in, CorpusFormat::Jsonl);
    auto ids = rq_candidates(c, lex);
    auto out = open_out(rq.out);
    for (const auto& id : ids) out << id << '\n';
    RunManifest m;
    m.subcommand = "rq-candidates";
    m.add_input(rq.in);
    m.outputs = {rq.out};
    m.syntax_version = lex.version();
    finish(m, rq.common);
  });

  // ---- sample-batches ----
  auto* smb = app.add_subcommand("sample-batches", "Deal matches into mixed-cue batches");
  struct {
    std::string matches, out;
    std::size_t batch_size = 20;
    Common common;
  } sb;
  smb->add_option("--matches", sb.matches, "Matches TSV from retrieve-cues")->required();
  smb->add_option("--batch-size", sb.batch_size);
  smb->add_option("--out", sb.out, "Batches JSONL")->required();
  sb.common.add_to(smb);
  smb->callback([&] {
    CueMatches matches = load_matches(sb.matches);
    auto batches = sample_batches(matches, sb.batch_size, sb.common.seed);
    auto out = open_out(sb.out);
    for (std::size_t i = 0; i < batches.size(); ++i) {
      if (!batches[i].mixed)
        std::cerr << "warning: batch " << i << " draws on a single cue\n";
      nlohmann::json j;
      j["batch"] = i;
      j["mixed"] = batches[i].mixed;
      j["posts"] = nlohmann::json::array();
      for (const auto& [id, cue] : batches[i].posts)
        j["posts"].push_back({{"id", id}, {"cue", cue}});
      out << j.dump() << '\n';
    }
    RunManifest m;
    m.subcommand = "sample-batches";
    m.config = {{"batch_size", sb.batch_size}};
    m.add_input(sb.matches);
    m.outputs = {sb.out};
    m.syntax_version = "-";
    finish(m, sb.common);
  });

  // ---- cue-stats ----
  auto* cst = app.add_subcommand("cue-stats", "Found/annotated/percent-sarcastic per cue");
  struct {
    std::string matches, annotations, rule = "3/5", out;
    Common common;
  } cs;
  cst->add_option("--matches", cs.matches)->required();
  cst->add_option("--annotations", cs.annotations, "Raw judgments JSONL")->required();
  cst->add_option("--rule", cs.rule, "Aggregation rule k/n for the batches");
  cst->add_option("--out", cs.out)->required();
  cs.common.add_to(cst);
  cst->callback([&] {
    CueMatches matches = load_matches(cs.matches);
    auto records = load_annotations(cs.annotations);
    auto labels = aggregate_to_labels(records, parse_rule(cs.rule, std::nullopt));
    auto rows = cue_stats(matches, labels);
    auto out = open_out(cs.out);
    save_cue_stats_tsv(rows, out);
    RunManifest m;
    m.subcommand = "cue-stats";
    m.config = {{"rule", cs.rule}};
    m.add_input(cs.matches);
    m.add_input(cs.annotations);
    m.outputs = {cs.out};
    m.syntax_version = "-";
    finish(m, cs.common);
  });

  // ---- qualify ----
  auto* qlf = app.add_subcommand("qualify", "Score annotator qualifier submissions");
  struct {
    std::string gold, submissions, out;
    Common common;
  } qf;
  qlf->add_option("--gold", qf.gold, "20-item gold JSONL: {item_id, label}")->required();
  qlf->add_option("--submissions", qf.submissions,
                  "JSONL: {worker, answers: {item_id: label}}")
      ->required();
  qlf->add_option("--out", qf.out, "Per-worker TSV")->required();
  qf.common.add_to(qlf);
  qlf->callback([&] {
    std::ifstream gin(qf.gold, std::ios::binary);
    if (!gin) throw Error("cannot open gold file: " + qf.gold);
    std::vector<std::pair<std::string, Label>> gold;
    std::string line;
    int lineno = 0;
    while (std::getline(gin, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("item_id") || !j.contains("label"))
        throw Error(qf.gold + ":" + std::to_string(lineno) + ": expected {item_id, label}");
      auto l = parse_label(j["label"].get<std::string>());
      if (!l) throw Error(qf.gold + ":" + std::to_string(lineno) + ": bad label");
      gold.emplace_back(j["item_id"].get<std::string>(), *l);
    }
    std::ifstream sin(qf.submissions, std::ios::binary);
    if (!sin) throw Error("cannot open submissions file: " + qf.submissions);
    auto out = open_out(qf.out);
    out << "#worker\tcorrect\tscore\tresult\n";
    lineno = 0;
    while (std::getline(sin, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("worker") || !j.contains("answers"))
        throw Error(qf.submissions + ":" + std::to_string(lineno) +
                    ": expected {worker, answers}");
      std::unordered_map<std::string, Label> answers;
      for (const auto& [k, v] : j["answers"].items()) {
        auto l = parse_label(v.get<std::string>());
        if (!l) throw Error(qf.submissions + ":" + std::to_string(lineno) + ": bad label");
        answers[k] = *l;
      }
      QualifierResult r = score_qualifier(gold, answers);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", r.score());
      out << j["worker"].get<std::string>() << '\t' << r.correct << '\t' << buf << '\t'
          << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    RunManifest m;
    m.subcommand = "qualify";
    m.add_input(qf.gold);
    m.add_input(qf.submissions);
    m.outputs = {qf.out};
    m.syntax_version = "-";
    finish(m, qf.common);
  });

  // ---- aggregate ----
  auto* agg = app.add_subcommand("aggregate", "Majority-vote aggregation of judgments");
  struct {
    std::string annotations, rule = "6/9", out;
    int set_aside = -1;
    Common common;
  } ag;
  agg->add_option("--annotations", ag.annotations)->required();
  agg->add_option("--rule", ag.rule, "k/n, e.g. 6/9");
  agg->add_option("--set-aside", ag.set_aside,
                  "Sarc-vote count whose posts join neither class");
  agg->add_option("--out", ag.out, "TSV: post_id, label")->required();
  ag.common.add_to(agg);
  agg->callback([&] {
    auto rule = parse_rule(
        ag.rule, ag.set_aside >= 0 ? std::optional<int>(ag.set_aside) : std::nullopt);
    auto records = load_annotations(ag.annotations);
    auto out = open_out(ag.out);
    out << "#post_id\tlabel\n";
    std::size_t sarc = 0, set_aside = 0;
    for (const auto& r : records) {
      AggregateLabel l = aggregate(r, rule);
      out << r.post_id << '\t' << to_string(l) << '\n';
      if (l == AggregateLabel::Sarcastic) ++sarc;
      if (l == AggregateLabel::SetAside) ++set_aside;
    }
    std::cerr << "aggregated " << records.size() << " posts: " << sarc << " sarcastic, "
              << set_aside << " set aside\n";
    RunManifest m;
    m.subcommand = "aggregate";
    m.config = {{"rule", ag.rule}, {"set_aside", ag.set_aside}};
    m.add_input(ag.annotations);
    m.outputs = {ag.out};
    m.syntax_version = "-";
    finish(m, ag.common);
  });

  // ---- agreement ----
  auto* agr = app.add_subcommand("agreement", "Percent agreement with the majority vote");
  struct {
    std::string annotations, out;
    Common common;
  } am;
  agr->add_option("--annotations", am.annotations)->required();
  agr->add_option("--out", am.out)->required();
  am.common.add_to(agr);
  agr->callback([&] {
    auto records = load_annotations(am.annotations);
    AgreementReport rep = agreement_stats(records);
    auto out = open_out(am.out);
    out << "#annotator\tmatched\tconsidered\tpct\n";
    char buf[32];
    for (const auto& a : rep.per_annotator) {
      std::snprintf(buf, sizeof(buf), "%.1f", a.pct());
      out << a.annotator << '\t' << a.matched << '\t' << a.considered << '\t' << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.1f", rep.mean_pct);
    out << "MEAN\t-\t-\t" << buf << '\n';
    RunManifest m;
    m.subcommand = "agreement";
    m.add_input(am.annotations);
    m.outputs = {am.out};
    m.syntax_version = "-";
    finish(m, am.common);
  });

  // ---- assemble ----
  auto* asb = app.add_subcommand("assemble", "Build a balanced subcorpus from pools");
  struct {
    std::string spec, out, sources_out;
    Common common;
  } as;
  asb->add_option("--spec", as.spec, "JSON: {sources: [{name, pool, label, quota}, ...]}")
      ->required();
  asb->add_option("--out", as.out, "Assembled labeled corpus JSONL")->required();
  asb->add_option("--sources-out", as.sources_out,
                  "Assembly accounting JSON (default <out>.sources.json)");
  as.common.add_to(asb);
  asb->callback([&] {
    std::ifstream sin(as.spec, std::ios::binary);
    if (!sin) throw Error("cannot open assembly spec: " + as.spec);
    nlohmann::json spec_json;
    try {
      sin >> spec_json;
    } catch (const nlohmann::json::exception& e) {
      throw Error(as.spec + ": " + e.what());
    }
    if (!spec_json.contains("sources") || !spec_json["sources"].is_array())
      throw Error("assembly spec needs a 'sources' array");
    RunManifest m;
    m.subcommand = "assemble";
    m.add_input(as.spec);
    std::vector<SourceQuota> sources;
    for (const auto& s : spec_json["sources"]) {
      SourceQuota q;
      q.name = s.at("name").get<std::string>();
      auto l = parse_label(s.at("label").get<std::string>());
      if (!l) throw Error("bad label in assembly source '" + q.name + "'");
      q.assign_label = *l;
      q.quota = s.at("quota").get<std::size_t>();
      std::string pool_path = s.at("pool").get<std::string>();
      q.pool = load_corpus(pool_path, CorpusFormat::Jsonl);
      m.add_input(pool_path);
      sources.push_back(std::move(q));
    }
    AssemblyResult res = assemble_subcorpus(sources);
    save_corpus_jsonl(res.corpus, as.out);
    nlohmann::json acct;
    acct["per_class"] = {{"sarc", res.per_class[Label::Sarcastic]},
                         {"notsarc", res.per_class[Label::NotSarcastic]}};
    acct["per_source"] = nlohmann::json::array();
    for (const auto& [name, taken] : res.per_source)
      acct["per_source"].push_back({{"name", name}, {"taken", taken}});
    std::string acct_path = as.sources_out.empty() ? as.out + ".sources.json" : as.sources_out;
    {
      auto aout = open_out(acct_path);
      aout << acct.dump(2) << '\n';
    }
    m.outputs = {as.out, acct_path};
    m.syntax_version = "-";
    finish(m, as.common);
  });

  // ---- shared supervised options ----
  struct SupArgs {
    std::string in, features = "ngrams", embeddings;
    int n_max = 3, min_df = 1, k = 10, epochs = 5;
    double l2_lambda = 1e-4, eta0 = 0.5, power = 0.5;
    Common common;
  };
  auto add_sup_options = [](CLI::App* cmd, SupArgs& a) {
    cmd->add_option("--in", a.in, "Labeled JSONL corpus")->required();
    cmd->add_option("--features", a.features, "ngrams, w2v or both")
        ->check(CLI::IsMember({"ngrams", "w2v", "both"}));
    cmd->add_option("--embeddings", a.embeddings, "Embedding table (word v1 ... vd)");
    cmd->add_option("--n-max", a.n_max);
    cmd->add_option("--min-df", a.min_df);
    cmd->add_option("--k", a.k, "Cross-validation folds");
    cmd->add_option("--epochs", a.epochs);
    cmd->add_option("--l2-lambda", a.l2_lambda);
    cmd->add_option("--eta0", a.eta0);
    cmd->add_option("--power", a.power, "Inverse-scaling exponent");
    a.common.add_to(cmd);
  };
  auto sup_setup = [](const SupArgs& a, EmbeddingTable& table, FeatureConfig& fc,
                      Hyperparams& hp) {
    fc.ngrams = a.features != "w2v";
    fc.embeddings = a.features != "ngrams";
    fc.n_max = a.n_max;
    fc.min_df = a.min_df;
    if (fc.embeddings) {
      if (a.embeddings.empty())
        throw Error("--features " + a.features + " needs --embeddings FILE");
      table = EmbeddingTable::load(a.embeddings);
      fc.table = &table;
    }
    hp.l2_lambda = a.l2_lambda;
    hp.eta0 = a.eta0;
    hp.power = a.power;
    hp.epochs = a.epochs;
    hp.seed = a.common.seed;
    fc.validate();
  };
  auto sup_config_json = [](const SupArgs& a) {
    return nlohmann::json{{"features", a.features}, {"n_max", a.n_max},
                          {"min_df", a.min_df},     {"k", a.k},
                          {"epochs", a.epochs},     {"l2_lambda", a.l2_lambda},
                          {"eta0", a.eta0},         {"power", a.power}};
  };

  // ---- train-svm ----
  auto* tsv = app.add_subcommand("train-svm", "Train on the full corpus, persist the model");
  SupArgs ta;
  std::string model_out;
  add_sup_options(tsv, ta);
  tsv->add_option("--model-out", model_out, "Model JSON")->required();
  tsv->callback([&] {
    Lexicon lex = Lexicon::load_dir(ta.common.lexicon_dir);
    EmbeddingTable table;
    FeatureConfig fc;
    Hyperparams hp;
    sup_setup(ta, table, fc, hp);
    Corpus c = load_corpus(ta.in, CorpusFormat::Jsonl);
    std::vector<std::vector<std::string>> toks;
    std::vector<Label> labels;
    for (const auto& p : c) {
      if (!p.label) throw Error("train-svm: unlabeled post " + p.response.id);
      toks.push_back(feature_tokens(p.response.text, lex));
      labels.push_back(*p.label);
    }
    NgramVocab vocab;
    if (fc.ngrams) vocab = fit_ngram_vocab(toks, fc.n_max, fc.min_df);
    std::size_t dense_dim = fc.embeddings ? std::size_t(table.dim) : 0;
    std::vector<FeatureVector> xs;
    for (const auto& t : toks) {
      FeatureVector fv;
      if (fc.ngrams) fv.sparse = ngram_counts(t, vocab);
      if (fc.embeddings) fv.dense = embed_average(t, table).vec;
      xs.push_back(std::move(fv));
    }
    LinearModel model = train(xs, labels, vocab.size(), dense_dim, hp);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (model.predict(xs[i]) == labels[i]) ++correct;

    nlohmann::json j;
    j["bias"] = model.bias;
    j["sparse_dim"] = model.sparse_dim;
    j["dense_dim"] = model.dense_dim;
    j["weights"] = model.weights;
    j["train_accuracy"] = double(correct) / double(xs.size());
    j["features"] = fc.describe();
    nlohmann::json vj = nlohmann::json::object();
    for (const auto& [key, id] : vocab.index) vj[key] = id;
    j["vocab"] = vj;
    j["hyperparams"] = sup_config_json(ta);
    {
      auto out = open_out(model_out);
      out << j.dump() << '\n';
    }
    RunManifest m;
    m.subcommand = "train-svm";
    m.config = sup_config_json(ta);
    m.add_input(ta.in);
    if (!ta.embeddings.empty()) m.add_input(ta.embeddings);
    m.outputs = {model_out};
    m.syntax_version = lex.version();
    finish(m, ta.common);
  });

  // ---- crossval ----
  auto* cvl = app.add_subcommand("crossval", "k-fold cross-validation report");
  SupArgs ca;
  std::string report_out, report_tsv;
  add_sup_options(cvl, ca);
  cvl->add_option("--out", report_out, "Report JSON")->required();
  cvl->add_option("--tsv", report_tsv, "Optional table TSV");
  cvl->callback([&] {
    Lexicon lex = Lexicon::load_dir(ca.common.lexicon_dir);
    EmbeddingTable table;
    FeatureConfig fc;
    Hyperparams hp;
    sup_setup(ca, table, fc, hp);
    Corpus c = load_corpus(ca.in, CorpusFormat::Jsonl);
    EvalReport rep = cross_validate(c, lex, ca.k, fc, hp, ca.common.seed);
    {
      auto out = open_out(report_out);
      out << eval_report_json(rep).dump(2) << '\n';
    }
    RunManifest m;
    m.subcommand = "crossval";
    m.config = sup_config_json(ca);
    m.add_input(ca.in);
    if (!ca.embeddings.empty()) m.add_input(ca.embeddings);
    m.outputs = {report_out};
    if (!report_tsv.empty()) {
      auto out = open_out(report_tsv);
      eval_report_tsv(rep, out);
      m.outputs.push_back(report_tsv);
    }
    m.syntax_version = lex.version();
    finish(m, ca.common);
  });

  // ---- learning-curve ----
  auto* lcv = app.add_subcommand("learning-curve", "F-measure vs posts per class");
  SupArgs la;
  std::string curve_out;
  std::size_t step = 100;
  add_sup_options(lcv, la);
  lcv->add_option("--step", step, "Posts per class between points");
  lcv->add_option("--out", curve_out, "CSV: size,f_sarc,f_notsarc")->required();
  lcv->callback([&] {
    Lexicon lex = Lexicon::load_dir(la.common.lexicon_dir);
    EmbeddingTable table;
    FeatureConfig fc;
    Hyperparams hp;
    sup_setup(la, table, fc, hp);
    Corpus c = load_corpus(la.in, CorpusFormat::Jsonl);
    auto curve = learning_curve(c, lex, step, fc, hp, la.common.seed, la.k);
    for (const auto& pt : curve)
      if (pt.degenerate)
        std::cerr << "warning: degenerate point at size " << pt.size_per_class << "\n";
    {
      auto out = open_out(curve_out);
      save_curve_csv(curve, out);
    }
    RunManifest m;
    m.subcommand = "learning-curve";
    m.config = sup_config_json(la);
    m.config["step"] = step;
    m.add_input(la.in);
    if (!la.embeddings.empty()) m.add_input(la.embeddings);
    m.outputs = {curve_out};
    m.syntax_version = lex.version();
    finish(m, la.common);
  });

  // ---- report-patterns ----
  auto* rpt =
      app.add_subcommand("report-patterns", "Characteristic patterns sorted by probability");
  struct {
    std::string stats, cls = "sarc", out;
    std::size_t top = 0;
    Common common;
  } rp;
  rpt->add_option("--stats", rp.stats)->required();
  rpt->add_option("--class", rp.cls);
  rpt->add_option("--top", rp.top, "Row cap (0 = all)");
  rpt->add_option("--out", rp.out, "TSV: prob, freq, template, anchor, sample post")
      ->required();
  rp.common.add_to(rpt);
  rpt->callback([&] {
    Label cls = parse_label_arg(rp.cls);
    std::ifstream in(rp.stats, std::ios::binary);
    if (!in) throw Error("cannot open stats file: " + rp.stats);
    PatternStats stats = load_stats_tsv(in, rp.stats);
    auto rows = emit_pattern_report(stats, cls, ReportSort::ProbThenFreq, rp.top);
    auto out = open_out(rp.out);
    out << "#prob\tfreq\ttemplate\tanchor\tsample_post\n";
    char buf[32];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%.2f", r.prob);
      out << buf << '\t' << r.freq << '\t' << to_string(r.template_id) << '\t' << r.anchor
          << '\t' << (r.sample_post.empty() ? "-" : r.sample_post) << '\n';
    }
    RunManifest m;
    m.subcommand = "report-patterns";
    m.config = {{"class", rp.cls}, {"top", rp.top}};
    m.add_input(rp.stats);
    m.outputs = {rp.out};
    m.syntax_version = "-";
    finish(m, rp.common);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sarco::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
