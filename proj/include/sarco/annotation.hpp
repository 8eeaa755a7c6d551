#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sarco/corpus.hpp"
#include "sarco/core.hpp"

namespace sarco {

struct Judgment {
  std::string annotator;
  Label label = Label::NotSarcastic;
};

struct AnnotationRecord {
  std::string post_id;
  std::vector<Judgment> judgments;  // at most one per annotator

  std::size_t sarc_count() const {
    std::size_t n = 0;
    for (const auto& j : judgments)
      if (j.label == Label::Sarcastic) ++n;
    return n;
  }
};

/// k-out-of-n vote rule. set_aside_at marks the sarcastic-vote count
/// whose posts go to neither class (the 5-of-9 pool).
struct AggregationRule {
  int required_sarc = 6;
  int out_of = 9;
  std::optional<int> set_aside_at;

  void validate() const {
    if (required_sarc <= 0 || required_sarc > out_of)
      throw Error("aggregation rule needs 0 < k <= n");
    if (set_aside_at && (*set_aside_at < 0 || *set_aside_at >= required_sarc))
      throw Error("set_aside_at must be below the sarcastic threshold");
  }
};

enum class AggregateLabel { Sarcastic, NotSarcastic, SetAside };

inline const char* to_string(AggregateLabel l) {
  switch (l) {
    case AggregateLabel::Sarcastic: return "sarc";
    case AggregateLabel::NotSarcastic: return "notsarc";
    case AggregateLabel::SetAside: return "set_aside";
  }
  return "?";
}

inline AggregateLabel aggregate(const AnnotationRecord& r, const AggregationRule& rule) {
  rule.validate();
  if (r.judgments.size() != static_cast<std::size_t>(rule.out_of))
    throw Error("aggregate: post " + r.post_id + " has " +
                std::to_string(r.judgments.size()) + " judgments, rule expects " +
                std::to_string(rule.out_of));
  std::size_t sarc = r.sarc_count();
  if (sarc >= static_cast<std::size_t>(rule.required_sarc)) return AggregateLabel::Sarcastic;
  if (rule.set_aside_at && sarc == static_cast<std::size_t>(*rule.set_aside_at))
    return AggregateLabel::SetAside;
  return AggregateLabel::NotSarcastic;
}

inline std::vector<AnnotationRecord> load_annotations(std::istream& in,
                                                      const std::string& name) {
  std::vector<AnnotationRecord> records;
  std::unordered_set<std::string> seen_posts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
    AnnotationRecord r;
    if (!j.contains("post_id") || !j["post_id"].is_string())
      throw Error(name + ":" + std::to_string(lineno) + ": missing 'post_id'");
    r.post_id = j["post_id"].get<std::string>();
    if (!seen_posts.insert(r.post_id).second)
      throw Error(name + ":" + std::to_string(lineno) + ": duplicate record for post " +
                  r.post_id);
    if (!j.contains("judgments") || !j["judgments"].is_array())
      throw Error(name + ":" + std::to_string(lineno) + ": missing 'judgments' array");
    std::unordered_set<std::string> annotators;
    for (const auto& ji : j["judgments"]) {
      Judgment jd;
      if (!ji.contains("annotator") || !ji["annotator"].is_string())
        throw Error(name + ":" + std::to_string(lineno) + ": judgment missing 'annotator'");
      jd.annotator = ji["annotator"].get<std::string>();
      if (!annotators.insert(jd.annotator).second)
        throw Error(name + ":" + std::to_string(lineno) + ": annotator '" + jd.annotator +
                    "' judged post " + r.post_id + " twice");
      auto label = ji.contains("label") && ji["label"].is_string()
                       ? parse_label(ji["label"].get<std::string>())
                       : std::nullopt;
      if (!label)
        throw Error(name + ":" + std::to_string(lineno) + ": judgment needs label sarc|notsarc");
      jd.label = *label;
      r.judgments.push_back(std::move(jd));
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open annotation file: " + path);
  return load_annotations(in, path);
}

// ---- qualifier ----

struct QualifierResult {
  int correct = 0;
  int total = 20;
  bool pass = false;
  double score() const { return static_cast<double>(correct) / total; }
};

/// Scores a submission against the 20-item gold screen (10 sarcastic,
/// 10 not). Passing requires strictly more than 70%: 14/20 fails.
inline QualifierResult score_qualifier(
    const std::vector<std::pair<std::string, Label>>& gold,
    const std::unordered_map<std::string, Label>& answers) {
  if (gold.size() != 20) throw Error("qualifier gold set must have exactly 20 items");
  int sarc = 0;
  std::unordered_set<std::string> ids;
  for (const auto& [id, label] : gold) {
    if (!ids.insert(id).second) throw Error("qualifier gold has duplicate item " + id);
    if (label == Label::Sarcastic) ++sarc;
  }
  if (sarc != 10) throw Error("qualifier gold set must balance 10 sarcastic / 10 not");
  QualifierResult res;
  for (const auto& [id, label] : gold) {
    auto it = answers.find(id);
    if (it != answers.end() && it->second == label) ++res.correct;  // missing = wrong
  }
  res.pass = res.correct > 14;  // correct/20 > 0.70, strictly
  return res;
}

// ---- agreement ----

struct AnnotatorAgreement {
  std::string annotator;
  std::size_t matched = 0;
  std::size_t considered = 0;
  double pct() const {
    return considered == 0 ? 0.0
                           : 100.0 * static_cast<double>(matched) /
                                 static_cast<double>(considered);
  }
};

struct AgreementReport {
  std::vector<AnnotatorAgreement> per_annotator;  // sorted by annotator id
  double mean_pct = 0.0;
  std::size_t ties_excluded = 0;
};

/// Percent agreement of each annotator with the per-post majority label.
/// Posts with an exact tie carry no majority and are excluded from the
/// denominators.
inline AgreementReport agreement_stats(const std::vector<AnnotationRecord>& records) {
  std::map<std::string, AnnotatorAgreement> acc;
  AgreementReport report;
  for (const auto& r : records) {
    std::size_t sarc = r.sarc_count();
    std::size_t notsarc = r.judgments.size() - sarc;
    if (sarc == notsarc) {
      ++report.ties_excluded;
      continue;
    }
    Label majority = sarc > notsarc ? Label::Sarcastic : Label::NotSarcastic;
    for (const auto& j : r.judgments) {
      auto& a = acc[j.annotator];
      a.annotator = j.annotator;
      ++a.considered;
      if (j.label == majority) ++a.matched;
    }
  }
  double sum = 0.0;
  for (auto& [id, a] : acc) {
    report.per_annotator.push_back(a);
    sum += a.pct();
  }
  if (!report.per_annotator.empty())
    report.mean_pct = sum / static_cast<double>(report.per_annotator.size());
  return report;
}

// ---- sarcasm ratio ----

struct RatioResult {
  std::size_t sarcastic = 0;
  std::size_t set_aside = 0;
  std::size_t total = 0;
  double ratio = 0.0;  // sarcastic / total
};

inline RatioResult sarcasm_ratio(const std::vector<AnnotationRecord>& records,
                                 const AggregationRule& rule) {
  if (records.empty()) throw Error("sarcasm_ratio: no annotation records");
  RatioResult res;
  for (const auto& r : records) {
    AggregateLabel l = aggregate(r, rule);
    ++res.total;
    if (l == AggregateLabel::Sarcastic) ++res.sarcastic;
    if (l == AggregateLabel::SetAside) ++res.set_aside;
  }
  res.ratio = static_cast<double>(res.sarcastic) / static_cast<double>(res.total);
  return res;
}

// ---- subcorpus assembly ----

struct SourceQuota {
  std::string name;
  Corpus pool;
  Label assign_label = Label::Sarcastic;
  std::size_t quota = 0;
};

struct AssemblyResult {
  Corpus corpus;
  std::vector<std::pair<std::string, std::size_t>> per_source;  // name -> taken
  std::map<Label, std::size_t> per_class;
};

/// Draws the first `quota` posts of each pool (pool order is ingestion
/// order, so runs are reproducible) and relabels them with the pool's
/// class. The result must balance exactly 50/50.
inline AssemblyResult assemble_subcorpus(const std::vector<SourceQuota>& sources) {
  AssemblyResult res;
  std::unordered_set<std::string> seen;
  std::size_t by_class[2] = {0, 0};
  for (const auto& src : sources) {
    if (src.quota > src.pool.size())
      throw Error("assemble_subcorpus: quota " + std::to_string(src.quota) +
                  " exceeds pool '" + src.name + "' of size " +
                  std::to_string(src.pool.size()));
    for (const auto& p : src.pool)
      if (!seen.insert(p.response.id).second)
        throw Error("assemble_subcorpus: pools are not disjoint, post " + p.response.id +
                    " reappears in '" + src.name + "'");
    for (std::size_t i = 0; i < src.quota; ++i) {
      QuoteResponsePair pair = src.pool.at(i);
      pair.label = src.assign_label;
      res.corpus.add(std::move(pair));
    }
    by_class[label_index(src.assign_label)] += src.quota;
    res.per_source.emplace_back(src.name, src.quota);
  }
  if (by_class[0] != by_class[1])
    throw Error("assemble_subcorpus: class totals differ (" + std::to_string(by_class[0]) +
                " sarcastic vs " + std::to_string(by_class[1]) + " not)");
  res.per_class[Label::Sarcastic] = by_class[0];
  res.per_class[Label::NotSarcastic] = by_class[1];
  return res;
}

}  // namespace sarco
