#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sarco/corpus.hpp"
#include "sarco/syntax.hpp"

namespace sarco {

enum class CueClass { RQ, Hyp };

inline const char* to_string(CueClass c) { return c == CueClass::RQ ? "RQ" : "HYP"; }

struct CueSpec {
  std::string name;
  std::string pattern_source;
  std::regex pattern;  // case-insensitive ECMAScript
  CueClass class_hint = CueClass::Hyp;
};

inline std::vector<CueSpec> load_cues(std::istream& in, const std::string& name) {
  std::vector<CueSpec> cues;
  std::unordered_set<std::string> seen;
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
    CueSpec cue;
    if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
      throw Error(name + ":" + std::to_string(lineno) + ": cue needs a nonempty 'name'");
    cue.name = j["name"].get<std::string>();
    if (!seen.insert(cue.name).second)
      throw Error(name + ":" + std::to_string(lineno) + ": duplicate cue name '" + cue.name + "'");
    if (!j.contains("pattern") || !j["pattern"].is_string())
      throw Error(name + ":" + std::to_string(lineno) + ": cue needs a 'pattern'");
    cue.pattern_source = j["pattern"].get<std::string>();
    try {
      cue.pattern = std::regex(cue.pattern_source,
                               std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(name + ":" + std::to_string(lineno) + ": invalid regex for cue '" +
                  cue.name + "': " + e.what());
    }
    std::string hint = j.value("class_hint", "HYP");
    if (hint == "RQ") cue.class_hint = CueClass::RQ;
    else if (hint == "HYP") cue.class_hint = CueClass::Hyp;
    else throw Error(name + ":" + std::to_string(lineno) + ": class_hint must be RQ or HYP");
    cues.push_back(std::move(cue));
  }
  return cues;
}

inline std::vector<CueSpec> load_cues(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open cue file: " + path);
  return load_cues(in, path);
}

/// Per-cue match lists in cue-file order; ids keep corpus order.
struct CueMatches {
  std::vector<std::string> cue_order;
  std::unordered_map<std::string, std::vector<std::string>> ids;

  std::size_t total_found(const std::string& cue) const {
    auto it = ids.find(cue);
    return it == ids.end() ? 0 : it->second.size();
  }
};

/// A post matches a cue iff the regex matches its response text, the post
/// has a dialogic parent, and the response runs to at most max_words.
inline CueMatches retrieve(const Corpus& corpus, const std::vector<CueSpec>& cues,
                           const Lexicon& lex, std::size_t max_words = 150) {
  CueMatches out;
  for (const auto& cue : cues) {
    out.cue_order.push_back(cue.name);
    out.ids[cue.name];
  }
  for (const auto& p : corpus) {
    if (!p.has_parent()) continue;
    if (word_count(p.response.text, lex) > max_words) continue;
    for (const auto& cue : cues) {
      if (std::regex_search(p.response.text, cue.pattern))
        out.ids[cue.name].push_back(p.response.id);
    }
  }
  return out;
}

/// Mid-post rhetorical-question heuristic: some non-final sentence is a
/// question immediately followed by a non-question sentence.
inline bool is_rq_candidate(const std::string& text, const Lexicon& lex) {
  std::vector<Sentence> sents = analyze(text, lex, /*with_chunks=*/false);
  for (std::size_t i = 0; i + 1 < sents.size(); ++i)
    if (sents[i].is_question && !sents[i + 1].is_question) return true;
  return false;
}

inline std::vector<std::string> rq_candidates(const Corpus& corpus, const Lexicon& lex) {
  std::vector<std::string> out;
  for (const auto& p : corpus)
    if (is_rq_candidate(p.response.text, lex)) out.push_back(p.response.id);
  return out;
}

struct Batch {
  std::vector<std::pair<std::string, std::string>> posts;  // (post id, cue name)
  bool mixed = false;  // at least two distinct cues inside
};

/// Deals matched posts into annotation batches that interleave cues, so
/// annotators cannot tell which regex pulled a post. A post matching
/// several cues is attributed to the first cue in file order and appears
/// in exactly one batch.
inline std::vector<Batch> sample_batches(const CueMatches& matches, std::size_t batch_size,
                                         std::uint64_t seed) {
  if (batch_size == 0) throw Error("sample_batches: batch_size must be positive");
  std::mt19937_64 rng(seed);
  std::unordered_set<std::string> taken;
  std::vector<std::vector<std::pair<std::string, std::string>>> queues;
  for (const auto& cue : matches.cue_order) {
    auto it = matches.ids.find(cue);
    if (it == matches.ids.end()) continue;
    std::vector<std::pair<std::string, std::string>> q;
    for (const auto& id : it->second)
      if (taken.insert(id).second) q.emplace_back(id, cue);
    if (!q.empty()) {
      deterministic_shuffle(q, rng);
      queues.push_back(std::move(q));
    }
  }
  // round-robin over cue queues, then chop into batches
  std::vector<std::pair<std::string, std::string>> stream;
  for (std::size_t row = 0; !queues.empty(); ++row) {
    bool any = false;
    for (auto& q : queues) {
      if (row < q.size()) {
        stream.push_back(q[row]);
        any = true;
      }
    }
    if (!any) break;
  }
  std::vector<Batch> batches;
  for (std::size_t i = 0; i < stream.size(); i += batch_size) {
    Batch b;
    std::unordered_set<std::string> cues_inside;
    for (std::size_t j = i; j < std::min(i + batch_size, stream.size()); ++j) {
      b.posts.push_back(stream[j]);
      cues_inside.insert(stream[j].second);
    }
    b.mixed = cues_inside.size() >= 2;
    batches.push_back(std::move(b));
  }
  return batches;
}

/// One row per cue, mirroring the found / annotated / percent-sarcastic
/// layout. pct_defined is false when nothing was annotated.
struct CueStatsRow {
  std::string cue;
  std::size_t found = 0;
  std::size_t annotated = 0;
  std::size_t sarcastic = 0;
  bool pct_defined = false;
  double pct_sarcastic_raw = 0.0;  // in [0, 100]

  int pct_display() const { return static_cast<int>(std::lround(pct_sarcastic_raw)); }
};

inline std::vector<CueStatsRow> cue_stats(
    const CueMatches& matches,
    const std::unordered_map<std::string, Label>& annotations) {
  std::unordered_set<std::string> known;
  for (const auto& [cue, ids] : matches.ids)
    for (const auto& id : ids) known.insert(id);
  for (const auto& [id, label] : annotations) {
    (void)label;
    if (!known.count(id))
      throw Error("cue_stats: annotation references unknown post id " + id);
  }
  std::vector<CueStatsRow> rows;
  for (const auto& cue : matches.cue_order) {
    CueStatsRow row;
    row.cue = cue;
    const auto& ids = matches.ids.at(cue);
    row.found = ids.size();
    for (const auto& id : ids) {
      auto it = annotations.find(id);
      if (it == annotations.end()) continue;
      ++row.annotated;
      if (it->second == Label::Sarcastic) ++row.sarcastic;
    }
    if (row.annotated > 0) {
      row.pct_defined = true;
      row.pct_sarcastic_raw =
          100.0 * static_cast<double>(row.sarcastic) / static_cast<double>(row.annotated);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void save_cue_stats_tsv(const std::vector<CueStatsRow>& rows, std::ostream& out) {
  out << "#cue\tfound\tannotated\tpct_sarc\n";
  for (const auto& r : rows) {
    out << r.cue << '\t' << r.found << '\t' << r.annotated << '\t';
    if (r.pct_defined) out << r.pct_display() << "%";
    else out << "—";
    out << '\n';
  }
}

}  // namespace sarco
