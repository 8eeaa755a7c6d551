#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sarco/corpus.hpp"
#include "sarco/syntax.hpp"

namespace sarco {

/// The 17 clause templates plus the four bigram templates added for
/// hyperbole-style cues. Uppercase segment names the extraction slot.
enum class TemplateId {
  SubjPassVp,        // <subj> PassVP
  SubjActVp,         // <subj> ActVP
  SubjActVpDobj,     // <subj> ActVP Dobj
  SubjActInfVp,      // <subj> ActInfVP
  SubjPassInfVp,     // <subj> PassInfVP
  SubjAuxVpDobj,     // <subj> AuxVP Dobj
  SubjAuxVpAdj,      // <subj> AuxVP Adj
  ActVpDobj,         // ActVP <dobj>
  InfVpDobj,         // InfVP <dobj>
  ActInfVpDobj,      // ActInfVP <dobj>
  PassInfVpDobj,     // PassInfVP <dobj>
  SubjAuxVpDobjSlot, // Subj AuxVP <dobj>
  NpPrepNp,          // NP Prep <np>
  ActVpPrepNp,       // ActVP Prep <np>
  PassVpPrepNp,      // PassVP Prep <np>
  InfVpPrepNp,       // InfVP Prep <np>
  PossNp,            // <possessive> NP
  AdjNoun,           // Adj Noun
  AdvAdj,            // Adv Adj
  AdjAdj,            // Adj Adj
  AdvAdv             // Adv Adv
};

inline const char* to_string(TemplateId t) {
  switch (t) {
    case TemplateId::SubjPassVp: return "SUBJ-PassVP";
    case TemplateId::SubjActVp: return "SUBJ-ActVP";
    case TemplateId::SubjActVpDobj: return "SUBJ-ActVP-Dobj";
    case TemplateId::SubjActInfVp: return "SUBJ-ActInfVP";
    case TemplateId::SubjPassInfVp: return "SUBJ-PassInfVP";
    case TemplateId::SubjAuxVpDobj: return "SUBJ-AuxVP-Dobj";
    case TemplateId::SubjAuxVpAdj: return "SUBJ-AuxVP-Adj";
    case TemplateId::ActVpDobj: return "ActVP-DOBJ";
    case TemplateId::InfVpDobj: return "InfVP-DOBJ";
    case TemplateId::ActInfVpDobj: return "ActInfVP-DOBJ";
    case TemplateId::PassInfVpDobj: return "PassInfVP-DOBJ";
    case TemplateId::SubjAuxVpDobjSlot: return "Subj-AuxVP-DOBJ";
    case TemplateId::NpPrepNp: return "NP-Prep-NP";
    case TemplateId::ActVpPrepNp: return "ActVP-Prep-NP";
    case TemplateId::PassVpPrepNp: return "PassVP-Prep-NP";
    case TemplateId::InfVpPrepNp: return "InfVP-Prep-NP";
    case TemplateId::PossNp: return "POSS-NP";
    case TemplateId::AdjNoun: return "Adj-Noun";
    case TemplateId::AdvAdj: return "Adv-Adj";
    case TemplateId::AdjAdj: return "Adj-Adj";
    case TemplateId::AdvAdv: return "Adv-Adv";
  }
  return "?";
}

inline std::optional<TemplateId> template_from_string(std::string_view s) {
  static const std::unordered_map<std::string_view, TemplateId> kMap = {
      {"SUBJ-PassVP", TemplateId::SubjPassVp},
      {"SUBJ-ActVP", TemplateId::SubjActVp},
      {"SUBJ-ActVP-Dobj", TemplateId::SubjActVpDobj},
      {"SUBJ-ActInfVP", TemplateId::SubjActInfVp},
      {"SUBJ-PassInfVP", TemplateId::SubjPassInfVp},
      {"SUBJ-AuxVP-Dobj", TemplateId::SubjAuxVpDobj},
      {"SUBJ-AuxVP-Adj", TemplateId::SubjAuxVpAdj},
      {"ActVP-DOBJ", TemplateId::ActVpDobj},
      {"InfVP-DOBJ", TemplateId::InfVpDobj},
      {"ActInfVP-DOBJ", TemplateId::ActInfVpDobj},
      {"PassInfVP-DOBJ", TemplateId::PassInfVpDobj},
      {"Subj-AuxVP-DOBJ", TemplateId::SubjAuxVpDobjSlot},
      {"NP-Prep-NP", TemplateId::NpPrepNp},
      {"ActVP-Prep-NP", TemplateId::ActVpPrepNp},
      {"PassVP-Prep-NP", TemplateId::PassVpPrepNp},
      {"InfVP-Prep-NP", TemplateId::InfVpPrepNp},
      {"POSS-NP", TemplateId::PossNp},
      {"Adj-Noun", TemplateId::AdjNoun},
      {"Adv-Adj", TemplateId::AdvAdj},
      {"Adj-Adj", TemplateId::AdjAdj},
      {"Adv-Adv", TemplateId::AdvAdv},
  };
  auto it = kMap.find(s);
  if (it == kMap.end()) return std::nullopt;
  return it->second;
}

/// A template plus its lexical anchor, e.g. {ActVP-Prep-NP, "thanks for"}.
/// Anchors are lowercased surface forms, never lemmas: the learned
/// inventory reports what the posts literally said.
struct LexicoSyntacticPattern {
  TemplateId template_id;
  std::string anchor;

  bool operator==(const LexicoSyntacticPattern& o) const {
    return template_id == o.template_id && anchor == o.anchor;
  }
};

struct PatternHash {
  std::size_t operator()(const LexicoSyntacticPattern& p) const {
    return std::hash<std::string>()(p.anchor) * 31u +
           static_cast<std::size_t>(p.template_id);
  }
};

using PatternSet = std::unordered_set<LexicoSyntacticPattern, PatternHash>;

struct TemplateOptions {
  bool adv_adv = true;  // the 21st template; see report tooling for both runs
};

namespace detail {

// tokens in [from, to) all tagged Adv
inline bool adv_gap(const std::vector<Token>& toks, std::size_t from, std::size_t to) {
  for (std::size_t k = from; k < to; ++k)
    if (toks[k].tag != Tag::Adv) return false;
  return true;
}

// gap of at most two Adv/Adj tokens (for "be left alone for ...")
inline bool prep_gap(const std::vector<Token>& toks, std::size_t from, std::size_t to) {
  if (to - from > 2) return false;
  for (std::size_t k = from; k < to; ++k)
    if (toks[k].tag != Tag::Adv && toks[k].tag != Tag::Adj) return false;
  return true;
}

}  // namespace detail

/// Instantiates every matching template at every match site of a chunked
/// sentence. Returns a multiset: two sites of the same pattern yield two
/// entries. Deterministic left-to-right emission.
inline std::vector<LexicoSyntacticPattern> instantiate_templates(
    const Sentence& s, const TemplateOptions& opts = {}) {
  std::vector<LexicoSyntacticPattern> out;
  const auto& toks = s.tokens;
  const auto& chunks = s.chunks;
  auto emit = [&](TemplateId tid, std::string anchor) {
    out.push_back({tid, std::move(anchor)});
  };
  auto head_of = [&](const Chunk& c) { return toks[c.head].lower; };

  // chunk immediately before ci across an adverb-only gap
  auto preceding_np = [&](std::size_t ci) -> const Chunk* {
    if (ci == 0) return nullptr;
    const Chunk& prev = chunks[ci - 1];
    if (prev.kind != Chunk::Kind::NP) return nullptr;
    if (!detail::adv_gap(toks, prev.end, chunks[ci].begin)) return nullptr;
    return &prev;
  };
  auto following_chunk = [&](std::size_t ci) -> const Chunk* {
    if (ci + 1 >= chunks.size()) return nullptr;
    const Chunk& next = chunks[ci + 1];
    if (!detail::adv_gap(toks, chunks[ci].end, next.begin)) return nullptr;
    return &next;
  };
  // PP chunk after ci across a short Adv/Adj gap, with a nominal filler:
  // the chunk right after the preposition, an NP or a gerund-headed VP.
  struct PrepSite {
    std::string prep;
    bool filled = false;
  };
  auto following_prep = [&](std::size_t ci) -> std::optional<PrepSite> {
    if (ci + 1 >= chunks.size()) return std::nullopt;
    const Chunk& next = chunks[ci + 1];
    if (next.kind != Chunk::Kind::PP) return std::nullopt;
    if (!detail::prep_gap(toks, chunks[ci].end, next.begin)) return std::nullopt;
    PrepSite site;
    site.prep = head_of(next);
    if (ci + 2 < chunks.size()) {
      const Chunk& filler = chunks[ci + 2];
      if (filler.begin == next.end) {
        if (filler.kind == Chunk::Kind::NP)
          site.filled = true;
        else if (filler.kind == Chunk::Kind::VP &&
                 toks[filler.head].lower.ends_with("ing"))
          site.filled = true;  // gerund object: "thanks for missing ..."
      }
    }
    return site;
  };
  // first non-adverb token after the chunk, when it is a bare adjective
  auto following_adj = [&](std::size_t ci) -> std::optional<std::string> {
    for (std::size_t k = chunks[ci].end; k < toks.size(); ++k) {
      if (toks[k].tag == Tag::Adv) continue;
      if (toks[k].tag == Tag::Adj) return toks[k].lower;
      return std::nullopt;
    }
    return std::nullopt;
  };

  for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
    const Chunk& c = chunks[ci];
    if (c.kind == Chunk::Kind::VP && c.vp_infinitive) {
      const std::string verb = head_of(c);
      if (const Chunk* next = following_chunk(ci); next && next->kind == Chunk::Kind::NP)
        emit(TemplateId::InfVpDobj, verb);
      if (auto prep = following_prep(ci); prep && prep->filled)
        emit(TemplateId::InfVpPrepNp, verb + " " + prep->prep);
      continue;
    }
    if (c.kind == Chunk::Kind::VP) {
      const bool aux_headed = toks[c.head].tag == Tag::Aux;
      const bool passive = c.vp_voice == Voice::Passive;
      const bool active_verb = !aux_headed && !passive;
      const std::string vhead = head_of(c);
      const Chunk* subj = preceding_np(ci);
      const Chunk* next = following_chunk(ci);
      const Chunk* dobj =
          (next && next->kind == Chunk::Kind::NP) ? next : nullptr;
      const Chunk* inf = (next && next->kind == Chunk::Kind::VP &&
                          next->vp_infinitive)
                             ? next
                             : nullptr;
      auto prep = following_prep(ci);

      if (active_verb) {
        if (subj) emit(TemplateId::SubjActVp, vhead);
        if (dobj) {
          emit(TemplateId::ActVpDobj, vhead);
          if (subj) emit(TemplateId::SubjActVpDobj, vhead + " " + head_of(*dobj));
        }
        if (inf) {
          const std::string combo = vhead + " to " + head_of(*inf);
          if (subj) emit(TemplateId::SubjActInfVp, combo);
          std::size_t inf_ci = ci + 1;
          if (const Chunk* after = following_chunk(inf_ci);
              after && after->kind == Chunk::Kind::NP)
            emit(TemplateId::ActInfVpDobj, combo);
        }
        if (prep && prep->filled) emit(TemplateId::ActVpPrepNp, vhead + " " + prep->prep);
      }
      if (passive) {
        if (subj) emit(TemplateId::SubjPassVp, vhead);
        if (inf) {
          const std::string combo = vhead + " to " + head_of(*inf);
          if (subj) emit(TemplateId::SubjPassInfVp, combo);
          std::size_t inf_ci = ci + 1;
          if (const Chunk* after = following_chunk(inf_ci);
              after && after->kind == Chunk::Kind::NP)
            emit(TemplateId::PassInfVpDobj, combo);
        }
        if (prep && prep->filled) emit(TemplateId::PassVpPrepNp, vhead + " " + prep->prep);
      }
      if (aux_headed) {
        if (dobj && subj) {
          emit(TemplateId::SubjAuxVpDobj, vhead + " " + head_of(*dobj));
          emit(TemplateId::SubjAuxVpDobjSlot, head_of(*subj) + " " + vhead);
        }
        if (subj && !dobj) {
          if (auto adj = following_adj(ci))
            emit(TemplateId::SubjAuxVpAdj, vhead + " " + *adj);
        }
      }
      continue;
    }
    if (c.kind == Chunk::Kind::NP) {
      if (auto prep = following_prep(ci); prep && prep->filled)
        emit(TemplateId::NpPrepNp, head_of(c) + " " + prep->prep);
      for (std::size_t k = c.begin; k < c.head; ++k) {
        if (toks[k].tag == Tag::Poss) {
          emit(TemplateId::PossNp, toks[k].lower + " " + head_of(c));
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    Tag a = toks[i].tag, b = toks[i + 1].tag;
    if (a == Tag::Adj && b == Tag::Noun)
      emit(TemplateId::AdjNoun, toks[i].lower + " " + toks[i + 1].lower);
    else if (a == Tag::Adv && b == Tag::Adj)
      emit(TemplateId::AdvAdj, toks[i].lower + " " + toks[i + 1].lower);
    else if (a == Tag::Adj && b == Tag::Adj)
      emit(TemplateId::AdjAdj, toks[i].lower + " " + toks[i + 1].lower);
    else if (opts.adv_adv && a == Tag::Adv && b == Tag::Adv)
      emit(TemplateId::AdvAdv, toks[i].lower + " " + toks[i + 1].lower);
  }
  return out;
}

/// Per-pattern occurrence counts and class-conditional counts. Counting
/// is per match site: a pattern occurring twice in one post counts twice.
struct PatternCell {
  long long freq = 0;
  long long class_freq[2] = {0, 0};
  std::string sample_post[2];  // first post id seen per class
};

struct PatternStats {
  std::unordered_map<LexicoSyntacticPattern, PatternCell, PatternHash> cells;

  double prob(const LexicoSyntacticPattern& p, Label l) const {
    auto it = cells.find(p);
    if (it == cells.end() || it->second.freq == 0) return 0.0;
    return static_cast<double>(it->second.class_freq[label_index(l)]) /
           static_cast<double>(it->second.freq);
  }
};

inline std::vector<LexicoSyntacticPattern> post_match_sites(
    const std::string& text, const Lexicon& lex, const TemplateOptions& opts = {}) {
  std::vector<LexicoSyntacticPattern> sites;
  for (const Sentence& s : analyze(text, lex)) {
    auto ps = instantiate_templates(s, opts);
    sites.insert(sites.end(), std::make_move_iterator(ps.begin()),
                 std::make_move_iterator(ps.end()));
  }
  return sites;
}

/// Aggregates pattern statistics over a fully labeled corpus (response
/// text only; quotes contribute nothing).
inline PatternStats count_patterns(const Corpus& corpus, const Lexicon& lex,
                                   const TemplateOptions& opts = {}) {
  PatternStats stats;
  for (const auto& pair : corpus) {
    if (!pair.label)
      throw Error("count_patterns: unlabeled post " + pair.response.id);
    int cls = label_index(*pair.label);
    for (const auto& p : post_match_sites(pair.response.text, lex, opts)) {
      PatternCell& cell = stats.cells[p];
      cell.freq += 1;
      cell.class_freq[cls] += 1;
      if (cell.sample_post[cls].empty()) cell.sample_post[cls] = pair.response.id;
    }
  }
  return stats;
}

/// Pointwise-sum merge; counting distributes over corpus shards.
inline PatternStats merge_stats(const PatternStats& a, const PatternStats& b) {
  PatternStats out = a;
  for (const auto& [pattern, cell] : b.cells) {
    PatternCell& dst = out.cells[pattern];
    dst.freq += cell.freq;
    for (int c = 0; c < 2; ++c) {
      dst.class_freq[c] += cell.class_freq[c];
      if (dst.sample_post[c].empty()) dst.sample_post[c] = cell.sample_post[c];
    }
  }
  return out;
}

/// Exactly the patterns with freq >= theta_f and P(class|p) >= theta_p.
inline PatternSet threshold_patterns(const PatternStats& stats, Label cls,
                                     long long theta_f, double theta_p) {
  PatternSet out;
  int ci = label_index(cls);
  for (const auto& [pattern, cell] : stats.cells) {
    if (cell.freq < theta_f) continue;
    double p = static_cast<double>(cell.class_freq[ci]) / static_cast<double>(cell.freq);
    if (p >= theta_p) out.insert(pattern);
  }
  return out;
}

struct ReportRow {
  double prob = 0.0;
  long long freq = 0;
  TemplateId template_id;
  std::string anchor;
  std::string sample_post;
};

enum class ReportSort { ProbThenFreq };

/// Characteristic-pattern report: rows sorted by probability, then
/// frequency, then anchor. top_k = 0 means all rows.
inline std::vector<ReportRow> emit_pattern_report(const PatternStats& stats, Label cls,
                                                  ReportSort /*sort*/ = ReportSort::ProbThenFreq,
                                                  std::size_t top_k = 0) {
  std::vector<ReportRow> rows;
  int ci = label_index(cls);
  for (const auto& [pattern, cell] : stats.cells) {
    if (cell.class_freq[ci] == 0) continue;
    ReportRow r;
    r.prob = static_cast<double>(cell.class_freq[ci]) / static_cast<double>(cell.freq);
    r.freq = cell.freq;
    r.template_id = pattern.template_id;
    r.anchor = pattern.anchor;
    r.sample_post = cell.sample_post[ci];
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    if (a.freq != b.freq) return a.freq > b.freq;
    if (a.anchor != b.anchor) return a.anchor < b.anchor;
    return static_cast<int>(a.template_id) < static_cast<int>(b.template_id);
  });
  if (top_k > 0 && rows.size() > top_k) rows.resize(top_k);
  return rows;
}

// ---- pattern stats / pattern set files ----

inline void save_stats_tsv(const PatternStats& stats, std::ostream& out) {
  // deterministic row order for byte-identical reruns
  std::vector<const std::pair<const LexicoSyntacticPattern, PatternCell>*> items;
  for (const auto& kv : stats.cells) items.push_back(&kv);
  std::sort(items.begin(), items.end(), [](auto* a, auto* b) {
    if (a->first.anchor != b->first.anchor) return a->first.anchor < b->first.anchor;
    return static_cast<int>(a->first.template_id) < static_cast<int>(b->first.template_id);
  });
  out << "#template\tanchor\tfreq\tsarc_freq\tnotsarc_freq\tsample_sarc\tsample_notsarc\n";
  for (auto* kv : items) {
    const auto& cell = kv->second;
    out << to_string(kv->first.template_id) << '\t' << kv->first.anchor << '\t'
        << cell.freq << '\t' << cell.class_freq[0] << '\t' << cell.class_freq[1] << '\t'
        << (cell.sample_post[0].empty() ? "-" : cell.sample_post[0]) << '\t'
        << (cell.sample_post[1].empty() ? "-" : cell.sample_post[1]) << '\n';
  }
}

inline PatternStats load_stats_tsv(std::istream& in, const std::string& name) {
  PatternStats stats;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tmpl, anchor, s_freq, s_sf, s_nf, samp_s, samp_n;
    if (!std::getline(ss, tmpl, '\t') || !std::getline(ss, anchor, '\t') ||
        !std::getline(ss, s_freq, '\t') || !std::getline(ss, s_sf, '\t') ||
        !std::getline(ss, s_nf, '\t'))
      throw Error(name + ":" + std::to_string(lineno) + ": malformed stats row");
    std::getline(ss, samp_s, '\t');
    std::getline(ss, samp_n, '\t');
    auto tid = template_from_string(tmpl);
    if (!tid) throw Error(name + ":" + std::to_string(lineno) + ": unknown template " + tmpl);
    PatternCell cell;
    cell.freq = std::stoll(s_freq);
    cell.class_freq[0] = std::stoll(s_sf);
    cell.class_freq[1] = std::stoll(s_nf);
    if (cell.class_freq[0] + cell.class_freq[1] != cell.freq)
      throw Error(name + ":" + std::to_string(lineno) + ": class counts do not sum to freq");
    if (samp_s != "-") cell.sample_post[0] = samp_s;
    if (samp_n != "-") cell.sample_post[1] = samp_n;
    stats.cells[{*tid, anchor}] = cell;
  }
  return stats;
}

/// Thresholded pattern set file: template, anchor, freq, prob-of-class.
/// Leading '#' lines carry the class and thresholds that built the set.
inline void save_pattern_set_tsv(const PatternSet& set, const PatternStats& stats,
                                 Label cls, std::ostream& out) {
  std::vector<LexicoSyntacticPattern> ordered(set.begin(), set.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.anchor != b.anchor) return a.anchor < b.anchor;
    return static_cast<int>(a.template_id) < static_cast<int>(b.template_id);
  });
  out << "#class\t" << to_string(cls) << "\n";
  for (const auto& p : ordered) {
    auto it = stats.cells.find(p);
    long long freq = it == stats.cells.end() ? 0 : it->second.freq;
    out << to_string(p.template_id) << '\t' << p.anchor << '\t' << freq << '\t'
        << stats.prob(p, cls) << '\n';
  }
}

struct LoadedPatternSet {
  PatternSet patterns;
  std::optional<Label> cls;
};

inline LoadedPatternSet load_pattern_set_tsv(std::istream& in, const std::string& name) {
  LoadedPatternSet out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key, value;
      if (std::getline(ss, key, '\t') && std::getline(ss, value, '\t') && key == "class")
        out.cls = parse_label(value);
      continue;
    }
    std::istringstream ss(line);
    std::string tmpl, anchor;
    if (!std::getline(ss, tmpl, '\t') || !std::getline(ss, anchor, '\t'))
      throw Error(name + ":" + std::to_string(lineno) + ": malformed pattern row");
    auto tid = template_from_string(tmpl);
    if (!tid) throw Error(name + ":" + std::to_string(lineno) + ": unknown template " + tmpl);
    out.patterns.insert({*tid, anchor});
  }
  return out;
}

}  // namespace sarco
