#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sarco/core.hpp"
#include "sarco/syntax.hpp"

namespace sarco {

struct Post {
  std::string id;
  std::optional<std::string> parent_id;
  std::string text;
  std::optional<std::string> topic;
};

/// The annotation and classification unit: a response post presented in
/// the context of its dialogic parent.
struct QuoteResponsePair {
  Post response;
  std::optional<Post> quote;
  std::optional<Label> label;

  bool has_parent() const { return response.parent_id.has_value() || quote.has_value(); }
};

class Corpus {
 public:
  Corpus() = default;

  void add(QuoteResponsePair pair) {
    if (pair.response.id.empty()) throw Error("post id must be nonempty");
    if (pair.response.text.empty())
      throw Error("post text must be nonempty (id " + pair.response.id + ")");
    if (!ids_.insert(pair.response.id).second)
      throw Error("duplicate post id: " + pair.response.id);
    if (pair.quote && pair.response.parent_id &&
        pair.quote->id != *pair.response.parent_id)
      throw Error("quote id does not match parent_id for post " + pair.response.id);
    pairs_.push_back(std::move(pair));
  }

  const std::vector<QuoteResponsePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const QuoteResponsePair& at(std::size_t i) const { return pairs_.at(i); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }
  bool contains(const std::string& id) const { return ids_.count(id) > 0; }

  std::map<Label, std::size_t> class_counts() const {
    std::map<Label, std::size_t> counts;
    for (const auto& p : pairs_)
      if (p.label) ++counts[*p.label];
    return counts;
  }

 private:
  std::vector<QuoteResponsePair> pairs_;
  std::unordered_set<std::string> ids_;
};

enum class CorpusFormat { Jsonl, Csv };

inline std::optional<CorpusFormat> corpus_format_from_string(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::Jsonl;
  if (s == "csv") return CorpusFormat::Csv;
  return std::nullopt;
}

namespace detail {

inline std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string or null");
  std::string v = it->get<std::string>();
  if (v.empty()) return std::nullopt;
  return v;
}

inline QuoteResponsePair pair_from_fields(std::string id, std::optional<std::string> parent_id,
                                          std::optional<std::string> quote_text,
                                          std::string text, std::optional<std::string> topic,
                                          std::optional<std::string> label_str) {
  QuoteResponsePair pair;
  pair.response.id = std::move(id);
  pair.response.parent_id = parent_id;
  pair.response.text = std::move(text);
  pair.response.topic = std::move(topic);
  if (quote_text) {
    Post q;
    q.id = parent_id ? *parent_id : pair.response.id + "#quote";
    q.text = std::move(*quote_text);
    pair.quote = std::move(q);
  }
  if (label_str) {
    auto l = parse_label(*label_str);
    if (!l) throw Error("unknown label '" + *label_str + "'");
    pair.label = *l;
  }
  return pair;
}

// Minimal RFC-4180 row reader. Quoted fields may contain commas,
// doubled quotes and newlines.
inline bool read_csv_row(std::istream& in, std::vector<std::string>& row, int& lineno) {
  row.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++lineno;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++lineno;
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  row.push_back(std::move(field));
  return true;
}

}  // namespace detail

/// Canonical interchange format: one JSON object per line with fields
/// id, parent_id, quote, text, topic, label.
inline Corpus load_corpus_jsonl(std::istream& in, const std::string& name) {
  Corpus corpus;
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
    try {
      auto id = detail::opt_string(j, "id");
      if (!id) throw Error("missing field 'id'");
      auto text = detail::opt_string(j, "text");
      if (!text) throw Error("missing field 'text'");
      corpus.add(detail::pair_from_fields(*id, detail::opt_string(j, "parent_id"),
                                          detail::opt_string(j, "quote"), *text,
                                          detail::opt_string(j, "topic"),
                                          detail::opt_string(j, "label")));
    } catch (const Error& e) {
      throw Error(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

/// Import-only convenience. Header row must name at least id and text.
inline Corpus load_corpus_csv(std::istream& in, const std::string& name) {
  Corpus corpus;
  std::vector<std::string> header;
  int lineno = 1;
  if (!detail::read_csv_row(in, header, lineno))
    throw Error(name + ": empty csv (missing header)");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  if (!col.count("id") || !col.count("text"))
    throw Error(name + ": csv header must contain 'id' and 'text' columns");
  auto get = [&](const std::vector<std::string>& row,
                 const char* key) -> std::optional<std::string> {
    auto it = col.find(key);
    if (it == col.end() || it->second >= row.size()) return std::nullopt;
    if (row[it->second].empty()) return std::nullopt;
    return row[it->second];
  };
  std::vector<std::string> row;
  while (detail::read_csv_row(in, row, lineno)) {
    if (row.size() == 1 && row[0].empty()) continue;
    int at_line = lineno;
    try {
      auto id = get(row, "id");
      if (!id) throw Error("missing field 'id'");
      auto text = get(row, "text");
      if (!text) throw Error("missing field 'text'");
      corpus.add(detail::pair_from_fields(*id, get(row, "parent_id"), get(row, "quote"),
                                          *text, get(row, "topic"), get(row, "label")));
    } catch (const Error& e) {
      throw Error(name + ":" + std::to_string(at_line) + ": " + e.what());
    }
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file: " + path);
  return format == CorpusFormat::Jsonl ? load_corpus_jsonl(in, path)
                                       : load_corpus_csv(in, path);
}

inline void save_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus) {
    nlohmann::json j;
    j["id"] = p.response.id;
    j["parent_id"] = p.response.parent_id ? nlohmann::json(*p.response.parent_id)
                                          : nlohmann::json(nullptr);
    j["quote"] = p.quote ? nlohmann::json(p.quote->text) : nlohmann::json(nullptr);
    j["text"] = p.response.text;
    j["topic"] = p.response.topic ? nlohmann::json(*p.response.topic) : nlohmann::json(nullptr);
    j["label"] = p.label ? nlohmann::json(to_string(*p.label)) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
  }
}

inline void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file: " + path);
  save_corpus_jsonl(corpus, out);
}

/// Keeps the pairs whose response word count lies in [min_words, max_words],
/// both bounds inclusive. Order preserved; idempotent by construction.
inline Corpus word_count_filter(const Corpus& corpus, const Lexicon& lex,
                                std::size_t min_words = 10, std::size_t max_words = 150) {
  if (min_words > max_words) throw Error("word_count_filter: min exceeds max");
  Corpus out;
  for (const auto& p : corpus) {
    std::size_t w = word_count(p.response.text, lex);
    if (w >= min_words && w <= max_words) out.add(p);
  }
  return out;
}

struct FoldAssignment {
  int k = 0;
  std::unordered_map<std::string, int> assignment;  // post id -> fold in [0, k)

  int fold_of(const std::string& id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) throw Error("post not assigned to any fold: " + id);
    return it->second;
  }
};

/// Stratified k-fold assignment, deterministic for a fixed seed. Per-fold
/// class counts differ by at most one (round-robin deal after a seeded
/// shuffle of each class).
inline FoldAssignment split_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw Error("split_folds: k must be at least 2");
  std::vector<std::string> by_class[2];
  for (const auto& p : corpus) {
    if (!p.label)
      throw Error("split_folds: unlabeled post " + p.response.id);
    by_class[label_index(*p.label)].push_back(p.response.id);
  }
  std::size_t smaller = std::min(by_class[0].size(), by_class[1].size());
  if (static_cast<std::size_t>(k) > smaller)
    throw Error("split_folds: k=" + std::to_string(k) +
                " exceeds smaller class size " + std::to_string(smaller));
  std::mt19937_64 rng(seed);
  FoldAssignment fa;
  fa.k = k;
  for (auto& ids : by_class) {
    deterministic_shuffle(ids, rng);
    for (std::size_t i = 0; i < ids.size(); ++i)
      fa.assignment[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return fa;
}

}  // namespace sarco
