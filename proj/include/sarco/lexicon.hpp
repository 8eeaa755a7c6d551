#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "sarco/core.hpp"

namespace sarco {

/// Fixed 12-tag tagset. The pattern templates only need these
/// distinctions; a full treebank tagset buys nothing here.
enum class Tag {
  Det,
  Noun,
  Pron,
  Verb,
  Aux,
  Adj,
  Adv,
  Prep,
  Poss,
  PunctRun,
  Emoticon,
  Other
};

inline const char* to_string(Tag t) {
  switch (t) {
    case Tag::Det: return "DET";
    case Tag::Noun: return "NOUN";
    case Tag::Pron: return "PRON";
    case Tag::Verb: return "VERB";
    case Tag::Aux: return "AUX";
    case Tag::Adj: return "ADJ";
    case Tag::Adv: return "ADV";
    case Tag::Prep: return "PREP";
    case Tag::Poss: return "POSS";
    case Tag::PunctRun: return "PUNCT_RUN";
    case Tag::Emoticon: return "EMOTICON";
    case Tag::Other: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<Tag> tag_from_string(std::string_view s) {
  if (s == "DET") return Tag::Det;
  if (s == "NOUN") return Tag::Noun;
  if (s == "PRON") return Tag::Pron;
  if (s == "VERB") return Tag::Verb;
  if (s == "AUX") return Tag::Aux;
  if (s == "ADJ") return Tag::Adj;
  if (s == "ADV") return Tag::Adv;
  if (s == "PREP") return Tag::Prep;
  if (s == "POSS") return Tag::Poss;
  if (s == "PUNCT_RUN") return Tag::PunctRun;
  if (s == "EMOTICON") return Tag::Emoticon;
  if (s == "OTHER") return Tag::Other;
  return std::nullopt;
}

/// Read-only tagging resources: the word->tag table, the emoticon list,
/// irregular past participles and sentence-split abbreviations. Loaded
/// once and shared; every function taking a Lexicon treats it as const.
class Lexicon {
 public:
  std::unordered_map<std::string, Tag> words;
  std::unordered_set<std::string> emoticons;
  std::unordered_set<std::string> participles;
  std::unordered_set<std::string> abbreviations;
  std::size_t max_emoticon_len = 0;

  /// Content digest + format revision; run manifests embed this so any
  /// reported pattern counts cite the syntax version they came from.
  std::string version() const { return version_; }

  static Lexicon load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::path root(dir);
    return load((root / "words.tsv").string(), (root / "emoticons.txt").string(),
                (root / "participles.txt").string(),
                (root / "abbreviations.txt").string());
  }

  static Lexicon load(const std::string& words_path, const std::string& emoticons_path,
                      const std::string& participles_path,
                      const std::string& abbreviations_path) {
    Lexicon lex;
    std::string all;

    std::string content = slurp(words_path);
    all += content;
    std::istringstream ws(content);
    std::string line;
    int lineno = 0;
    while (std::getline(ws, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw Error(words_path + ":" + std::to_string(lineno) + ": expected word<TAB>TAG");
      std::string word = line.substr(0, tab);
      auto tag = tag_from_string(strip(line.substr(tab + 1)));
      if (!tag)
        throw Error(words_path + ":" + std::to_string(lineno) + ": unknown tag '" +
                    line.substr(tab + 1) + "'");
      lex.words.emplace(std::move(word), *tag);
    }

    content = slurp(emoticons_path);
    all += content;
    for (const auto& e : lines_of(content)) {
      lex.emoticons.insert(e);
      lex.max_emoticon_len = std::max(lex.max_emoticon_len, e.size());
    }

    content = slurp(participles_path);
    all += content;
    for (const auto& p : lines_of(content)) lex.participles.insert(p);

    content = slurp(abbreviations_path);
    all += content;
    for (const auto& a : lines_of(content)) lex.abbreviations.insert(a);

    lex.version_ = std::string("syntax-1/") + fnv1a_hex(all);
    return lex;
  }

  /// Forms of "be"/"get" (plus be-carrying contractions) that license a
  /// passive reading when followed by a past participle.
  bool is_be_or_get(const std::string& lower) const {
    static const std::unordered_set<std::string> kForms = {
        "be", "am", "is", "are", "was", "were", "been", "being", "get", "gets",
        "got", "gotten", "getting", "i'm", "you're", "we're", "they're", "he's",
        "she's", "it's", "that's", "there's", "isn't", "aren't", "wasn't",
        "weren't", "ain't"};
    return kForms.count(lower) > 0;
  }

  /// Past-participle test: irregular list first, -ed/-en suffix second.
  bool is_participle(const std::string& lower) const {
    if (participles.count(lower)) return true;
    if (lower.size() >= 4 && lower.ends_with("ed")) return true;
    if (lower.size() >= 5 && lower.ends_with("en")) return true;
    return false;
  }

 private:
  std::string version_ = "syntax-1/empty";

  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' '))
      s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
  }

  static std::vector<std::string> lines_of(const std::string& content) {
    std::vector<std::string> out;
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line)) {
      line = strip(line);
      if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
  }
};

}  // namespace sarco
