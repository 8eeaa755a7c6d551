#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "sarco/core.hpp"
#include "sarco/lexicon.hpp"

namespace sarco {

struct Token {
  std::string surface;
  std::string lower;          // case-folded surface (ASCII fold)
  Tag tag = Tag::Other;       // words stay Other until pos_tag runs
  std::size_t begin = 0;      // character offsets into the source text
  std::size_t end = 0;

  bool is_word() const { return tag != Tag::PunctRun && tag != Tag::Emoticon; }
  bool is_negation() const {
    return lower == "not" || lower == "never" || lower.ends_with("n't");
  }
};

enum class Voice { Active, Passive };

struct Chunk {
  enum class Kind { NP, VP, PP };
  Kind kind;
  std::size_t begin = 0;  // token index range [begin, end)
  std::size_t end = 0;
  std::size_t head = 0;   // token index of the head
  // VP-only flags
  std::optional<Voice> vp_voice;
  bool vp_infinitive = false;
  bool vp_has_aux = false;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<Chunk> chunks;
  bool is_question = false;
};

struct SvoTriple {
  std::string verb;  // lowercased head, not lemmatized
  bool negated = false;
  std::optional<std::string> subject;
  std::optional<std::string> object;
};

namespace detail {

inline bool is_space_byte(unsigned char c) { return c <= ' ' && std::isspace(c); }

inline bool is_word_start(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

inline bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80 || c == '\'' || c == '-' || c == '_';
}

inline std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// "[emoticon-rolleyes]" style markers embedded in forum text.
inline std::size_t match_bracket_marker(const std::string& text, std::size_t i) {
  static const std::string prefix = "[emoticon-";
  if (text.compare(i, prefix.size(), prefix) != 0) return 0;
  std::size_t j = i + prefix.size();
  while (j < text.size() && text[j] != ']' && !is_space_byte(text[j])) ++j;
  if (j < text.size() && text[j] == ']' && j > i + prefix.size()) return j + 1 - i;
  return 0;
}

inline std::size_t match_emoticon(const std::string& text, std::size_t i,
                                  const Lexicon& lex) {
  std::size_t longest = 0;
  std::size_t cap = std::min(lex.max_emoticon_len, text.size() - i);
  for (std::size_t len = cap; len >= 2; --len) {
    if (lex.emoticons.count(text.substr(i, len))) {
      // reject when glued to a following word ( ":Pretty" is not ":P" )
      if (i + len < text.size() && std::isalnum(static_cast<unsigned char>(text[i + len])))
        continue;
      longest = len;
      break;
    }
  }
  return longest;
}

}  // namespace detail

/// Splits text into word tokens, punctuation runs ("?!?!" is one token)
/// and emoticons. Spans tile the non-whitespace input in order.
inline std::vector<Token> tokenize(const std::string& text, const Lexicon& lex) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto push = [&](std::size_t b, std::size_t e, Tag tag) {
    Token t;
    t.surface = text.substr(b, e - b);
    t.lower = detail::ascii_lower(t.surface);
    t.tag = tag;
    t.begin = b;
    t.end = e;
    out.push_back(std::move(t));
  };
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
      continue;
    }
    if (std::size_t len = detail::match_bracket_marker(text, i)) {
      push(i, i + len, Tag::Emoticon);
      i += len;
      continue;
    }
    if (std::size_t len = detail::match_emoticon(text, i, lex)) {
      push(i, i + len, Tag::Emoticon);
      i += len;
      continue;
    }
    if (detail::is_word_start(c)) {
      std::size_t j = i + 1;
      while (j < n && detail::is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      push(i, j, Tag::Other);
      i = j;
      continue;
    }
    // punctuation run: stop where an emoticon or word begins
    std::size_t j = i + 1;
    while (j < n) {
      unsigned char cj = static_cast<unsigned char>(text[j]);
      if (detail::is_space_byte(cj) || detail::is_word_start(cj)) break;
      if (detail::match_bracket_marker(text, j) || detail::match_emoticon(text, j, lex))
        break;
      ++j;
    }
    push(i, j, Tag::PunctRun);
    i = j;
  }
  return out;
}

/// Closed-lexicon first, suffix rules second, default NOUN last.
inline void pos_tag(std::vector<Token>& tokens, const Lexicon& lex) {
  for (Token& t : tokens) {
    if (t.tag == Tag::PunctRun || t.tag == Tag::Emoticon) continue;
    auto it = lex.words.find(t.lower);
    if (it != lex.words.end()) {
      t.tag = it->second;
      continue;
    }
    const std::string& w = t.lower;
    if (w.ends_with("n't")) {
      t.tag = Tag::Aux;
    } else if (w.size() > 2 && w.ends_with("'s")) {
      t.tag = Tag::Poss;
    } else if (w.ends_with("'re") || w.ends_with("'ve") || w.ends_with("'ll") ||
               w.ends_with("'d") || w.ends_with("'m")) {
      t.tag = Tag::Aux;
    } else if (w.size() >= 4 && w.ends_with("ly")) {
      t.tag = Tag::Adv;
    } else if (w.size() >= 5 && w.ends_with("ing")) {
      t.tag = Tag::Verb;
    } else if (w.size() >= 4 && w.ends_with("ed")) {
      t.tag = Tag::Verb;
    } else if (w.ends_with("ous") || w.ends_with("ful") || w.ends_with("ive") ||
               w.ends_with("less") || w.ends_with("able") || w.ends_with("ible") ||
               w.ends_with("ish") || w.ends_with("est")) {
      t.tag = Tag::Adj;
    } else {
      t.tag = Tag::Noun;
    }
  }
}

namespace detail {

inline bool punct_contains(const Token& t, char c) {
  return t.tag == Tag::PunctRun && t.surface.find(c) != std::string::npos;
}

inline bool is_sentence_final_punct(const Token& t) {
  if (t.tag != Tag::PunctRun) return false;
  return t.surface.find_first_of(".!?") != std::string::npos;
}

inline bool question_flag(const std::vector<Token>& tokens) {
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (it->tag == Tag::Emoticon) continue;
    return punct_contains(*it, '?');
  }
  return false;
}

// single letters and listed abbreviations block a split after "."
inline bool abbreviation_before(const std::vector<Token>& tokens, std::size_t punct_idx,
                                const Lexicon& lex) {
  if (punct_idx == 0) return false;
  const Token& prev = tokens[punct_idx - 1];
  if (!prev.is_word()) return false;
  if (prev.surface.size() == 1 &&
      std::isalpha(static_cast<unsigned char>(prev.surface[0])))
    return true;
  return lex.abbreviations.count(prev.lower) > 0;
}

}  // namespace detail

/// Splits a tagged token stream into sentences. A boundary falls after a
/// punctuation run containing . ! or ? when whitespace separates it from
/// the next token and that token starts with a capital or a non-letter,
/// unless the preceding word is a known abbreviation or single letter.
inline std::vector<Sentence> split_sentences(const std::vector<Token>& tokens,
                                             const Lexicon& lex) {
  std::vector<Sentence> out;
  std::vector<Token> cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    Sentence s;
    s.tokens = std::move(cur);
    s.is_question = detail::question_flag(s.tokens);
    cur.clear();
    out.push_back(std::move(s));
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    cur.push_back(tokens[i]);
    if (!detail::is_sentence_final_punct(tokens[i])) continue;
    if (i + 1 >= tokens.size()) continue;  // trailing flush below
    const Token& next = tokens[i + 1];
    if (next.begin <= tokens[i].end) continue;  // no whitespace gap
    unsigned char c0 = static_cast<unsigned char>(next.surface[0]);
    bool capital_or_nonletter = !std::isalpha(c0) || std::isupper(c0);
    if (!capital_or_nonletter) continue;
    if (tokens[i].surface.find_first_of("!?") == std::string::npos &&
        detail::abbreviation_before(tokens, i, lex))
      continue;
    flush();
  }
  flush();
  return out;
}

namespace detail {

inline bool starts_np(Tag t) {
  return t == Tag::Det || t == Tag::Poss || t == Tag::Adj || t == Tag::Noun ||
         t == Tag::Pron;
}

inline bool verbal(Tag t) { return t == Tag::Verb || t == Tag::Aux; }

}  // namespace detail

/// Head selection and voice/aux flags for a VP span.
inline void finish_vp(Chunk& c, const std::vector<Token>& toks, const Lexicon& lex) {
  std::size_t head = c.begin;
  bool saw_verb = false;
  for (std::size_t k = c.begin; k < c.end; ++k) {
    if (toks[k].tag == Tag::Verb) {
      head = k;
      saw_verb = true;
    }
  }
  if (!saw_verb) {
    for (std::size_t k = c.begin; k < c.end; ++k)
      if (toks[k].tag == Tag::Aux) head = k;
  }
  c.head = head;
  for (std::size_t k = c.begin; k < c.end; ++k) {
    if (k != head && toks[k].tag == Tag::Aux) c.vp_has_aux = true;
  }
  bool has_be_get = false;
  for (std::size_t k = c.begin; k < head; ++k)
    if (lex.is_be_or_get(toks[k].lower)) has_be_get = true;
  if (saw_verb && has_be_get && lex.is_participle(toks[head].lower))
    c.vp_voice = Voice::Passive;
  else
    c.vp_voice = Voice::Active;
}

/// Marks maximal NP, VP and PP chunks. A PP chunk covers just the
/// preposition; its object is the following NP chunk. Infinitive VPs
/// ("to read") are separate chunks so the *InfVP templates can see them.
inline void chunk(Sentence& s, const Lexicon& lex) {
  s.chunks.clear();
  const auto& toks = s.tokens;
  const std::size_t n = toks.size();
  std::size_t i = 0;
  while (i < n) {
    Tag t = toks[i].tag;
    // infinitive VP: "to" + verbal chain
    if (toks[i].lower == "to" && i + 1 < n && detail::verbal(toks[i + 1].tag)) {
      std::size_t j = i + 1;
      while (j < n && (detail::verbal(toks[j].tag) ||
                       (toks[j].tag == Tag::Adv && j + 1 < n &&
                        detail::verbal(toks[j + 1].tag))))
        ++j;
      Chunk c;
      c.kind = Chunk::Kind::VP;
      c.begin = i;
      c.end = j;
      c.vp_infinitive = true;
      finish_vp(c, toks, lex);
      s.chunks.push_back(c);
      i = j;
      continue;
    }
    if (detail::verbal(t)) {
      std::size_t j = i;
      while (j < n) {
        if (detail::verbal(toks[j].tag)) {
          ++j;
          continue;
        }
        // adverbs stay inside only between verbal elements ("do not support")
        if (toks[j].tag == Tag::Adv && j + 1 < n && detail::verbal(toks[j + 1].tag)) {
          ++j;
          continue;
        }
        break;
      }
      // an infinitive chain starts its own chunk
      Chunk c;
      c.kind = Chunk::Kind::VP;
      c.begin = i;
      c.end = j;
      finish_vp(c, toks, lex);
      s.chunks.push_back(c);
      i = j;
      continue;
    }
    if (detail::starts_np(t)) {
      if (t == Tag::Pron) {
        Chunk c;
        c.kind = Chunk::Kind::NP;
        c.begin = i;
        c.end = i + 1;
        c.head = i;
        s.chunks.push_back(c);
        ++i;
        continue;
      }
      std::size_t j = i;
      std::size_t last_noun = n;  // sentinel
      bool article_seen = false;  // a/an/the or a possessive licenses a
                                  // nominal reading of verb-tagged words
                                  // ("the point", "your answer")
      while (j < n) {
        Tag tj = toks[j].tag;
        if (tj == Tag::Det || tj == Tag::Poss) {
          if (tj == Tag::Poss || toks[j].lower == "a" || toks[j].lower == "an" ||
              toks[j].lower == "the")
            article_seen = true;
          ++j;
          continue;
        }
        if (tj == Tag::Adj) {
          ++j;
          continue;
        }
        if (tj == Tag::Noun) {
          last_noun = j;
          ++j;
          continue;
        }
        if (tj == Tag::Verb && article_seen) {
          if (toks[j].lower.ends_with("ing")) {  // gerund acts adjectival
            ++j;
            continue;
          }
          last_noun = j;
          ++j;
          break;
        }
        break;
      }
      if (last_noun != n) {
        Chunk c;
        c.kind = Chunk::Kind::NP;
        c.begin = i;
        c.end = j;
        c.head = last_noun;
        s.chunks.push_back(c);
        i = j;
        continue;
      }
      // determiner/adjective run with no noun: leave tokens unchunked
      i = j;
      continue;
    }
    if (t == Tag::Prep) {
      Chunk c;
      c.kind = Chunk::Kind::PP;
      c.begin = i;
      c.end = i + 1;
      c.head = i;
      s.chunks.push_back(c);
      ++i;
      continue;
    }
    ++i;
  }
}

/// Tokenize, tag, sentence-split and (optionally) chunk in one pass.
inline std::vector<Sentence> analyze(const std::string& text, const Lexicon& lex,
                                     bool with_chunks = true) {
  std::vector<Token> toks = tokenize(text, lex);
  pos_tag(toks, lex);
  std::vector<Sentence> sents = split_sentences(toks, lex);
  if (with_chunks)
    for (Sentence& s : sents) chunk(s, lex);
  return sents;
}

/// Number of word tokens (punctuation runs and emoticons excluded).
inline std::size_t word_count(const std::string& text, const Lexicon& lex) {
  std::size_t n = 0;
  for (const Token& t : tokenize(text, lex))
    if (t.is_word()) ++n;
  return n;
}

namespace detail {

inline bool gerund_head(const std::vector<Token>& toks, const Chunk& vp) {
  return toks[vp.head].lower.ends_with("ing");
}

// Question inversion: "can't you read" keeps the auxiliary outside the
// VP chunk. Look back over at most three nominal tokens for it.
inline std::optional<std::size_t> inverted_aux(const std::vector<Token>& toks,
                                               const Chunk& vp) {
  std::size_t steps = 0;
  for (std::size_t k = vp.begin; k > 0 && steps < 3; ++steps) {
    --k;
    Tag t = toks[k].tag;
    if (t == Tag::Aux) return k;
    if (t == Tag::Pron || t == Tag::Noun || t == Tag::Det || t == Tag::Adj) continue;
    break;
  }
  return std::nullopt;
}

}  // namespace detail

/// Heuristic subject-verb-object extraction from chunks. Output is
/// approximate by construction; callers should label it as such.
inline std::vector<SvoTriple> extract_svo(const Sentence& s) {
  std::vector<SvoTriple> out;
  const auto& toks = s.tokens;
  for (std::size_t ci = 0; ci < s.chunks.size(); ++ci) {
    const Chunk& vp = s.chunks[ci];
    if (vp.kind != Chunk::Kind::VP) continue;
    if (vp.vp_infinitive) continue;
    auto inv = detail::inverted_aux(toks, vp);
    bool finite = vp.vp_has_aux || inv.has_value() || !detail::gerund_head(toks, vp);
    if (!finite) continue;
    if (toks[vp.head].tag != Tag::Verb) continue;  // aux-only VPs carry no predicate

    SvoTriple t;
    t.verb = toks[vp.head].lower;
    for (std::size_t k = vp.begin; k < vp.end; ++k)
      if (toks[k].is_negation()) t.negated = true;
    if (vp.begin > 0 && toks[vp.begin - 1].is_negation()) t.negated = true;
    if (inv && toks[*inv].is_negation()) t.negated = true;

    for (std::size_t pj = ci; pj-- > 0;) {
      if (s.chunks[pj].kind == Chunk::Kind::NP) {
        t.subject = toks[s.chunks[pj].head].lower;
        break;
      }
    }
    for (std::size_t nj = ci + 1; nj < s.chunks.size(); ++nj) {
      if (s.chunks[nj].kind == Chunk::Kind::NP) {
        t.object = toks[s.chunks[nj].head].lower;
        break;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace sarco
