#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "helpers.hpp"
#include "sarco/syntax.hpp"

using namespace sarco;
using testutil::lexicon;

static std::vector<std::string> surfaces(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.surface);
  return out;
}

TEST_CASE("tokenizer keeps punctuation runs together") {
  auto toks = tokenize("Oh, really?!?!", lexicon());
  REQUIRE(surfaces(toks) == std::vector<std::string>{"Oh", ",", "really", "?!?!"});
  CHECK(toks[0].lower == "oh");
  CHECK(toks[1].tag == Tag::PunctRun);
  CHECK(toks[3].tag == Tag::PunctRun);
}

TEST_CASE("tokenizer handles empty input") {
  CHECK(tokenize("", lexicon()).empty());
  CHECK(tokenize("   \t\n ", lexicon()).empty());
}

TEST_CASE("emoticons are single tokens") {
  auto toks = tokenize("nice :)", lexicon());
  REQUIRE(toks.size() == 2);
  CHECK(toks[1].tag == Tag::Emoticon);
  CHECK(toks[1].surface == ":)");

  toks = tokenize("sure [emoticon-rolleyes] whatever", lexicon());
  REQUIRE(toks.size() == 3);
  CHECK(toks[1].tag == Tag::Emoticon);
  CHECK(toks[1].surface == "[emoticon-rolleyes]");

  // glued to a word, the candidate is not an emoticon
  toks = tokenize(":Pretty", lexicon());
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].tag == Tag::PunctRun);
}

TEST_CASE("token spans tile the non-whitespace input in order") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abc XY.?!,:)('- \t7";
  for (int round = 0; round < 200; ++round) {
    std::string text;
    std::size_t len = rng() % 40;
    for (std::size_t i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    auto toks = tokenize(text, lexicon());
    std::size_t prev_end = 0;
    std::string rebuilt;
    for (const auto& t : toks) {
      CHECK(t.begin >= prev_end);
      CHECK(t.begin < t.end);
      CHECK(text.substr(t.begin, t.end - t.begin) == t.surface);
      prev_end = t.end;
      rebuilt += t.surface;
    }
    std::string squeezed;
    for (char c : text)
      if (!detail::is_space_byte(static_cast<unsigned char>(c))) squeezed += c;
    CHECK(rebuilt == squeezed);
  }
}

TEST_CASE("tokenizer is total over arbitrary bytes") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    std::size_t len = rng() % 60;
    for (std::size_t i = 0; i < len; ++i)
      text += static_cast<char>(rng() % 256);
    auto toks = tokenize(text, lexicon());  // must not throw or hang
    std::size_t prev_end = 0;
    for (const auto& t : toks) {
      CHECK(t.begin >= prev_end);
      CHECK(t.end > t.begin);
      prev_end = t.end;
    }
  }
}

TEST_CASE("pos tagging: lexicon, suffix rules, noun default") {
  auto toks = tokenize("quickly blorf interesting bob's", lexicon());
  pos_tag(toks, lexicon());
  CHECK(toks[0].tag == Tag::Adv);   // -ly rule
  CHECK(toks[1].tag == Tag::Noun);  // default
  CHECK(toks[2].tag == Tag::Adj);   // lexicon entry wins over -ing
  CHECK(toks[3].tag == Tag::Poss);  // 's clitic
}

TEST_CASE("tagger clears 90 percent on the hand-tagged smoke set") {
  std::ifstream in(std::string(SARCO_TEST_DATA_DIR) + "/tagger_smoke.tsv");
  REQUIRE(in);
  std::string line;
  std::size_t total = 0, correct = 0, sentences = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++sentences;
    std::vector<std::string> gold_surface, gold_tag;
    std::istringstream ss(line);
    std::string item;
    while (ss >> item) {
      auto slash = item.rfind('/');
      REQUIRE(slash != std::string::npos);
      gold_surface.push_back(item.substr(0, slash));
      gold_tag.push_back(item.substr(slash + 1));
    }
    std::string text;
    for (const auto& s : gold_surface) {
      if (!text.empty()) text += ' ';
      text += s;
    }
    auto toks = tokenize(text, lexicon());
    pos_tag(toks, lexicon());
    REQUIRE(surfaces(toks) == gold_surface);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      ++total;
      if (to_string(toks[i].tag) == gold_tag[i]) ++correct;
    }
  }
  REQUIRE(sentences == 50);
  double acc = double(correct) / double(total);
  INFO("tagger accuracy " << correct << "/" << total << " = " << acc);
  CHECK(acc >= 0.90);
}

TEST_CASE("sentence splitting with abbreviations and questions") {
  auto toks = tokenize("Why? Because it is. Done.", lexicon());
  pos_tag(toks, lexicon());
  auto sents = split_sentences(toks, lexicon());
  REQUIRE(sents.size() == 3);
  CHECK(sents[0].is_question);
  CHECK_FALSE(sents[1].is_question);

  toks = tokenize("Ask Dr. Smith about it. He knows.", lexicon());
  pos_tag(toks, lexicon());
  sents = split_sentences(toks, lexicon());
  REQUIRE(sents.size() == 2);

  // decimal points do not split
  toks = tokenize("It costs 3.5 dollars. Cheap.", lexicon());
  pos_tag(toks, lexicon());
  CHECK(split_sentences(toks, lexicon()).size() == 2);
}

TEST_CASE("is_question matches a final-punctuation scan") {
  auto brute = [](const Sentence& s) {
    for (auto it = s.tokens.rbegin(); it != s.tokens.rend(); ++it) {
      if (it->tag == Tag::Emoticon) continue;
      return it->tag == Tag::PunctRun && it->surface.find('?') != std::string::npos;
    }
    return false;
  };
  for (const char* text :
       {"Can you read?", "Can you read? :)", "I can read.", "really?!?!",
        "what", "so there :("}) {
    for (const Sentence& s : analyze(text, lexicon()))
      CHECK(s.is_question == brute(s));
  }
}

TEST_CASE("chunker marks passive, auxiliary and infinitive VPs") {
  auto sents = analyze("she might be interested", lexicon());
  REQUIRE(sents.size() == 1);
  const auto& chunks = sents[0].chunks;
  auto vp = std::find_if(chunks.begin(), chunks.end(),
                         [](const Chunk& c) { return c.kind == Chunk::Kind::VP; });
  REQUIRE(vp != chunks.end());
  CHECK(sents[0].tokens[vp->begin].lower == "might");
  CHECK(sents[0].tokens[vp->head].lower == "interested");
  CHECK(vp->vp_voice == Voice::Passive);
  CHECK(vp->vp_has_aux);
  CHECK_FALSE(vp->vp_infinitive);
}

TEST_CASE("infinitive VPs are separate chunks") {
  auto sents = analyze("try to read", lexicon());
  REQUIRE(sents.size() == 1);
  std::vector<const Chunk*> vps;
  for (const auto& c : sents[0].chunks)
    if (c.kind == Chunk::Kind::VP) vps.push_back(&c);
  REQUIRE(vps.size() == 2);
  CHECK(vps[0]->vp_voice == Voice::Active);
  CHECK_FALSE(vps[0]->vp_infinitive);
  CHECK(vps[1]->vp_infinitive);
  CHECK(sents[0].tokens[vps[1]->head].lower == "read");
}

TEST_CASE("no verbal tokens, no VP chunks") {
  auto sents = analyze("the red door !!", lexicon());
  REQUIRE(sents.size() == 1);
  for (const auto& c : sents[0].chunks) CHECK(c.kind != Chunk::Kind::VP);
}

TEST_CASE("chunker never marks passive without a be or get form") {
  std::mt19937_64 rng(11);
  std::vector<std::string> vocab = {"she",  "might", "be",    "interested", "the",
                                    "dog",  "was",   "told",  "quickly",    "run",
                                    "to",   "read",  "happy", "people",     "got",
                                    "seen", "very",  "story", "will",       "explain"};
  for (int round = 0; round < 300; ++round) {
    std::string text;
    std::size_t len = 1 + rng() % 10;
    for (std::size_t i = 0; i < len; ++i) {
      if (!text.empty()) text += ' ';
      text += vocab[rng() % vocab.size()];
    }
    for (const Sentence& s : analyze(text, lexicon())) {
      for (const Chunk& c : s.chunks) {
        if (c.kind != Chunk::Kind::VP) {
          CHECK_FALSE(c.vp_voice.has_value());
          continue;
        }
        if (c.vp_voice == Voice::Passive) {
          bool has_be_get = false;
          for (std::size_t k = c.begin; k < c.end; ++k)
            if (lexicon().is_be_or_get(s.tokens[k].lower)) has_be_get = true;
          CHECK(has_be_get);
        }
        // chunk spans never overlap
      }
      std::size_t prev_end = 0;
      for (const Chunk& c : s.chunks) {
        CHECK(c.begin >= prev_end);
        prev_end = c.end;
      }
    }
  }
}

TEST_CASE("svo extraction finds subject, object and negation") {
  auto sents = analyze("you do realize that humans and chimps differ", lexicon());
  REQUIRE_FALSE(sents.empty());
  auto triples = extract_svo(sents[0]);
  REQUIRE_FALSE(triples.empty());
  CHECK(triples[0].verb == "realize");
  CHECK(triples[0].subject == "you");
  CHECK(triples[0].object == "humans");
  CHECK_FALSE(triples[0].negated);

  sents = analyze("can't you read?", lexicon());
  triples = extract_svo(sents[0]);
  REQUIRE_FALSE(triples.empty());
  CHECK(triples[0].verb == "read");
  CHECK(triples[0].subject == "you");
  CHECK(triples[0].negated);
  CHECK_FALSE(triples[0].object.has_value());
}

TEST_CASE("svo on a verbless sentence is empty") {
  auto sents = analyze("the big red door", lexicon());
  REQUIRE(sents.size() == 1);
  CHECK(extract_svo(sents[0]).empty());
}

TEST_CASE("word_count ignores punctuation runs and emoticons") {
  CHECK(word_count("", lexicon()) == 0);
  CHECK(word_count("one two three", lexicon()) == 3);
  CHECK(word_count("oh, really?!?! :)", lexicon()) == 2);
  CHECK(word_count("!!! ... ??", lexicon()) == 0);
}
