#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sarco/corpus.hpp"
#include "sarco/lexicon.hpp"

namespace testutil {

inline const sarco::Lexicon& lexicon() {
  static sarco::Lexicon lex = sarco::Lexicon::load_dir(std::string(SARCO_DATA_DIR) + "/lexicon");
  return lex;
}

inline sarco::QuoteResponsePair make_pair(std::string id, std::string text,
                                          std::optional<sarco::Label> label = std::nullopt,
                                          std::optional<std::string> parent = std::nullopt) {
  sarco::QuoteResponsePair p;
  p.response.id = std::move(id);
  p.response.text = std::move(text);
  p.response.parent_id = std::move(parent);
  p.label = label;
  return p;
}

/// Builds a labeled corpus from (text, label) rows with ids p0, p1, ...
inline sarco::Corpus make_corpus(
    const std::vector<std::pair<std::string, sarco::Label>>& rows) {
  sarco::Corpus c;
  std::size_t i = 0;
  for (const auto& [text, label] : rows)
    c.add(make_pair("p" + std::to_string(i++), text, label));
  return c;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("sarco_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::string p = path(name);
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }

 private:
  std::filesystem::path dir_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
