#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarco/core.hpp"

namespace sarco {

/// Reproducibility record written next to every primary output: the
/// subcommand, its config, input digests, the seed and tool/lexicon
/// versions. Reruns differ at most in the timestamp field.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string syntax_version;

  void add_input(const std::string& path) { inputs.emplace_back(path, digest_file(path)); }

  static std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot digest missing input: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
  }

  nlohmann::json to_json(bool with_timestamp = true) const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [path, digest] : inputs)
      j["inputs"].push_back({{"path", path}, {"digest", digest}});
    j["outputs"] = outputs;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["syntax_version"] = syntax_version;
    if (with_timestamp) {
      auto now = std::chrono::system_clock::now().time_since_epoch();
      j["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace sarco
