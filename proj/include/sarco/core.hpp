#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sarco {

inline constexpr const char* kToolVersion = "0.1.0";

/// Raised for any data-level problem: malformed files, violated
/// preconditions, inconsistent inputs. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label { Sarcastic, NotSarcastic };

inline const char* to_string(Label l) {
  return l == Label::Sarcastic ? "sarc" : "notsarc";
}

inline Label opposite(Label l) {
  return l == Label::Sarcastic ? Label::NotSarcastic : Label::Sarcastic;
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "sarc" || s == "sarcastic") return Label::Sarcastic;
  if (s == "notsarc" || s == "not_sarcastic") return Label::NotSarcastic;
  return std::nullopt;
}

inline int label_index(Label l) { return l == Label::Sarcastic ? 0 : 1; }

/// Fisher-Yates with explicit modulo draws. std::shuffle delegates to
/// uniform_int_distribution, whose output is implementation-defined;
/// raw mt19937_64 draws are pinned by the standard, so this shuffle is
/// reproducible across platforms.
template <class T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace sarco
