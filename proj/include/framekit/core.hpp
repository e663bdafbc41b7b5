#pragma once

// Shared plumbing: error types, UTF-8 helpers, hashing, deterministic RNG.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace framekit {

inline constexpr const char* api_version = "1.0";

// Error hierarchy. Every failure the library reports derives from error so
// callers can catch one type at the CLI boundary.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct parse_error : error { using error::error; };
struct integrity_error : error { using error::error; };
struct unknown_document_error : error { using error::error; };
struct missing_layer_error : error { using error::error; };
struct empty_pattern_error : error { using error::error; };
struct dimension_mismatch_error : error { using error::error; };
struct zero_vector_error : error { using error::error; };
struct not_a_tree_error : error { using error::error; };
struct cycle_error : error { using error::error; };
struct projection_error : error { using error::error; };
struct unknown_frame_element_error : error { using error::error; };
struct no_occurrences_error : error { using error::error; };
struct empty_test_set_error : error { using error::error; };

// ---------------------------------------------------------------------------
// UTF-8. Character offsets throughout the library count Unicode scalar
// values, not bytes, so substitution arithmetic happens on decoded text.

inline std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    int extra = 0;
    if (c < 0x80) { cp = c; extra = 0; }
    else if ((c >> 5) == 0x6) { cp = c & 0x1f; extra = 1; }
    else if ((c >> 4) == 0xe) { cp = c & 0x0f; extra = 2; }
    else if ((c >> 3) == 0x1e) { cp = c & 0x07; extra = 3; }
    else throw parse_error("invalid utf-8 lead byte at offset " + std::to_string(i));
    if (i + extra >= s.size()) throw parse_error("truncated utf-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) throw parse_error("invalid utf-8 continuation byte");
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

inline std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
  return out;
}

// Length of a UTF-8 string in scalar values.
inline int64_t utf8_length(std::string_view s) {
  int64_t n = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if ((static_cast<unsigned char>(s[i]) & 0xc0) != 0x80) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Hashing. FNV-1a 64 is used for feature hashing and fingerprints; it is
// stable across platforms, unlike std::hash.

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Deterministic randomness. Standard distributions are implementation
// defined, so index draws and shuffles are rolled by hand on mt19937_64.

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform draw in [0, n) by rejection, bias free.
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) throw error("uniform_index: empty range");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do { x = rng(); } while (x >= limit);
  return x % n;
}

template <class T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// ---------------------------------------------------------------------------
// Small string helpers.

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split_char(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace framekit
