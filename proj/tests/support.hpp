#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "liffig.hpp"

namespace support {

inline std::string corpus_path(const std::string& name) { return std::string(LIFFIG_CORPUS_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_text(const std::string& name) { return read_file(corpus_path(name)); }

inline liffig::Program corpus(const std::string& name) {
  return liffig::parse_program_or_throw(corpus_text(name));
}

// ------------------------------------------------------------------ oracles

/// Euclid's algorithm by repeated remainder.
inline std::int64_t euclid_gcd(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    const std::int64_t r = a % b;
    a = b;
    b = r;
  }
  return a;
}

/// The first `count` primes by trial division against every smaller integer >= 2.
inline std::vector<std::int64_t> first_primes(std::size_t count) {
  std::vector<std::int64_t> out;
  for (std::int64_t c = 2; out.size() < count; ++c) {
    bool prime = true;
    for (std::int64_t d = 2; d * d <= c; ++d) {
      if (c % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(c);
  }
  return out;
}

inline std::int64_t floor_log2(std::int64_t v) {
  std::int64_t r = -1;
  while (v > 0) {
    v >>= 1;
    ++r;
  }
  return r;
}

inline liffig::Trace run_gcd(const liffig::Program& p, std::int64_t x, std::int64_t y,
                             liffig::TraceDetail detail = liffig::TraceDetail::full) {
  liffig::RunConfig cfg;
  cfg.detail = detail;
  return liffig::run(p, {{"x", x}, {"y", y}, {"x0", x}, {"y0", y}}, cfg);
}

/// Whitespace-separated tokens of a text, for layout-insensitive comparison.
inline std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace support
