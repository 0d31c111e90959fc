#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/rational.hpp"

namespace hdmitx {

// Parallel input word D0..D(width-1).
class Word {
 public:
  Word() = default;
  explicit Word(std::uint32_t bits, int width = 10) : bits_(bits & mask(width)), width_(width) {
    if (width < 1 || width > 32) throw Error("word width out of range");
  }

  // Binary text, leftmost character is the highest bit D(width-1).
  static Word from_string(std::string_view s) {
    if (s.empty() || s.size() > 32) throw ParseError("bad word length " + std::to_string(s.size()));
    std::uint32_t v = 0;
    for (char c : s) {
      if (c != '0' && c != '1') throw ParseError("word '" + std::string(s) + "' is not binary");
      v = (v << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return Word(v, static_cast<int>(s.size()));
  }

  int width() const { return width_; }
  std::uint32_t value() const { return bits_; }
  bool bit(int i) const { return ((bits_ >> i) & 1U) != 0; }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(width_), '0');
    for (int i = 0; i < width_; ++i) {
      if (bit(i)) s[static_cast<std::size_t>(width_ - 1 - i)] = '1';
    }
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  static std::uint32_t mask(int w) { return w >= 32 ? 0xFFFFFFFFU : ((1U << w) - 1U); }

  std::uint32_t bits_ = 0;
  int width_ = 10;
};

// Serial bits on an exact rational grid: bit j occupies
// [boundary_ps(j), boundary_ps(j + 1)).
struct BitStream {
  std::vector<std::uint8_t> bits;
  Rational bit_period{1'000'000'000'000LL, 1'650'000'000LL};
  std::int64_t origin_ps = 0;
  std::int64_t index0 = 0;

  std::size_t size() const { return bits.size(); }
  std::int64_t boundary_ps(std::int64_t j) const { return origin_ps + (bit_period * (index0 + j)).round(); }
  std::int64_t start_time_ps() const { return boundary_ps(0); }
  std::int64_t bit_period_ps() const { return bit_period.round(); }

  std::string to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s += b ? '1' : '0';
    return s;
  }
};

// One word per line, `#` lines ignored.
inline std::vector<Word> parse_word_file(std::string_view text, int width = 10) {
  std::vector<Word> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(b, e - b + 1);
    if (body[0] == '#') continue;
    if (static_cast<int>(body.size()) != width) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " bits");
    }
    try {
      out.push_back(Word::from_string(body));
    } catch (const ParseError& err) {
      throw ParseError("line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

inline std::vector<Word> load_word_file(const std::string& path, int width = 10) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open word file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_word_file(ss.str(), width);
}

inline std::string format_word_file(const std::vector<Word>& words) {
  std::string s;
  for (const auto& w : words) s += w.to_string() + '\n';
  return s;
}

// 80 characters per line.
inline std::string format_bitstream(const BitStream& bs) {
  std::string s;
  for (std::size_t i = 0; i < bs.bits.size(); ++i) {
    s += bs.bits[i] ? '1' : '0';
    if ((i + 1) % 80 == 0) s += '\n';
  }
  if (bs.bits.size() % 80 != 0) s += '\n';
  return s;
}

}  // namespace hdmitx
