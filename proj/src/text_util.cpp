#include "bmatch/text_util.hpp"

#include <cstdio>

namespace bmatch {

std::string hex_word(Word w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%X", w);
  return buf;
}

std::optional<Word> parse_word(const std::string& text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  std::size_t i = 0;
  if (text[0] == '-') {
    neg = true;
    i = 1;
    if (text.size() == 1) return std::nullopt;
  }
  std::uint64_t value = 0;
  if (text.size() > i + 1 && text[i] == '0' && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
    i += 2;
    if (i == text.size()) return std::nullopt;
    for (; i < text.size(); ++i) {
      char c = text[i];
      int digit;
      if (c >= '0' && c <= '9') digit = c - '0';
      else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
      else return std::nullopt;
      value = value * 16 + static_cast<std::uint64_t>(digit);
      if (value > 0xFFFF'FFFFull) return std::nullopt;
    }
  } else {
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + static_cast<std::uint64_t>(c - '0');
      if (value > 0xFFFF'FFFFull) return std::nullopt;
    }
  }
  Word w = static_cast<Word>(value);
  return neg ? static_cast<Word>(0u - w) : w;
}

}  // namespace bmatch
