#pragma once

#include <optional>
#include <string>

#include "bmatch/word.hpp"

namespace bmatch {

// Uppercase hex with 0x prefix, no padding: 42 -> "0x2A".
std::string hex_word(Word w);

// Accepts decimal (optionally negative, wrapping mod 2^32) and 0x hex.
std::optional<Word> parse_word(const std::string& text);

}  // namespace bmatch
