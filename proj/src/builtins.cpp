#include "bmatch/builtins.hpp"

#include <bit>

namespace bmatch {

namespace {

struct Builtin {
  std::string_view name;
  unsigned arity;
  Word (*eval)(std::span<const Word>);
};

Word do_abs(std::span<const Word> a) {
  auto v = static_cast<SWord>(a[0]);
  return v < 0 ? static_cast<Word>(0u - static_cast<Word>(v)) : a[0];
}

Word do_min(std::span<const Word> a) {
  return static_cast<SWord>(a[0]) < static_cast<SWord>(a[1]) ? a[0] : a[1];
}

Word do_max(std::span<const Word> a) {
  return static_cast<SWord>(a[0]) > static_cast<SWord>(a[1]) ? a[0] : a[1];
}

Word do_clz(std::span<const Word> a) { return static_cast<Word>(std::countl_zero(a[0])); }

Word do_popcnt(std::span<const Word> a) { return static_cast<Word>(std::popcount(a[0])); }

Word do_parity(std::span<const Word> a) { return static_cast<Word>(std::popcount(a[0]) & 1); }

Word do_rotl(std::span<const Word> a) { return std::rotl(a[0], static_cast<int>(a[1] & 31u)); }

Word do_bswap(std::span<const Word> a) {
  Word x = a[0];
  return (x << 24) | ((x << 8) & 0x00FF0000u) | ((x >> 8) & 0x0000FF00u) | (x >> 24);
}

constexpr Builtin kBuiltins[] = {
    {"abs", 1, do_abs},     {"min", 2, do_min},       {"max", 2, do_max},
    {"clz", 1, do_clz},     {"popcnt", 1, do_popcnt}, {"parity", 1, do_parity},
    {"rotl", 2, do_rotl},   {"bswap", 1, do_bswap},
};

}  // namespace

std::optional<unsigned> pure_builtin_arity(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b.arity;
  }
  return std::nullopt;
}

Word eval_pure_builtin(std::string_view name, std::span<const Word> args) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b.eval(args);
  }
  return 0;
}

}  // namespace bmatch
