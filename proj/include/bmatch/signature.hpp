#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmatch/word.hpp"

namespace bmatch {

enum class FeatureKind : std::uint8_t {
  OutputReturn = 1,
  OutputGlobal = 2,
  Comparison = 3,
  LibCall = 4,
};

// One semantic event. Comparison operands are stored canonically as
// (lo, hi) ordered by unsigned value so operand-swapped rewrites hash and
// compare identically.
struct Feature {
  FeatureKind kind = FeatureKind::OutputReturn;
  Word a = 0;        // return value | global address | comparison lo
  Word b = 0;        // global value | comparison hi
  std::string name;  // library callee

  static Feature output_return(Word value) { return {FeatureKind::OutputReturn, value, 0, {}}; }
  static Feature output_global(Word address, Word value) {
    return {FeatureKind::OutputGlobal, address, value, {}};
  }
  static Feature comparison(Word x, Word y) {
    return x <= y ? Feature{FeatureKind::Comparison, x, y, {}}
                  : Feature{FeatureKind::Comparison, y, x, {}};
  }
  static Feature lib_call(std::string callee) {
    return {FeatureKind::LibCall, 0, 0, std::move(callee)};
  }

  auto operator<=>(const Feature&) const = default;
};

struct Signature {
  std::vector<Feature> features;
  std::size_t length() const { return features.size(); }
  bool empty() const { return features.empty(); }
  void push(Feature f) { features.push_back(std::move(f)); }
  auto operator<=>(const Signature&) const = default;
};

// Injective, stable across runs and platforms: 1 tag byte followed by
// fixed-width big-endian payloads; LibCall carries a length-prefixed name.
std::string canonical_encode(const Feature& feature);

// One feature per line: "ret 0x2A" / "glob 0x10000000 0xA" / "cmp 0x3 0xA"
// / "lib alloc".
std::string feature_to_line(const Feature& feature);

}  // namespace bmatch
