#include "bmatch/signature.hpp"

#include "bmatch/text_util.hpp"

namespace bmatch {

namespace {

void push_be(std::string& out, Word w) {
  out.push_back(static_cast<char>((w >> 24) & 0xFF));
  out.push_back(static_cast<char>((w >> 16) & 0xFF));
  out.push_back(static_cast<char>((w >> 8) & 0xFF));
  out.push_back(static_cast<char>(w & 0xFF));
}

}  // namespace

std::string canonical_encode(const Feature& feature) {
  std::string out;
  out.push_back(static_cast<char>(feature.kind));
  switch (feature.kind) {
    case FeatureKind::OutputReturn:
      push_be(out, feature.a);
      break;
    case FeatureKind::OutputGlobal:
    case FeatureKind::Comparison:
      push_be(out, feature.a);
      push_be(out, feature.b);
      break;
    case FeatureKind::LibCall:
      push_be(out, static_cast<Word>(feature.name.size()));
      out += feature.name;
      break;
  }
  return out;
}

std::string feature_to_line(const Feature& feature) {
  switch (feature.kind) {
    case FeatureKind::OutputReturn:
      return "ret " + hex_word(feature.a);
    case FeatureKind::OutputGlobal:
      return "glob " + hex_word(feature.a) + " " + hex_word(feature.b);
    case FeatureKind::Comparison:
      return "cmp " + hex_word(feature.a) + " " + hex_word(feature.b);
    case FeatureKind::LibCall:
      return "lib " + feature.name;
  }
  return "";
}

}  // namespace bmatch
