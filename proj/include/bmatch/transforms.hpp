#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "bmatch/ir.hpp"

namespace bmatch {

enum class TransformKind : std::uint8_t { Rename, Reorder, Sub, Bcf, Fla, InlineCallee };

std::optional<TransformKind> transform_kind_from_name(const std::string& name);
const char* transform_kind_name(TransformKind kind);

class TransformError : public std::runtime_error {
 public:
  enum class Code { UnsupportedShape, NoCallsite };
  TransformError(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Returns a new Program identical except for the transformed function; the
// output always validates and, for equal seeds, renders byte-identically.
// Every kind preserves the function's input-to-return behavior and its
// ordered global-write sequence:
//   rename        bijective renaming of non-parameter registers (sp and
//                 parameter registers fixed)
//   reorder       permutes basic blocks behind the entry block, patching
//                 fall-throughs into explicit jumps
//   sub           value-equivalent arithmetic rewrites: a+b -> a-(0-b),
//                 multiply-by-2^k -> shift, comparison operand swaps with
//                 mirrored predicates
//   bcf           wraps blocks in always-true opaque predicates built from
//                 re-read values, adding never-taken clone blocks
//   fla           rewrites the body as a state-register dispatcher loop;
//                 rejects functions containing jtab (UnsupportedShape)
//   inline_callee expands one direct user-defined callsite into the caller
//                 (NoCallsite when the function has none)
Program transform(const Program& program, const std::string& function, TransformKind kind,
                  std::uint64_t seed);

}  // namespace bmatch
