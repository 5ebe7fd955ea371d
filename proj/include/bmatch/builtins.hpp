#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "bmatch/word.hpp"

namespace bmatch {

// Pure library functions run as native definitions in both the executor and
// the emulator. Environment-dependent library functions have no definition
// here; their results are scripted (execution) or migrated (emulation).
std::optional<unsigned> pure_builtin_arity(std::string_view name);

// Precondition: pure_builtin_arity(name) == args.size().
Word eval_pure_builtin(std::string_view name, std::span<const Word> args);

}  // namespace bmatch
