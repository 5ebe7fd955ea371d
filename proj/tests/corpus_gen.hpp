#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmatch/executor.hpp"
#include "bmatch/ir.hpp"

namespace bmatch::testgen {

struct GenOptions {
  std::size_t function_count = 50;
  // When set, every generated function takes exactly this many parameters.
  std::optional<std::uint32_t> fixed_param_count;
  // Extra long-signature decoy functions added to the program (not used as
  // references); their emulated signatures dwarf the reference lengths.
  std::size_t decoy_count = 0;
  std::uint32_t decoy_loop_iters = 2500;
  bool enable_calls = true;
  bool enable_icalls = true;
  bool enable_libcalls = true;
};

struct Corpus {
  Program program;
  std::vector<std::string> reference_names;
  std::map<std::string, TestInput> inputs;
};

// Deterministic per seed. Every generated reference executes to completion
// on its input, loops are bounded, and comparison windows are disjoint per
// function so signatures are pairwise distinct. Registers r12..r15 are left
// unused for transform scratch space.
Corpus generate_corpus(std::uint64_t seed, const GenOptions& options = {});

}  // namespace bmatch::testgen
