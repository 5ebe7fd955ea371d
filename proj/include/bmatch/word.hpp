#pragma once

#include <cstdint>

namespace bmatch {

// All values are 32-bit two's-complement words. Signed views are used only
// where an opcode's semantics calls for them (cmp.lt/le/gt/ge, div, abs).
using Word = std::uint32_t;
using SWord = std::int32_t;

// Fixed memory map. Globals and library allocations are classifiable by
// address alone; everything else is unmapped and faults on access.
constexpr Word kGlobalRegionBase = 0x1000'0000u;
constexpr Word kGlobalRegionEnd = 0x2000'0000u;
constexpr Word kStackRegionBase = 0x7000'0000u;
constexpr Word kStackRegionEnd = 0x7FFF'0000u;
constexpr Word kLibraryRegionBase = 0x9000'0000u;
constexpr Word kLibraryRegionEnd = 0xA000'0000u;

// Stack grows down from here; sp holds this value at function entry.
constexpr Word kEntryStackPointer = kStackRegionEnd;

// Synthetic code addresses: function i (in name order) sits at
// kCodeRegionBase + i * kFunctionAddressStride.
constexpr Word kCodeRegionBase = 0x0040'0000u;
constexpr Word kFunctionAddressStride = 0x1000u;

// Fill value for argument slots without a recorded value.
constexpr Word kUnboundArgument = 0xDEADBEEFu;

enum class Region { Global, Stack, Library, Unmapped };

constexpr Region classify_address(Word addr) {
  if (addr >= kGlobalRegionBase && addr < kGlobalRegionEnd) return Region::Global;
  if (addr >= kStackRegionBase && addr < kStackRegionEnd) return Region::Stack;
  if (addr >= kLibraryRegionBase && addr < kLibraryRegionEnd) return Region::Library;
  return Region::Unmapped;
}

// True when a full word at addr lies inside one mapped region.
constexpr bool word_access_ok(Word addr) {
  Region r = classify_address(addr);
  return r != Region::Unmapped && classify_address(addr + 3u) == r;
}

}  // namespace bmatch
