#pragma once

#include <cstdint>
#include <span>

#include "bmatch/executor.hpp"
#include "bmatch/signature.hpp"

namespace bmatch {

// Defaults: L = 512 (length-threshold turning point), P = e^2.4, F = 64
// SimHash bits, K = 10 report depth. P may be +infinity to disable pruning.
struct MatchConfig {
  std::uint32_t length_threshold = 512;
  double pruning_threshold = 11.023176380641601;  // e^2.4
  std::uint32_t simhash_bits = 64;
  std::uint32_t report_depth = 10;
  std::uint64_t execution_budget = kDefaultExecutionBudget;
  std::uint64_t emulation_budget = kDefaultEmulationBudget;

  // Throws ConfigError when an invariant is violated
  // (L >= 1, P > 1, F in {32, 64, 128}).
  void check() const;
};

struct Score {
  double value = 0.0;
  bool pruned = false;            // value is the -1 sentinel
  bool empty_signatures = false;  // both signatures empty: scored 0 with this diagnostic

  static Score of(double v) { return {v, false, false}; }
  static Score pruned_sentinel() { return {-1.0, true, false}; }
  static Score empty_pair() { return {0.0, false, true}; }
};

// Counters for instrumenting dispatch and pruning behavior.
struct CompareStats {
  std::uint64_t lcs_dispatches = 0;
  std::uint64_t simhash_dispatches = 0;
  std::uint64_t pruned_pairs = 0;
  std::uint64_t lcs_cells = 0;  // inner DP loop iterations
};

// Longest common subsequence under structural feature equality.
// O(|a|*|b|) time, O(min(|a|,|b|)) space.
std::size_t lcs_len(std::span<const Feature> a, std::span<const Feature> b,
                    std::uint64_t* cell_counter = nullptr);

// Jaccard index with the LCS as the intersection size:
// lcs / (|Sr| + |St| - lcs). Two empty signatures score 0 with the
// EmptySignature diagnostic.
Score jaccard_lcs(const Signature& sr, const Signature& st, std::uint64_t* cell_counter = nullptr);

struct SimHashValue {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;  // used when bits == 128
  auto operator<=>(const SimHashValue&) const = default;
};

// Fixed SipHash-2-4 keys; published so .bmsig-level results are
// reproducible bit-for-bit across platforms.
constexpr std::uint64_t kSimHashKey0 = 0x424d617463684b31ull;  // "BMatchK1"
constexpr std::uint64_t kSimHashKey1 = 0x424d617463684b32ull;  // "BMatchK2"

// SipHash-2-4 of the canonical feature encoding under the fixed keys.
std::uint64_t stable_feature_hash(const Feature& feature, std::uint64_t k0, std::uint64_t k1);

// SimHash over the set of distinct features (duplicates collapse); bit
// sums of 0 resolve to 0, so the empty signature hashes to all-zero.
SimHashValue simhash(const Signature& s, std::uint32_t bits);

std::uint32_t hamming_distance(const SimHashValue& a, const SimHashValue& b);

// Eq-2 style similarity: 1 - HD(SH(Sr), SH(St)) / F.
Score simhash_sim(const Signature& sr, const Signature& st, std::uint32_t bits);

// Dispatch on the reference length only: |Sr| < L selects Jaccard-with-LCS,
// otherwise Hamming-with-SimHash.
Score compare(const Signature& sr, const Signature& st, const MatchConfig& cfg,
              CompareStats* stats = nullptr);

// Skips the comparison with the -1 sentinel when max/min length ratio
// exceeds P; a single empty signature is always pruned, two empty ones
// score 0 with the diagnostic. P = +infinity disables pruning entirely.
Score pruned_compare(const Signature& sr, const Signature& st, const MatchConfig& cfg,
                     CompareStats* stats = nullptr);

}  // namespace bmatch
