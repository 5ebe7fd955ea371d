#include "bmatch/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace bmatch {

void MatchConfig::check() const {
  if (length_threshold < 1) throw ConfigError("length threshold L must be >= 1");
  if (!(pruning_threshold > 1.0)) throw ConfigError("pruning threshold P must be > 1");
  if (simhash_bits != 32 && simhash_bits != 64 && simhash_bits != 128) {
    throw ConfigError("SimHash width F must be 32, 64, or 128");
  }
  if (report_depth < 1) throw ConfigError("report depth K must be >= 1");
  if (execution_budget == 0 || emulation_budget == 0) {
    throw ConfigError("budgets must be positive");
  }
}

namespace {

// Interns features of both sequences so the DP inner loop compares small
// integers instead of structs.
void intern_features(std::span<const Feature> a, std::span<const Feature> b,
                     std::vector<std::uint32_t>* ia, std::vector<std::uint32_t>* ib) {
  std::unordered_map<std::string, std::uint32_t> ids;
  auto intern = [&](std::span<const Feature> xs, std::vector<std::uint32_t>* out) {
    out->reserve(xs.size());
    for (const Feature& f : xs) {
      auto [it, inserted] =
          ids.emplace(canonical_encode(f), static_cast<std::uint32_t>(ids.size()));
      (void)inserted;
      out->push_back(it->second);
    }
  };
  intern(a, ia);
  intern(b, ib);
}

}  // namespace

std::size_t lcs_len(std::span<const Feature> a, std::span<const Feature> b,
                    std::uint64_t* cell_counter) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::uint32_t> xs, ys;
  intern_features(a, b, &xs, &ys);
  if (ys.size() > xs.size()) std::swap(xs, ys);  // ys is the shorter row

  std::vector<std::uint32_t> prev(ys.size() + 1, 0);
  std::vector<std::uint32_t> cur(ys.size() + 1, 0);
  for (std::size_t i = 1; i <= xs.size(); ++i) {
    for (std::size_t j = 1; j <= ys.size(); ++j) {
      if (xs[i - 1] == ys[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  if (cell_counter) *cell_counter += static_cast<std::uint64_t>(xs.size()) * ys.size();
  return prev[ys.size()];
}

Score jaccard_lcs(const Signature& sr, const Signature& st, std::uint64_t* cell_counter) {
  std::size_t lr = sr.length();
  std::size_t lt = st.length();
  if (lr + lt == 0) return Score::empty_pair();
  std::size_t lcs = lcs_len(sr.features, st.features, cell_counter);
  return Score::of(static_cast<double>(lcs) / static_cast<double>(lr + lt - lcs));
}

namespace {

std::uint64_t rotl64(std::uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

// SipHash-2-4 with a 128-bit key, 64-bit result.
std::uint64_t siphash24(const void* data, std::size_t len, std::uint64_t k0, std::uint64_t k1) {
  std::uint64_t v0 = 0x736f6d6570736575ull ^ k0;
  std::uint64_t v1 = 0x646f72616e646f6dull ^ k1;
  std::uint64_t v2 = 0x6c7967656e657261ull ^ k0;
  std::uint64_t v3 = 0x7465646279746573ull ^ k1;

  auto sipround = [&] {
    v0 += v1;
    v1 = rotl64(v1, 13);
    v1 ^= v0;
    v0 = rotl64(v0, 32);
    v2 += v3;
    v3 = rotl64(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = rotl64(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = rotl64(v1, 17);
    v1 ^= v2;
    v2 = rotl64(v2, 32);
  };

  const auto* in = static_cast<const unsigned char*>(data);
  std::size_t blocks = len / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint64_t m = 0;
    for (int j = 0; j < 8; ++j) m |= static_cast<std::uint64_t>(in[i * 8 + j]) << (8 * j);
    v3 ^= m;
    sipround();
    sipround();
    v0 ^= m;
  }
  std::uint64_t last = static_cast<std::uint64_t>(len & 0xFF) << 56;
  for (std::size_t j = blocks * 8; j < len; ++j) {
    last |= static_cast<std::uint64_t>(in[j]) << (8 * (j - blocks * 8));
  }
  v3 ^= last;
  sipround();
  sipround();
  v0 ^= last;
  v2 ^= 0xFF;
  sipround();
  sipround();
  sipround();
  sipround();
  return v0 ^ v1 ^ v2 ^ v3;
}

}  // namespace

std::uint64_t stable_feature_hash(const Feature& feature, std::uint64_t k0, std::uint64_t k1) {
  std::string bytes = canonical_encode(feature);
  return siphash24(bytes.data(), bytes.size(), k0, k1);
}

SimHashValue simhash(const Signature& s, std::uint32_t bits) {
  std::vector<int> sums(bits, 0);
  std::unordered_set<std::string> seen;
  for (const Feature& f : s.features) {
    if (!seen.insert(canonical_encode(f)).second) continue;  // set semantics
    std::uint64_t h0 = stable_feature_hash(f, kSimHashKey0, kSimHashKey1);
    std::uint64_t h1 =
        bits > 64 ? stable_feature_hash(f, kSimHashKey1, kSimHashKey0) : 0;
    for (std::uint32_t bit = 0; bit < bits; ++bit) {
      std::uint64_t h = bit < 64 ? h0 : h1;
      std::uint32_t pos = bit < 64 ? bit : bit - 64;
      sums[bit] += ((h >> pos) & 1u) ? 1 : -1;
    }
  }
  SimHashValue out;
  for (std::uint32_t bit = 0; bit < bits; ++bit) {
    if (sums[bit] > 0) {
      if (bit < 64) {
        out.lo |= 1ull << bit;
      } else {
        out.hi |= 1ull << (bit - 64);
      }
    }
  }
  return out;
}

std::uint32_t hamming_distance(const SimHashValue& a, const SimHashValue& b) {
  return static_cast<std::uint32_t>(std::popcount(a.lo ^ b.lo) + std::popcount(a.hi ^ b.hi));
}

Score simhash_sim(const Signature& sr, const Signature& st, std::uint32_t bits) {
  std::uint32_t hd = hamming_distance(simhash(sr, bits), simhash(st, bits));
  return Score::of(1.0 - static_cast<double>(hd) / static_cast<double>(bits));
}

Score compare(const Signature& sr, const Signature& st, const MatchConfig& cfg,
              CompareStats* stats) {
  if (sr.length() < cfg.length_threshold) {
    if (stats) ++stats->lcs_dispatches;
    return jaccard_lcs(sr, st, stats ? &stats->lcs_cells : nullptr);
  }
  if (stats) ++stats->simhash_dispatches;
  return simhash_sim(sr, st, cfg.simhash_bits);
}

Score pruned_compare(const Signature& sr, const Signature& st, const MatchConfig& cfg,
                     CompareStats* stats) {
  if (std::isinf(cfg.pruning_threshold)) return compare(sr, st, cfg, stats);
  std::size_t lr = sr.length();
  std::size_t lt = st.length();
  if (lr == 0 && lt == 0) return compare(sr, st, cfg, stats);
  std::size_t lo = std::min(lr, lt);
  std::size_t hi = std::max(lr, lt);
  if (lo == 0 || static_cast<double>(hi) / static_cast<double>(lo) > cfg.pruning_threshold) {
    if (stats) ++stats->pruned_pairs;
    return Score::pruned_sentinel();
  }
  return compare(sr, st, cfg, stats);
}

}  // namespace bmatch
