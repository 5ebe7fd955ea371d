#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmatch/emulator.hpp"
#include "bmatch/executor.hpp"
#include "bmatch/similarity.hpp"

namespace bmatch {

struct RankedEntry {
  std::string target;
  Score score{};
  std::string status;  // emulation status token
};

// Descending by score, ties by target name ascending; pruned entries (-1)
// end up at the tail. Contains every function of the target program.
struct RankedList {
  std::string reference;
  std::vector<RankedEntry> entries;
};

// Raised when the reference execution faults before emitting any feature:
// there is nothing to match against.
class MatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emulates every target function against one shared record and scores with
// pruned_compare. Deterministic for fixed inputs regardless of worker count.
RankedList rank_with_record(const std::string& reference_name, const Signature& reference_sig,
                            const RuntimeRecord& record, const Program& target_program,
                            const MatchConfig& cfg, unsigned workers = 1,
                            CompareStats* stats = nullptr);

// Full pipeline: execute the reference once, then rank_with_record.
RankedList rank(const Program& reference_program, const std::string& reference_fn,
                const TestInput& input, const Program& target_program, const MatchConfig& cfg,
                unsigned workers = 1);

struct GroundTruth {
  std::map<std::string, std::string> expected;  // reference name -> target name
};

// Eq-3 style accuracy: the fraction of references whose expected target
// appears among the first K entries.
double topk_accuracy(const std::vector<RankedList>& lists, const GroundTruth& truth,
                     std::uint32_t k);

struct EvalRow {
  std::string reference;
  std::string expected;
  std::optional<std::uint32_t> hit_rank;  // 1-based; empty when absent
  std::string note;                       // failure note when the row degraded to a miss
};

struct EvalReport {
  std::vector<std::uint32_t> k_values;
  std::map<std::uint32_t, double> accuracy;
  std::map<std::uint32_t, std::uint32_t> found;
  std::size_t reference_count = 0;
  std::vector<EvalRow> rows;
};

// 1-based position of the expected target in the list, if present.
std::optional<std::uint32_t> hit_rank(const RankedList& list, const std::string& expected);

EvalReport make_eval_report(const std::vector<RankedList>& lists, const GroundTruth& truth,
                            const std::vector<std::uint32_t>& k_values);

}  // namespace bmatch
