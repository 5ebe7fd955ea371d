#include "bmatch/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace bmatch {

RankedList rank_with_record(const std::string& reference_name, const Signature& reference_sig,
                            const RuntimeRecord& record, const Program& target_program,
                            const MatchConfig& cfg, unsigned workers, CompareStats* stats) {
  std::vector<const Function*> targets;
  targets.reserve(target_program.functions.size());
  for (const auto& [name, fn] : target_program.functions) {
    (void)name;
    targets.push_back(&fn);
  }

  struct Slot {
    Signature signature;
    std::string status;
  };
  std::vector<Slot> slots(targets.size());

  auto emulate_target = [&](std::size_t i) {
    EmulationResult r = emulate(target_program, targets[i]->name, record, cfg.emulation_budget);
    slots[i].signature = std::move(r.signature);
    slots[i].status = emulation_status_to_string(r);
  };

  if (workers <= 1 || targets.size() <= 1) {
    for (std::size_t i = 0; i < targets.size(); ++i) emulate_target(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= targets.size()) break;
        emulate_target(i);
      }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(targets.size()));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RankedList list;
  list.reference = reference_name;
  list.entries.reserve(targets.size());
  // Scoring is single-threaded so instrumentation counters stay exact.
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Score score = pruned_compare(reference_sig, slots[i].signature, cfg, stats);
    list.entries.push_back({targets[i]->name, score, std::move(slots[i].status)});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score.value != b.score.value) return a.score.value > b.score.value;
              return a.target < b.target;
            });
  return list;
}

RankedList rank(const Program& reference_program, const std::string& reference_fn,
                const TestInput& input, const Program& target_program, const MatchConfig& cfg,
                unsigned workers) {
  ExecutionResult exec = execute(reference_program, reference_fn, input, cfg.execution_budget);
  if (exec.status != ExecutionResult::Status::Complete && exec.signature.empty()) {
    throw MatchError("reference execution of '" + reference_fn +
                     "' produced no signature (" + execution_status_to_string(exec) + ")");
  }
  return rank_with_record(reference_fn, exec.signature, exec.record, target_program, cfg, workers);
}

std::optional<std::uint32_t> hit_rank(const RankedList& list, const std::string& expected) {
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (list.entries[i].target == expected) return static_cast<std::uint32_t>(i + 1);
  }
  return std::nullopt;
}

double topk_accuracy(const std::vector<RankedList>& lists, const GroundTruth& truth,
                     std::uint32_t k) {
  if (lists.empty()) return 0.0;
  std::size_t found = 0;
  for (const auto& list : lists) {
    auto it = truth.expected.find(list.reference);
    if (it == truth.expected.end()) {
      throw MatchError("reference '" + list.reference + "' missing from ground truth");
    }
    auto rank_pos = hit_rank(list, it->second);
    if (rank_pos && *rank_pos <= k) ++found;
  }
  return static_cast<double>(found) / static_cast<double>(lists.size());
}

EvalReport make_eval_report(const std::vector<RankedList>& lists, const GroundTruth& truth,
                            const std::vector<std::uint32_t>& k_values) {
  EvalReport report;
  report.k_values = k_values;
  report.reference_count = lists.size();
  for (const auto& list : lists) {
    auto it = truth.expected.find(list.reference);
    std::string expected = it == truth.expected.end() ? "" : it->second;
    report.rows.push_back({list.reference, expected, hit_rank(list, expected), ""});
  }
  for (std::uint32_t k : k_values) {
    std::uint32_t found = 0;
    for (const auto& row : report.rows) {
      if (row.hit_rank && *row.hit_rank <= k) ++found;
    }
    report.found[k] = found;
    report.accuracy[k] =
        lists.empty() ? 0.0 : static_cast<double>(found) / static_cast<double>(lists.size());
  }
  return report;
}

}  // namespace bmatch
