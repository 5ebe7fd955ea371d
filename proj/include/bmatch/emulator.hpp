#pragma once

#include <string>

#include "bmatch/executor.hpp"
#include "bmatch/ir.hpp"
#include "bmatch/signature.hpp"

namespace bmatch {

struct EmulationResult {
  Signature signature;  // partial on abort: nothing is emitted after the stop
  enum class Status {
    Complete,
    ArityMismatch,
    GlobalLogExhausted,
    IllegalCallTarget,
    Fault,
    BudgetExhausted,
  } status = Status::Complete;
  Fault fault{};           // set when status == Fault
  std::string diagnostic;  // distinguishes e.g. library result mismatches
};

std::string emulation_status_to_string(const EmulationResult& result);

// Emulates a target function inside the reference run's memory world:
// arguments come from the record, global reads migrate recorded values in
// usage order (address matches take the first unconsumed entry for that
// address), recorded indirect-call targets are skipped with their recorded
// return values, and environment-dependent library calls consume recorded
// results by callee name.
EmulationResult emulate(const Program& target_program, const std::string& function,
                        const RuntimeRecord& record,
                        std::uint64_t budget = kDefaultEmulationBudget);

}  // namespace bmatch
