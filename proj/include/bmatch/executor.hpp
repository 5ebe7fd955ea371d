#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmatch/ir.hpp"
#include "bmatch/machine.hpp"
#include "bmatch/signature.hpp"

namespace bmatch {

constexpr std::uint64_t kDefaultExecutionBudget = 1'000'000;
constexpr std::uint64_t kDefaultEmulationBudget = 200'000;

// Configuration problems (unknown function, argument count mismatch,
// exhausted library script, bad override address) are reported before any
// scoring; they are not run outcomes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TestInput {
  std::vector<Word> args;
  std::map<Word, Word> global_overrides;                    // applied before the run
  std::map<std::string, std::vector<Word>> library_script;  // env-dependent results, in order
};

struct GlobalReadRecord {
  Word address = 0;
  Word value = 0;
  auto operator<=>(const GlobalReadRecord&) const = default;
};

struct IndirectCallRecord {
  std::uint32_t ordinal = 0;
  Word target_address = 0;
  Word return_value = 0;
  auto operator<=>(const IndirectCallRecord&) const = default;
};

struct SubroutineReturnRecord {
  std::string callee;
  Word return_value = 0;
  auto operator<=>(const SubroutineReturnRecord&) const = default;
};

struct LibraryResultRecord {
  std::string name;
  Word return_value = 0;
  auto operator<=>(const LibraryResultRecord&) const = default;
};

// The migration payload captured from the reference run. global_reads keeps
// one entry per dynamic read in chronological order; repeat reads repeat.
struct RuntimeRecord {
  std::vector<std::optional<Word>> arg_values;  // nullopt: slot without a recorded value
  std::vector<GlobalReadRecord> global_reads;
  std::vector<IndirectCallRecord> indirect_targets;
  std::vector<SubroutineReturnRecord> subroutine_returns;
  std::vector<LibraryResultRecord> library_results;
  auto operator<=>(const RuntimeRecord&) const = default;
};

struct ExecutionResult {
  Signature signature;
  RuntimeRecord record;
  enum class Status { Complete, Fault, BudgetExhausted } status = Status::Complete;
  Fault fault{};  // set when status == Fault
};

std::string execution_status_to_string(const ExecutionResult& result);

// Runs the reference function on a concrete input, recording the signature
// and the runtime values later migrated into target emulations. Faults and
// budget exhaustion still return the partial signature and record.
ExecutionResult execute(const Program& program, const std::string& function,
                        const TestInput& input, std::uint64_t budget = kDefaultExecutionBudget);

}  // namespace bmatch
