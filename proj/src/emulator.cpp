#include "bmatch/emulator.hpp"

#include <unordered_set>

#include "bmatch/builtins.hpp"
#include "bmatch/text_util.hpp"

namespace bmatch {

std::string emulation_status_to_string(const EmulationResult& result) {
  switch (result.status) {
    case EmulationResult::Status::Complete:
      return "complete";
    case EmulationResult::Status::ArityMismatch:
      return "arity-mismatch";
    case EmulationResult::Status::GlobalLogExhausted:
      return "global-log-exhausted";
    case EmulationResult::Status::IllegalCallTarget:
      return "illegal-call-target";
    case EmulationResult::Status::Fault:
      return "fault:" + fault_to_string(result.fault);
    case EmulationResult::Status::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

namespace {

// Interposes on global- and library-region loads. The first read of an
// address takes the first unconsumed record entry for that exact address
// when one exists, otherwise the next unconsumed entry of the same region
// in usage order. Once an address has been migrated or stored to, reads see
// the emulated memory.
class MigratingPolicy : public MemoryPolicy {
 public:
  explicit MigratingPolicy(const RuntimeRecord& record)
      : record_(&record), consumed_(record.global_reads.size(), false) {}

  bool exhausted() const { return exhausted_; }

  bool load_word(MachineState& state, Word addr, Word* out, Fault* fault) override {
    if (!word_access_ok(addr)) {
      *fault = {FaultCode::IllegalMemoryAccess, addr};
      return true;
    }
    Region region = classify_address(addr);
    if ((region == Region::Global || region == Region::Library) && !established_.count(addr)) {
      std::size_t pick = record_->global_reads.size();
      for (std::size_t i = scan_start_; i < record_->global_reads.size(); ++i) {
        if (!consumed_[i] && record_->global_reads[i].address == addr) {
          pick = i;
          break;
        }
      }
      if (pick == record_->global_reads.size()) {
        for (std::size_t i = scan_start_; i < record_->global_reads.size(); ++i) {
          if (!consumed_[i] && classify_address(record_->global_reads[i].address) == region) {
            pick = i;
            break;
          }
        }
      }
      if (pick == record_->global_reads.size()) {
        exhausted_ = true;
        *fault = {FaultCode::IllegalMemoryAccess, addr};
        return true;
      }
      consumed_[pick] = true;
      while (scan_start_ < consumed_.size() && consumed_[scan_start_]) ++scan_start_;
      state.write_word_raw(addr, record_->global_reads[pick].value);
      established_.insert(addr);
    }
    *out = state.read_word_raw(addr);
    return false;
  }

  bool store_word(MachineState& state, Word addr, Word value, Fault* fault) override {
    if (!word_access_ok(addr)) {
      *fault = {FaultCode::IllegalMemoryAccess, addr};
      return true;
    }
    Region region = classify_address(addr);
    if (region == Region::Global || region == Region::Library) established_.insert(addr);
    state.write_word_raw(addr, value);
    return false;
  }

 private:
  const RuntimeRecord* record_;
  std::vector<bool> consumed_;
  std::size_t scan_start_ = 0;
  std::unordered_set<Word> established_;
  bool exhausted_ = false;
};

}  // namespace

EmulationResult emulate(const Program& target_program, const std::string& function,
                        const RuntimeRecord& record, std::uint64_t budget) {
  const Function* entry = target_program.find_function(function);
  if (!entry) throw ConfigError("unknown function '" + function + "'");

  EmulationResult result;
  if (entry->param_count != record.arg_values.size()) {
    result.status = EmulationResult::Status::ArityMismatch;
    return result;
  }

  MachineState st;
  st.program = &target_program;
  st.current_function = function;
  st.regs.fill(0);
  st.regs[kSpIndex] = kEntryStackPointer;
  for (std::size_t i = 0; i < record.arg_values.size(); ++i) {
    st.regs[i] = record.arg_values[i].value_or(kUnboundArgument);
  }

  MigratingPolicy policy(record);
  std::vector<bool> icall_consumed(record.indirect_targets.size(), false);
  std::vector<bool> libret_consumed(record.library_results.size(), false);

  while (true) {
    if (st.step_count >= budget) {
      result.status = EmulationResult::Status::BudgetExhausted;
      break;
    }
    const Function* fn = target_program.find_function(st.current_function);
    if (!fn || st.pc_index >= fn->body.size()) {
      result.status = EmulationResult::Status::Fault;
      result.fault = {FaultCode::DecodeError, 0};
      break;
    }
    StepEffect effect = step(st, fn->body[st.pc_index], policy);
    if (effect.kind == StepEffect::Kind::Continue) continue;

    if (effect.kind == StepEffect::Kind::Branch) {
      st.pc_index = effect.branch_target;
      continue;
    }
    if (effect.kind == StepEffect::Kind::Call) {
      const Function* callee = target_program.find_function(effect.callee);
      if (!callee) {
        result.status = EmulationResult::Status::Fault;
        result.fault = {FaultCode::DecodeError, 0};
        break;
      }
      st.enter_function(*callee, effect.args, effect.dest, false);
      continue;
    }
    if (effect.kind == StepEffect::Kind::IndirectCall) {
      std::size_t pick = record.indirect_targets.size();
      for (std::size_t i = 0; i < record.indirect_targets.size(); ++i) {
        if (!icall_consumed[i] &&
            record.indirect_targets[i].target_address == effect.target_address) {
          pick = i;
          break;
        }
      }
      if (pick != record.indirect_targets.size()) {
        // Recorded target: skip the callee, substitute its recorded return.
        icall_consumed[pick] = true;
        st.write_reg(effect.dest, record.indirect_targets[pick].return_value);
        ++st.pc_index;
        continue;
      }
      if (const Function* callee = target_program.function_at_address(effect.target_address)) {
        st.enter_function(*callee, effect.args, effect.dest, true, effect.target_address);
        continue;
      }
      result.status = EmulationResult::Status::IllegalCallTarget;
      result.diagnostic = "indirect call target " + hex_word(effect.target_address) +
                          " is neither recorded nor a function address";
      break;
    }
    if (effect.kind == StepEffect::Kind::LibCall) {
      Word value = 0;
      auto kind_it = target_program.library_decls.find(effect.callee);
      if (kind_it == target_program.library_decls.end()) {
        result.status = EmulationResult::Status::Fault;
        result.fault = {FaultCode::DecodeError, 0};
        break;
      }
      if (kind_it->second == LibraryKind::Pure) {
        value = eval_pure_builtin(effect.callee, effect.args);
      } else {
        std::size_t pick = record.library_results.size();
        for (std::size_t i = 0; i < record.library_results.size(); ++i) {
          if (!libret_consumed[i] && record.library_results[i].name == effect.callee) {
            pick = i;
            break;
          }
        }
        if (pick == record.library_results.size()) {
          result.status = EmulationResult::Status::IllegalCallTarget;
          result.diagnostic = "library result mismatch for '" + effect.callee + "'";
          break;
        }
        libret_consumed[pick] = true;
        value = record.library_results[pick].return_value;
      }
      if (!st.suppressed()) st.feature_sink.push(Feature::lib_call(effect.callee));
      st.write_reg(effect.dest, value);
      ++st.pc_index;
      continue;
    }
    if (effect.kind == StepEffect::Kind::Return) {
      if (st.at_entry_frame()) {
        st.feature_sink.push(Feature::output_return(effect.return_value));
        result.status = EmulationResult::Status::Complete;
        break;
      }
      st.return_from_function(effect.return_value);
      continue;
    }
    // Fault
    if (policy.exhausted()) {
      result.status = EmulationResult::Status::GlobalLogExhausted;
    } else {
      result.status = EmulationResult::Status::Fault;
      result.fault = effect.fault;
    }
    break;
  }

  result.signature = std::move(st.feature_sink);
  return result;
}

}  // namespace bmatch
