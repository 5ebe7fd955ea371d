#include "bmatch/executor.hpp"

#include "bmatch/builtins.hpp"
#include "bmatch/text_util.hpp"

namespace bmatch {

std::string execution_status_to_string(const ExecutionResult& result) {
  switch (result.status) {
    case ExecutionResult::Status::Complete:
      return "complete";
    case ExecutionResult::Status::Fault:
      return "fault:" + fault_to_string(result.fault);
    case ExecutionResult::Status::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

namespace {

class RecordingPolicy : public DirectMemoryPolicy {
 public:
  explicit RecordingPolicy(RuntimeRecord* record) : record_(record) {}

 protected:
  void on_tracked_read(MachineState& state, Word addr, Word value) override {
    if (!state.suppressed()) record_->global_reads.push_back({addr, value});
  }

 private:
  RuntimeRecord* record_;
};

}  // namespace

ExecutionResult execute(const Program& program, const std::string& function,
                        const TestInput& input, std::uint64_t budget) {
  const Function* entry = program.find_function(function);
  if (!entry) throw ConfigError("unknown function '" + function + "'");
  if (input.args.size() != entry->param_count) {
    throw ConfigError("argument count " + std::to_string(input.args.size()) +
                      " does not match param count " + std::to_string(entry->param_count) +
                      " of '" + function + "'");
  }
  for (const auto& [addr, value] : input.global_overrides) {
    (void)value;
    if (!program.global_at_address(addr)) {
      throw ConfigError("global override address " + hex_word(addr) +
                        " does not name a declared global");
    }
  }
  for (const auto& [name, script] : input.library_script) {
    (void)script;
    auto it = program.library_decls.find(name);
    if (it == program.library_decls.end() || it->second != LibraryKind::Environment) {
      throw ConfigError("library script entry '" + name +
                        "' is not a declared environment-dependent library function");
    }
  }

  ExecutionResult result;
  MachineState st;
  st.program = &program;
  st.current_function = function;
  st.regs.fill(0);
  st.regs[kSpIndex] = kEntryStackPointer;
  for (std::size_t i = 0; i < input.args.size(); ++i) {
    st.regs[i] = input.args[i];
    result.record.arg_values.push_back(input.args[i]);
  }
  for (const auto& g : program.globals) {
    st.write_word_raw(g.address, g.initial_value);
  }
  for (const auto& [addr, value] : input.global_overrides) {
    st.write_word_raw(addr, value);
  }

  RecordingPolicy policy(&result.record);
  std::map<std::string, std::size_t> script_cursor;

  while (true) {
    if (st.step_count >= budget) {
      result.status = ExecutionResult::Status::BudgetExhausted;
      break;
    }
    const Function* fn = program.find_function(st.current_function);
    if (!fn || st.pc_index >= fn->body.size()) {
      result.status = ExecutionResult::Status::Fault;
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
      const Function* callee = program.find_function(effect.callee);
      if (!callee) {
        result.status = ExecutionResult::Status::Fault;
        result.fault = {FaultCode::DecodeError, 0};
        break;
      }
      st.enter_function(*callee, effect.args, effect.dest, false);
      continue;
    }
    if (effect.kind == StepEffect::Kind::IndirectCall) {
      const Function* callee = program.function_at_address(effect.target_address);
      if (!callee) {
        result.status = ExecutionResult::Status::Fault;
        result.fault = {FaultCode::IllegalMemoryAccess, effect.target_address};
        break;
      }
      st.enter_function(*callee, effect.args, effect.dest, true, effect.target_address);
      continue;
    }
    if (effect.kind == StepEffect::Kind::LibCall) {
      Word value = 0;
      if (program.library_decls.at(effect.callee) == LibraryKind::Pure) {
        value = eval_pure_builtin(effect.callee, effect.args);
      } else {
        auto it = input.library_script.find(effect.callee);
        std::size_t& cursor = script_cursor[effect.callee];
        if (it == input.library_script.end() || cursor >= it->second.size()) {
          throw ConfigError("library script exhausted for '" + effect.callee + "'");
        }
        value = it->second[cursor++];
      }
      if (!st.suppressed()) {
        st.feature_sink.push(Feature::lib_call(effect.callee));
        result.record.library_results.push_back({effect.callee, value});
      }
      st.write_reg(effect.dest, value);
      ++st.pc_index;
      continue;
    }
    if (effect.kind == StepEffect::Kind::Return) {
      if (st.at_entry_frame()) {
        st.feature_sink.push(Feature::output_return(effect.return_value));
        result.status = ExecutionResult::Status::Complete;
        break;
      }
      const Frame& frame = st.call_stack.back();
      bool via_icall = frame.entered_by_icall;
      Word target = frame.call_target_address;
      std::string callee_name = st.current_function;
      st.return_from_function(effect.return_value);
      if (!st.suppressed()) {
        if (via_icall) {
          result.record.indirect_targets.push_back(
              {static_cast<std::uint32_t>(result.record.indirect_targets.size()), target,
               effect.return_value});
        } else {
          result.record.subroutine_returns.push_back({callee_name, effect.return_value});
        }
      }
      continue;
    }
    // Fault
    result.status = ExecutionResult::Status::Fault;
    result.fault = effect.fault;
    break;
  }

  result.signature = std::move(st.feature_sink);
  return result;
}

}  // namespace bmatch
