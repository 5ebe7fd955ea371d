#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bmatch/ir.hpp"
#include "bmatch/signature.hpp"
#include "bmatch/word.hpp"

namespace bmatch {

enum class FaultCode : std::uint8_t { IllegalMemoryAccess, DivideByZero, DecodeError };

struct Fault {
  FaultCode code = FaultCode::DecodeError;
  Word address = 0;  // meaningful for IllegalMemoryAccess
  auto operator<=>(const Fault&) const = default;
};

std::string fault_to_string(const Fault& fault);

struct Frame {
  std::string return_function;
  std::uint32_t return_index = 0;  // index of the call instruction
  std::array<Word, kRegisterCount> saved_regs{};
  Reg dest{};
  bool entered_by_icall = false;
  Word call_target_address = 0;  // resolved address, icall frames only
};

struct MachineState {
  const Program* program = nullptr;
  std::string current_function;
  std::uint32_t pc_index = 0;
  std::array<Word, kRegisterCount> regs{};
  std::unordered_map<Word, std::uint8_t> memory;  // sparse bytes, reads default to 0
  std::vector<Frame> call_stack;
  Signature feature_sink;
  std::uint64_t step_count = 0;

  // Raised while running inside an indirectly-called subtree: features and
  // runtime records are suppressed there, matching the emulator's skip of
  // recorded indirect callees.
  std::uint32_t suppress_depth = 0;

  bool suppressed() const { return suppress_depth > 0; }
  bool at_entry_frame() const { return call_stack.empty(); }

  Word read_reg(Reg r) const { return regs[r.index]; }
  void write_reg(Reg r, Word v) { regs[r.index] = v; }

  // Raw little-endian word access; no region checks.
  Word read_word_raw(Word addr) const;
  void write_word_raw(Word addr, Word value);

  // Pushes a frame and transfers control to callee; missing argument slots
  // are filled with kUnboundArgument, extra arguments are dropped.
  void enter_function(const Function& callee, const std::vector<Word>& args, Reg dest,
                      bool via_icall, Word call_target_address = 0);
  // Pops a frame, restores registers, stores the return value, resumes the
  // caller after the call site.
  void return_from_function(Word value);
};

struct StepEffect {
  enum class Kind : std::uint8_t {
    Continue,
    Branch,
    Call,
    IndirectCall,
    LibCall,
    Return,
    Fault,
  };
  Kind kind = Kind::Continue;
  std::uint32_t branch_target = 0;
  std::string callee;
  Word target_address = 0;
  std::vector<Word> args;
  Reg dest{};
  Word return_value = 0;
  Fault fault{};

  static StepEffect cont() { return {}; }
  static StepEffect branch(std::uint32_t target) {
    StepEffect e;
    e.kind = Kind::Branch;
    e.branch_target = target;
    return e;
  }
  static StepEffect fail(Fault f) {
    StepEffect e;
    e.kind = Kind::Fault;
    e.fault = f;
    return e;
  }
};

// Memory access interposition point: the executor reads memory directly and
// records global reads; the emulator migrates recorded values on first use.
class MemoryPolicy {
 public:
  virtual ~MemoryPolicy() = default;
  // On success, stores the loaded word in *out and returns false; on fault,
  // fills *fault and returns true.
  virtual bool load_word(MachineState& state, Word addr, Word* out, Fault* fault) = 0;
  virtual bool store_word(MachineState& state, Word addr, Word value, Fault* fault) = 0;
};

// Direct access within the three mapped regions; faults outside them.
// on_tracked_read fires for loads from the global and library regions.
class DirectMemoryPolicy : public MemoryPolicy {
 public:
  bool load_word(MachineState& state, Word addr, Word* out, Fault* fault) override;
  bool store_word(MachineState& state, Word addr, Word value, Fault* fault) override;

 protected:
  virtual void on_tracked_read(MachineState& state, Word addr, Word value) {
    (void)state;
    (void)addr;
    (void)value;
  }
};

// Executes one instruction. Register and memory updates, feature emission
// for comparisons and global stores, and pc advancement happen here;
// control transfers (call/icall/libcall/ret/branch) are returned as effects
// for the driver to resolve. A fault leaves registers and memory unchanged.
StepEffect step(MachineState& state, const Instruction& instr, MemoryPolicy& memory);

}  // namespace bmatch
