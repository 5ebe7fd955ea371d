#include "bmatch/machine.hpp"

#include "bmatch/text_util.hpp"

namespace bmatch {

std::string fault_to_string(const Fault& fault) {
  switch (fault.code) {
    case FaultCode::IllegalMemoryAccess:
      return "illegal-memory:" + hex_word(fault.address);
    case FaultCode::DivideByZero:
      return "divide-by-zero";
    case FaultCode::DecodeError:
      return "decode-error";
  }
  return "unknown-fault";
}

Word MachineState::read_word_raw(Word addr) const {
  Word v = 0;
  for (int i = 0; i < 4; ++i) {
    auto it = memory.find(addr + static_cast<Word>(i));
    std::uint8_t byte = it == memory.end() ? 0 : it->second;
    v |= static_cast<Word>(byte) << (8 * i);
  }
  return v;
}

void MachineState::write_word_raw(Word addr, Word value) {
  for (int i = 0; i < 4; ++i) {
    memory[addr + static_cast<Word>(i)] = static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF);
  }
}

void MachineState::enter_function(const Function& callee, const std::vector<Word>& args, Reg dest,
                                  bool via_icall, Word call_target_address) {
  Frame frame;
  frame.return_function = current_function;
  frame.return_index = pc_index;
  frame.saved_regs = regs;
  frame.dest = dest;
  frame.entered_by_icall = via_icall;
  frame.call_target_address = call_target_address;
  call_stack.push_back(std::move(frame));

  Word sp = regs[kSpIndex];
  regs.fill(0);
  regs[kSpIndex] = sp;
  for (std::uint32_t i = 0; i < callee.param_count; ++i) {
    regs[i] = i < args.size() ? args[i] : kUnboundArgument;
  }
  current_function = callee.name;
  pc_index = 0;
  if (via_icall) ++suppress_depth;
}

void MachineState::return_from_function(Word value) {
  Frame frame = std::move(call_stack.back());
  call_stack.pop_back();
  regs = frame.saved_regs;
  current_function = frame.return_function;
  pc_index = frame.return_index + 1;
  write_reg(frame.dest, value);
  if (frame.entered_by_icall) --suppress_depth;
}

bool DirectMemoryPolicy::load_word(MachineState& state, Word addr, Word* out, Fault* fault) {
  if (!word_access_ok(addr)) {
    *fault = {FaultCode::IllegalMemoryAccess, addr};
    return true;
  }
  *out = state.read_word_raw(addr);
  Region r = classify_address(addr);
  if (r == Region::Global || r == Region::Library) {
    on_tracked_read(state, addr, *out);
  }
  return false;
}

bool DirectMemoryPolicy::store_word(MachineState& state, Word addr, Word value, Fault* fault) {
  if (!word_access_ok(addr)) {
    *fault = {FaultCode::IllegalMemoryAccess, addr};
    return true;
  }
  state.write_word_raw(addr, value);
  return false;
}

namespace {

Word eval_src2(const MachineState& state, const RegImm& s) {
  return s.is_imm ? s.imm : state.read_reg(s.reg);
}

bool resolve_mem_address(const MachineState& state, const MemRef& m, Word* out) {
  Word base;
  if (m.base_is_global) {
    const GlobalDecl* g = state.program->find_global(m.global_name);
    if (!g) return false;
    base = g->address;
  } else {
    base = state.read_reg(m.base_reg);
  }
  *out = base + static_cast<Word>(m.offset);
  return true;
}

std::vector<Word> gather_args(const MachineState& state, const Instruction& in) {
  std::vector<Word> args;
  args.reserve(in.args.size());
  for (Reg r : in.args) args.push_back(state.read_reg(r));
  return args;
}

}  // namespace

StepEffect step(MachineState& state, const Instruction& in, MemoryPolicy& memory) {
  ++state.step_count;
  Fault fault;
  switch (in.op) {
    case Opcode::Const: {
      Word v;
      if (in.cval.is_address_of) {
        if (const GlobalDecl* g = state.program->find_global(in.cval.name)) {
          v = g->address;
        } else if (auto addr = state.program->function_address(in.cval.name)) {
          v = *addr;
        } else {
          return StepEffect::fail({FaultCode::DecodeError, 0});
        }
      } else {
        v = in.cval.imm;
      }
      state.write_reg(in.dst, v);
      ++state.pc_index;
      return StepEffect::cont();
    }
    case Opcode::Mov:
      state.write_reg(in.dst, state.read_reg(in.src1));
      ++state.pc_index;
      return StepEffect::cont();
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Div:
    case Opcode::And:
    case Opcode::Or:
    case Opcode::Xor:
    case Opcode::Shl:
    case Opcode::Shr: {
      Word a = state.read_reg(in.src1);
      Word b = eval_src2(state, in.src2);
      Word v = 0;
      switch (in.op) {
        case Opcode::Add: v = a + b; break;
        case Opcode::Sub: v = a - b; break;
        case Opcode::Mul: v = a * b; break;
        case Opcode::Div: {
          if (b == 0) return StepEffect::fail({FaultCode::DivideByZero, 0});
          // INT_MIN / -1 wraps to INT_MIN.
          if (a == 0x8000'0000u && b == 0xFFFF'FFFFu) {
            v = a;
          } else {
            v = static_cast<Word>(static_cast<SWord>(a) / static_cast<SWord>(b));
          }
          break;
        }
        case Opcode::And: v = a & b; break;
        case Opcode::Or: v = a | b; break;
        case Opcode::Xor: v = a ^ b; break;
        case Opcode::Shl: v = a << (b & 31u); break;
        case Opcode::Shr: v = a >> (b & 31u); break;
        default: break;
      }
      state.write_reg(in.dst, v);
      ++state.pc_index;
      return StepEffect::cont();
    }
    case Opcode::CmpEq:
    case Opcode::CmpNe:
    case Opcode::CmpLt:
    case Opcode::CmpLe:
    case Opcode::CmpGt:
    case Opcode::CmpGe: {
      Word a = state.read_reg(in.src1);
      Word b = eval_src2(state, in.src2);
      auto sa = static_cast<SWord>(a);
      auto sb = static_cast<SWord>(b);
      bool r = false;
      switch (in.op) {
        case Opcode::CmpEq: r = a == b; break;
        case Opcode::CmpNe: r = a != b; break;
        case Opcode::CmpLt: r = sa < sb; break;
        case Opcode::CmpLe: r = sa <= sb; break;
        case Opcode::CmpGt: r = sa > sb; break;
        case Opcode::CmpGe: r = sa >= sb; break;
        default: break;
      }
      if (!state.suppressed()) state.feature_sink.push(Feature::comparison(a, b));
      state.write_reg(in.dst, r ? 1u : 0u);
      ++state.pc_index;
      return StepEffect::cont();
    }
    case Opcode::Load: {
      Word addr;
      if (!resolve_mem_address(state, in.mem, &addr)) {
        return StepEffect::fail({FaultCode::DecodeError, 0});
      }
      Word v;
      if (memory.load_word(state, addr, &v, &fault)) return StepEffect::fail(fault);
      state.write_reg(in.dst, v);
      ++state.pc_index;
      return StepEffect::cont();
    }
    case Opcode::Store: {
      Word addr;
      if (!resolve_mem_address(state, in.mem, &addr)) {
        return StepEffect::fail({FaultCode::DecodeError, 0});
      }
      Word v = state.read_reg(in.src1);
      if (memory.store_word(state, addr, v, &fault)) return StepEffect::fail(fault);
      if (classify_address(addr) == Region::Global && !state.suppressed()) {
        state.feature_sink.push(Feature::output_global(addr, v));
      }
      ++state.pc_index;
      return StepEffect::cont();
    }
    case Opcode::Br: {
      const Function* fn = state.program->find_function(state.current_function);
      const std::string& target = state.read_reg(in.src1) != 0 ? in.label_a : in.label_b;
      auto it = fn->labels.find(target);
      if (it == fn->labels.end()) return StepEffect::fail({FaultCode::DecodeError, 0});
      return StepEffect::branch(it->second);
    }
    case Opcode::Jmp: {
      const Function* fn = state.program->find_function(state.current_function);
      auto it = fn->labels.find(in.label_a);
      if (it == fn->labels.end()) return StepEffect::fail({FaultCode::DecodeError, 0});
      return StepEffect::branch(it->second);
    }
    case Opcode::Jtab: {
      const Function* fn = state.program->find_function(state.current_function);
      if (in.table_id >= fn->jump_tables.size()) {
        return StepEffect::fail({FaultCode::DecodeError, 0});
      }
      const JumpTable& table = fn->jump_tables[in.table_id];
      Word index = state.read_reg(in.src1);
      const std::string& target = index < table.case_labels.size()
                                      ? table.case_labels[index]
                                      : table.default_label;
      auto it = fn->labels.find(target);
      if (it == fn->labels.end()) return StepEffect::fail({FaultCode::DecodeError, 0});
      return StepEffect::branch(it->second);
    }
    case Opcode::Call: {
      StepEffect e;
      e.kind = StepEffect::Kind::Call;
      e.callee = in.callee;
      e.args = gather_args(state, in);
      e.dest = in.dst;
      return e;
    }
    case Opcode::Icall: {
      StepEffect e;
      e.kind = StepEffect::Kind::IndirectCall;
      e.target_address = state.read_reg(in.src1);
      e.args = gather_args(state, in);
      e.dest = in.dst;
      return e;
    }
    case Opcode::Libcall: {
      StepEffect e;
      e.kind = StepEffect::Kind::LibCall;
      e.callee = in.callee;
      e.args = gather_args(state, in);
      e.dest = in.dst;
      return e;
    }
    case Opcode::Ret: {
      StepEffect e;
      e.kind = StepEffect::Kind::Return;
      e.return_value = state.read_reg(in.src1);
      return e;
    }
  }
  return StepEffect::fail({FaultCode::DecodeError, 0});
}

}  // namespace bmatch
