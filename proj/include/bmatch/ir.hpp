#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmatch/word.hpp"

namespace bmatch {

enum class Opcode : std::uint8_t {
  Const,
  Mov,
  Add,
  Sub,
  Mul,
  Div,
  And,
  Or,
  Xor,
  Shl,
  Shr,
  CmpEq,
  CmpNe,
  CmpLt,
  CmpLe,
  CmpGt,
  CmpGe,
  Load,
  Store,
  Br,
  Jmp,
  Jtab,
  Call,
  Icall,
  Libcall,
  Ret,
};

bool opcode_has_dest(Opcode op);
bool opcode_is_cmp(Opcode op);
bool opcode_is_terminator(Opcode op);  // ret, jmp, jtab, br: no fall-through
const char* opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(const std::string& name);

// Register index 0..15 maps to r0..r15; kSpIndex is sp.
constexpr std::uint8_t kSpIndex = 16;
constexpr std::uint8_t kRegisterCount = 17;
constexpr std::uint8_t kMaxParams = 8;

struct Reg {
  std::uint8_t index = 0;
  bool is_sp() const { return index == kSpIndex; }
  auto operator<=>(const Reg&) const = default;
};

// Second source of arithmetic and comparison opcodes: register or immediate.
struct RegImm {
  bool is_imm = false;
  Reg reg{};
  Word imm = 0;
  static RegImm of_reg(Reg r) { return {false, r, 0}; }
  static RegImm of_imm(Word w) { return {true, {}, w}; }
  auto operator<=>(const RegImm&) const = default;
};

// Memory operand [base(+offset)]; base is a register or a declared global.
struct MemRef {
  bool base_is_global = false;
  Reg base_reg{};
  std::string global_name;
  std::int32_t offset = 0;
  auto operator<=>(const MemRef&) const = default;
};

// Operand of const: a literal word or the address of a global/function.
struct ConstValue {
  bool is_address_of = false;
  Word imm = 0;
  std::string name;
  auto operator<=>(const ConstValue&) const = default;
};

struct Instruction {
  Opcode op = Opcode::Ret;
  Reg dst{};                 // value-producing opcodes
  Reg src1{};                // first source; mov src; ret value; br cond; jtab index; icall target
  RegImm src2{};             // second source of arithmetic/cmp
  ConstValue cval{};         // const
  MemRef mem{};              // load/store
  std::string callee;        // call/libcall
  std::vector<Reg> args;     // call/icall/libcall
  std::string label_a;       // br true target; jmp target
  std::string label_b;       // br false target
  std::uint32_t table_id = 0;  // jtab
  auto operator<=>(const Instruction&) const = default;
};

struct JumpTable {
  std::uint32_t id = 0;
  std::vector<std::string> case_labels;
  std::string default_label;
  auto operator<=>(const JumpTable&) const = default;
};

struct Function {
  std::string name;
  std::uint32_t param_count = 0;
  std::vector<Instruction> body;
  std::map<std::string, std::uint32_t> labels;  // label -> instruction index
  std::vector<JumpTable> jump_tables;
  auto operator<=>(const Function&) const = default;
};

struct GlobalDecl {
  std::string name;
  Word address = 0;
  Word initial_value = 0;
  auto operator<=>(const GlobalDecl&) const = default;
};

enum class LibraryKind : std::uint8_t { Pure, Environment };

struct Program {
  std::map<std::string, Function> functions;
  std::vector<GlobalDecl> globals;  // kept sorted by address
  std::map<std::string, LibraryKind> library_decls;

  const Function* find_function(const std::string& name) const;
  const GlobalDecl* find_global(const std::string& name) const;
  const GlobalDecl* global_at_address(Word addr) const;

  // Synthetic code address of a function (position in name order).
  std::optional<Word> function_address(const std::string& name) const;
  const Function* function_at_address(Word addr) const;

  void sort_globals();

  auto operator<=>(const Program&) const = default;
};

struct Diagnostic {
  std::string function;  // empty for program-level diagnostics
  std::optional<std::uint32_t> instruction_index;
  std::string message;
  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
  std::string to_string() const;
};

// Pure and deterministic; diagnostics ordered by (function, instruction index)
// with program-level entries first.
ValidationReport validate(const Program& program);

}  // namespace bmatch
