#include "bmatch/ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bmatch/builtins.hpp"

namespace bmatch {

bool opcode_has_dest(Opcode op) {
  switch (op) {
    case Opcode::Store:
    case Opcode::Br:
    case Opcode::Jmp:
    case Opcode::Jtab:
    case Opcode::Ret:
      return false;
    default:
      return true;
  }
}

bool opcode_is_cmp(Opcode op) {
  switch (op) {
    case Opcode::CmpEq:
    case Opcode::CmpNe:
    case Opcode::CmpLt:
    case Opcode::CmpLe:
    case Opcode::CmpGt:
    case Opcode::CmpGe:
      return true;
    default:
      return false;
  }
}

bool opcode_is_terminator(Opcode op) {
  switch (op) {
    case Opcode::Br:
    case Opcode::Jmp:
    case Opcode::Jtab:
    case Opcode::Ret:
      return true;
    default:
      return false;
  }
}

namespace {

struct OpcodeNameEntry {
  Opcode op;
  const char* name;
};

constexpr OpcodeNameEntry kOpcodeNames[] = {
    {Opcode::Const, "const"},   {Opcode::Mov, "mov"},       {Opcode::Add, "add"},
    {Opcode::Sub, "sub"},       {Opcode::Mul, "mul"},       {Opcode::Div, "div"},
    {Opcode::And, "and"},       {Opcode::Or, "or"},         {Opcode::Xor, "xor"},
    {Opcode::Shl, "shl"},       {Opcode::Shr, "shr"},       {Opcode::CmpEq, "cmp.eq"},
    {Opcode::CmpNe, "cmp.ne"},  {Opcode::CmpLt, "cmp.lt"},  {Opcode::CmpLe, "cmp.le"},
    {Opcode::CmpGt, "cmp.gt"},  {Opcode::CmpGe, "cmp.ge"},  {Opcode::Load, "load"},
    {Opcode::Store, "store"},   {Opcode::Br, "br"},         {Opcode::Jmp, "jmp"},
    {Opcode::Jtab, "jtab"},     {Opcode::Call, "call"},     {Opcode::Icall, "icall"},
    {Opcode::Libcall, "libcall"}, {Opcode::Ret, "ret"},
};

}  // namespace

const char* opcode_name(Opcode op) {
  for (const auto& e : kOpcodeNames) {
    if (e.op == op) return e.name;
  }
  return "?";
}

std::optional<Opcode> opcode_from_name(const std::string& name) {
  for (const auto& e : kOpcodeNames) {
    if (name == e.name) return e.op;
  }
  return std::nullopt;
}

const Function* Program::find_function(const std::string& name) const {
  auto it = functions.find(name);
  return it == functions.end() ? nullptr : &it->second;
}

const GlobalDecl* Program::find_global(const std::string& name) const {
  for (const auto& g : globals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const GlobalDecl* Program::global_at_address(Word addr) const {
  for (const auto& g : globals) {
    if (g.address == addr) return &g;
  }
  return nullptr;
}

std::optional<Word> Program::function_address(const std::string& name) const {
  Word addr = kCodeRegionBase;
  for (const auto& [fname, fn] : functions) {
    (void)fn;
    if (fname == name) return addr;
    addr += kFunctionAddressStride;
  }
  return std::nullopt;
}

const Function* Program::function_at_address(Word addr) const {
  if (addr < kCodeRegionBase) return nullptr;
  Word off = addr - kCodeRegionBase;
  if (off % kFunctionAddressStride != 0) return nullptr;
  std::size_t index = off / kFunctionAddressStride;
  if (index >= functions.size()) return nullptr;
  auto it = functions.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(index));
  return &it->second;
}

void Program::sort_globals() {
  std::sort(globals.begin(), globals.end(),
            [](const GlobalDecl& a, const GlobalDecl& b) { return a.address < b.address; });
}

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  if (function.empty()) {
    os << "program: " << message;
  } else {
    os << function;
    if (instruction_index) os << "[" << *instruction_index << "]";
    os << ": " << message;
  }
  return os.str();
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& d : diagnostics) os << d.to_string() << "\n";
  return os.str();
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& p) : program_(p) {}

  ValidationReport run() {
    check_globals();
    check_libraries();
    for (const auto& [name, fn] : program_.functions) {
      check_function(name, fn);
    }
    std::stable_sort(report_.diagnostics.begin(), report_.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       if (a.function != b.function) return a.function < b.function;
                       return a.instruction_index.value_or(0) < b.instruction_index.value_or(0);
                     });
    return std::move(report_);
  }

 private:
  void program_diag(const std::string& msg) {
    report_.diagnostics.push_back({"", std::nullopt, msg});
  }

  void fn_diag(const std::string& fn, std::uint32_t index, const std::string& msg) {
    report_.diagnostics.push_back({fn, index, msg});
  }

  void check_globals() {
    std::set<std::string> names;
    std::set<Word> addrs;
    for (const auto& g : program_.globals) {
      if (!names.insert(g.name).second) {
        program_diag("duplicate global name '" + g.name + "'");
      }
      if (!addrs.insert(g.address).second) {
        program_diag("duplicate global address for '" + g.name + "'");
      }
      if (classify_address(g.address) != Region::Global || !word_access_ok(g.address)) {
        program_diag("global '" + g.name + "' address outside the global region");
      }
    }
  }

  void check_libraries() {
    for (const auto& [name, kind] : program_.library_decls) {
      if (kind == LibraryKind::Pure && !pure_builtin_arity(name)) {
        program_diag("unknown pure library function '" + name + "'");
      }
    }
  }

  bool label_ok(const Function& fn, const std::string& label) {
    auto it = fn.labels.find(label);
    return it != fn.labels.end() && it->second < fn.body.size();
  }

  void check_reg(const std::string& fname, std::uint32_t i, Reg r) {
    if (r.index >= kRegisterCount) {
      fn_diag(fname, i, "invalid register index");
    }
  }

  void check_function(const std::string& name, const Function& fn) {
    if (fn.name != name) {
      program_diag("function map key '" + name + "' does not match function name '" + fn.name + "'");
    }
    if (fn.param_count > kMaxParams) {
      fn_diag(name, 0, "param count exceeds 8");
    }
    if (fn.body.empty()) {
      fn_diag(name, 0, "empty function body");
      return;
    }
    for (const auto& [label, index] : fn.labels) {
      if (index >= fn.body.size()) {
        fn_diag(name, static_cast<std::uint32_t>(fn.body.size() - 1),
                "label '" + label + "' points outside the body");
      }
    }
    for (std::uint32_t i = 0; i < fn.jump_tables.size(); ++i) {
      if (fn.jump_tables[i].id != i) {
        fn_diag(name, 0, "non-canonical jump table id");
      }
    }
    if (!opcode_is_terminator(fn.body.back().op)) {
      fn_diag(name, static_cast<std::uint32_t>(fn.body.size() - 1),
              "function may fall off the end (last instruction is not a terminator)");
    }
    for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
      check_instruction(name, fn, i, fn.body[i]);
    }
  }

  void check_instruction(const std::string& fname, const Function& fn, std::uint32_t i,
                         const Instruction& in) {
    if (opcode_has_dest(in.op)) check_reg(fname, i, in.dst);
    switch (in.op) {
      case Opcode::Const:
        if (in.cval.is_address_of && !program_.find_global(in.cval.name) &&
            !program_.find_function(in.cval.name)) {
          fn_diag(fname, i, "unknown symbol '&" + in.cval.name + "'");
        }
        break;
      case Opcode::Mov:
      case Opcode::Ret:
        check_reg(fname, i, in.src1);
        break;
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::Div:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Shl:
      case Opcode::Shr:
      case Opcode::CmpEq:
      case Opcode::CmpNe:
      case Opcode::CmpLt:
      case Opcode::CmpLe:
      case Opcode::CmpGt:
      case Opcode::CmpGe:
        check_reg(fname, i, in.src1);
        if (!in.src2.is_imm) check_reg(fname, i, in.src2.reg);
        break;
      case Opcode::Load:
      case Opcode::Store:
        if (in.op == Opcode::Store) check_reg(fname, i, in.src1);
        if (in.mem.base_is_global) {
          if (!program_.find_global(in.mem.global_name)) {
            fn_diag(fname, i, "unknown global '" + in.mem.global_name + "'");
          }
        } else {
          check_reg(fname, i, in.mem.base_reg);
        }
        break;
      case Opcode::Br:
        check_reg(fname, i, in.src1);
        if (!label_ok(fn, in.label_a)) fn_diag(fname, i, "unresolved label '" + in.label_a + "'");
        if (!label_ok(fn, in.label_b)) fn_diag(fname, i, "unresolved label '" + in.label_b + "'");
        break;
      case Opcode::Jmp:
        if (!label_ok(fn, in.label_a)) fn_diag(fname, i, "unresolved label '" + in.label_a + "'");
        break;
      case Opcode::Jtab: {
        check_reg(fname, i, in.src1);
        if (in.table_id >= fn.jump_tables.size()) {
          fn_diag(fname, i, "unknown jump table");
          break;
        }
        const JumpTable& t = fn.jump_tables[in.table_id];
        for (const auto& lbl : t.case_labels) {
          if (!label_ok(fn, lbl)) fn_diag(fname, i, "unresolved label '" + lbl + "'");
        }
        if (!label_ok(fn, t.default_label)) {
          fn_diag(fname, i, "unresolved label '" + t.default_label + "'");
        }
        break;
      }
      case Opcode::Call: {
        const Function* callee = program_.find_function(in.callee);
        if (!callee) {
          fn_diag(fname, i, "undefined callee '" + in.callee + "'");
        } else if (callee->param_count != in.args.size()) {
          fn_diag(fname, i, "call argument count does not match param count of '" + in.callee + "'");
        }
        for (Reg r : in.args) check_reg(fname, i, r);
        break;
      }
      case Opcode::Icall:
        check_reg(fname, i, in.src1);
        for (Reg r : in.args) check_reg(fname, i, r);
        break;
      case Opcode::Libcall: {
        auto it = program_.library_decls.find(in.callee);
        if (it == program_.library_decls.end()) {
          fn_diag(fname, i, "undeclared library function '" + in.callee + "'");
        } else if (it->second == LibraryKind::Pure) {
          auto arity = pure_builtin_arity(in.callee);
          if (arity && *arity != in.args.size()) {
            fn_diag(fname, i, "libcall argument count does not match '" + in.callee + "'");
          }
        }
        for (Reg r : in.args) check_reg(fname, i, r);
        break;
      }
    }
  }

  const Program& program_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Program& program) { return Validator(program).run(); }

}  // namespace bmatch
