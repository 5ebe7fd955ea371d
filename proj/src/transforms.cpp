#include "bmatch/transforms.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "bmatch/ir_text.hpp"

namespace bmatch {

std::optional<TransformKind> transform_kind_from_name(const std::string& name) {
  if (name == "rename") return TransformKind::Rename;
  if (name == "reorder") return TransformKind::Reorder;
  if (name == "sub") return TransformKind::Sub;
  if (name == "bcf") return TransformKind::Bcf;
  if (name == "fla") return TransformKind::Fla;
  if (name == "inline_callee") return TransformKind::InlineCallee;
  return std::nullopt;
}

const char* transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Rename: return "rename";
    case TransformKind::Reorder: return "reorder";
    case TransformKind::Sub: return "sub";
    case TransformKind::Bcf: return "bcf";
    case TransformKind::Fla: return "fla";
    case TransformKind::InlineCallee: return "inline_callee";
  }
  return "?";
}

namespace {

struct Block {
  std::uint32_t start = 0;
  std::uint32_t end = 0;  // exclusive
  bool falls_through = false;
};

std::vector<Block> split_blocks(const Function& fn) {
  std::set<std::uint32_t> leaders;
  leaders.insert(0);
  for (const auto& [label, index] : fn.labels) {
    (void)label;
    leaders.insert(index);
  }
  for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
    if (opcode_is_terminator(fn.body[i].op) && i + 1 < fn.body.size()) {
      leaders.insert(i + 1);
    }
  }
  std::vector<Block> blocks;
  for (auto it = leaders.begin(); it != leaders.end(); ++it) {
    auto next = std::next(it);
    Block b;
    b.start = *it;
    b.end = next == leaders.end() ? static_cast<std::uint32_t>(fn.body.size()) : *next;
    b.falls_through = !opcode_is_terminator(fn.body[b.end - 1].op);
    blocks.push_back(b);
  }
  return blocks;
}

std::vector<std::string> labels_at(const Function& fn, std::uint32_t index) {
  std::vector<std::string> out;
  for (const auto& [label, idx] : fn.labels) {
    if (idx == index) out.push_back(label);
  }
  return out;
}

class LabelAllocator {
 public:
  explicit LabelAllocator(const Function& fn) {
    for (const auto& [label, idx] : fn.labels) {
      (void)idx;
      used_.insert(label);
    }
  }
  std::string fresh(const std::string& hint) {
    while (true) {
      std::string name = hint + std::to_string(counter_++);
      if (used_.insert(name).second) return name;
    }
  }

 private:
  std::set<std::string> used_;
  unsigned counter_ = 0;
};

void note_reg(std::array<bool, kRegisterCount>& used, Reg r) { used[r.index] = true; }

std::array<bool, kRegisterCount> used_registers(const Function& fn) {
  std::array<bool, kRegisterCount> used{};
  used[kSpIndex] = true;
  for (std::uint32_t i = 0; i < fn.param_count; ++i) used[i] = true;
  for (const auto& in : fn.body) {
    if (opcode_has_dest(in.op)) note_reg(used, in.dst);
    switch (in.op) {
      case Opcode::Mov:
      case Opcode::Ret:
      case Opcode::Br:
      case Opcode::Jtab:
      case Opcode::Icall:
        note_reg(used, in.src1);
        break;
      case Opcode::Store:
        note_reg(used, in.src1);
        break;
      default:
        break;
    }
    if (opcode_is_cmp(in.op) || (in.op >= Opcode::Add && in.op <= Opcode::Shr)) {
      note_reg(used, in.src1);
      if (!in.src2.is_imm) note_reg(used, in.src2.reg);
    }
    if ((in.op == Opcode::Load || in.op == Opcode::Store) && !in.mem.base_is_global) {
      note_reg(used, in.mem.base_reg);
    }
    for (Reg r : in.args) note_reg(used, r);
  }
  return used;
}

std::vector<Reg> free_registers(const Function& fn) {
  auto used = used_registers(fn);
  std::vector<Reg> free;
  for (std::uint8_t i = 0; i < 16; ++i) {
    if (!used[i]) free.push_back(Reg{i});
  }
  return free;
}

// Rebuilds the table list so each jtab instruction owns one table, ids
// dense in body order. Shared tables are duplicated.
void canonicalize_tables(Function& fn) {
  std::vector<JumpTable> old_tables = fn.jump_tables;
  std::vector<JumpTable> new_tables;
  for (auto& in : fn.body) {
    if (in.op != Opcode::Jtab) continue;
    JumpTable t = old_tables.at(in.table_id);
    t.id = static_cast<std::uint32_t>(new_tables.size());
    in.table_id = t.id;
    new_tables.push_back(std::move(t));
  }
  fn.jump_tables = std::move(new_tables);
}

void rename_registers(Function& fn, std::mt19937_64& rng) {
  std::array<std::uint8_t, kRegisterCount> map{};
  for (std::uint8_t i = 0; i < kRegisterCount; ++i) map[i] = i;
  std::vector<std::uint8_t> candidates;
  for (std::uint8_t i = static_cast<std::uint8_t>(fn.param_count); i < 16; ++i) {
    candidates.push_back(i);
  }
  std::vector<std::uint8_t> shuffled = candidates;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(shuffled[i - 1], shuffled[j]);
  }
  if (shuffled == candidates && candidates.size() >= 2) {
    std::swap(shuffled[0], shuffled[1]);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) map[candidates[i]] = shuffled[i];

  auto remap = [&](Reg& r) { r.index = map[r.index]; };
  for (auto& in : fn.body) {
    if (opcode_has_dest(in.op)) remap(in.dst);
    remap(in.src1);
    if (!in.src2.is_imm) remap(in.src2.reg);
    if (!in.mem.base_is_global) remap(in.mem.base_reg);
    for (Reg& r : in.args) remap(r);
  }
}

void reorder_blocks(Function& fn, std::mt19937_64& rng) {
  std::vector<Block> blocks = split_blocks(fn);
  if (blocks.size() < 2) return;

  LabelAllocator alloc(fn);
  // Every non-entry block needs a label; falling blocks get explicit jumps.
  std::vector<std::vector<std::string>> block_labels(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    block_labels[b] = labels_at(fn, blocks[b].start);
  }
  std::vector<std::string> entry_label_of(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (block_labels[b].empty()) {
      std::string fresh = alloc.fresh("t");
      block_labels[b].push_back(fresh);
      entry_label_of[b] = fresh;
    } else {
      entry_label_of[b] = block_labels[b].front();
    }
  }

  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 2; --i) {  // keep entry block first
    std::size_t j = 1 + static_cast<std::size_t>(rng() % (i - 1));
    std::swap(order[i - 1], order[j]);
  }

  Function out = fn;
  out.body.clear();
  out.labels.clear();
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    std::size_t b = order[pos];
    std::uint32_t here = static_cast<std::uint32_t>(out.body.size());
    for (const auto& label : block_labels[b]) out.labels.emplace(label, here);
    for (std::uint32_t i = blocks[b].start; i < blocks[b].end; ++i) {
      out.body.push_back(fn.body[i]);
    }
    if (blocks[b].falls_through) {
      Instruction jmp;
      jmp.op = Opcode::Jmp;
      jmp.label_a = entry_label_of[b + 1];  // original fall-through successor
      out.body.push_back(jmp);
    }
  }
  canonicalize_tables(out);
  fn = std::move(out);
}

void substitute_instructions(Function& fn, std::mt19937_64& rng) {
  std::vector<Reg> free = free_registers(fn);
  Function out = fn;
  out.body.clear();
  out.labels.clear();
  std::vector<std::uint32_t> new_index(fn.body.size(), 0);

  for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
    new_index[i] = static_cast<std::uint32_t>(out.body.size());
    Instruction in = fn.body[i];
    bool rewrite = (rng() % 10) < 7;
    if (rewrite && in.op == Opcode::Add && in.src2.is_imm) {
      // a + c  ->  a - (0 - c)
      in.op = Opcode::Sub;
      in.src2.imm = 0u - in.src2.imm;
      out.body.push_back(in);
      continue;
    }
    if (rewrite && in.op == Opcode::Add && !in.src2.is_imm && !free.empty()) {
      // a + b  ->  a - (0 - b)
      Reg t = free[rng() % free.size()];
      Instruction zero;
      zero.op = Opcode::Const;
      zero.dst = t;
      Instruction neg;
      neg.op = Opcode::Sub;
      neg.dst = t;
      neg.src1 = t;
      neg.src2 = in.src2;
      Instruction sub;
      sub.op = Opcode::Sub;
      sub.dst = in.dst;
      sub.src1 = in.src1;
      sub.src2 = RegImm::of_reg(t);
      out.body.push_back(zero);
      out.body.push_back(neg);
      out.body.push_back(sub);
      continue;
    }
    if (rewrite && in.op == Opcode::Sub && in.src2.is_imm) {
      // a - c  ->  a + (0 - c)
      in.op = Opcode::Add;
      in.src2.imm = 0u - in.src2.imm;
      out.body.push_back(in);
      continue;
    }
    if (rewrite && in.op == Opcode::Mul && in.src2.is_imm && in.src2.imm != 0 &&
        (in.src2.imm & (in.src2.imm - 1)) == 0) {
      // a * 2^k  ->  a << k
      Word k = 0;
      while ((1u << k) != in.src2.imm) ++k;
      in.op = Opcode::Shl;
      in.src2.imm = k;
      out.body.push_back(in);
      continue;
    }
    if (rewrite && opcode_is_cmp(in.op) && !in.src2.is_imm) {
      // Swap operands, mirroring the predicate; canonical comparison
      // features are unchanged.
      Opcode mirrored = in.op;
      switch (in.op) {
        case Opcode::CmpLt: mirrored = Opcode::CmpGt; break;
        case Opcode::CmpGt: mirrored = Opcode::CmpLt; break;
        case Opcode::CmpLe: mirrored = Opcode::CmpGe; break;
        case Opcode::CmpGe: mirrored = Opcode::CmpLe; break;
        default: break;  // eq/ne swap symmetrically
      }
      Reg a = in.src1;
      Reg b = in.src2.reg;
      in.op = mirrored;
      in.src1 = b;
      in.src2 = RegImm::of_reg(a);
      out.body.push_back(in);
      continue;
    }
    out.body.push_back(in);
  }

  for (const auto& [label, index] : fn.labels) {
    out.labels.emplace(label, new_index[index]);
  }
  canonicalize_tables(out);
  fn = std::move(out);
}

void bogus_control_flow(Function& fn, const Program& program, std::mt19937_64& rng) {
  std::vector<Reg> free = free_registers(fn);
  if (free.size() < 2) return;
  Reg t1 = free[0];
  Reg t2 = free[1];

  std::vector<Block> blocks = split_blocks(fn);
  std::vector<bool> wrap(blocks.size(), false);
  bool any = false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    wrap[b] = (rng() % 2) == 0;
    any = any || wrap[b];
  }
  if (!any) wrap[rng() % blocks.size()] = true;

  LabelAllocator alloc(fn);
  std::vector<std::vector<std::string>> block_labels(blocks.size());
  std::vector<std::string> entry_label_of(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    block_labels[b] = labels_at(fn, blocks[b].start);
    if (block_labels[b].empty()) {
      std::string fresh = alloc.fresh("t");
      block_labels[b].push_back(fresh);
    }
    entry_label_of[b] = block_labels[b].front();
  }

  struct Clone {
    std::string label;
    std::size_t block;
    std::optional<std::string> fallthrough_target;
  };
  std::vector<Clone> clones;

  Function out = fn;
  out.body.clear();
  out.labels.clear();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::uint32_t here = static_cast<std::uint32_t>(out.body.size());
    for (const auto& label : block_labels[b]) out.labels.emplace(label, here);
    if (wrap[b]) {
      std::string real = alloc.fresh("t");
      std::string fake = alloc.fresh("t");
      if (!program.globals.empty()) {
        const GlobalDecl& g = program.globals[rng() % program.globals.size()];
        Instruction l1;
        l1.op = Opcode::Load;
        l1.dst = t1;
        l1.mem.base_is_global = true;
        l1.mem.global_name = g.name;
        Instruction l2 = l1;
        l2.dst = t2;
        out.body.push_back(l1);
        out.body.push_back(l2);
      } else {
        Word c = static_cast<Word>(rng());
        Instruction c1;
        c1.op = Opcode::Const;
        c1.dst = t1;
        c1.cval.imm = c;
        Instruction c2 = c1;
        c2.dst = t2;
        out.body.push_back(c1);
        out.body.push_back(c2);
      }
      Instruction cmp;
      cmp.op = Opcode::CmpEq;
      cmp.dst = t1;
      cmp.src1 = t1;
      cmp.src2 = RegImm::of_reg(t2);
      out.body.push_back(cmp);
      Instruction br;
      br.op = Opcode::Br;
      br.src1 = t1;
      br.label_a = real;
      br.label_b = fake;
      out.body.push_back(br);
      out.labels.emplace(real, static_cast<std::uint32_t>(out.body.size()));
      clones.push_back({fake, b,
                        blocks[b].falls_through
                            ? std::optional<std::string>(entry_label_of[b + 1])
                            : std::nullopt});
    }
    for (std::uint32_t i = blocks[b].start; i < blocks[b].end; ++i) {
      out.body.push_back(fn.body[i]);
    }
  }

  // Never-taken clone blocks, appended past the last real block. Input
  // programs cannot fall off the end, so control never reaches them.
  for (const auto& clone : clones) {
    out.labels.emplace(clone.label, static_cast<std::uint32_t>(out.body.size()));
    for (std::uint32_t i = blocks[clone.block].start; i < blocks[clone.block].end; ++i) {
      out.body.push_back(fn.body[i]);
    }
    if (clone.fallthrough_target) {
      Instruction jmp;
      jmp.op = Opcode::Jmp;
      jmp.label_a = *clone.fallthrough_target;
      out.body.push_back(jmp);
    }
  }
  canonicalize_tables(out);
  fn = std::move(out);
}

void flatten_control_flow(Function& fn, std::mt19937_64& rng) {
  for (const auto& in : fn.body) {
    if (in.op == Opcode::Jtab) {
      throw TransformError(TransformError::Code::UnsupportedShape,
                           "fla does not support jtab-bearing functions");
    }
  }
  std::vector<Reg> free = free_registers(fn);
  if (free.size() < 2) {
    throw TransformError(TransformError::Code::UnsupportedShape,
                         "fla needs two unused registers");
  }
  Reg state_reg = free[0];
  Reg pred_reg = free[1];

  std::vector<Block> blocks = split_blocks(fn);
  LabelAllocator alloc(fn);

  std::vector<std::string> entry_label_of(blocks.size());
  std::vector<std::vector<std::string>> block_labels(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    block_labels[b] = labels_at(fn, blocks[b].start);
    if (block_labels[b].empty()) block_labels[b].push_back(alloc.fresh("t"));
    entry_label_of[b] = block_labels[b].front();
  }

  std::set<Word> seen_states;
  std::vector<Word> state_of(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Word s;
    do {
      s = static_cast<Word>(rng());
    } while (!seen_states.insert(s).second);
    state_of[b] = s;
  }

  auto block_of_label = [&](const std::string& label) -> std::size_t {
    std::uint32_t index = fn.labels.at(label);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].start == index) return b;
    }
    return 0;  // labels are always block leaders
  };

  Function out = fn;
  out.body.clear();
  out.labels.clear();
  out.jump_tables.clear();

  const std::string dispatch = alloc.fresh("dispatch");

  auto set_state_and_dispatch = [&](std::size_t target_block) {
    Instruction set;
    set.op = Opcode::Const;
    set.dst = state_reg;
    set.cval.imm = state_of[target_block];
    out.body.push_back(set);
    Instruction jmp;
    jmp.op = Opcode::Jmp;
    jmp.label_a = dispatch;
    out.body.push_back(jmp);
  };

  Instruction init;
  init.op = Opcode::Const;
  init.dst = state_reg;
  init.cval.imm = state_of[0];
  out.body.push_back(init);

  // Dispatcher: one cmp.eq per block, scanned in order each hop.
  out.labels.emplace(dispatch, static_cast<std::uint32_t>(out.body.size()));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::string next_check = b + 1 < blocks.size() ? alloc.fresh("d") : dispatch;
    Instruction cmp;
    cmp.op = Opcode::CmpEq;
    cmp.dst = pred_reg;
    cmp.src1 = state_reg;
    cmp.src2 = RegImm::of_imm(state_of[b]);
    out.body.push_back(cmp);
    Instruction br;
    br.op = Opcode::Br;
    br.src1 = pred_reg;
    br.label_a = entry_label_of[b];
    br.label_b = next_check;
    out.body.push_back(br);
    if (b + 1 < blocks.size()) {
      out.labels.emplace(next_check, static_cast<std::uint32_t>(out.body.size()));
    }
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::uint32_t here = static_cast<std::uint32_t>(out.body.size());
    for (const auto& label : block_labels[b]) out.labels.emplace(label, here);
    std::uint32_t last = blocks[b].end - 1;
    for (std::uint32_t i = blocks[b].start; i < blocks[b].end; ++i) {
      const Instruction& in = fn.body[i];
      if (i == last && in.op == Opcode::Jmp) {
        set_state_and_dispatch(block_of_label(in.label_a));
      } else if (i == last && in.op == Opcode::Br) {
        std::string set_true = alloc.fresh("t");
        std::string set_false = alloc.fresh("t");
        Instruction br = in;
        br.label_a = set_true;
        br.label_b = set_false;
        out.body.push_back(br);
        out.labels.emplace(set_true, static_cast<std::uint32_t>(out.body.size()));
        set_state_and_dispatch(block_of_label(in.label_a));
        out.labels.emplace(set_false, static_cast<std::uint32_t>(out.body.size()));
        set_state_and_dispatch(block_of_label(in.label_b));
      } else {
        out.body.push_back(in);
      }
    }
    if (blocks[b].falls_through) {
      set_state_and_dispatch(b + 1);
    }
  }
  canonicalize_tables(out);
  fn = std::move(out);
}

void inline_one_callee(Function& fn, const Program& program, std::mt19937_64& rng) {
  std::vector<std::uint32_t> sites;
  for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
    if (fn.body[i].op == Opcode::Call) sites.push_back(i);
  }
  if (sites.empty()) {
    throw TransformError(TransformError::Code::NoCallsite,
                         "inline_callee: function has no direct user-defined callsite");
  }
  std::uint32_t site = sites[rng() % sites.size()];
  const Instruction& call = fn.body[site];
  const Function& callee = *program.find_function(call.callee);

  LabelAllocator alloc(fn);
  std::unordered_map<std::string, std::string> label_map;
  for (const auto& [label, idx] : callee.labels) {
    (void)idx;
    label_map.emplace(label, alloc.fresh("in"));
  }
  std::string exit_label = alloc.fresh("in");

  // Frame layout below the caller's sp: 16 saved registers then one return
  // value slot. Stack traffic emits no features, so the spliced function's
  // signature is unchanged.
  constexpr std::int32_t kFrameSize = 17 * 4;
  constexpr std::int32_t kRetSlot = 16 * 4;

  Function out = fn;
  out.body.clear();
  out.labels.clear();
  std::vector<std::uint32_t> new_index(fn.body.size() + 1, 0);
  std::vector<JumpTable> tables = fn.jump_tables;

  auto mem_at = [](std::int32_t offset) {
    MemRef m;
    m.base_reg = Reg{kSpIndex};
    m.offset = offset;
    return m;
  };

  for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
    new_index[i] = static_cast<std::uint32_t>(out.body.size());
    if (i != site) {
      out.body.push_back(fn.body[i]);
      continue;
    }

    // Prologue: allocate the spill frame and save r0..r15.
    Instruction adj;
    adj.op = Opcode::Sub;
    adj.dst = Reg{kSpIndex};
    adj.src1 = Reg{kSpIndex};
    adj.src2 = RegImm::of_imm(static_cast<Word>(kFrameSize));
    out.body.push_back(adj);
    for (std::uint8_t r = 0; r < 16; ++r) {
      Instruction st;
      st.op = Opcode::Store;
      st.mem = mem_at(r * 4);
      st.src1 = Reg{r};
      out.body.push_back(st);
    }
    // Bind arguments from the saved copies, then zero the rest to match
    // fresh-frame call semantics. An sp argument is rebuilt from the
    // adjusted pointer instead of a spill slot.
    for (std::size_t a = 0; a < call.args.size(); ++a) {
      Reg dst{static_cast<std::uint8_t>(a)};
      if (call.args[a].is_sp()) {
        Instruction mv;
        mv.op = Opcode::Mov;
        mv.dst = dst;
        mv.src1 = Reg{kSpIndex};
        out.body.push_back(mv);
        Instruction fix;
        fix.op = Opcode::Add;
        fix.dst = dst;
        fix.src1 = dst;
        fix.src2 = RegImm::of_imm(static_cast<Word>(kFrameSize));
        out.body.push_back(fix);
        continue;
      }
      Instruction ld;
      ld.op = Opcode::Load;
      ld.dst = dst;
      ld.mem = mem_at(call.args[a].index * 4);
      out.body.push_back(ld);
    }
    for (std::uint8_t r = static_cast<std::uint8_t>(call.args.size()); r < 16; ++r) {
      Instruction z;
      z.op = Opcode::Const;
      z.dst = Reg{r};
      out.body.push_back(z);
    }

    // Spliced callee body with freshened labels; rets become stores to the
    // return slot plus a jump to the epilogue.
    std::vector<std::uint32_t> callee_index(callee.body.size(), 0);
    std::uint32_t splice_base = static_cast<std::uint32_t>(out.body.size());
    for (std::uint32_t c = 0; c < callee.body.size(); ++c) {
      callee_index[c] = static_cast<std::uint32_t>(out.body.size());
      Instruction in = callee.body[c];
      if (in.op == Opcode::Ret) {
        Instruction st;
        st.op = Opcode::Store;
        st.mem = mem_at(kRetSlot);
        st.src1 = in.src1;
        out.body.push_back(st);
        Instruction jmp;
        jmp.op = Opcode::Jmp;
        jmp.label_a = exit_label;
        out.body.push_back(jmp);
        continue;
      }
      if (in.op == Opcode::Br) {
        in.label_a = label_map.at(in.label_a);
        in.label_b = label_map.at(in.label_b);
      } else if (in.op == Opcode::Jmp) {
        in.label_a = label_map.at(in.label_a);
      } else if (in.op == Opcode::Jtab) {
        JumpTable t = callee.jump_tables.at(in.table_id);
        for (auto& lbl : t.case_labels) lbl = label_map.at(lbl);
        t.default_label = label_map.at(t.default_label);
        t.id = static_cast<std::uint32_t>(tables.size());
        in.table_id = t.id;
        tables.push_back(std::move(t));
      }
      out.body.push_back(in);
    }
    (void)splice_base;
    for (const auto& [old_label, fresh] : label_map) {
      out.labels.emplace(fresh, callee_index[callee.labels.at(old_label)]);
    }

    // Epilogue: restore registers (the destination last, from the return
    // slot) and release the frame.
    out.labels.emplace(exit_label, static_cast<std::uint32_t>(out.body.size()));
    for (std::uint8_t r = 0; r < 16; ++r) {
      if (!call.dst.is_sp() && r == call.dst.index) continue;
      Instruction ld;
      ld.op = Opcode::Load;
      ld.dst = Reg{r};
      ld.mem = mem_at(r * 4);
      out.body.push_back(ld);
    }
    if (call.dst.is_sp()) {
      Instruction ld;
      ld.op = Opcode::Load;
      ld.dst = call.dst;
      ld.mem = mem_at(kRetSlot);
      out.body.push_back(ld);
    } else {
      Instruction ld;
      ld.op = Opcode::Load;
      ld.dst = call.dst;
      ld.mem = mem_at(kRetSlot);
      out.body.push_back(ld);
      Instruction rel;
      rel.op = Opcode::Add;
      rel.dst = Reg{kSpIndex};
      rel.src1 = Reg{kSpIndex};
      rel.src2 = RegImm::of_imm(static_cast<Word>(kFrameSize));
      out.body.push_back(rel);
    }
  }
  new_index[fn.body.size()] = static_cast<std::uint32_t>(out.body.size());

  for (const auto& [label, index] : fn.labels) {
    out.labels.emplace(label, new_index[index]);
  }
  out.jump_tables = std::move(tables);
  canonicalize_tables(out);
  fn = std::move(out);
}

}  // namespace

Program transform(const Program& program, const std::string& function, TransformKind kind,
                  std::uint64_t seed) {
  const Function* fn = program.find_function(function);
  if (!fn) {
    throw TransformError(TransformError::Code::UnsupportedShape,
                         "unknown function '" + function + "'");
  }
  std::mt19937_64 rng(seed);
  Program out = program;
  Function& target = out.functions.at(function);
  switch (kind) {
    case TransformKind::Rename:
      rename_registers(target, rng);
      break;
    case TransformKind::Reorder:
      reorder_blocks(target, rng);
      break;
    case TransformKind::Sub:
      substitute_instructions(target, rng);
      break;
    case TransformKind::Bcf:
      bogus_control_flow(target, out, rng);
      break;
    case TransformKind::Fla:
      flatten_control_flow(target, rng);
      break;
    case TransformKind::InlineCallee:
      inline_one_callee(target, out, rng);
      break;
  }
  ValidationReport report = validate(out);
  if (!report.ok()) {
    throw std::logic_error("transform produced an invalid program: " +
                           report.diagnostics.front().to_string());
  }
  return out;
}

}  // namespace bmatch
