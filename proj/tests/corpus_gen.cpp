#include "corpus_gen.hpp"

#include <cstdio>
#include <random>
#include <sstream>

#include "bmatch/ir_text.hpp"
#include "bmatch/text_util.hpp"

namespace bmatch::testgen {

namespace {

std::string fn_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "f%03zu", i);
  return buf;
}

std::string decoy_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03zu", i);
  return buf;
}

Word global_address(std::size_t k) { return kGlobalRegionBase + static_cast<Word>(4 * k); }

}  // namespace

Corpus generate_corpus(std::uint64_t seed, const GenOptions& options) {
  std::mt19937_64 rng(seed);
  std::ostringstream os;

  std::size_t global_count = std::max<std::size_t>(8, options.function_count / 4);
  for (std::size_t k = 0; k < global_count; ++k) {
    os << "global g" << k << " @" << hex_word(global_address(k)) << " = "
       << static_cast<Word>(rng() % 1000) << "\n";
  }
  os << "lib abs pure\n";
  os << "lib min pure\n";
  os << "lib rand env\n";

  // Shared direct-call helper; its features inline into callers.
  os << "func helper_mix params 1 {\n"
        "  r1 = mul r0, 17\n"
        "  r2 = cmp.lt r0, r1\n"
        "  br r2, Ha, Hb\n"
        "Ha:\n"
        "  r3 = add r1, 3\n"
        "  jmp Hc\n"
        "Hb:\n"
        "  r3 = xor r1, 7\n"
        "  jmp Hc\n"
        "Hc:\n"
        "  ret r3\n"
        "}\n";
  // Indirect-call helpers: pure arithmetic, no global traffic, so skipping
  // them under migration loses nothing but the migrated return value.
  os << "func ihelp0 params 1 {\n"
        "  r1 = const 23063\n"
        "  r2 = xor r0, r1\n"
        "  ret r2\n"
        "}\n";
  os << "func ihelp1 params 1 {\n"
        "  r1 = const 4660\n"
        "  r2 = add r0, r1\n"
        "  ret r2\n"
        "}\n";

  Corpus corpus;
  for (std::size_t i = 0; i < options.function_count; ++i) {
    std::string name = fn_name(i);
    std::uint32_t params = options.fixed_param_count
                               ? *options.fixed_param_count
                               : 1 + static_cast<std::uint32_t>(rng() % 3);
    Word c1 = static_cast<Word>(0x01000000u + i * 2654435761u);
    Word c2 = static_cast<Word>(rng());
    Word c3 = static_cast<Word>(rng());
    Word c4 = static_cast<Word>(0x00A00000u + i * 97u);
    // Disjoint per-function loop windows keep comparison features unique.
    Word loop_base = 0x000F0000u + static_cast<Word>(i) * 64u;
    Word loop_iters = 3 + static_cast<Word>(rng() % 6);
    std::size_t gk = rng() % global_count;
    bool use_call = options.enable_calls && (rng() % 3 == 0);
    bool use_icall = options.enable_icalls && (rng() % 4 == 0);
    std::size_t ihelp = rng() % 2;
    bool use_pure = options.enable_libcalls && (rng() % 2 == 0);
    bool use_env = options.enable_libcalls && (rng() % 3 == 0);

    os << "func " << name << " params " << params << " {\n";
    os << "  r3 = const " << c1 << "\n";
    os << "  r4 = xor r0, r3\n";
    if (params >= 2) os << "  r4 = add r4, r1\n";
    if (params >= 3) os << "  r4 = xor r4, r2\n";
    os << "  r5 = and r0, 1\n";
    os << "  r6 = cmp.eq r5, 0\n";
    os << "  br r6, Leven, Lodd\n";
    os << "Leven:\n";
    os << "  r4 = add r4, " << c2 << "\n";
    os << "  jmp Ljoin\n";
    os << "Lodd:\n";
    os << "  r4 = xor r4, " << c3 << "\n";
    os << "  jmp Ljoin\n";
    os << "Ljoin:\n";
    os << "  r7 = const " << loop_base << "\n";
    os << "  r8 = const " << (loop_base + loop_iters) << "\n";
    os << "Lloop:\n";
    os << "  r9 = cmp.lt r7, r8\n";
    os << "  br r9, Lbody, Ldone\n";
    os << "Lbody:\n";
    os << "  r4 = add r4, r7\n";
    os << "  r7 = add r7, 1\n";
    os << "  jmp Lloop\n";
    os << "Ldone:\n";
    os << "  r10 = load [g" << gk << "]\n";
    os << "  r11 = add r10, r4\n";
    os << "  store [g" << gk << "], r11\n";
    if (use_call) {
      os << "  r5 = call helper_mix, r4\n";
      os << "  r4 = xor r4, r5\n";
    }
    if (use_icall) {
      os << "  r5 = const &ihelp" << ihelp << "\n";
      os << "  r6 = icall r5, r4\n";
      os << "  r4 = add r4, r6\n";
    }
    if (use_pure) {
      os << "  r5 = libcall abs, r4\n";
      os << "  r4 = add r4, r5\n";
    }
    if (use_env) {
      os << "  r5 = libcall rand\n";
      os << "  r4 = xor r4, r5\n";
    }
    os << "  r4 = add r4, " << c4 << "\n";
    os << "  ret r4\n";
    os << "}\n";

    TestInput input;
    for (std::uint32_t a = 0; a < params; ++a) {
      input.args.push_back(static_cast<Word>(rng() % 100000));
    }
    if (rng() % 3 == 0) {
      input.global_overrides[global_address(gk)] = static_cast<Word>(rng() % 100000);
    }
    if (use_env) {
      input.library_script["rand"].push_back(static_cast<Word>(rng()));
    }
    corpus.reference_names.push_back(name);
    corpus.inputs.emplace(name, std::move(input));
  }

  for (std::size_t i = 0; i < options.decoy_count; ++i) {
    std::uint32_t params = options.fixed_param_count ? *options.fixed_param_count : 1;
    Word base = 0x00800000u + static_cast<Word>(i) * 8192u;
    os << "func " << decoy_name(i) << " params " << params << " {\n";
    os << "  r3 = const " << base << "\n";
    os << "  r4 = const " << (base + options.decoy_loop_iters) << "\n";
    os << "  r5 = const 0\n";
    os << "Wloop:\n";
    os << "  r6 = cmp.lt r3, r4\n";
    os << "  br r6, Wbody, Wdone\n";
    os << "Wbody:\n";
    os << "  r5 = add r5, r3\n";
    os << "  r3 = add r3, 1\n";
    os << "  jmp Wloop\n";
    os << "Wdone:\n";
    os << "  ret r5\n";
    os << "}\n";
  }

  corpus.program = parse_program(os.str());
  return corpus;
}

}  // namespace bmatch::testgen
