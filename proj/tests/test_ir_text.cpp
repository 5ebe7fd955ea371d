#include <doctest.h>

#include "bmatch/ir_text.hpp"
#include "corpus_gen.hpp"

using namespace bmatch;

namespace {

const char* kMinimal =
    "global g @0x10000000 = 5\n"
    "func inc params 1 { r1 = const 1; r2 = add r0, r1; ret r2 }\n";

}  // namespace

TEST_CASE("parse minimal program") {
  Program p = parse_program(kMinimal);
  REQUIRE(p.globals.size() == 1);
  CHECK(p.globals[0].name == "g");
  CHECK(p.globals[0].address == 0x10000000u);
  CHECK(p.globals[0].initial_value == 5u);
  REQUIRE(p.functions.count("inc") == 1);
  const Function& fn = p.functions.at("inc");
  CHECK(fn.param_count == 1);
  REQUIRE(fn.body.size() == 3);
  CHECK(fn.body[0].op == Opcode::Const);
  CHECK(fn.body[1].op == Opcode::Add);
  CHECK(fn.body[2].op == Opcode::Ret);
}

TEST_CASE("both instruction forms parse to the same program") {
  Program assign = parse_program("func f params 1 { r1 = add r0, 3; ret r1 }");
  Program bare = parse_program("func f params 1 { add r1, r0, 3; ret r1 }");
  CHECK(assign == bare);
}

TEST_CASE("duplicate label is a parse error at the second occurrence") {
  const char* text =
      "func f params 0 {\n"
      "L1:\n"
      "  r0 = const 1\n"
      "L1:\n"
      "  ret r0\n"
      "}\n";
  try {
    parse_program(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.message().find("duplicate label") != std::string::npos);
    CHECK(e.span().line == 4);
  }
}

TEST_CASE("parse error inventory") {
  CHECK_THROWS_WITH_AS(parse_program("func f params 0 { frobnicate r0; ret r0 }"),
                       doctest::Contains("unknown opcode"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("func f params 0 { r1 = add r0; ret r1 }"),
                       doctest::Contains("bad arity"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("func f params 0 { ret r0, r1 }"),
                       doctest::Contains("bad arity"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("global g @0x10000000 = 1\nglobal g @0x10000004 = 2\n"),
                       doctest::Contains("duplicate global"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_program("func f params 0 { ret r0 }\nfunc f params 0 { ret r0 }\n"),
      doctest::Contains("duplicate function"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("func f params 0 { r1 = const 0xZZ; ret r1 }"),
                       doctest::Contains("malformed number"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("func f params 0 { r1 = const 99999999999; ret r1 }"),
                       doctest::Contains("malformed number"), ParseError);
}

TEST_CASE("every parse error carries a span inside the offending token") {
  try {
    parse_program("func f params 0 {\n  r1 = const 0x\n  ret r1\n}\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.span().line == 2);
    CHECK(e.span().column >= 14);
  }
}

TEST_CASE("round trip: parse after render is identity") {
  Program p = parse_program(kMinimal);
  std::string rendered = render_program(p);
  Program q = parse_program(rendered);
  CHECK(p == q);
  CHECK(render_program(q) == rendered);  // idempotent canonicalization
}

TEST_CASE("round trip holds over generated corpora") {
  for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
    testgen::GenOptions opts;
    opts.function_count = 12;
    testgen::Corpus corpus = testgen::generate_corpus(seed, opts);
    std::string rendered = render_program(corpus.program);
    Program reparsed = parse_program(rendered);
    CHECK(reparsed == corpus.program);
    CHECK(render_program(reparsed) == rendered);
  }
}

TEST_CASE("canonical render orders functions by name and globals by address") {
  const char* text =
      "func zeta params 0 { ret r0 }\n"
      "global late @0x10000008 = 1\n"
      "global early @0x10000000 = 2\n"
      "func alpha params 0 { ret r0 }\n";
  std::string rendered = render_program(parse_program(text));
  CHECK(rendered.find("early") < rendered.find("late"));
  CHECK(rendered.find("func alpha") < rendered.find("func zeta"));
}

TEST_CASE("jtab and memory operand syntax") {
  const char* text =
      "global g @0x10000000 = 0\n"
      "func f params 1 {\n"
      "  jtab r0, [La, Lb], Ld\n"
      "La:\n"
      "  r1 = load [g+4]\n"
      "  ret r1\n"
      "Lb:\n"
      "  r1 = load [r0-8]\n"
      "  ret r1\n"
      "Ld:\n"
      "  r1 = const 0\n"
      "  ret r1\n"
      "}\n";
  Program p = parse_program(text);
  const Function& fn = p.functions.at("f");
  REQUIRE(fn.jump_tables.size() == 1);
  CHECK(fn.jump_tables[0].case_labels == std::vector<std::string>{"La", "Lb"});
  CHECK(fn.jump_tables[0].default_label == "Ld");
  CHECK(fn.body[1].mem.base_is_global);
  CHECK(fn.body[1].mem.offset == 4);
  CHECK(fn.body[3].mem.offset == -8);
  Program q = parse_program(render_program(p));
  CHECK(p == q);
}

TEST_CASE("validate reports unresolved label with function and index") {
  Program p = parse_program_syntax("func f params 0 { br r0, Lmissing, L1\nL1:\n  ret r0 }");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].function == "f");
  CHECK(report.diagnostics[0].instruction_index == 0u);
  CHECK(report.diagnostics[0].message.find("unresolved label") != std::string::npos);
}

TEST_CASE("validate reports undefined callee") {
  Program p = parse_program_syntax("func f params 0 { r1 = call helper; ret r1 }");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("undefined callee") != std::string::npos);
}

TEST_CASE("validate accepts a well-formed two-function program") {
  const char* text =
      "func callee params 1 { r1 = add r0, 1; ret r1 }\n"
      "func caller params 1 { r2 = call callee, r0; ret r2 }\n";
  CHECK(validate(parse_program_syntax(text)).ok());
}

TEST_CASE("validate rejects global addresses outside the region") {
  Program p = parse_program_syntax("global g @0x500 = 1\nfunc f params 0 { ret r0 }");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("global region") != std::string::npos);
}

TEST_CASE("validate rejects call arity mismatches") {
  Program p = parse_program_syntax(
      "func callee params 2 { ret r0 }\n"
      "func f params 0 { r1 = call callee, r0; ret r1 }\n");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("argument count") != std::string::npos);
}

TEST_CASE("validate rejects fall-off-the-end bodies") {
  Program p = parse_program_syntax("func f params 0 { r1 = const 1 }");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("terminator") != std::string::npos);
}

TEST_CASE("validate orders diagnostics by function then index") {
  Program p = parse_program_syntax(
      "func bbb params 0 { jmp Lx }\n"
      "func aaa params 0 { r1 = const 1; jmp Ly }\n");
  ValidationReport report = validate(p);
  REQUIRE(report.diagnostics.size() == 2);
  CHECK(report.diagnostics[0].function == "aaa");
  CHECK(report.diagnostics[1].function == "bbb");
  ValidationReport again = validate(p);
  CHECK(report.to_string() == again.to_string());
}

TEST_CASE("validate flags unknown pure library functions") {
  Program p = parse_program_syntax("lib nonsense pure\nfunc f params 0 { ret r0 }");
  ValidationReport report = validate(p);
  REQUIRE_FALSE(report.ok());
  CHECK(report.diagnostics[0].message.find("unknown pure library") != std::string::npos);
}

TEST_CASE("comments and whitespace are insignificant") {
  Program a = parse_program("func f params 0 {  # trailing comment\n  ret r0  # another\n}\n");
  Program b = parse_program("func f params 0 { ret r0 }");
  CHECK(a == b);
}

TEST_CASE("trailing junk is an error") {
  CHECK_THROWS_AS(parse_program("func f params 0 { ret r0 }\n@@@"), ParseError);
}
