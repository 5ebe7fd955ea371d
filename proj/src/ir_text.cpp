#include "bmatch/ir_text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "bmatch/text_util.hpp"

namespace bmatch {

namespace {

enum class TokKind { Ident, Number, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  Word number = 0;
  SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_trivia();
    current_.span = {line_, col_};
    if (pos_ >= text_.size()) {
      current_ = {TokKind::End, "", 0, {line_, col_}};
      return;
    }
    char c = text_[pos_];
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
      current_.kind = TokKind::Ident;
      current_.text = text_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      SourceSpan span = {line_, col_};
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        bump();
      }
      std::string raw = text_.substr(start, pos_ - start);
      auto value = parse_word(raw);
      if (!value) throw ParseError(span, "malformed number '" + raw + "'");
      current_ = {TokKind::Number, raw, *value, span};
      return;
    }
    static const std::string punct = "{}[],=:;@&+-";
    if (punct.find(c) != std::string::npos) {
      current_ = {TokKind::Punct, std::string(1, c), 0, {line_, col_}};
      bump();
      return;
    }
    throw ParseError({line_, col_}, std::string("unexpected character '") + c + "'");
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  Token current_;
};

std::optional<std::uint8_t> register_index(const std::string& name) {
  if (name == "sp") return kSpIndex;
  if (name.size() >= 2 && name.size() <= 3 && name[0] == 'r') {
    std::uint32_t v = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
      v = v * 10 + static_cast<std::uint32_t>(name[i] - '0');
    }
    if (v < 16 && !(name.size() == 3 && name[1] == '0')) return static_cast<std::uint8_t>(v);
  }
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Program run() {
    while (lex_.peek().kind != TokKind::End) {
      Token t = expect_ident("declaration");
      if (t.text == "global") {
        parse_global(t);
      } else if (t.text == "lib") {
        parse_libdecl(t);
      } else if (t.text == "func") {
        parse_function(t);
      } else {
        throw ParseError(t.span, "expected 'global', 'lib', or 'func', got '" + t.text + "'");
      }
    }
    program_.sort_globals();
    return std::move(program_);
  }

 private:
  Token expect_ident(const std::string& what) {
    Token t = lex_.next();
    if (t.kind != TokKind::Ident) throw ParseError(t.span, "expected " + what);
    return t;
  }

  Token expect_punct(const std::string& p) {
    Token t = lex_.next();
    if (t.kind != TokKind::Punct || t.text != p) {
      throw ParseError(t.span, "expected '" + p + "'");
    }
    return t;
  }

  Token expect_number() {
    Token t = lex_.next();
    if (t.kind != TokKind::Number) throw ParseError(t.span, "expected a number");
    return t;
  }

  Word parse_signed_number() {
    if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == "-") {
      lex_.next();
      Token t = expect_number();
      return 0u - t.number;
    }
    return expect_number().number;
  }

  std::string parse_name(const std::string& what) {
    Token t = expect_ident(what);
    if (register_index(t.text)) {
      throw ParseError(t.span, what + " must not be a register name");
    }
    return t.text;
  }

  Reg parse_reg() {
    Token t = lex_.next();
    if (t.kind == TokKind::Ident) {
      if (auto idx = register_index(t.text)) return Reg{*idx};
    }
    throw ParseError(t.span, "expected a register, got '" + t.text + "'");
  }

  void parse_global(const Token& kw) {
    std::string name = parse_name("global name");
    if (program_.find_global(name)) {
      throw ParseError(kw.span, "duplicate global name '" + name + "'");
    }
    expect_punct("@");
    Token addr = expect_number();
    expect_punct("=");
    Word value = parse_signed_number();
    program_.globals.push_back({name, addr.number, value});
  }

  void parse_libdecl(const Token& kw) {
    std::string name = parse_name("library name");
    Token kind = expect_ident("library kind");
    LibraryKind k;
    if (kind.text == "pure") {
      k = LibraryKind::Pure;
    } else if (kind.text == "env") {
      k = LibraryKind::Environment;
    } else {
      throw ParseError(kind.span, "expected 'pure' or 'env'");
    }
    if (!program_.library_decls.emplace(name, k).second) {
      throw ParseError(kw.span, "duplicate library declaration '" + name + "'");
    }
  }

  void parse_function(const Token& kw) {
    Token name_tok = lex_.next();
    if (name_tok.kind != TokKind::Ident || register_index(name_tok.text)) {
      throw ParseError(name_tok.span, "expected a function name");
    }
    if (program_.functions.count(name_tok.text)) {
      throw ParseError(name_tok.span, "duplicate function name '" + name_tok.text + "'");
    }
    (void)kw;
    Token params_kw = expect_ident("'params'");
    if (params_kw.text != "params") throw ParseError(params_kw.span, "expected 'params'");
    Token count = expect_number();
    expect_punct("{");

    Function fn;
    fn.name = name_tok.text;
    fn.param_count = count.number;

    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == TokKind::Punct && t.text == "}") {
        lex_.next();
        break;
      }
      if (t.kind == TokKind::Punct && t.text == ";") {
        lex_.next();
        continue;
      }
      if (t.kind == TokKind::End) throw ParseError(t.span, "unterminated function body");
      parse_item(fn);
    }
    if (!pending_labels_.empty()) {
      throw ParseError(pending_labels_.front().second,
                       "label '" + pending_labels_.front().first + "' at end of function");
    }
    program_.functions.emplace(fn.name, std::move(fn));
  }

  void parse_item(Function& fn) {
    Token first = lex_.next();
    if (first.kind != TokKind::Ident) {
      throw ParseError(first.span, "expected an instruction or label");
    }

    // Label: NAME ':'
    if (!register_index(first.text) && lex_.peek().kind == TokKind::Punct &&
        lex_.peek().text == ":") {
      lex_.next();
      if (fn.labels.count(first.text)) {
        throw ParseError(first.span, "duplicate label '" + first.text + "'");
      }
      pending_labels_.emplace_back(first.text, first.span);
      return;
    }

    Instruction instr;
    if (auto idx = register_index(first.text)) {
      // rD = opcode ...
      expect_punct("=");
      Token opt = expect_ident("an opcode");
      auto op = opcode_from_name(opt.text);
      if (!op || !opcode_has_dest(*op)) {
        throw ParseError(opt.span, "unknown opcode '" + opt.text + "'");
      }
      instr.op = *op;
      instr.dst = Reg{*idx};
      parse_operands(instr, opt, false);
    } else {
      auto op = opcode_from_name(first.text);
      if (!op) throw ParseError(first.span, "unknown opcode '" + first.text + "'");
      instr.op = *op;
      parse_operands(instr, first, true);
    }

    std::uint32_t index = static_cast<std::uint32_t>(fn.body.size());
    for (auto& [label, span] : pending_labels_) {
      (void)span;
      fn.labels.emplace(label, index);
    }
    pending_labels_.clear();
    if (instr.op == Opcode::Jtab) {
      instr.table_id = static_cast<std::uint32_t>(fn.jump_tables.size());
      pending_table_.id = instr.table_id;
      fn.jump_tables.push_back(std::move(pending_table_));
      pending_table_ = {};
    }
    fn.body.push_back(std::move(instr));
  }

  void comma(const Token& opt) {
    Token t = lex_.next();
    if (t.kind != TokKind::Punct || t.text != ",") {
      throw ParseError(t.span, "bad arity for '" + opt.text + "'");
    }
  }

  // Rejects a trailing comma that would start an extra operand.
  void end_operands(const Token& opt) {
    if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == ",") {
      throw ParseError(lex_.peek().span, "bad arity for '" + opt.text + "'");
    }
  }

  RegImm parse_reg_or_imm() {
    const Token& t = lex_.peek();
    if (t.kind == TokKind::Number || (t.kind == TokKind::Punct && t.text == "-")) {
      return RegImm::of_imm(parse_signed_number());
    }
    return RegImm::of_reg(parse_reg());
  }

  MemRef parse_memref() {
    expect_punct("[");
    MemRef m;
    Token base = expect_ident("a register or global name");
    if (auto idx = register_index(base.text)) {
      m.base_reg = Reg{*idx};
    } else {
      m.base_is_global = true;
      m.global_name = base.text;
    }
    const Token& t = lex_.peek();
    if (t.kind == TokKind::Punct && (t.text == "+" || t.text == "-")) {
      bool negative = t.text == "-";
      lex_.next();
      Token off = expect_number();
      m.offset = negative ? -static_cast<std::int32_t>(off.number)
                          : static_cast<std::int32_t>(off.number);
    }
    expect_punct("]");
    return m;
  }

  void parse_call_args(Instruction& instr) {
    while (lex_.peek().kind == TokKind::Punct && lex_.peek().text == ",") {
      lex_.next();
      instr.args.push_back(parse_reg());
    }
  }

  void parse_operands(Instruction& instr, const Token& opt, bool bare_form) {
    if (bare_form && opcode_has_dest(instr.op)) {
      instr.dst = parse_reg();
      comma(opt);
    }
    switch (instr.op) {
      case Opcode::Const: {
        if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == "&") {
          lex_.next();
          instr.cval.is_address_of = true;
          instr.cval.name = expect_ident("a symbol name").text;
        } else {
          instr.cval.imm = parse_signed_number();
        }
        break;
      }
      case Opcode::Mov:
      case Opcode::Ret:
        instr.src1 = parse_reg();
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
        instr.src1 = parse_reg();
        comma(opt);
        instr.src2 = parse_reg_or_imm();
        break;
      case Opcode::Load:
        instr.mem = parse_memref();
        break;
      case Opcode::Store:
        instr.mem = parse_memref();
        comma(opt);
        instr.src1 = parse_reg();
        break;
      case Opcode::Br:
        instr.src1 = parse_reg();
        comma(opt);
        instr.label_a = parse_name("label");
        comma(opt);
        instr.label_b = parse_name("label");
        break;
      case Opcode::Jmp:
        instr.label_a = parse_name("label");
        break;
      case Opcode::Jtab: {
        instr.src1 = parse_reg();
        comma(opt);
        expect_punct("[");
        pending_table_.case_labels.clear();
        pending_table_.case_labels.push_back(parse_name("label"));
        while (lex_.peek().kind == TokKind::Punct && lex_.peek().text == ",") {
          lex_.next();
          pending_table_.case_labels.push_back(parse_name("label"));
        }
        expect_punct("]");
        comma(opt);
        pending_table_.default_label = parse_name("label");
        break;
      }
      case Opcode::Call:
        instr.callee = parse_name("callee name");
        parse_call_args(instr);
        break;
      case Opcode::Icall:
        instr.src1 = parse_reg();
        parse_call_args(instr);
        break;
      case Opcode::Libcall:
        instr.callee = parse_name("library name");
        parse_call_args(instr);
        break;
    }
    end_operands(opt);
  }

  Lexer lex_;
  Program program_;
  std::vector<std::pair<std::string, SourceSpan>> pending_labels_;
  JumpTable pending_table_;
};

std::string reg_name(Reg r) {
  if (r.is_sp()) return "sp";
  return "r" + std::to_string(r.index);
}

std::string imm_text(Word w) { return std::to_string(w); }

std::string memref_text(const MemRef& m) {
  std::string out = "[";
  out += m.base_is_global ? m.global_name : reg_name(m.base_reg);
  if (m.offset > 0) {
    out += "+" + std::to_string(m.offset);
  } else if (m.offset < 0) {
    out += std::to_string(m.offset);
  }
  out += "]";
  return out;
}

void render_instruction(std::ostringstream& os, const Function& fn, const Instruction& in) {
  os << "  ";
  if (opcode_has_dest(in.op)) os << reg_name(in.dst) << " = ";
  os << opcode_name(in.op);
  switch (in.op) {
    case Opcode::Const:
      if (in.cval.is_address_of) {
        os << " &" << in.cval.name;
      } else {
        os << " " << imm_text(in.cval.imm);
      }
      break;
    case Opcode::Mov:
    case Opcode::Ret:
      os << " " << reg_name(in.src1);
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
      os << " " << reg_name(in.src1) << ", ";
      if (in.src2.is_imm) {
        os << imm_text(in.src2.imm);
      } else {
        os << reg_name(in.src2.reg);
      }
      break;
    case Opcode::Load:
      os << " " << memref_text(in.mem);
      break;
    case Opcode::Store:
      os << " " << memref_text(in.mem) << ", " << reg_name(in.src1);
      break;
    case Opcode::Br:
      os << " " << reg_name(in.src1) << ", " << in.label_a << ", " << in.label_b;
      break;
    case Opcode::Jmp:
      os << " " << in.label_a;
      break;
    case Opcode::Jtab: {
      const JumpTable& t = fn.jump_tables.at(in.table_id);
      os << " " << reg_name(in.src1) << ", [";
      for (std::size_t i = 0; i < t.case_labels.size(); ++i) {
        if (i) os << ", ";
        os << t.case_labels[i];
      }
      os << "], " << t.default_label;
      break;
    }
    case Opcode::Call:
    case Opcode::Libcall:
      os << " " << in.callee;
      for (Reg a : in.args) os << ", " << reg_name(a);
      break;
    case Opcode::Icall:
      os << " " << reg_name(in.src1);
      for (Reg a : in.args) os << ", " << reg_name(a);
      break;
  }
  os << "\n";
}

}  // namespace

Program parse_program_syntax(const std::string& text) { return Parser(text).run(); }

Program parse_program(const std::string& text) {
  Program p = parse_program_syntax(text);
  ValidationReport report = validate(p);
  if (!report.ok()) {
    throw ParseError({1, 1}, "invalid program: " + report.diagnostics.front().to_string());
  }
  return p;
}

std::string render_program(const Program& program) {
  std::ostringstream os;
  bool printed = false;

  std::vector<GlobalDecl> globals = program.globals;
  std::sort(globals.begin(), globals.end(),
            [](const GlobalDecl& a, const GlobalDecl& b) { return a.address < b.address; });
  for (const auto& g : globals) {
    os << "global " << g.name << " @" << hex_word(g.address) << " = " << imm_text(g.initial_value)
       << "\n";
    printed = true;
  }
  for (const auto& [name, kind] : program.library_decls) {
    os << "lib " << name << " " << (kind == LibraryKind::Pure ? "pure" : "env") << "\n";
    printed = true;
  }

  for (const auto& [name, fn] : program.functions) {
    if (printed) os << "\n";
    printed = true;
    os << "func " << name << " params " << fn.param_count << " {\n";

    std::map<std::uint32_t, std::vector<std::string>> labels_at;
    for (const auto& [label, index] : fn.labels) {
      labels_at[index].push_back(label);
    }
    for (std::uint32_t i = 0; i < fn.body.size(); ++i) {
      auto it = labels_at.find(i);
      if (it != labels_at.end()) {
        for (const auto& label : it->second) os << label << ":\n";
      }
      render_instruction(os, fn, fn.body[i]);
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace bmatch
