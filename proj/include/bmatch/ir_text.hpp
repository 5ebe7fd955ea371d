#pragma once

#include <stdexcept>
#include <string>

#include "bmatch/ir.hpp"

namespace bmatch {

struct SourceSpan {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  auto operator<=>(const SourceSpan&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& message)
      : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                           message),
        span_(span),
        message_(message) {}
  SourceSpan span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

// Syntax only; the result may fail validate.
Program parse_program_syntax(const std::string& text);

// Syntax plus validation: the returned Program always passes validate.
Program parse_program(const std::string& text);

// Canonical form: functions in name order, globals by address, one
// instruction per line, lowercase opcodes, 0x-prefixed hex addresses.
// Byte-identical across runs for equal Programs.
std::string render_program(const Program& program);

}  // namespace bmatch
