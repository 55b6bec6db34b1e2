#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "vigil/vm.hpp"

namespace vigil {

struct AssembleError : std::runtime_error {
  enum class Kind {
    UnknownMnemonic,
    UndefinedLabel,
    DuplicateLabel,
    RegisterOutOfRange,
    ProgramTooLong,
    EmptyProgram,
    AddressOutOfRange,
    BadOperand,
  };
  AssembleError(Kind k, int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
        kind(k),
        line(line_no) {}
  Kind kind;
  int line;
};

// Assembly format: one `[label:] MNEMONIC [operands]` or bare `label:` per
// line, registers r0..r7, decimal or 0x-hex immediates, ';' comments.
Program assemble(std::string_view text);

}  // namespace vigil
