#include "vigil/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <vector>

namespace vigil {

namespace {

struct PendingLabel {
  size_t instr_index;
  std::string label;
  int line_no;
};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return char(std::toupper(c)); });
  return out;
}

std::string_view strip(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_operands(std::string_view s, int line_no) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string_view piece =
        comma == std::string_view::npos ? s.substr(pos) : s.substr(pos, comma - pos);
    piece = strip(piece);
    if (piece.empty()) {
      if (comma == std::string_view::npos && out.empty()) break;
      throw AssembleError(AssembleError::Kind::BadOperand, line_no, "empty operand");
    }
    out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

uint8_t parse_register(const std::string& tok, int line_no) {
  if (tok.size() < 2 || (tok[0] != 'r' && tok[0] != 'R')) {
    throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                        "expected register, got '" + tok + "'");
  }
  unsigned idx = 0;
  auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                        "bad register '" + tok + "'");
  }
  if (idx >= kRegCount) {
    throw AssembleError(AssembleError::Kind::RegisterOutOfRange, line_no,
                        "register " + tok + " out of range (r0..r7)");
  }
  return uint8_t(idx);
}

std::optional<uint64_t> parse_number(const std::string& tok) {
  uint64_t value = 0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  int base = 10;
  if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
    begin += 2;
    base = 16;
  }
  if (begin == end) return std::nullopt;
  auto [p, ec] = std::from_chars(begin, end, value, base);
  if (ec != std::errc() || p != end) return std::nullopt;
  return value;
}

uint64_t parse_immediate(const std::string& tok, int line_no) {
  auto v = parse_number(tok);
  if (!v) {
    throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                        "bad immediate '" + tok + "'");
  }
  return *v;
}

uint16_t parse_mem_addr(const std::string& tok, int line_no) {
  auto v = parse_number(tok);
  if (!v) {
    throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                        "bad address '" + tok + "'");
  }
  if (*v >= kMemWords) {
    throw AssembleError(AssembleError::Kind::AddressOutOfRange, line_no,
                        "memory address " + tok + " out of range (0..255)");
  }
  return uint16_t(*v);
}

bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

}  // namespace

Program assemble(std::string_view text) {
  Program program;
  program.source_digest = Sha256::of(text);

  std::map<std::string, size_t> labels;
  std::vector<PendingLabel> jump_fixups;

  size_t line_start = 0;
  int line_no = 0;
  while (line_start <= text.size()) {
    size_t nl = text.find('\n', line_start);
    std::string_view raw = nl == std::string_view::npos
                               ? text.substr(line_start)
                               : text.substr(line_start, nl - line_start);
    line_start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (size_t semi = raw.find(';'); semi != std::string_view::npos) {
      raw = raw.substr(0, semi);
    }
    std::string_view line = strip(raw);
    if (line.empty()) continue;

    if (size_t colon = line.find(':'); colon != std::string_view::npos) {
      std::string label(strip(line.substr(0, colon)));
      if (!valid_label(label)) {
        throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                            "bad label '" + label + "'");
      }
      if (labels.contains(label)) {
        throw AssembleError(AssembleError::Kind::DuplicateLabel, line_no,
                            "duplicate label '" + label + "'");
      }
      labels[label] = program.code.size();
      line = strip(line.substr(colon + 1));
      if (line.empty()) continue;  // bare label binds to the next instruction
    }

    size_t sp = line.find_first_of(" \t");
    std::string mnem = upper(sp == std::string_view::npos ? line : line.substr(0, sp));
    std::vector<std::string> ops =
        sp == std::string_view::npos
            ? std::vector<std::string>{}
            : split_operands(line.substr(sp + 1), line_no);

    auto want = [&](size_t n) {
      if (ops.size() != n) {
        throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                            mnem + " expects " + std::to_string(n) + " operand(s)");
      }
    };
    auto jump_target = [&](const std::string& tok, Instruction& ins) {
      if (auto v = parse_number(tok)) {
        ins.addr = uint16_t(std::min<uint64_t>(*v, 0xffff));
        if (*v > 0xffff) {
          throw AssembleError(AssembleError::Kind::AddressOutOfRange, line_no,
                              "jump target " + tok + " out of range");
        }
      } else if (valid_label(tok)) {
        jump_fixups.push_back({program.code.size(), tok, line_no});
      } else {
        throw AssembleError(AssembleError::Kind::BadOperand, line_no,
                            "bad jump target '" + tok + "'");
      }
    };

    Instruction ins;
    if (mnem == "LOADI") {
      want(2);
      ins.op = Opcode::Loadi;
      ins.reg_a = parse_register(ops[0], line_no);
      ins.imm = parse_immediate(ops[1], line_no);
    } else if (mnem == "MOV" || mnem == "ADD" || mnem == "SUB") {
      want(2);
      ins.op = mnem == "MOV" ? Opcode::Mov : mnem == "ADD" ? Opcode::Add : Opcode::Sub;
      ins.reg_a = parse_register(ops[0], line_no);
      ins.reg_b = parse_register(ops[1], line_no);
    } else if (mnem == "LOAD" || mnem == "STORE") {
      want(2);
      ins.op = mnem == "LOAD" ? Opcode::Load : Opcode::Store;
      ins.reg_a = parse_register(ops[0], line_no);
      ins.addr = parse_mem_addr(ops[1], line_no);
    } else if (mnem == "JMP") {
      want(1);
      ins.op = Opcode::Jmp;
      jump_target(ops[0], ins);
    } else if (mnem == "JNZ") {
      want(2);
      ins.op = Opcode::Jnz;
      ins.reg_a = parse_register(ops[0], line_no);
      jump_target(ops[1], ins);
    } else if (mnem == "ACK") {
      want(0);
      ins.op = Opcode::Ack;
    } else if (mnem == "NOP") {
      want(0);
      ins.op = Opcode::Nop;
    } else if (mnem == "HALT") {
      want(0);
      ins.op = Opcode::Halt;
    } else {
      throw AssembleError(AssembleError::Kind::UnknownMnemonic, line_no,
                          "unknown mnemonic '" + mnem + "'");
    }

    program.code.push_back(ins);
    if (program.code.size() > kMaxProgramLen) {
      throw AssembleError(AssembleError::Kind::ProgramTooLong, line_no,
                          "program exceeds " + std::to_string(kMaxProgramLen) +
                              " instructions");
    }
  }

  if (program.code.empty()) {
    throw AssembleError(AssembleError::Kind::EmptyProgram, line_no,
                        "no instructions");
  }

  for (const PendingLabel& fixup : jump_fixups) {
    auto it = labels.find(fixup.label);
    if (it == labels.end()) {
      throw AssembleError(AssembleError::Kind::UndefinedLabel, fixup.line_no,
                          "undefined label '" + fixup.label + "'");
    }
    program.code[fixup.instr_index].addr = uint16_t(it->second);
  }

  // Numeric and label jump targets must land inside the program.
  for (size_t i = 0; i < program.code.size(); ++i) {
    const Instruction& ins = program.code[i];
    if ((ins.op == Opcode::Jmp || ins.op == Opcode::Jnz) &&
        ins.addr >= program.code.size()) {
      throw AssembleError(AssembleError::Kind::AddressOutOfRange, 0,
                          "jump target " + std::to_string(ins.addr) +
                              " outside program (instruction " + std::to_string(i) + ")");
    }
  }

  return program;
}

}  // namespace vigil
