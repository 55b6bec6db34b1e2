#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vigil/digest.hpp"

namespace vigil {

inline constexpr size_t kRegCount = 8;
inline constexpr size_t kMemWords = 256;
inline constexpr size_t kMaxProgramLen = 4096;
inline constexpr uint16_t kFlagCell = 255;  // supervisor-writable abnormality flag

enum class Opcode : uint8_t {
  Loadi,
  Mov,
  Add,
  Sub,
  Load,
  Store,
  Jmp,
  Jnz,
  Ack,
  Nop,
  Halt,
};

const char* mnemonic(Opcode op);

struct Instruction {
  Opcode op = Opcode::Nop;
  uint8_t reg_a = 0;   // rd for LOADI/MOV/ADD/SUB/LOAD, rs for STORE, r for JNZ
  uint8_t reg_b = 0;   // rs for MOV/ADD/SUB
  uint16_t addr = 0;   // jump target (JMP/JNZ) or memory address (LOAD/STORE)
  uint64_t imm = 0;    // LOADI immediate

  std::string text() const;
  bool operator==(const Instruction&) const = default;
};

struct Program {
  std::vector<Instruction> code;
  Digest source_digest{};  // digest of the assembly text this was built from

  size_t size() const { return code.size(); }
};

struct VmState {
  uint64_t tick = 0;
  uint16_t pc = 0;
  std::array<uint64_t, kRegCount> regs{};
  std::array<uint64_t, kMemWords> mem{};
  bool pending_interrupt = false;
  std::optional<uint64_t> interrupt_since;
  bool halted = false;
  bool faulted = false;

  bool live() const { return !halted && !faulted; }
};

struct VmError : std::runtime_error {
  enum class Kind { InterruptOnHalted, FlagOnDead };
  VmError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Side channel for one executed instruction; consumed by policy checks.
struct StepEffect {
  std::optional<uint16_t> store_addr;
  bool acked = false;
};

// Total, deterministic transition. Dynamic errors (pc overrun, wild memory
// address) land in `faulted` rather than throwing. Stepping a dead state
// returns it unchanged.
VmState step(const VmState& state, const Program& program, StepEffect* effect = nullptr);

// Marks an interrupt pending; the first injection's tick wins.
VmState inject_interrupt(const VmState& state, uint64_t now);

// Canonical fixed-width serialization: pc, regs, mem, pending_interrupt.
// tick and interrupt_since are excluded so that a revisited machine
// configuration digests identically regardless of when it recurs.
inline constexpr size_t kStateBlobSize = 8 + kRegCount * 8 + kMemWords * 8 + 1;
std::array<uint8_t, kStateBlobSize> canonical_state_bytes(const VmState& state);
Digest state_digest(const VmState& state);
Digest memory_digest(const VmState& state);

}  // namespace vigil
