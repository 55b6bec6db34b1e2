#include "vigil/vm.hpp"

#include <cstring>

namespace vigil {

const char* mnemonic(Opcode op) {
  switch (op) {
    case Opcode::Loadi: return "LOADI";
    case Opcode::Mov: return "MOV";
    case Opcode::Add: return "ADD";
    case Opcode::Sub: return "SUB";
    case Opcode::Load: return "LOAD";
    case Opcode::Store: return "STORE";
    case Opcode::Jmp: return "JMP";
    case Opcode::Jnz: return "JNZ";
    case Opcode::Ack: return "ACK";
    case Opcode::Nop: return "NOP";
    case Opcode::Halt: return "HALT";
  }
  return "?";
}

std::string Instruction::text() const {
  std::string s = mnemonic(op);
  auto reg = [](uint8_t r) { return "r" + std::to_string(r); };
  switch (op) {
    case Opcode::Loadi:
      s += " " + reg(reg_a) + ", " + std::to_string(imm);
      break;
    case Opcode::Mov:
    case Opcode::Add:
    case Opcode::Sub:
      s += " " + reg(reg_a) + ", " + reg(reg_b);
      break;
    case Opcode::Load:
      s += " " + reg(reg_a) + ", " + std::to_string(addr);
      break;
    case Opcode::Store:
      s += " " + reg(reg_a) + ", " + std::to_string(addr);
      break;
    case Opcode::Jmp:
      s += " " + std::to_string(addr);
      break;
    case Opcode::Jnz:
      s += " " + reg(reg_a) + ", " + std::to_string(addr);
      break;
    case Opcode::Ack:
    case Opcode::Nop:
    case Opcode::Halt:
      break;
  }
  return s;
}

VmState step(const VmState& state, const Program& program, StepEffect* effect) {
  if (effect) *effect = StepEffect{};
  if (!state.live()) return state;

  VmState next = state;
  next.tick = state.tick + 1;

  if (state.pc >= program.size()) {
    next.faulted = true;
    return next;
  }

  const Instruction& ins = program.code[state.pc];
  switch (ins.op) {
    case Opcode::Loadi:
      next.regs[ins.reg_a & 7] = ins.imm;
      next.pc = state.pc + 1;
      break;
    case Opcode::Mov:
      next.regs[ins.reg_a & 7] = state.regs[ins.reg_b & 7];
      next.pc = state.pc + 1;
      break;
    case Opcode::Add:
      next.regs[ins.reg_a & 7] = state.regs[ins.reg_a & 7] + state.regs[ins.reg_b & 7];
      next.pc = state.pc + 1;
      break;
    case Opcode::Sub:
      next.regs[ins.reg_a & 7] = state.regs[ins.reg_a & 7] - state.regs[ins.reg_b & 7];
      next.pc = state.pc + 1;
      break;
    case Opcode::Load:
      if (ins.addr >= kMemWords) {
        next.faulted = true;
        return next;
      }
      next.regs[ins.reg_a & 7] = state.mem[ins.addr];
      next.pc = state.pc + 1;
      break;
    case Opcode::Store:
      if (ins.addr >= kMemWords) {
        next.faulted = true;
        return next;
      }
      next.mem[ins.addr] = state.regs[ins.reg_a & 7];
      next.pc = state.pc + 1;
      if (effect) effect->store_addr = ins.addr;
      break;
    case Opcode::Jmp:
      next.pc = ins.addr;
      break;
    case Opcode::Jnz:
      next.pc = (state.regs[ins.reg_a & 7] != 0) ? ins.addr : uint16_t(state.pc + 1);
      break;
    case Opcode::Ack:
      next.pending_interrupt = false;
      next.interrupt_since.reset();
      next.pc = state.pc + 1;
      if (effect) effect->acked = true;
      break;
    case Opcode::Nop:
      next.pc = state.pc + 1;
      break;
    case Opcode::Halt:
      next.halted = true;
      break;
  }
  return next;
}

VmState inject_interrupt(const VmState& state, uint64_t now) {
  if (state.halted) {
    throw VmError(VmError::Kind::InterruptOnHalted, "interrupt injected into halted process");
  }
  VmState next = state;
  if (!next.pending_interrupt) {
    next.pending_interrupt = true;
    next.interrupt_since = now;
  }
  return next;
}

namespace {
inline void put_u64le(uint8_t* dst, uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = uint8_t(v >> (8 * i));
}
}  // namespace

std::array<uint8_t, kStateBlobSize> canonical_state_bytes(const VmState& state) {
  std::array<uint8_t, kStateBlobSize> blob;
  size_t off = 0;
  put_u64le(blob.data() + off, state.pc);
  off += 8;
  for (uint64_t r : state.regs) {
    put_u64le(blob.data() + off, r);
    off += 8;
  }
  for (uint64_t w : state.mem) {
    put_u64le(blob.data() + off, w);
    off += 8;
  }
  blob[off++] = state.pending_interrupt ? 1 : 0;
  return blob;
}

Digest state_digest(const VmState& state) {
  auto blob = canonical_state_bytes(state);
  return Sha256::of(std::span<const uint8_t>(blob.data(), blob.size()));
}

Digest memory_digest(const VmState& state) {
  std::array<uint8_t, kMemWords * 8> blob;
  for (size_t i = 0; i < kMemWords; ++i) {
    put_u64le(blob.data() + i * 8, state.mem[i]);
  }
  return Sha256::of(std::span<const uint8_t>(blob.data(), blob.size()));
}

}  // namespace vigil
