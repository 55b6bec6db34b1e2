#pragma once

// Deterministic random generators shared by the unit and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "vigil/assembler.hpp"
#include "vigil/prop.hpp"
#include "vigil/vm.hpp"

namespace vigil::testsupport {

using Rng = std::mt19937_64;

inline uint64_t pick(Rng& rng, uint64_t lo, uint64_t hi) {
  return std::uniform_int_distribution<uint64_t>(lo, hi)(rng);
}

// Jump-heavy program text: dense backward jumps make cycles likely while
// LOADI/ADD keep some programs genuinely productive.
inline std::string gen_jumpy_source(Rng& rng, size_t max_len) {
  size_t len = pick(rng, 2, max_len);
  std::string src;
  for (size_t i = 0; i < len; ++i) {
    src += "L" + std::to_string(i) + ": ";
    uint64_t roll = pick(rng, 0, 99);
    auto reg = [&] { return "r" + std::to_string(pick(rng, 0, 7)); };
    auto target = [&] { return "L" + std::to_string(pick(rng, 0, len - 1)); };
    if (roll < 22) {
      src += "JMP " + target();
    } else if (roll < 40) {
      src += "JNZ " + reg() + ", " + target();
    } else if (roll < 55) {
      src += "LOADI " + reg() + ", " + std::to_string(pick(rng, 0, 7));
    } else if (roll < 65) {
      src += "ADD " + reg() + ", " + reg();
    } else if (roll < 72) {
      src += "SUB " + reg() + ", " + reg();
    } else if (roll < 78) {
      src += "MOV " + reg() + ", " + reg();
    } else if (roll < 84) {
      src += "LOAD " + reg() + ", " + std::to_string(pick(rng, 0, 63));
    } else if (roll < 90) {
      src += "STORE " + reg() + ", " + std::to_string(pick(rng, 16, 63));
    } else if (roll < 93) {
      src += "ACK";
    } else if (roll < 97) {
      src += "NOP";
    } else {
      src += "HALT";
    }
    src += "\n";
  }
  return src;
}

inline Program gen_jumpy_program(Rng& rng, size_t max_len = 64) {
  return assemble(gen_jumpy_source(rng, max_len));
}

// Forward-only control flow: every jump targets a strictly later instruction
// and the last instruction is HALT, so execution halts within `len` steps.
inline Program gen_halting_program(Rng& rng, size_t max_len = 48) {
  size_t len = pick(rng, 2, max_len);
  std::string src;
  for (size_t i = 0; i + 1 < len; ++i) {
    src += "L" + std::to_string(i) + ": ";
    uint64_t roll = pick(rng, 0, 99);
    auto reg = [&] { return "r" + std::to_string(pick(rng, 0, 7)); };
    if (roll < 15 && i + 2 < len) {
      src += "JMP L" + std::to_string(pick(rng, i + 1, len - 1));
    } else if (roll < 30 && i + 2 < len) {
      src += "JNZ " + reg() + ", L" + std::to_string(pick(rng, i + 1, len - 1));
    } else if (roll < 55) {
      src += "LOADI " + reg() + ", " + std::to_string(pick(rng, 0, 900));
    } else if (roll < 75) {
      src += "ADD " + reg() + ", " + reg();
    } else if (roll < 85) {
      src += "STORE " + reg() + ", " + std::to_string(pick(rng, 16, 250));
    } else {
      src += "NOP";
    }
    src += "\n";
  }
  src += "L" + std::to_string(len - 1) + ": HALT\n";
  return assemble(src);
}

inline VmState gen_state(Rng& rng) {
  VmState s;
  s.tick = pick(rng, 0, 1000);
  s.pc = uint16_t(pick(rng, 0, 40));
  for (auto& r : s.regs) {
    // Mix small values (comparisons bite) with full-width ones (wrapping bites).
    r = pick(rng, 0, 1) ? pick(rng, 0, 16) : pick(rng, 0, UINT64_MAX);
  }
  for (size_t i = 0; i < 24; ++i) {
    s.mem[pick(rng, 0, kMemWords - 1)] = pick(rng, 0, 16);
  }
  return s;
}

// Random term over the variables in scope.
inline Term gen_term(Rng& rng, const std::vector<std::string>& scope, int depth) {
  uint64_t roll = pick(rng, 0, 99);
  if (depth <= 0 || roll < 45) {
    if (!scope.empty() && roll < 20) {
      return Term::var(scope[pick(rng, 0, scope.size() - 1)]);
    }
    switch (pick(rng, 0, 3)) {
      case 0: return Term::literal(pick(rng, 0, 16));
      case 1: return Term::literal(pick(rng, 0, UINT64_MAX));
      case 2: return Term::pc();
      default: return Term::tick();
    }
  }
  switch (pick(rng, 0, 4)) {
    case 0: return Term::reg(gen_term(rng, scope, depth - 1));
    case 1: return Term::mem(gen_term(rng, scope, depth - 1));
    case 2:
      return Term::binary(Term::Kind::Add, gen_term(rng, scope, depth - 1),
                          gen_term(rng, scope, depth - 1));
    case 3:
      return Term::binary(Term::Kind::Sub, gen_term(rng, scope, depth - 1),
                          gen_term(rng, scope, depth - 1));
    default:
      return Term::binary(Term::Kind::Mul, gen_term(rng, scope, depth - 1),
                          gen_term(rng, scope, depth - 1));
  }
}

// Random proposition of prop-node depth <= depth; quantifier ranges stay
// within [0, max_range]. Variables from `scope` may appear free.
inline Prop gen_prop(Rng& rng, std::vector<std::string>& scope, int depth,
                     uint64_t max_range = 16) {
  uint64_t roll = pick(rng, 0, 99);
  if (depth <= 1 || roll < 30) {
    if (roll < 4) return pick(rng, 0, 1) ? Prop::make_true() : Prop::make_false();
    Relop rel = Relop(pick(rng, 0, 5));
    return Prop::cmp(gen_term(rng, scope, 2), rel, gen_term(rng, scope, 2));
  }
  switch (pick(rng, 0, 5)) {
    case 0:
      return Prop::negate(gen_prop(rng, scope, depth - 1, max_range));
    case 1:
      return Prop::connect(Prop::Kind::And, gen_prop(rng, scope, depth - 1, max_range),
                           gen_prop(rng, scope, depth - 1, max_range));
    case 2:
      return Prop::connect(Prop::Kind::Or, gen_prop(rng, scope, depth - 1, max_range),
                           gen_prop(rng, scope, depth - 1, max_range));
    case 3:
      return Prop::connect(Prop::Kind::Implies,
                           gen_prop(rng, scope, depth - 1, max_range),
                           gen_prop(rng, scope, depth - 1, max_range));
    default: {
      std::string var = "q" + std::to_string(scope.size());
      uint64_t lo = pick(rng, 0, 8);
      uint64_t hi = lo + pick(rng, 0, max_range > 0 ? max_range - 1 : 0);
      scope.push_back(var);
      Prop body = gen_prop(rng, scope, depth - 1, max_range);
      scope.pop_back();
      return Prop::quantifier(pick(rng, 0, 1) ? Prop::Kind::Forall : Prop::Kind::Exists,
                              var, Term::literal(lo), Term::literal(hi),
                              std::move(body));
    }
  }
}

inline Prop gen_closed_prop(Rng& rng, int depth, uint64_t max_range = 16) {
  std::vector<std::string> scope;
  return gen_prop(rng, scope, depth, max_range);
}

inline Prop gen_open_prop(Rng& rng, const std::string& free_var, int depth) {
  std::vector<std::string> scope{free_var};
  return gen_prop(rng, scope, depth);
}

}  // namespace vigil::testsupport
