#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vigil/vm.hpp"

namespace vigil {

enum class Relop : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* relop_text(Relop r);

// Term language: 64-bit unsigned values with wrapping arithmetic. reg(t) and
// mem(t) read the machine state, with indices reduced mod 8 and mod 256 so
// evaluation stays total.
struct Term {
  enum class Kind : uint8_t { Lit, Var, Reg, Mem, Pc, Tick, Add, Sub, Mul };

  Kind kind = Kind::Lit;
  uint64_t lit = 0;                // Lit
  std::string name;                // Var
  std::unique_ptr<Term> lhs, rhs;  // Add/Sub/Mul both; Reg/Mem lhs only

  Term() = default;
  Term clone() const;
  bool equals(const Term& other) const;
  std::string text() const;

  static Term literal(uint64_t v);
  static Term var(std::string name);
  static Term reg(Term index);
  static Term mem(Term address);
  static Term pc();
  static Term tick();
  static Term binary(Kind k, Term lhs, Term rhs);
};

// Propositions: quantifier-free connectives plus bounded forall/exists. There
// is no unbounded quantifier constructor; bounds are terms evaluated at
// judgement time.
struct Prop {
  enum class Kind : uint8_t {
    True,
    False,
    Cmp,
    Not,
    And,
    Or,
    Implies,
    Forall,
    Exists,
  };

  Kind kind = Kind::True;
  Relop rel = Relop::Eq;           // Cmp
  std::unique_ptr<Term> t_lhs, t_rhs;  // Cmp operands; quantifier lo/hi bounds
  std::unique_ptr<Prop> p_lhs, p_rhs;  // connective operands; quantifier body in p_lhs
  std::string var;                 // quantifier variable

  Prop() = default;
  Prop clone() const;
  bool equals(const Prop& other) const;
  std::string text() const;

  static Prop make_true();
  static Prop make_false();
  static Prop cmp(Term lhs, Relop rel, Term rhs);
  static Prop negate(Prop p);
  static Prop connect(Kind k, Prop lhs, Prop rhs);
  static Prop quantifier(Kind k, std::string var, Term lo, Term hi, Prop body);
};

struct PropError : std::runtime_error {
  enum class Kind { SyntaxError, FreeVariable, QuantifierRangeTooLarge };
  PropError(Kind k, size_t pos, const std::string& msg)
      : std::runtime_error(msg), kind(k), position(pos) {}
  Kind kind;
  size_t position;  // byte offset for SyntaxError, 0 otherwise
};

// Grammar:
//   prop  := or ("->" prop)? ;
//   or    := and ("|" and)* ;
//   and   := not ("&" not)* ;
//   not   := "!" not | atom ;
//   atom  := "(" prop ")" | "true" | "false" | quant | cmp ;
//   quant := ("forall"|"exists") IDENT "in" term ".." term "." prop ;
//   cmp   := term ("="|"!="|"<"|"<="|">"|">=") term ;
//   term  := factor (("+"|"-") factor)* ;  factor := prim ("*" prim)* ;
//   prim  := NAT | IDENT | "reg(" term ")" | "mem(" term ")" | "pc" | "tick"
//          | "(" term ")" ;
Prop parse_prop(std::string_view text);

// Replaces free occurrences of `var` with Lit(value); bound occurrences stay.
Prop subst(const Prop& prop, std::string_view var, uint64_t value);

using Env = std::map<std::string, uint64_t, std::less<>>;

inline constexpr uint64_t kMaxQuantifierRange = 65536;

// Total on closed in-limit propositions; quantifiers iterate the inclusive
// range [lo, hi], vacuous when lo > hi. Throws FreeVariable and
// QuantifierRangeTooLarge.
bool evaluate(const Prop& prop, const VmState& state);
bool evaluate_env(const Prop& prop, const VmState& state, const Env& env);
uint64_t evaluate_term(const Term& term, const VmState& state, const Env& env);

}  // namespace vigil
