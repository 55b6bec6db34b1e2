#pragma once

// Brute-force proposition oracle. Quantifiers are expanded into explicit
// conjunction/disjunction chains using the oracle's own substitution, and the
// quantifier-free remainder is evaluated with the oracle's own term walker.
// Nothing here calls the core evaluate/subst paths.

#include <stdexcept>

#include "vigil/prop.hpp"

namespace vigil::testsupport {

inline Term oracle_subst_term(const Term& t, const std::string& var, uint64_t value) {
  if (t.kind == Term::Kind::Var) {
    if (t.name == var) return Term::literal(value);
    return Term::var(t.name);
  }
  Term out;
  out.kind = t.kind;
  out.lit = t.lit;
  out.name = t.name;
  if (t.lhs) out.lhs = std::make_unique<Term>(oracle_subst_term(*t.lhs, var, value));
  if (t.rhs) out.rhs = std::make_unique<Term>(oracle_subst_term(*t.rhs, var, value));
  return out;
}

inline Prop oracle_subst(const Prop& p, const std::string& var, uint64_t value) {
  Prop out;
  out.kind = p.kind;
  out.rel = p.rel;
  out.var = p.var;
  if (p.t_lhs) out.t_lhs = std::make_unique<Term>(oracle_subst_term(*p.t_lhs, var, value));
  if (p.t_rhs) out.t_rhs = std::make_unique<Term>(oracle_subst_term(*p.t_rhs, var, value));
  bool shadowed =
      (p.kind == Prop::Kind::Forall || p.kind == Prop::Kind::Exists) && p.var == var;
  if (p.p_lhs) {
    out.p_lhs = std::make_unique<Prop>(shadowed ? p.p_lhs->clone()
                                                : oracle_subst(*p.p_lhs, var, value));
  }
  if (p.p_rhs) {
    out.p_rhs = std::make_unique<Prop>(shadowed ? p.p_rhs->clone()
                                                : oracle_subst(*p.p_rhs, var, value));
  }
  return out;
}

inline uint64_t oracle_term(const Term& t, const VmState& state) {
  switch (t.kind) {
    case Term::Kind::Lit: return t.lit;
    case Term::Kind::Var:
      throw std::runtime_error("oracle: unexpected free variable " + t.name);
    case Term::Kind::Pc: return state.pc;
    case Term::Kind::Tick: return state.tick;
    case Term::Kind::Reg: return state.regs[oracle_term(*t.lhs, state) % kRegCount];
    case Term::Kind::Mem: return state.mem[oracle_term(*t.lhs, state) % kMemWords];
    case Term::Kind::Add: return oracle_term(*t.lhs, state) + oracle_term(*t.rhs, state);
    case Term::Kind::Sub: return oracle_term(*t.lhs, state) - oracle_term(*t.rhs, state);
    case Term::Kind::Mul: return oracle_term(*t.lhs, state) * oracle_term(*t.rhs, state);
  }
  return 0;
}

inline bool oracle_eval(const Prop& p, const VmState& state) {
  switch (p.kind) {
    case Prop::Kind::True: return true;
    case Prop::Kind::False: return false;
    case Prop::Kind::Cmp: {
      uint64_t l = oracle_term(*p.t_lhs, state);
      uint64_t r = oracle_term(*p.t_rhs, state);
      switch (p.rel) {
        case Relop::Eq: return l == r;
        case Relop::Ne: return l != r;
        case Relop::Lt: return l < r;
        case Relop::Le: return l <= r;
        case Relop::Gt: return l > r;
        case Relop::Ge: return l >= r;
      }
      return false;
    }
    case Prop::Kind::Not: return !oracle_eval(*p.p_lhs, state);
    case Prop::Kind::And:
      return oracle_eval(*p.p_lhs, state) && oracle_eval(*p.p_rhs, state);
    case Prop::Kind::Or:
      return oracle_eval(*p.p_lhs, state) || oracle_eval(*p.p_rhs, state);
    case Prop::Kind::Implies:
      return !oracle_eval(*p.p_lhs, state) || oracle_eval(*p.p_rhs, state);
    case Prop::Kind::Forall:
    case Prop::Kind::Exists: {
      uint64_t lo = oracle_term(*p.t_lhs, state);
      uint64_t hi = oracle_term(*p.t_rhs, state);
      bool is_forall = p.kind == Prop::Kind::Forall;
      if (lo > hi) return is_forall;
      if (hi - lo + 1 > kMaxQuantifierRange || hi - lo + 1 == 0) {
        throw std::runtime_error("oracle: range too large");
      }
      // Explicit expansion into a con/disjunction over the instantiated body.
      Prop expanded = oracle_subst(*p.p_lhs, p.var, lo);
      for (uint64_t v = lo + 1; v != 0 && v <= hi; ++v) {
        expanded = Prop::connect(is_forall ? Prop::Kind::And : Prop::Kind::Or,
                                 std::move(expanded), oracle_subst(*p.p_lhs, p.var, v));
      }
      return oracle_eval(expanded, state);
    }
  }
  return false;
}

}  // namespace vigil::testsupport
