#include "vigil/prop.hpp"

namespace vigil {

uint64_t evaluate_term(const Term& term, const VmState& state, const Env& env) {
  switch (term.kind) {
    case Term::Kind::Lit:
      return term.lit;
    case Term::Kind::Var: {
      auto it = env.find(term.name);
      if (it == env.end()) {
        throw PropError(PropError::Kind::FreeVariable, 0,
                        "free variable '" + term.name + "'");
      }
      return it->second;
    }
    case Term::Kind::Pc:
      return state.pc;
    case Term::Kind::Tick:
      return state.tick;
    case Term::Kind::Reg:
      return state.regs[evaluate_term(*term.lhs, state, env) % kRegCount];
    case Term::Kind::Mem:
      return state.mem[evaluate_term(*term.lhs, state, env) % kMemWords];
    case Term::Kind::Add:
      return evaluate_term(*term.lhs, state, env) + evaluate_term(*term.rhs, state, env);
    case Term::Kind::Sub:
      return evaluate_term(*term.lhs, state, env) - evaluate_term(*term.rhs, state, env);
    case Term::Kind::Mul:
      return evaluate_term(*term.lhs, state, env) * evaluate_term(*term.rhs, state, env);
  }
  return 0;
}

namespace {

bool compare(uint64_t lhs, Relop rel, uint64_t rhs) {
  switch (rel) {
    case Relop::Eq: return lhs == rhs;
    case Relop::Ne: return lhs != rhs;
    case Relop::Lt: return lhs < rhs;
    case Relop::Le: return lhs <= rhs;
    case Relop::Gt: return lhs > rhs;
    case Relop::Ge: return lhs >= rhs;
  }
  return false;
}

}  // namespace

bool evaluate_env(const Prop& prop, const VmState& state, const Env& env) {
  switch (prop.kind) {
    case Prop::Kind::True:
      return true;
    case Prop::Kind::False:
      return false;
    case Prop::Kind::Cmp:
      return compare(evaluate_term(*prop.t_lhs, state, env), prop.rel,
                     evaluate_term(*prop.t_rhs, state, env));
    case Prop::Kind::Not:
      return !evaluate_env(*prop.p_lhs, state, env);
    case Prop::Kind::And:
      return evaluate_env(*prop.p_lhs, state, env) &&
             evaluate_env(*prop.p_rhs, state, env);
    case Prop::Kind::Or:
      return evaluate_env(*prop.p_lhs, state, env) ||
             evaluate_env(*prop.p_rhs, state, env);
    case Prop::Kind::Implies:
      return !evaluate_env(*prop.p_lhs, state, env) ||
             evaluate_env(*prop.p_rhs, state, env);
    case Prop::Kind::Forall:
    case Prop::Kind::Exists: {
      // Bounds are evaluated outside the binding.
      uint64_t lo = evaluate_term(*prop.t_lhs, state, env);
      uint64_t hi = evaluate_term(*prop.t_rhs, state, env);
      bool is_forall = prop.kind == Prop::Kind::Forall;
      if (lo > hi) return is_forall;  // vacuous range
      if (hi - lo + 1 > kMaxQuantifierRange || hi - lo + 1 == 0) {
        throw PropError(PropError::Kind::QuantifierRangeTooLarge, 0,
                        "quantifier range [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "] exceeds " +
                            std::to_string(kMaxQuantifierRange));
      }
      Env inner = env;
      for (uint64_t v = lo;; ++v) {
        inner[prop.var] = v;
        bool r = evaluate_env(*prop.p_lhs, state, inner);
        if (is_forall && !r) return false;
        if (!is_forall && r) return true;
        if (v == hi) break;
      }
      return is_forall;
    }
  }
  return false;
}

bool evaluate(const Prop& prop, const VmState& state) {
  return evaluate_env(prop, state, Env{});
}

}  // namespace vigil
