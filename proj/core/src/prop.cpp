#include "vigil/prop.hpp"

namespace vigil {

const char* relop_text(Relop r) {
  switch (r) {
    case Relop::Eq: return "=";
    case Relop::Ne: return "!=";
    case Relop::Lt: return "<";
    case Relop::Le: return "<=";
    case Relop::Gt: return ">";
    case Relop::Ge: return ">=";
  }
  return "?";
}

namespace {
std::unique_ptr<Term> clone_ptr(const std::unique_ptr<Term>& t) {
  return t ? std::make_unique<Term>(t->clone()) : nullptr;
}
std::unique_ptr<Prop> clone_ptr(const std::unique_ptr<Prop>& p) {
  return p ? std::make_unique<Prop>(p->clone()) : nullptr;
}
bool ptr_equal(const std::unique_ptr<Term>& a, const std::unique_ptr<Term>& b) {
  if (!a || !b) return !a && !b;
  return a->equals(*b);
}
bool ptr_equal(const std::unique_ptr<Prop>& a, const std::unique_ptr<Prop>& b) {
  if (!a || !b) return !a && !b;
  return a->equals(*b);
}
}  // namespace

Term Term::clone() const {
  Term t;
  t.kind = kind;
  t.lit = lit;
  t.name = name;
  t.lhs = clone_ptr(lhs);
  t.rhs = clone_ptr(rhs);
  return t;
}

bool Term::equals(const Term& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Lit: return lit == other.lit;
    case Kind::Var: return name == other.name;
    case Kind::Pc:
    case Kind::Tick: return true;
    case Kind::Reg:
    case Kind::Mem: return ptr_equal(lhs, other.lhs);
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
      return ptr_equal(lhs, other.lhs) && ptr_equal(rhs, other.rhs);
  }
  return false;
}

std::string Term::text() const {
  switch (kind) {
    case Kind::Lit: return std::to_string(lit);
    case Kind::Var: return name;
    case Kind::Pc: return "pc";
    case Kind::Tick: return "tick";
    case Kind::Reg: return "reg(" + lhs->text() + ")";
    case Kind::Mem: return "mem(" + lhs->text() + ")";
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul: {
      const char* op = kind == Kind::Add ? " + " : kind == Kind::Sub ? " - " : " * ";
      auto wrap = [](const Term& t) {
        bool atom = t.kind != Kind::Add && t.kind != Kind::Sub && t.kind != Kind::Mul;
        return atom ? t.text() : "(" + t.text() + ")";
      };
      return wrap(*lhs) + op + wrap(*rhs);
    }
  }
  return "?";
}

Term Term::literal(uint64_t v) {
  Term t;
  t.kind = Kind::Lit;
  t.lit = v;
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  return t;
}

Term Term::reg(Term index) {
  Term t;
  t.kind = Kind::Reg;
  t.lhs = std::make_unique<Term>(std::move(index));
  return t;
}

Term Term::mem(Term address) {
  Term t;
  t.kind = Kind::Mem;
  t.lhs = std::make_unique<Term>(std::move(address));
  return t;
}

Term Term::pc() {
  Term t;
  t.kind = Kind::Pc;
  return t;
}

Term Term::tick() {
  Term t;
  t.kind = Kind::Tick;
  return t;
}

Term Term::binary(Kind k, Term lhs, Term rhs) {
  Term t;
  t.kind = k;
  t.lhs = std::make_unique<Term>(std::move(lhs));
  t.rhs = std::make_unique<Term>(std::move(rhs));
  return t;
}

Prop Prop::clone() const {
  Prop p;
  p.kind = kind;
  p.rel = rel;
  p.t_lhs = clone_ptr(t_lhs);
  p.t_rhs = clone_ptr(t_rhs);
  p.p_lhs = clone_ptr(p_lhs);
  p.p_rhs = clone_ptr(p_rhs);
  p.var = var;
  return p;
}

bool Prop::equals(const Prop& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::True:
    case Kind::False: return true;
    case Kind::Cmp:
      return rel == other.rel && ptr_equal(t_lhs, other.t_lhs) &&
             ptr_equal(t_rhs, other.t_rhs);
    case Kind::Not: return ptr_equal(p_lhs, other.p_lhs);
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
      return ptr_equal(p_lhs, other.p_lhs) && ptr_equal(p_rhs, other.p_rhs);
    case Kind::Forall:
    case Kind::Exists:
      return var == other.var && ptr_equal(t_lhs, other.t_lhs) &&
             ptr_equal(t_rhs, other.t_rhs) && ptr_equal(p_lhs, other.p_lhs);
  }
  return false;
}

std::string Prop::text() const {
  auto wrap = [](const Prop& p) {
    bool atom = p.kind == Kind::True || p.kind == Kind::False || p.kind == Kind::Cmp;
    return atom ? p.text() : "(" + p.text() + ")";
  };
  switch (kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Cmp:
      return t_lhs->text() + " " + relop_text(rel) + " " + t_rhs->text();
    case Kind::Not: return "!" + wrap(*p_lhs);
    case Kind::And: return wrap(*p_lhs) + " & " + wrap(*p_rhs);
    case Kind::Or: return wrap(*p_lhs) + " | " + wrap(*p_rhs);
    case Kind::Implies: return wrap(*p_lhs) + " -> " + wrap(*p_rhs);
    case Kind::Forall:
    case Kind::Exists: {
      const char* q = kind == Kind::Forall ? "forall" : "exists";
      return std::string(q) + " " + var + " in " + t_lhs->text() + ".." +
             t_rhs->text() + " . " + p_lhs->text();
    }
  }
  return "?";
}

Prop Prop::make_true() {
  Prop p;
  p.kind = Kind::True;
  return p;
}

Prop Prop::make_false() {
  Prop p;
  p.kind = Kind::False;
  return p;
}

Prop Prop::cmp(Term lhs, Relop rel, Term rhs) {
  Prop p;
  p.kind = Kind::Cmp;
  p.rel = rel;
  p.t_lhs = std::make_unique<Term>(std::move(lhs));
  p.t_rhs = std::make_unique<Term>(std::move(rhs));
  return p;
}

Prop Prop::negate(Prop inner) {
  Prop p;
  p.kind = Kind::Not;
  p.p_lhs = std::make_unique<Prop>(std::move(inner));
  return p;
}

Prop Prop::connect(Kind k, Prop lhs, Prop rhs) {
  Prop p;
  p.kind = k;
  p.p_lhs = std::make_unique<Prop>(std::move(lhs));
  p.p_rhs = std::make_unique<Prop>(std::move(rhs));
  return p;
}

Prop Prop::quantifier(Kind k, std::string var, Term lo, Term hi, Prop body) {
  Prop p;
  p.kind = k;
  p.var = std::move(var);
  p.t_lhs = std::make_unique<Term>(std::move(lo));
  p.t_rhs = std::make_unique<Term>(std::move(hi));
  p.p_lhs = std::make_unique<Prop>(std::move(body));
  return p;
}

namespace {

Term subst_term(const Term& t, std::string_view var, uint64_t value) {
  if (t.kind == Term::Kind::Var && t.name == var) {
    return Term::literal(value);
  }
  Term out;
  out.kind = t.kind;
  out.lit = t.lit;
  out.name = t.name;
  if (t.lhs) out.lhs = std::make_unique<Term>(subst_term(*t.lhs, var, value));
  if (t.rhs) out.rhs = std::make_unique<Term>(subst_term(*t.rhs, var, value));
  return out;
}

}  // namespace

Prop subst(const Prop& prop, std::string_view var, uint64_t value) {
  Prop out;
  out.kind = prop.kind;
  out.rel = prop.rel;
  out.var = prop.var;
  // Quantifier bounds sit outside the binding, so they are substituted even
  // when the quantifier shadows `var`; the body is substituted only when it
  // does not.
  if (prop.t_lhs) out.t_lhs = std::make_unique<Term>(subst_term(*prop.t_lhs, var, value));
  if (prop.t_rhs) out.t_rhs = std::make_unique<Term>(subst_term(*prop.t_rhs, var, value));
  bool shadowed = (prop.kind == Prop::Kind::Forall || prop.kind == Prop::Kind::Exists) &&
                  prop.var == var;
  if (prop.p_lhs) {
    out.p_lhs = shadowed ? std::make_unique<Prop>(prop.p_lhs->clone())
                         : std::make_unique<Prop>(subst(*prop.p_lhs, var, value));
  }
  if (prop.p_rhs) {
    out.p_rhs = shadowed ? std::make_unique<Prop>(prop.p_rhs->clone())
                         : std::make_unique<Prop>(subst(*prop.p_rhs, var, value));
  }
  return out;
}

}  // namespace vigil
