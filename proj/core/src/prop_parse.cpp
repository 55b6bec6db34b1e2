#include <cctype>
#include <charconv>

#include "vigil/prop.hpp"

namespace vigil {

namespace {

enum class Tok : uint8_t {
  Nat, Ident, True, False, Forall, Exists, In, Pc, Tick, RegKw, MemKw,
  LParen, RParen, Bang, Amp, Pipe, Arrow, Dot, DotDot,
  Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, End,
};

struct Token {
  Tok kind = Tok::End;
  size_t pos = 0;
  uint64_t nat = 0;
  std::string ident;
};

Token make_token(Tok kind, size_t pos) {
  Token t;
  t.kind = kind;
  t.pos = pos;
  return t;
}

[[noreturn]] void fail(size_t pos, const std::string& msg) {
  throw PropError(PropError::Kind::SyntaxError, pos,
                  msg + " at position " + std::to_string(pos));
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    current_ = make_token(Tok::End, pos_);
    if (pos_ >= text_.size()) return;

    size_t start = pos_;
    char c = text_[pos_];
    auto two = [&](char second) {
      return pos_ + 1 < text_.size() && text_[pos_ + 1] == second;
    };

    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t value = 0;
      int base = 10;
      const char* begin = text_.data() + pos_;
      if (c == '0' && two('x')) {
        begin += 2;
        pos_ += 2;
        base = 16;
        if (pos_ >= text_.size() ||
            !std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
          fail(start, "bad hex literal");
        }
      }
      const char* end = text_.data() + text_.size();
      auto [p, ec] = std::from_chars(begin, end, value, base);
      if (ec == std::errc::result_out_of_range) fail(start, "literal too large");
      if (ec != std::errc()) fail(start, "bad literal");
      pos_ = size_t(p - text_.data());
      current_ = make_token(Tok::Nat, start);
      current_.nat = value;
      return;
    }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        ++end;
      }
      std::string word(text_.substr(pos_, end - pos_));
      pos_ = end;
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "forall") kind = Tok::Forall;
      else if (word == "exists") kind = Tok::Exists;
      else if (word == "in") kind = Tok::In;
      else if (word == "pc") kind = Tok::Pc;
      else if (word == "tick") kind = Tok::Tick;
      else if (word == "reg") kind = Tok::RegKw;
      else if (word == "mem") kind = Tok::MemKw;
      current_ = make_token(kind, start);
      current_.ident = std::move(word);
      return;
    }

    switch (c) {
      case '(': current_ = make_token(Tok::LParen, start); ++pos_; return;
      case ')': current_ = make_token(Tok::RParen, start); ++pos_; return;
      case '&': current_ = make_token(Tok::Amp, start); ++pos_; return;
      case '|': current_ = make_token(Tok::Pipe, start); ++pos_; return;
      case '+': current_ = make_token(Tok::Plus, start); ++pos_; return;
      case '*': current_ = make_token(Tok::Star, start); ++pos_; return;
      case '!':
        if (two('=')) { current_ = make_token(Tok::Ne, start); pos_ += 2; }
        else { current_ = make_token(Tok::Bang, start); ++pos_; }
        return;
      case '-':
        if (two('>')) { current_ = make_token(Tok::Arrow, start); pos_ += 2; }
        else { current_ = make_token(Tok::Minus, start); ++pos_; }
        return;
      case '.':
        if (two('.')) { current_ = make_token(Tok::DotDot, start); pos_ += 2; }
        else { current_ = make_token(Tok::Dot, start); ++pos_; }
        return;
      case '=': current_ = make_token(Tok::Eq, start); ++pos_; return;
      case '<':
        if (two('=')) { current_ = make_token(Tok::Le, start); pos_ += 2; }
        else { current_ = make_token(Tok::Lt, start); ++pos_; }
        return;
      case '>':
        if (two('=')) { current_ = make_token(Tok::Ge, start); pos_ += 2; }
        else { current_ = make_token(Tok::Gt, start); ++pos_; }
        return;
      default:
        fail(start, std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Prop parse() {
    Prop p = parse_prop();
    if (lex_.peek().kind != Tok::End) {
      fail(lex_.peek().pos, "trailing input");
    }
    return p;
  }

 private:
  void expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind) fail(lex_.peek().pos, std::string("expected ") + what);
    lex_.take();
  }

  Prop parse_prop() {
    Prop lhs = parse_or();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      return Prop::connect(Prop::Kind::Implies, std::move(lhs), parse_prop());
    }
    return lhs;
  }

  Prop parse_or() {
    Prop lhs = parse_and();
    while (lex_.peek().kind == Tok::Pipe) {
      lex_.take();
      lhs = Prop::connect(Prop::Kind::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  Prop parse_and() {
    Prop lhs = parse_not();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      lhs = Prop::connect(Prop::Kind::And, std::move(lhs), parse_not());
    }
    return lhs;
  }

  Prop parse_not() {
    if (lex_.peek().kind == Tok::Bang) {
      lex_.take();
      return Prop::negate(parse_not());
    }
    return parse_atom();
  }

  Prop parse_atom() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::True:
        lex_.take();
        return Prop::make_true();
      case Tok::False:
        lex_.take();
        return Prop::make_false();
      case Tok::Forall:
      case Tok::Exists: {
        Prop::Kind kind = t.kind == Tok::Forall ? Prop::Kind::Forall : Prop::Kind::Exists;
        lex_.take();
        Token name = lex_.peek();
        if (name.kind != Tok::Ident) fail(name.pos, "expected quantifier variable");
        lex_.take();
        expect(Tok::In, "'in'");
        Term lo = parse_term();
        expect(Tok::DotDot, "'..' (bounded range required)");
        Term hi = parse_term();
        expect(Tok::Dot, "'.'");
        Prop body = parse_prop();
        return Prop::quantifier(kind, std::move(name.ident), std::move(lo),
                                std::move(hi), std::move(body));
      }
      case Tok::LParen: {
        // Either a parenthesized proposition or a parenthesized term that
        // starts a comparison; try the proposition first.
        Lexer saved = lex_;
        lex_.take();
        try {
          Prop inner = parse_prop();
          expect(Tok::RParen, "')'");
          return inner;
        } catch (const PropError&) {
          lex_ = saved;
          return parse_cmp();
        }
      }
      default:
        return parse_cmp();
    }
  }

  Prop parse_cmp() {
    Term lhs = parse_term();
    Relop rel;
    switch (lex_.peek().kind) {
      case Tok::Eq: rel = Relop::Eq; break;
      case Tok::Ne: rel = Relop::Ne; break;
      case Tok::Lt: rel = Relop::Lt; break;
      case Tok::Le: rel = Relop::Le; break;
      case Tok::Gt: rel = Relop::Gt; break;
      case Tok::Ge: rel = Relop::Ge; break;
      default:
        fail(lex_.peek().pos, "expected comparison operator");
    }
    lex_.take();
    Term rhs = parse_term();
    return Prop::cmp(std::move(lhs), rel, std::move(rhs));
  }

  Term parse_term() {
    Term lhs = parse_factor();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Term::Kind k = lex_.take().kind == Tok::Plus ? Term::Kind::Add : Term::Kind::Sub;
      lhs = Term::binary(k, std::move(lhs), parse_factor());
    }
    return lhs;
  }

  Term parse_factor() {
    Term lhs = parse_prim();
    while (lex_.peek().kind == Tok::Star) {
      lex_.take();
      lhs = Term::binary(Term::Kind::Mul, std::move(lhs), parse_prim());
    }
    return lhs;
  }

  Term parse_prim() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Nat:
        lex_.take();
        return Term::literal(t.nat);
      case Tok::Ident:
        lex_.take();
        return Term::var(std::move(t.ident));
      case Tok::Pc:
        lex_.take();
        return Term::pc();
      case Tok::Tick:
        lex_.take();
        return Term::tick();
      case Tok::RegKw: {
        lex_.take();
        expect(Tok::LParen, "'('");
        Term idx = parse_term();
        expect(Tok::RParen, "')'");
        return Term::reg(std::move(idx));
      }
      case Tok::MemKw: {
        lex_.take();
        expect(Tok::LParen, "'('");
        Term addr = parse_term();
        expect(Tok::RParen, "')'");
        return Term::mem(std::move(addr));
      }
      case Tok::LParen: {
        lex_.take();
        Term inner = parse_term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(t.pos, "expected term");
    }
  }

  Lexer lex_;
};

}  // namespace

Prop parse_prop(std::string_view text) { return Parser(text).parse(); }

}  // namespace vigil
