#include "vigil/prop_code.hpp"

#include <algorithm>

#include "vigil/digest.hpp"

namespace vigil {

namespace {

// Node tags; zero is reserved so a code never starts with a zero byte.
enum Tag : uint8_t {
  kTrue = 1, kFalse = 2, kCmp = 3, kNot = 4, kAnd = 5, kOr = 6, kImplies = 7,
  kForall = 8, kExists = 9,
  kLit = 10, kVar = 11, kReg = 12, kMem = 13, kPc = 14, kTick = 15,
  kAdd = 16, kSub = 17, kMul = 18,
};

void put_varint(std::vector<uint8_t>& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(uint8_t(v) | 0x80);
    v >>= 7;
  }
  out.push_back(uint8_t(v));
}

void encode_term(std::vector<uint8_t>& out, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Lit:
      out.push_back(kLit);
      put_varint(out, t.lit);
      break;
    case Term::Kind::Var:
      out.push_back(kVar);
      put_varint(out, t.name.size());
      out.insert(out.end(), t.name.begin(), t.name.end());
      break;
    case Term::Kind::Reg:
      out.push_back(kReg);
      encode_term(out, *t.lhs);
      break;
    case Term::Kind::Mem:
      out.push_back(kMem);
      encode_term(out, *t.lhs);
      break;
    case Term::Kind::Pc:
      out.push_back(kPc);
      break;
    case Term::Kind::Tick:
      out.push_back(kTick);
      break;
    case Term::Kind::Add:
    case Term::Kind::Sub:
    case Term::Kind::Mul:
      out.push_back(t.kind == Term::Kind::Add   ? kAdd
                    : t.kind == Term::Kind::Sub ? kSub
                                                : kMul);
      encode_term(out, *t.lhs);
      encode_term(out, *t.rhs);
      break;
  }
}

void encode_prop(std::vector<uint8_t>& out, const Prop& p) {
  switch (p.kind) {
    case Prop::Kind::True:
      out.push_back(kTrue);
      break;
    case Prop::Kind::False:
      out.push_back(kFalse);
      break;
    case Prop::Kind::Cmp:
      out.push_back(kCmp);
      out.push_back(uint8_t(p.rel) + 1);
      encode_term(out, *p.t_lhs);
      encode_term(out, *p.t_rhs);
      break;
    case Prop::Kind::Not:
      out.push_back(kNot);
      encode_prop(out, *p.p_lhs);
      break;
    case Prop::Kind::And:
    case Prop::Kind::Or:
    case Prop::Kind::Implies:
      out.push_back(p.kind == Prop::Kind::And  ? kAnd
                    : p.kind == Prop::Kind::Or ? kOr
                                               : kImplies);
      encode_prop(out, *p.p_lhs);
      encode_prop(out, *p.p_rhs);
      break;
    case Prop::Kind::Forall:
    case Prop::Kind::Exists:
      out.push_back(p.kind == Prop::Kind::Forall ? kForall : kExists);
      put_varint(out, p.var.size());
      out.insert(out.end(), p.var.begin(), p.var.end());
      encode_term(out, *p.t_lhs);
      encode_term(out, *p.t_rhs);
      encode_prop(out, *p.p_lhs);
      break;
  }
}

class Decoder {
 public:
  explicit Decoder(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  Prop decode_all() {
    Prop p = decode_prop();
    if (pos_ != bytes_.size()) {
      throw MalformedCode("trailing bytes after proposition");
    }
    return p;
  }

 private:
  uint8_t take() {
    if (pos_ >= bytes_.size()) throw MalformedCode("truncated code");
    return bytes_[pos_++];
  }

  uint64_t take_varint() {
    uint64_t value = 0;
    int shift = 0;
    int len = 0;
    uint8_t b;
    do {
      if (shift > 63) throw MalformedCode("varint too long");
      b = take();
      ++len;
      if (shift == 63 && (b & 0x7e)) throw MalformedCode("varint overflow");
      value |= uint64_t(b & 0x7f) << shift;
      shift += 7;
    } while (b & 0x80);
    // Reject non-minimal encodings; the coding must be canonical.
    if (len > 1 && b == 0) throw MalformedCode("non-minimal varint");
    return value;
  }

  std::string take_name() {
    uint64_t len = take_varint();
    if (len > 255) throw MalformedCode("name too long");
    if (pos_ + len > bytes_.size()) throw MalformedCode("truncated name");
    std::string name(bytes_.begin() + long(pos_), bytes_.begin() + long(pos_ + len));
    pos_ += len;
    return name;
  }

  Term decode_term() {
    switch (take()) {
      case kLit:
        return Term::literal(take_varint());
      case kVar:
        return Term::var(take_name());
      case kReg:
        return Term::reg(decode_term());
      case kMem:
        return Term::mem(decode_term());
      case kPc:
        return Term::pc();
      case kTick:
        return Term::tick();
      case kAdd:
      case kSub:
      case kMul: {
        Term::Kind kind = bytes_[pos_ - 1] == kAdd   ? Term::Kind::Add
                          : bytes_[pos_ - 1] == kSub ? Term::Kind::Sub
                                                     : Term::Kind::Mul;
        Term lhs = decode_term();
        Term rhs = decode_term();
        return Term::binary(kind, std::move(lhs), std::move(rhs));
      }
      default:
        throw MalformedCode("bad term tag");
    }
  }

  Prop decode_prop() {
    if (depth_ > 10000) throw MalformedCode("nesting too deep");
    ++depth_;
    Prop out = [&]() -> Prop {
      switch (take()) {
        case kTrue:
          return Prop::make_true();
        case kFalse:
          return Prop::make_false();
        case kCmp: {
          uint8_t rel = take();
          if (rel < 1 || rel > 6) throw MalformedCode("bad relop");
          Term lhs = decode_term();
          Term rhs = decode_term();
          return Prop::cmp(std::move(lhs), Relop(rel - 1), std::move(rhs));
        }
        case kNot:
          return Prop::negate(decode_prop());
        case kAnd: {
          Prop lhs = decode_prop();
          return Prop::connect(Prop::Kind::And, std::move(lhs), decode_prop());
        }
        case kOr: {
          Prop lhs = decode_prop();
          return Prop::connect(Prop::Kind::Or, std::move(lhs), decode_prop());
        }
        case kImplies: {
          Prop lhs = decode_prop();
          return Prop::connect(Prop::Kind::Implies, std::move(lhs), decode_prop());
        }
        case kForall:
        case kExists: {
          Prop::Kind kind = bytes_[pos_ - 1] == kForall ? Prop::Kind::Forall
                                                        : Prop::Kind::Exists;
          std::string var = take_name();
          Term lo = decode_term();
          Term hi = decode_term();
          Prop body = decode_prop();
          return Prop::quantifier(kind, std::move(var), std::move(lo), std::move(hi),
                                  std::move(body));
        }
        default:
          throw MalformedCode("bad proposition tag");
      }
    }();
    --depth_;
    return out;
  }

  const std::vector<uint8_t>& bytes_;
  size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

std::string PropCode::hex() const {
  return to_hex(std::span<const uint8_t>(bytes_.data(), bytes_.size()));
}

std::string PropCode::decimal() const {
  if (bytes_.empty()) return "0";
  // Repeated division by 10 over the big-endian byte string.
  std::vector<uint8_t> work = bytes_;
  std::string digits;
  while (!work.empty()) {
    uint32_t rem = 0;
    std::vector<uint8_t> quotient;
    quotient.reserve(work.size());
    for (uint8_t byte : work) {
      uint32_t cur = (rem << 8) | byte;
      quotient.push_back(uint8_t(cur / 10));
      rem = cur % 10;
    }
    digits.push_back(char('0' + rem));
    size_t skip = 0;
    while (skip < quotient.size() && quotient[skip] == 0) ++skip;
    quotient.erase(quotient.begin(), quotient.begin() + long(skip));
    work = std::move(quotient);
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

PropCode PropCode::from_hex(std::string_view hex) {
  auto bytes = vigil::from_hex(hex);
  if (!bytes || bytes->empty()) throw MalformedCode("bad hex code");
  return PropCode(std::move(*bytes));
}

PropCode encode(const Prop& prop) {
  std::vector<uint8_t> out;
  encode_prop(out, prop);
  return PropCode(std::move(out));
}

Prop decode(const PropCode& code) {
  if (code.bytes().empty()) throw MalformedCode("empty code");
  return Decoder(code.bytes()).decode_all();
}

}  // namespace vigil
