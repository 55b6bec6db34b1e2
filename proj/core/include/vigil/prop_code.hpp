#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vigil/prop.hpp"

namespace vigil {

struct MalformedCode : std::runtime_error {
  explicit MalformedCode(const std::string& msg) : std::runtime_error(msg) {}
};

// The canonical code of a proposition: an arbitrary-precision natural, held
// as the big-endian byte string of the prefix serialization (one tag byte per
// node, minimal varint literals, length-prefixed names). Tags start at 1, so
// the leading byte is never zero and byte strings map bijectively onto
// naturals.
class PropCode {
 public:
  PropCode() = default;
  explicit PropCode(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)) {}

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::string hex() const;
  // The natural in base 10; exercises the arbitrary-precision reading.
  std::string decimal() const;

  static PropCode from_hex(std::string_view hex);  // throws MalformedCode

  bool operator==(const PropCode&) const = default;
  auto operator<=>(const PropCode&) const = default;

 private:
  std::vector<uint8_t> bytes_;
};

PropCode encode(const Prop& prop);
Prop decode(const PropCode& code);  // throws MalformedCode

}  // namespace vigil
