#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vigil {

using Digest = std::array<uint8_t, 32>;
using MacKey = std::array<uint8_t, 32>;

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
 public:
  Sha256();
  void update(std::span<const uint8_t> data);
  void update(std::string_view text);
  Digest finish();

  static Digest of(std::span<const uint8_t> data);
  static Digest of(std::string_view text);

 private:
  void compress(const uint8_t block[64]);

  std::array<uint32_t, 8> state_;
  std::array<uint8_t, 64> buffer_;
  uint64_t total_len_ = 0;
  size_t buffer_len_ = 0;
};

// Keyed tag: two-pass construction, inner = H((key ^ ipad) || msg),
// outer = H((key ^ opad) || inner). Block size 64.
Digest tag_message(const MacKey& key, std::span<const uint8_t> message);
Digest tag_message(const MacKey& key, std::string_view message);
bool verify_message(const MacKey& key, std::span<const uint8_t> message, const Digest& tag);
bool verify_message(const MacKey& key, std::string_view message, const Digest& tag);

std::string to_hex(std::span<const uint8_t> bytes);
std::string to_hex(const Digest& d);
std::optional<std::vector<uint8_t>> from_hex(std::string_view hex);
std::optional<Digest> digest_from_hex(std::string_view hex);
std::optional<MacKey> key_from_hex(std::string_view hex);

struct DigestHash {
  size_t operator()(const Digest& d) const noexcept {
    size_t h;
    static_assert(sizeof(h) <= 32);
    __builtin_memcpy(&h, d.data(), sizeof(h));
    return h;
  }
};

}  // namespace vigil
