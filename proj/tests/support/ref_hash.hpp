#pragma once

// Reference digests via OpenSSL, kept independent of the core implementation.

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <string_view>

#include "vigil/digest.hpp"

namespace vigil::testsupport {

inline Digest ref_sha256(std::string_view data) {
  Digest out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

inline Digest ref_sha256(std::span<const uint8_t> data) {
  return ref_sha256(std::string_view(reinterpret_cast<const char*>(data.data()),
                                     data.size()));
}

inline Digest ref_hmac_sha256(const MacKey& key, std::string_view data) {
  Digest out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), int(key.size()),
       reinterpret_cast<const unsigned char*>(data.data()), data.size(),
       out.data(), &len);
  return out;
}

}  // namespace vigil::testsupport
