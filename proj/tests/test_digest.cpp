#include <doctest.h>

#include <random>

#include "support/ref_hash.hpp"
#include "vigil/digest.hpp"

using namespace vigil;
using namespace vigil::testsupport;

TEST_CASE("sha256 matches published vectors") {
  CHECK(to_hex(Sha256::of("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(Sha256::of("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(Sha256::of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 agrees with the reference implementation on random input") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    size_t len = std::uniform_int_distribution<size_t>(0, 300)(rng);
    std::string data(len, '\0');
    for (auto& c : data) c = char(rng());
    CHECK(Sha256::of(data) == ref_sha256(data));
  }
  // Block-boundary lengths have their own padding paths.
  for (size_t len : {55u, 56u, 57u, 63u, 64u, 65u, 127u, 128u, 129u}) {
    std::string data(len, 'x');
    CHECK(Sha256::of(data) == ref_sha256(data));
  }
}

TEST_CASE("incremental updates equal one-shot hashing") {
  std::string data(1000, '\0');
  std::mt19937_64 rng(2);
  for (auto& c : data) c = char(rng());
  Sha256 h;
  h.update(std::string_view(data).substr(0, 3));
  h.update(std::string_view(data).substr(3, 61));
  h.update(std::string_view(data).substr(64, 500));
  h.update(std::string_view(data).substr(564));
  CHECK(h.finish() == Sha256::of(data));
}

TEST_CASE("keyed tags agree with the reference and reject forgeries") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    MacKey key;
    for (auto& b : key) b = uint8_t(rng());
    size_t len = std::uniform_int_distribution<size_t>(0, 200)(rng);
    std::string msg(len, '\0');
    for (auto& c : msg) c = char(rng());

    Digest tag = tag_message(key, msg);
    CHECK(tag == ref_hmac_sha256(key, msg));
    CHECK(verify_message(key, msg, tag));

    if (!msg.empty()) {
      std::string flipped = msg;
      flipped[i % msg.size()] ^= 1;
      CHECK(!verify_message(key, flipped, tag));
    }
    MacKey wrong = key;
    wrong[0] ^= 0xff;
    CHECK(!verify_message(wrong, msg, tag));
  }
}

TEST_CASE("hex round trip") {
  Digest d = Sha256::of("abc");
  CHECK(digest_from_hex(to_hex(d)) == d);
  CHECK(!digest_from_hex("zz"));
  CHECK(!digest_from_hex("ab"));  // wrong length
  CHECK(!from_hex("abc"));        // odd length
  CHECK(from_hex("")->empty());
}
