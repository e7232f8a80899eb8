#include <gtest/gtest.h>

#include "autoss/hash.hpp"
#include "autoss/signature.hpp"
#include "oracles.hpp"

using namespace autoss;

TEST(Sha256, StandardVector) {
    EXPECT_EQ(to_hex(sha256(as_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Framing, LeafDigestMatchesOracle) {
    const std::vector<std::string> leaf{"jones", "smith", "smyth"};
    std::vector<Digest> hs;
    for (const auto& s : leaf) {
        hs.push_back(string_hash(s));
    }
    EXPECT_EQ(node_digest(leaf.front(), leaf.back(), kids_digest(hs)), oracle::leaf_digest(leaf));
}

TEST(Framing, TagsSeparateDomains) {
    // A string whose bytes equal a kids concatenation must not collide with it.
    const Digest a = string_hash("a");
    std::string raw(a.begin(), a.end());
    EXPECT_NE(string_hash(raw), kids_digest(std::vector<Digest>{a}));
    EXPECT_NE(string_hash("ab"), string_hash(std::string("ab\0", 3)));
}

class Signers : public ::testing::TestWithParam<std::string> {};

TEST_P(Signers, SignVerify) {
    const auto p = make_provider(GetParam());
    const auto keys = p->generate_keys();
    const auto d = sha256(as_bytes("root"));
    const auto sig = p->sign(d, keys.private_key);
    EXPECT_TRUE(p->verify(d, sig, keys.public_key));
    auto other = d;
    other[0] ^= 1;
    EXPECT_FALSE(p->verify(other, sig, keys.public_key));
    auto bad_sig = sig;
    bad_sig.back() ^= 1;
    EXPECT_FALSE(p->verify(d, bad_sig, keys.public_key));
    if (GetParam() != "debug") {  // the debug scheme is keyless
        EXPECT_FALSE(p->verify(d, sig, p->generate_keys().public_key));
    }
}

INSTANTIATE_TEST_SUITE_P(All, Signers, ::testing::Values("ed25519", "debug"));

TEST(Signers, UnknownName) { EXPECT_THROW(make_provider("rsa"), Error); }

TEST(Ed25519, PublicFromPrivate) {
    Ed25519Provider p;
    const auto keys = p.generate_keys();
    EXPECT_EQ(Ed25519Provider::public_from_private(keys.private_key), keys.public_key);
}
