#include "autoss/signature.hpp"

#include <algorithm>
#include <cstring>

#include <openssl/evp.h>

namespace autoss {
namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct PkeyCtxDeleter {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

constexpr std::size_t kEdKeySize = 32;
constexpr std::size_t kEdSigSize = 64;
constexpr std::string_view kDebugMagic = "DBG1";

Bytes raw_key(EVP_PKEY* key, bool is_private) {
    std::size_t len = kEdKeySize;
    Bytes out(len);
    const int ok = is_private ? EVP_PKEY_get_raw_private_key(key, out.data(), &len)
                              : EVP_PKEY_get_raw_public_key(key, out.data(), &len);
    if (ok != 1) {
        throw Error("cannot export Ed25519 key");
    }
    out.resize(len);
    return out;
}

} // namespace

KeyPair Ed25519Provider::generate_keys() const {
    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr));
    EVP_PKEY* raw = nullptr;
    if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1 || EVP_PKEY_keygen(ctx.get(), &raw) != 1) {
        throw Error("Ed25519 key generation failed");
    }
    PkeyPtr key(raw);
    return {raw_key(key.get(), false), raw_key(key.get(), true)};
}

Bytes Ed25519Provider::public_from_private(ByteView private_key) {
    if (private_key.size() != kEdKeySize) {
        throw Error("Ed25519 private key must be 32 bytes");
    }
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(), private_key.size()));
    if (!key) {
        throw Error("invalid Ed25519 private key");
    }
    return raw_key(key.get(), false);
}

Bytes Ed25519Provider::sign(const Digest& digest, ByteView private_key) const {
    if (private_key.size() != kEdKeySize) {
        throw Error("Ed25519 private key must be 32 bytes");
    }
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(), private_key.size()));
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!key || !ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        throw Error("Ed25519 signing setup failed");
    }
    Bytes sig(kEdSigSize);
    std::size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, digest.data(), digest.size()) != 1) {
        throw Error("Ed25519 signing failed");
    }
    sig.resize(len);
    return sig;
}

bool Ed25519Provider::verify(const Digest& digest, ByteView signature, ByteView public_key) const {
    if (public_key.size() != kEdKeySize || signature.size() != kEdSigSize) {
        return false;
    }
    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!key || !ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), digest.data(), digest.size()) == 1;
}

KeyPair DebugSigner::generate_keys() const {
    Bytes tag(kDebugMagic.begin(), kDebugMagic.end());
    return {tag, tag};
}

Bytes DebugSigner::sign(const Digest& digest, ByteView /*private_key*/) const {
    Bytes sig(kDebugMagic.begin(), kDebugMagic.end());
    sig.insert(sig.end(), digest.begin(), digest.end());
    return sig;
}

bool DebugSigner::verify(const Digest& digest, ByteView signature, ByteView /*public_key*/) const {
    if (signature.size() != kDebugMagic.size() + digest.size()) {
        return false;
    }
    return std::memcmp(signature.data(), kDebugMagic.data(), kDebugMagic.size()) == 0 &&
           std::equal(digest.begin(), digest.end(), signature.begin() + kDebugMagic.size());
}

std::unique_ptr<SignatureProvider> make_provider(std::string_view name) {
    if (name == "ed25519") {
        return std::make_unique<Ed25519Provider>();
    }
    if (name == "debug") {
        return std::make_unique<DebugSigner>();
    }
    throw Error("unknown signature provider: " + std::string(name));
}

} // namespace autoss
