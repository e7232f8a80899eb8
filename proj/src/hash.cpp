#include "autoss/hash.hpp"

#include <openssl/evp.h>

namespace autoss {

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
        throw Error("SHA-256 initialisation failed");
    }
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

Sha256& Sha256::update(ByteView bytes) {
    if (!bytes.empty()) {
        EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size());
    }
    return *this;
}

Digest Sha256::finish() {
    Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len);
    return out;
}

Digest sha256(ByteView bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    return out;
}

Digest string_hash(std::string_view s) {
    ByteWriter w;
    w.u8(kTagString);
    w.str(s);
    return sha256(w.bytes());
}

Digest kids_digest(std::span<const Digest> children) {
    Bytes buf;
    buf.reserve(1 + children.size() * 32);
    buf.push_back(kTagKids);
    for (const auto& d : children) {
        buf.insert(buf.end(), d.begin(), d.end());
    }
    return sha256(buf);
}

Digest node_digest(std::string_view lo, std::string_view hi, const Digest& kids) {
    const Digest hlo = string_hash(lo);
    const Digest hhi = string_hash(hi);
    std::array<std::uint8_t, 1 + 3 * 32> buf{};
    buf[0] = kTagNode;
    std::copy(hlo.begin(), hlo.end(), buf.begin() + 1);
    std::copy(hhi.begin(), hhi.end(), buf.begin() + 33);
    std::copy(kids.begin(), kids.end(), buf.begin() + 65);
    return sha256(buf);
}

} // namespace autoss
