#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "autoss/bytes.hpp"
#include "autoss/hash.hpp"

namespace autoss {

struct KeyPair {
    Bytes public_key;
    Bytes private_key;
};

/// Signs and verifies 32-byte root digests. Implementations must be
/// deterministic so that a rebuilt tree reproduces the same signature.
class SignatureProvider {
public:
    virtual ~SignatureProvider() = default;

    virtual std::string_view name() const = 0;
    virtual KeyPair generate_keys() const = 0;
    virtual Bytes sign(const Digest& digest, ByteView private_key) const = 0;
    virtual bool verify(const Digest& digest, ByteView signature, ByteView public_key) const = 0;
};

/// Ed25519 through OpenSSL. Keys are the raw 32-byte encodings.
class Ed25519Provider final : public SignatureProvider {
public:
    std::string_view name() const override { return "ed25519"; }
    KeyPair generate_keys() const override;
    Bytes sign(const Digest& digest, ByteView private_key) const override;
    bool verify(const Digest& digest, ByteView signature, ByteView public_key) const override;

    /// Derives the public key from a raw private key.
    static Bytes public_from_private(ByteView private_key);
};

/// Transparent signer for tests: the signature is "DBG1" followed by the
/// digest, and keys are ignored. Offers no security whatsoever.
class DebugSigner final : public SignatureProvider {
public:
    std::string_view name() const override { return "debug"; }
    KeyPair generate_keys() const override;
    Bytes sign(const Digest& digest, ByteView private_key) const override;
    bool verify(const Digest& digest, ByteView signature, ByteView public_key) const override;
};

/// Looks up a provider by name ("ed25519" or "debug").
std::unique_ptr<SignatureProvider> make_provider(std::string_view name);

} // namespace autoss
