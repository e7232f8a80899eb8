#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "autoss/bytes.hpp"

namespace autoss {

using Digest = std::array<std::uint8_t, 32>;

// Domain-separation tags prefixed to every hashed message.
inline constexpr std::uint8_t kTagString = 0x00;
inline constexpr std::uint8_t kTagKids = 0x01;
inline constexpr std::uint8_t kTagNode = 0x02;

/// Incremental SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(ByteView bytes);
    Sha256& update(std::uint8_t byte) { return update(ByteView(&byte, 1)); }
    Digest finish();

private:
    void* ctx_;
};

Digest sha256(ByteView bytes);

/// H(0x00 || u32be(byte length) || utf8 bytes)
Digest string_hash(std::string_view s);

/// H(0x01 || h_1 || ... || h_f), the h^{1->f} of a node.
Digest kids_digest(std::span<const Digest> children);

/// H(0x02 || string_hash(lo) || string_hash(hi) || kids)
Digest node_digest(std::string_view lo, std::string_view hi, const Digest& kids);

} // namespace autoss
