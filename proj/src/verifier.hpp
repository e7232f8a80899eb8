#pragma once

// Client-side verification shared by VS2, E-VS2, top-k and multi-query
// bundles. The caller supplies what the client legitimately knows; the VO and
// result list are untrusted.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoss/embedding.hpp"
#include "autoss/signature.hpp"
#include "autoss/vo.hpp"
#include "autoss/vs2.hpp"

namespace autoss::detail {

using PlainDistance = KnownDistance;

/// What a later query in a bundle may rely on from an earlier one.
struct PivotRecord {
    std::string query;
    bool verified = false;
    std::vector<PlainDistance> plain;
};

struct SharedTable {
    std::vector<VOEntry> mfs;
    std::vector<Hyperrect> dbhs;
};

struct VerifyInput {
    std::string_view q;
    double theta = 0.0;
    Mode mode = Mode::vs2;
    std::optional<std::uint32_t> topk;
    const SignatureProvider* provider = nullptr;
    ByteView public_key;
    ByteView signature;
    const EmbeddingFunction* embedding = nullptr;
    // Bundle context; empty for a standalone VO.
    const SharedTable* table = nullptr;
    std::span<const PivotRecord> pivots;
};

struct VerifyOutput {
    VerificationReport report;
    /// Every plain Str the client measured, in VO order.
    std::vector<PlainDistance> plain;
    /// Client-embedded points referencing each shared DBH slot.
    std::vector<std::pair<std::uint32_t, EmbeddedPoint>> shared_points;
};

VerifyOutput verify_core(const VerifyInput& in, std::span<const std::string> R, const VerificationObject& vo);

} // namespace autoss::detail
