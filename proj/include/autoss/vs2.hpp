#pragma once

// Single-query similarity search with verification objects, and the client's
// three-step check.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autoss/mbtree.hpp"
#include "autoss/signature.hpp"
#include "autoss/vo.hpp"

namespace autoss {

struct Query {
    std::string q;
    double theta = 0.0;
};

enum class Step : std::uint8_t { none = 0, step1, step2, step3, step4 };

enum class Diagnosis : std::uint8_t {
    ok = 0,
    tampered,
    overlap_range,
    string_in_nc_range,
    signature_mismatch,
    similar_missing,
    dissimilar_returned,
    candidate_claimed_nc,
    dbh_not_distant,
    point_not_in_claimed_dbh,
    similar_inside_dbh,
    malformed_vo,
    rank_order_violation,
    bad_exemption,
    dbh_not_tight,
};

std::string_view step_name(Step step) noexcept;
std::string_view diagnosis_name(Diagnosis diagnosis) noexcept;

/// Work done by a verifier. `distance_ops` counts exact edit distances
/// against the query and `range_bound_ops` counts range lower bounds, each of
/// which costs two edit-distance rows.
struct Counters {
    std::uint64_t distance_ops = 0;
    std::uint64_t range_bound_ops = 0;
    std::uint64_t euclid_ops = 0;
    std::uint64_t containment_ops = 0;
    /// Edit distances spent embedding strings on the client.
    std::uint64_t embed_distance_ops = 0;
    std::uint64_t vo_bytes = 0;

    std::uint64_t edit_ops() const noexcept { return distance_ops + 2 * range_bound_ops; }
};

struct VerificationReport {
    bool passed = true;
    Step failed_step = Step::none;
    Diagnosis diagnosis = Diagnosis::ok;
    std::string detail;
    Counters counters;
};

/// A string whose exact distance to some query is known.
struct KnownDistance {
    std::string text;
    std::uint32_t dist = 0;
    friend bool operator==(const KnownDistance&, const KnownDistance&) = default;
};

struct SearchResult {
    /// Similar strings in dictionary order.
    std::vector<std::string> R;
    VerificationObject vo;
};

/// All corpus strings within `theta` of `q`, in dictionary order, found by
/// descending only into candidate nodes.
std::vector<std::string> search(const MBTree& tree, const Query& query);

SearchResult build_vo(const MBTree& tree, const Query& query);

VerificationReport verify(const Query& query, std::span<const std::string> R, const VerificationObject& vo,
                          const SignatureProvider& provider, ByteView public_key, ByteView signature);

} // namespace autoss
