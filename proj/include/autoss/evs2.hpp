#pragma once

// E-VS2: dissimilar candidate strings whose embedded points are far from the
// query are proven dissimilar by bounding boxes instead of edit distances.

#include <span>
#include <string>
#include <vector>

#include "autoss/dbh.hpp"
#include "autoss/embedding.hpp"
#include "autoss/vs2.hpp"

namespace autoss {

struct Classification {
    /// Embedded within theta of the query: the client must check exactly.
    std::vector<std::string> fp;
    /// Embedded farther than theta: covered by a DBH.
    std::vector<std::string> ds;
};

Classification classify_cstrings(const EmbeddingFunction& f, std::string_view q, double theta,
                                 std::span<const std::string> cstrings);

/// Partitions DS points into DBHs. In one dimension the collinear special
/// case is tried first and kept only if it satisfies every postcondition.
DbhPartition partition_ds(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta);

/// `cache` may be null; it must have been built from the same corpus and f.
SearchResult build_vo_e(const MBTree& tree, const EmbeddingFunction& f, const Query& query,
                        const EmbeddedCorpus* cache = nullptr);

VerificationReport verify_e(const Query& query, std::span<const std::string> R, const VerificationObject& vo,
                            const EmbeddingFunction& f, const SignatureProvider& provider, ByteView public_key,
                            ByteView signature);

} // namespace autoss
