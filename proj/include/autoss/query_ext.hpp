#pragma once

// Query extensions: batches of queries sharing one proof bundle, and top-k.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autoss/evs2.hpp"

namespace autoss {

struct MultiQuery {
    std::vector<std::string> strings;
    double theta = 0.0;
};

struct TriangleSkips {
    /// dist(s, q1) - d12 > theta: provably dissimilar to q2.
    std::vector<std::string> skip_dissimilar;
    /// dist(s, q1) + d12 <= theta: provably similar to q2.
    std::vector<std::string> skip_similar;
};

TriangleSkips triangle_prune(std::span<const KnownDistance> dists_q1, std::uint32_t d12, double theta);

/// Whether removing corpus id `removed` from the node can turn a
/// non-candidate into a candidate. Recomputes the range without that string.
bool removal_flips_candidacy(const MBTree& tree, std::uint32_t node, std::uint32_t removed, std::string_view q,
                             double theta);

struct SharedVOBundle {
    struct Section {
        std::vector<std::string> R;
        VerificationObject vo;
    };

    Mode mode = Mode::vs2;
    double theta = 0.0;
    std::vector<std::string> queries;
    /// False-hit subtrees and DBHs referenced by two or more queries.
    std::vector<VOEntry> shared_mfs;
    std::vector<Hyperrect> shared_dbhs;
    std::vector<Section> sections;

    /// Shared table records plus every per-query VO, without file framing.
    std::size_t proof_bytes() const;

    Bytes serialize(ByteView signature) const;
    /// Returns the bundle and stores the carried signature in `signature`.
    static SharedVOBundle deserialize(ByteView bytes, Bytes& signature);
};

struct MultiBuildStats {
    /// Sum of the wire sizes of the standalone VOs of every query.
    std::size_t independent_bytes = 0;
    std::size_t exempted_strings = 0;
    std::size_t reused_dbh_points = 0;
};

/// Queries are processed in input order; later queries may cite the proven
/// distances of earlier ones. Throws Error on an empty or duplicated list.
SharedVOBundle build_multi_vo(const MBTree& tree, const EmbeddingFunction* f, const MultiQuery& mq, Mode mode,
                              const EmbeddedCorpus* cache = nullptr, MultiBuildStats* stats = nullptr);

/// One report per query. Structural errors in the shared table fail every
/// query that touches it.
std::vector<VerificationReport> verify_multi(const MultiQuery& mq, const SharedVOBundle& bundle,
                                             const EmbeddingFunction* f, const SignatureProvider& provider,
                                             ByteView public_key, ByteView signature);

struct TopKQuery {
    std::string q;
    std::uint32_t k = 1;
    double theta = 0.0;
};

struct TopKResult {
    /// Ranked by (distance, dictionary order).
    std::vector<std::string> R;
    std::vector<std::uint32_t> dist;
    /// Number of strings within theta.
    std::size_t c = 0;
};

TopKResult topk_search(const MBTree& tree, const TopKQuery& tq);

struct TopKProof {
    std::vector<std::string> R;
    VerificationObject vo;
    /// Threshold the VO was built at: theta when k >= c, else dist(q, R[k]).
    double vo_theta = 0.0;
};

TopKProof topk_build_vo(const MBTree& tree, const TopKQuery& tq, Mode mode, const EmbeddingFunction* f = nullptr,
                        const EmbeddedCorpus* cache = nullptr);

VerificationReport topk_verify(const TopKQuery& tq, std::span<const std::string> R, const VerificationObject& vo,
                               const EmbeddingFunction* f, const SignatureProvider& provider, ByteView public_key,
                               ByteView signature);

} // namespace autoss
