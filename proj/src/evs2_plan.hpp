#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "autoss/embedding.hpp"
#include "autoss/mbtree.hpp"
#include "traversal.hpp"

namespace autoss::detail {

/// Split of the expanded non-result strings into exact checks and DBH members.
struct EvsPlan {
    EmbeddedPoint pq;
    std::vector<std::uint32_t> fp;
    std::vector<std::uint32_t> ds;
    std::vector<EmbeddedPoint> ds_points;
};

EvsPlan plan_evs2(const MBTree& tree, const EmbeddingFunction& f, const EmbeddedCorpus* cache, const Skeleton& sk,
                  std::string_view q, double theta, const std::vector<std::uint32_t>& result_ids);

/// Renders with Str for everything except `ds` ids, which become DBH refs to
/// `rect_of[k]` for ds[k].
VOEntry render_evs2(const MBTree& tree, const Skeleton& sk, const std::vector<std::uint32_t>& ds,
                    const std::vector<std::uint32_t>& rect_of);

} // namespace autoss::detail

namespace autoss::detail {

/// Renders a skeleton into a full VO for `mode`. Strings in `result_ids`
/// (ascending) are shipped as Str; in E-VS2 mode the remaining expanded
/// strings are split into exact checks and DBH members.
VerificationObject assemble_vo(const MBTree& tree, Mode mode, const EmbeddingFunction* f,
                               const EmbeddedCorpus* cache, const Skeleton& sk, std::string_view q, double theta,
                               const std::vector<std::uint32_t>& result_ids);

} // namespace autoss::detail
