#pragma once

// Server-side pruned traversal. The skeleton records which nodes were
// expanded, which collapsed into false-hit subtrees, and the exact distance of
// every string in an expanded leaf. Every VO flavour renders from it.

#include <cstdint>
#include <functional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "autoss/mbtree.hpp"
#include "autoss/vo.hpp"

namespace autoss::detail {

struct SkelItem {
    enum class Kind : std::uint8_t { str, mf, group };
    Kind kind = Kind::group;
    /// Corpus id for str, node index for mf and group.
    std::uint32_t ref = 0;
    std::vector<SkelItem> children;
};

/// Deviations from the honest traversal, used to simulate cheating servers.
struct TraversalTweaks {
    /// Corpus ids whose leaves are expanded even if not candidates.
    std::vector<std::uint32_t> expand_to;
    /// Leaf node indices emitted as false-hit subtrees regardless.
    std::vector<std::uint32_t> collapse;
};

struct Skeleton {
    SkelItem root;
    /// Ids within theta, ascending (dictionary order).
    std::vector<std::uint32_t> similar;
    /// Ids in expanded leaves farther than theta, ascending.
    std::vector<std::uint32_t> cstrings;
    /// Exact distance to the query for every id in an expanded leaf.
    std::unordered_map<std::uint32_t, std::uint32_t> dist;
    std::uint32_t mf_count = 0;
};

bool is_candidate(const MBTree& tree, std::uint32_t node, std::string_view q, double theta);

Skeleton traverse(const MBTree& tree, std::string_view q, double theta, const TraversalTweaks& tweaks = {});

using LeafRenderer = std::function<VOEntry(std::uint32_t id)>;

/// Renders the skeleton; `leaf` produces the entry for each expanded string.
VOEntry render(const MBTree& tree, const SkelItem& item, const LeafRenderer& leaf);

/// Plain rendering: every expanded string becomes a Str entry.
VOEntry render_plain(const MBTree& tree, const SkelItem& item);

} // namespace autoss::detail
