#include "traversal.hpp"

#include <algorithm>
#include <unordered_set>

namespace autoss::detail {

bool is_candidate(const MBTree& tree, std::uint32_t node, std::string_view q, double theta) {
    return static_cast<double>(dst_min(q, tree.node(node).range)) <= theta;
}

Skeleton traverse(const MBTree& tree, std::string_view q, double theta, const TraversalTweaks& tweaks) {
    std::unordered_set<std::uint32_t> forced;
    for (auto id : tweaks.expand_to) {
        for (auto at = tree.leaf_of(id);; at = tree.parent(at)) {
            forced.insert(at);
            if (at == tree.root_index()) {
                break;
            }
        }
    }
    const std::unordered_set<std::uint32_t> collapsed(tweaks.collapse.begin(), tweaks.collapse.end());

    Skeleton sk;
    std::function<SkelItem(std::uint32_t)> visit = [&](std::uint32_t index) -> SkelItem {
        const auto& node = tree.node(index);
        const bool candidate =
            !collapsed.contains(index) && (forced.contains(index) || is_candidate(tree, index, q, theta));
        if (!candidate) {
            ++sk.mf_count;
            return {SkelItem::Kind::mf, index, {}};
        }
        SkelItem item{SkelItem::Kind::group, index, {}};
        item.children.reserve(node.entries.size());
        for (auto e : node.entries) {
            if (node.is_leaf()) {
                const auto d = static_cast<std::uint32_t>(edit_distance(q, tree.text(e)));
                sk.dist.emplace(e, d);
                (static_cast<double>(d) <= theta ? sk.similar : sk.cstrings).push_back(e);
                item.children.push_back({SkelItem::Kind::str, e, {}});
            } else {
                item.children.push_back(visit(e));
            }
        }
        return item;
    };
    sk.root = visit(tree.root_index());
    return sk;
}

VOEntry render(const MBTree& tree, const SkelItem& item, const LeafRenderer& leaf) {
    switch (item.kind) {
    case SkelItem::Kind::str:
        return leaf(item.ref);
    case SkelItem::Kind::mf: {
        const auto& node = tree.node(item.ref);
        return VOEntry::make_mf(node.range, node.kids);
    }
    case SkelItem::Kind::group:
        break;
    }
    std::vector<VOEntry> children;
    children.reserve(item.children.size());
    for (const auto& child : item.children) {
        children.push_back(render(tree, child, leaf));
    }
    return VOEntry::make_group(std::move(children));
}

VOEntry render_plain(const MBTree& tree, const SkelItem& item) {
    return render(tree, item, [&](std::uint32_t id) { return VOEntry::make_str(tree.text(id)); });
}

} // namespace autoss::detail
