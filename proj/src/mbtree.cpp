#include "autoss/mbtree.hpp"

#include <algorithm>
#include <functional>

namespace autoss {
namespace {

constexpr std::string_view kIndexMagic = "MBT1";

// Splits `count` items into ceil(count / fanout) chunks whose sizes differ by
// at most one, larger chunks first.
std::vector<std::uint32_t> chunk_sizes(std::size_t count, std::uint32_t fanout) {
    const std::size_t chunks = (count + fanout - 1) / fanout;
    const std::size_t base = count / chunks;
    const std::size_t extra = count % chunks;
    std::vector<std::uint32_t> sizes(chunks, static_cast<std::uint32_t>(base));
    for (std::size_t i = 0; i < extra; ++i) {
        ++sizes[i];
    }
    return sizes;
}

Digest leaf_kids(const std::vector<std::string>& corpus, const std::vector<std::uint32_t>& ids) {
    std::vector<Digest> hashes;
    hashes.reserve(ids.size());
    for (auto id : ids) {
        hashes.push_back(string_hash(corpus[id]));
    }
    return kids_digest(hashes);
}

} // namespace

MBTree build_tree(std::vector<std::string> corpus, std::uint32_t fanout) {
    if (fanout < 2) {
        throw Error("fanout must be at least 2");
    }
    if (corpus.empty()) {
        throw Error("empty dataset");
    }
    for (const auto& s : corpus) {
        if (!is_valid_utf8(s)) {
            throw Utf8Error("corpus string is not valid UTF-8");
        }
    }
    std::sort(corpus.begin(), corpus.end(), phi_less);
    if (std::adjacent_find(corpus.begin(), corpus.end()) != corpus.end()) {
        throw Error("duplicate string in dataset");
    }

    // Build level by level into a scratch vector, then renumber in post-order.
    std::vector<MBNode> scratch;
    std::vector<std::uint32_t> level;
    std::uint32_t next_id = 0;
    for (auto size : chunk_sizes(corpus.size(), fanout)) {
        MBNode leaf;
        leaf.kind = NodeKind::leaf;
        for (std::uint32_t k = 0; k < size; ++k) {
            leaf.entries.push_back(next_id++);
        }
        leaf.first = leaf.entries.front();
        leaf.last = leaf.entries.back();
        level.push_back(static_cast<std::uint32_t>(scratch.size()));
        scratch.push_back(std::move(leaf));
    }
    std::uint32_t height = 1;
    while (level.size() > 1) {
        std::vector<std::uint32_t> parents;
        std::size_t at = 0;
        for (auto size : chunk_sizes(level.size(), fanout)) {
            MBNode node;
            node.kind = NodeKind::internal;
            node.entries.assign(level.begin() + static_cast<std::ptrdiff_t>(at),
                                level.begin() + static_cast<std::ptrdiff_t>(at + size));
            at += size;
            node.first = scratch[node.entries.front()].first;
            node.last = scratch[node.entries.back()].last;
            parents.push_back(static_cast<std::uint32_t>(scratch.size()));
            scratch.push_back(std::move(node));
        }
        level = std::move(parents);
        ++height;
    }

    MBTree tree;
    tree.fanout_ = fanout;
    tree.corpus_ = std::move(corpus);
    tree.height_ = height;
    tree.nodes_.reserve(scratch.size());

    std::function<std::uint32_t(std::uint32_t)> emit = [&](std::uint32_t s) -> std::uint32_t {
        MBNode node = std::move(scratch[s]);
        if (node.kind == NodeKind::internal) {
            for (auto& child : node.entries) {
                child = emit(child);
            }
            std::vector<Digest> child_digests;
            child_digests.reserve(node.entries.size());
            for (auto child : node.entries) {
                child_digests.push_back(tree.nodes_[child].digest);
            }
            node.kids = kids_digest(child_digests);
        } else {
            node.kids = leaf_kids(tree.corpus_, node.entries);
        }
        node.range = {tree.corpus_[node.first], tree.corpus_[node.last]};
        node.digest = node_digest(node.range.lo, node.range.hi, node.kids);
        tree.nodes_.push_back(std::move(node));
        return static_cast<std::uint32_t>(tree.nodes_.size() - 1);
    };
    emit(level.front());
    tree.index_nodes();
    return tree;
}

void MBTree::index_nodes() {
    leaf_of_.assign(corpus_.size(), 0);
    parent_.assign(nodes_.size(), root_index());
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        for (auto e : node.entries) {
            if (node.is_leaf()) {
                leaf_of_[e] = i;
            } else {
                parent_[e] = i;
            }
        }
    }
}

std::optional<std::uint32_t> MBTree::find(std::string_view text) const {
    auto it = std::lower_bound(corpus_.begin(), corpus_.end(), text,
                               [](const std::string& a, std::string_view b) { return phi_less(a, b); });
    if (it == corpus_.end() || *it != text) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - corpus_.begin());
}

void MBTree::sign(const SignatureProvider& provider, ByteView private_key) {
    signature_ = provider.sign(root_digest(), private_key);
}

bool MBTree::verify_signature(const SignatureProvider& provider, ByteView public_key) const {
    return provider.verify(root_digest(), signature_, public_key);
}

Digest MBTree::recompute_digest(std::uint32_t index) const {
    const auto& node = nodes_.at(index);
    Digest kids{};
    if (node.is_leaf()) {
        kids = leaf_kids(corpus_, node.entries);
    } else {
        std::vector<Digest> child_digests;
        child_digests.reserve(node.entries.size());
        for (auto child : node.entries) {
            child_digests.push_back(nodes_.at(child).digest);
        }
        kids = kids_digest(child_digests);
    }
    return node_digest(node.range.lo, node.range.hi, kids);
}

void MBTree::validate() const {
    if (nodes_.empty()) {
        throw Error("tree has no nodes");
    }
    std::vector<std::uint8_t> referenced(nodes_.size(), 0);
    std::vector<std::uint8_t> covered(corpus_.size(), 0);
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        if (node.entries.empty() || node.entries.size() > fanout_) {
            throw TreeError("entry count " + std::to_string(node.entries.size()) + " outside [1, fanout]", i);
        }
        if (!node.range.valid()) {
            throw TreeError("range lo exceeds hi", i);
        }
        if (node.is_leaf()) {
            for (std::size_t k = 0; k < node.entries.size(); ++k) {
                const auto id = node.entries[k];
                if (id >= corpus_.size()) {
                    throw TreeError("leaf entry out of range", i);
                }
                if (covered[id]++) {
                    throw TreeError("corpus string covered twice", i);
                }
                if (k > 0 && id != node.entries[k - 1] + 1) {
                    throw TreeError("leaf entries not consecutive", i);
                }
            }
        } else {
            for (std::size_t k = 0; k < node.entries.size(); ++k) {
                const auto child = node.entries[k];
                if (child >= i) {
                    throw TreeError("child does not precede parent in post-order", i);
                }
                if (referenced[child]++) {
                    throw TreeError("child referenced twice", i);
                }
                if (!node.range.covers(nodes_[child].range)) {
                    throw TreeError("child range escapes parent range", i);
                }
                if (k > 0 && !phi_less(nodes_[node.entries[k - 1]].range.hi, nodes_[child].range.lo)) {
                    throw TreeError("child ranges overlap or are out of order", i);
                }
                if (k > 0 && nodes_[child].first != nodes_[node.entries[k - 1]].last + 1) {
                    throw TreeError("children do not cover a contiguous interval", i);
                }
            }
        }
        const auto first = node.is_leaf() ? node.entries.front() : nodes_[node.entries.front()].first;
        const auto last = node.is_leaf() ? node.entries.back() : nodes_[node.entries.back()].last;
        if (first != node.first || last != node.last) {
            throw TreeError("cover interval mismatch", i);
        }
        if (node.range.lo != corpus_[first] || node.range.hi != corpus_[last]) {
            throw TreeError("range is not the min/max of covered strings", i);
        }
        if (recompute_digest(i) != node.digest) {
            throw TreeError("digest mismatch", i);
        }
    }
    for (std::uint32_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!referenced[i]) {
            throw TreeError("node is unreachable from the root", i);
        }
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        throw Error("some corpus strings are not covered by any leaf");
    }
    for (std::size_t k = 1; k < corpus_.size(); ++k) {
        if (!phi_less(corpus_[k - 1], corpus_[k])) {
            throw Error("corpus is not strictly sorted at string " + std::to_string(k));
        }
    }
}

Bytes MBTree::serialize() const {
    ByteWriter w;
    w.raw(kIndexMagic);
    w.u32(fanout_);
    w.u32(static_cast<std::uint32_t>(corpus_.size()));
    for (const auto& s : corpus_) {
        w.str(s);
    }
    w.u32(static_cast<std::uint32_t>(nodes_.size()));
    for (const auto& node : nodes_) {
        w.str(node.range.lo);
        w.str(node.range.hi);
        w.raw(node.digest);
        w.u8(static_cast<std::uint8_t>(node.kind));
        w.u32(static_cast<std::uint32_t>(node.entries.size()));
        for (auto e : node.entries) {
            w.u32(e);
        }
    }
    w.blob(signature_);
    return w.take();
}

MBTree MBTree::deserialize(ByteView bytes) {
    ByteReader r(bytes);
    r.expect_magic(kIndexMagic);
    MBTree tree;
    tree.fanout_ = r.u32();
    if (tree.fanout_ < 2) {
        r.fail("fanout below 2");
    }
    const std::uint32_t count = r.u32();
    if (count == 0 || count > r.remaining() / 4) {
        r.fail("implausible corpus size " + std::to_string(count));
    }
    tree.corpus_.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto s = r.str();
        if (!is_valid_utf8(s)) {
            r.fail("corpus string " + std::to_string(i) + " is not valid UTF-8");
        }
        tree.corpus_.push_back(std::move(s));
    }
    const std::uint32_t node_count = r.u32();
    if (node_count == 0 || node_count > r.remaining() / 45) {
        r.fail("implausible node count " + std::to_string(node_count));
    }
    tree.nodes_.reserve(node_count);
    for (std::uint32_t i = 0; i < node_count; ++i) {
        MBNode node;
        node.range.lo = r.str();
        node.range.hi = r.str();
        auto digest = r.raw(32);
        std::copy(digest.begin(), digest.end(), node.digest.begin());
        const auto kind = r.u8();
        if (kind > 1) {
            throw TreeError("unknown node kind " + std::to_string(kind), i);
        }
        node.kind = static_cast<NodeKind>(kind);
        const std::uint32_t n = r.u32();
        if (n == 0 || n > tree.fanout_) {
            throw TreeError("entry count " + std::to_string(n) + " outside [1, fanout]", i);
        }
        for (std::uint32_t k = 0; k < n; ++k) {
            const auto e = r.u32();
            if (node.is_leaf() ? e >= count : e >= i) {
                throw TreeError("entry offset " + std::to_string(e) + " out of range", i);
            }
            node.entries.push_back(e);
        }
        if (node.is_leaf()) {
            node.first = node.entries.front();
            node.last = node.entries.back();
        } else {
            node.first = tree.nodes_[node.entries.front()].first;
            node.last = tree.nodes_[node.entries.back()].last;
        }
        tree.nodes_.push_back(std::move(node));
    }
    tree.signature_ = r.blob();
    if (!r.done()) {
        r.fail("trailing bytes after index");
    }
    tree.validate();
    // Recover the kids digests and height once everything checks out.
    for (std::uint32_t i = 0; i < tree.nodes_.size(); ++i) {
        auto& node = tree.nodes_[i];
        if (node.is_leaf()) {
            node.kids = leaf_kids(tree.corpus_, node.entries);
        } else {
            std::vector<Digest> child_digests;
            for (auto child : node.entries) {
                child_digests.push_back(tree.nodes_[child].digest);
            }
            node.kids = kids_digest(child_digests);
        }
    }
    tree.index_nodes();
    std::uint32_t height = 1;
    for (auto at = tree.root_index(); !tree.nodes_[at].is_leaf(); at = tree.nodes_[at].entries.front()) {
        ++height;
    }
    tree.height_ = height;
    return tree;
}

void MBTree::save(const std::string& path) const { write_file(path, serialize()); }

MBTree MBTree::load(const std::string& path) { return deserialize(read_file(path)); }

} // namespace autoss
