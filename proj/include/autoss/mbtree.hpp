#pragma once

// Merkle B^ed-tree: a B+-tree over dictionary order where every node carries
// its string range and a digest binding the range to its children.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoss/bytes.hpp"
#include "autoss/hash.hpp"
#include "autoss/metrics.hpp"
#include "autoss/signature.hpp"

namespace autoss {

enum class NodeKind : std::uint8_t { leaf = 0, internal = 1 };

struct MBNode {
    StringRange range;
    Digest digest{};
    /// h^{1->f}: hash over the children digests (string hashes for a leaf).
    Digest kids{};
    NodeKind kind = NodeKind::leaf;
    /// Corpus ids for a leaf, node indices for an internal node, in order.
    std::vector<std::uint32_t> entries;
    /// Covered corpus ids form the inclusive interval [first, last].
    std::uint32_t first = 0;
    std::uint32_t last = 0;

    bool is_leaf() const noexcept { return kind == NodeKind::leaf; }
};

/// A structural or digest inconsistency found while loading or validating.
class TreeError : public Error {
public:
    TreeError(const std::string& what, std::uint32_t node)
        : Error("node " + std::to_string(node) + ": " + what), node_(node) {}

    std::uint32_t node() const noexcept { return node_; }

private:
    std::uint32_t node_;
};

class MBTree {
public:
    std::uint32_t fanout() const noexcept { return fanout_; }
    std::span<const std::string> corpus() const noexcept { return corpus_; }
    const std::string& text(std::uint32_t id) const { return corpus_.at(id); }
    std::size_t size() const noexcept { return corpus_.size(); }

    /// Nodes in post-order; the root is the last node.
    std::span<const MBNode> nodes() const noexcept { return nodes_; }
    const MBNode& node(std::uint32_t index) const { return nodes_.at(index); }
    std::uint32_t root_index() const noexcept { return static_cast<std::uint32_t>(nodes_.size() - 1); }
    const MBNode& root() const { return nodes_.back(); }
    const Digest& root_digest() const { return nodes_.back().digest; }
    std::uint32_t height() const noexcept { return height_; }

    /// Leaf node index holding corpus id `id`.
    std::uint32_t leaf_of(std::uint32_t id) const { return leaf_of_.at(id); }
    /// Parent node index, or the root's own index for the root.
    std::uint32_t parent(std::uint32_t index) const { return parent_.at(index); }

    /// Corpus id of `text`, if present.
    std::optional<std::uint32_t> find(std::string_view text) const;

    const Bytes& signature() const noexcept { return signature_; }
    void set_signature(Bytes signature) { signature_ = std::move(signature); }
    void sign(const SignatureProvider& provider, ByteView private_key);
    bool verify_signature(const SignatureProvider& provider, ByteView public_key) const;

    /// Digest of node `index` recomputed from its children's stored digests.
    Digest recompute_digest(std::uint32_t index) const;
    /// Checks every node invariant and digest. Throws TreeError.
    void validate() const;

    Bytes serialize() const;
    /// Parses and fully validates an index file image.
    static MBTree deserialize(ByteView bytes);
    void save(const std::string& path) const;
    static MBTree load(const std::string& path);

private:
    friend MBTree build_tree(std::vector<std::string> corpus, std::uint32_t fanout);

    void index_nodes();

    std::uint32_t fanout_ = 0;
    std::vector<std::string> corpus_;
    std::vector<MBNode> nodes_;
    std::vector<std::uint32_t> leaf_of_;
    std::vector<std::uint32_t> parent_;
    std::uint32_t height_ = 0;
    Bytes signature_;
};

/// Bulk-loads the tree bottom-up. The corpus is sorted by dictionary order and
/// must be non-empty, duplicate-free and valid UTF-8. Each level holds
/// ceil(m / fanout) nodes with entry counts differing by at most one.
MBTree build_tree(std::vector<std::string> corpus, std::uint32_t fanout);

} // namespace autoss
