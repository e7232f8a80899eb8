#pragma once

// Contractive string embedding: coordinate i is the edit distance from the
// string to its nearest member of reference set S_i.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autoss/bytes.hpp"
#include "autoss/geometry.hpp"

namespace autoss {

/// Largest reference set drawn by build_embedding.
inline constexpr std::size_t kMaxReferenceSet = 16;

class EmbeddingFunction {
public:
    EmbeddingFunction() = default;
    /// Throws Error if there are no sets or any set is empty.
    explicit EmbeddingFunction(std::vector<std::vector<std::string>> reference_sets, std::uint64_t seed = 0);

    std::uint32_t dim() const noexcept { return static_cast<std::uint32_t>(sets_.size()); }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::vector<std::string>>& reference_sets() const noexcept { return sets_; }
    /// Edit distances spent per embed() call.
    std::size_t embed_cost() const noexcept { return cost_; }

    EmbeddedPoint embed(std::string_view s) const;
    EmbeddedPoint embed(std::u32string_view s) const;

    Bytes serialize() const;
    static EmbeddingFunction deserialize(ByteView bytes);
    void save(const std::string& path) const;
    static EmbeddingFunction load(const std::string& path);

    friend bool operator==(const EmbeddingFunction& a, const EmbeddingFunction& b) {
        return a.seed_ == b.seed_ && a.sets_ == b.sets_;
    }

private:
    std::vector<std::vector<std::string>> sets_;
    std::vector<std::vector<std::u32string>> decoded_;
    std::uint64_t seed_ = 0;
    std::size_t cost_ = 0;
};

/// Draws S_i (i = 1..d) uniformly without replacement from the corpus with
/// |S_i| = min(2^i, 16, n), seeded for reproducibility.
EmbeddingFunction build_embedding(std::span<const std::string> corpus, std::uint32_t d, std::uint64_t seed);

/// Server-side cache of embedded corpus points.
class EmbeddedCorpus {
public:
    EmbeddedCorpus(const EmbeddingFunction& f, std::span<const std::string> corpus);
    const EmbeddedPoint& point(std::uint32_t id) const { return points_.at(id); }
    std::size_t size() const noexcept { return points_.size(); }

private:
    std::vector<EmbeddedPoint> points_;
};

} // namespace autoss
