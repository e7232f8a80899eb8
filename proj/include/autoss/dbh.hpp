#pragma once

// Distant bounding hyper-rectangles: covering the embedded points of
// dissimilar strings with few boxes that all stay farther than theta from the
// query point.

#include <cstdint>
#include <span>
#include <vector>

#include "autoss/geometry.hpp"

namespace autoss {

/// dst_min_rect(pq, rect) > theta.
bool is_distant(const EmbeddedPoint& pq, const Hyperrect& rect, double theta);

/// Undirected graph over point ids with bitset adjacency rows.
class DBHGraph {
public:
    explicit DBHGraph(std::size_t n = 0);

    std::size_t size() const noexcept { return n_; }
    bool edge(std::size_t u, std::size_t v) const noexcept;
    void add_edge(std::size_t u, std::size_t v) noexcept;
    void remove_edge(std::size_t u, std::size_t v) noexcept;
    std::size_t degree(std::size_t v) const noexcept;
    std::size_t edge_count() const noexcept;

    std::span<const std::uint64_t> row(std::size_t v) const noexcept { return {bits_.data() + v * words_, words_}; }
    std::size_t words() const noexcept { return words_; }

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Edge (i, j) iff mbh{p_i, p_j} is distant from pq. Throws Error("FP-string
/// passed to DBH builder") if some point is within theta of pq.
DBHGraph build_graph(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta);

struct DbhPartition {
    std::vector<Hyperrect> rects;
    /// Point ids covered by each rect, ascending.
    std::vector<std::vector<std::uint32_t>> members;
    /// Rect index of each point.
    std::vector<std::uint32_t> owner;
};

/// Greedy clique partition. Every rect is distant, rects are pairwise
/// disjoint, and every point lies in the rect it is assigned to.
DbhPartition partition_points(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta);
std::vector<Hyperrect> partition(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta);

/// Special case for points on one line: one box if the line stays farther
/// than theta from pq, otherwise one box per side of the foot of the
/// perpendicular from pq. Output is not validated here. Throws Error if the
/// points are not collinear.
DbhPartition collinear_partition(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta);

/// True when the three partition postconditions hold.
bool partition_valid(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta,
                     const DbhPartition& part);

} // namespace autoss
