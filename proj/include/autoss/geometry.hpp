#pragma once

// Points and axis-aligned boxes in the embedded space. All distances use the
// 1/sqrt(d)-scaled Euclidean norm so that they stay below edit distance.

#include <cstdint>
#include <span>
#include <vector>

namespace autoss {

using EmbeddedPoint = std::vector<double>;

struct Hyperrect {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }
    /// Equal dimensions, finite bounds and lo[i] <= hi[i].
    bool valid() const noexcept;
    bool contains(const EmbeddedPoint& p) const noexcept;
    /// Closed-box intersection test.
    bool overlaps(const Hyperrect& other) const noexcept;
    friend bool operator==(const Hyperrect&, const Hyperrect&) = default;
};

/// sqrt(sum (p_i - q_i)^2 / d). Throws Error on a dimension mismatch.
double euclid(const EmbeddedPoint& p, const EmbeddedPoint& q);

/// Degenerate box at a single point.
Hyperrect point_rect(const EmbeddedPoint& p);
/// Componentwise min/max envelope. Throws Error on empty input.
Hyperrect mbh(std::span<const EmbeddedPoint> points);
Hyperrect envelope(const Hyperrect& a, const Hyperrect& b);
void extend(Hyperrect& r, const EmbeddedPoint& p);

/// Smallest scaled distance from p to any point of r; 0 when p is inside.
double dst_min_rect(const EmbeddedPoint& p, const Hyperrect& r);

} // namespace autoss
