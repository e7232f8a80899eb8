#include "autoss/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "autoss/bytes.hpp"

namespace autoss {
namespace {

void require_dim(std::size_t a, std::size_t b) {
    if (a != b || a == 0) {
        throw Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

} // namespace

bool Hyperrect::valid() const noexcept {
    if (lo.empty() || lo.size() != hi.size()) {
        return false;
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

bool Hyperrect::contains(const EmbeddedPoint& p) const noexcept {
    if (p.size() != lo.size()) {
        return false;
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(lo[i] <= p[i] && p[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

bool Hyperrect::overlaps(const Hyperrect& other) const noexcept {
    if (other.dim() != dim()) {
        return false;
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (hi[i] < other.lo[i] || other.hi[i] < lo[i]) {
            return false;
        }
    }
    return true;
}

double euclid(const EmbeddedPoint& p, const EmbeddedPoint& q) {
    require_dim(p.size(), q.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - q[i];
        sum += diff * diff;
    }
    // Dividing before the root keeps the value exactly bounded by any integer
    // that bounds every |diff|.
    return std::sqrt(sum / static_cast<double>(p.size()));
}

Hyperrect point_rect(const EmbeddedPoint& p) { return {p, p}; }

Hyperrect mbh(std::span<const EmbeddedPoint> points) {
    if (points.empty()) {
        throw Error("mbh of an empty point set");
    }
    Hyperrect r = point_rect(points.front());
    for (const auto& p : points.subspan(1)) {
        extend(r, p);
    }
    return r;
}

void extend(Hyperrect& r, const EmbeddedPoint& p) {
    require_dim(r.dim(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        r.lo[i] = std::min(r.lo[i], p[i]);
        r.hi[i] = std::max(r.hi[i], p[i]);
    }
}

Hyperrect envelope(const Hyperrect& a, const Hyperrect& b) {
    require_dim(a.dim(), b.dim());
    Hyperrect r = a;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        r.lo[i] = std::min(a.lo[i], b.lo[i]);
        r.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return r;
}

double dst_min_rect(const EmbeddedPoint& p, const Hyperrect& r) {
    require_dim(p.size(), r.dim());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = std::max({r.lo[i] - p[i], 0.0, p[i] - r.hi[i]});
        sum += m * m;
    }
    return std::sqrt(sum / static_cast<double>(p.size()));
}

} // namespace autoss
