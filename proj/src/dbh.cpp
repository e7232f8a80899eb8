#include "autoss/dbh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "autoss/bytes.hpp"

namespace autoss {

bool is_distant(const EmbeddedPoint& pq, const Hyperrect& rect, double theta) {
    return dst_min_rect(pq, rect) > theta;
}

DBHGraph::DBHGraph(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

bool DBHGraph::edge(std::size_t u, std::size_t v) const noexcept {
    return (bits_[u * words_ + v / 64] >> (v % 64)) & 1u;
}

void DBHGraph::add_edge(std::size_t u, std::size_t v) noexcept {
    bits_[u * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
    bits_[v * words_ + u / 64] |= std::uint64_t{1} << (u % 64);
}

void DBHGraph::remove_edge(std::size_t u, std::size_t v) noexcept {
    bits_[u * words_ + v / 64] &= ~(std::uint64_t{1} << (v % 64));
    bits_[v * words_ + u / 64] &= ~(std::uint64_t{1} << (u % 64));
}

std::size_t DBHGraph::degree(std::size_t v) const noexcept {
    std::size_t d = 0;
    for (auto w : row(v)) {
        d += static_cast<std::size_t>(std::popcount(w));
    }
    return d;
}

std::size_t DBHGraph::edge_count() const noexcept {
    std::size_t total = 0;
    for (std::size_t v = 0; v < n_; ++v) {
        total += degree(v);
    }
    return total / 2;
}

DBHGraph build_graph(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta) {
    for (const auto& p : pts) {
        if (!(euclid(pq, p) > theta)) {
            throw Error("FP-string passed to DBH builder");
        }
    }
    DBHGraph g(pts.size());
    Hyperrect pair;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            pair = point_rect(pts[i]);
            extend(pair, pts[j]);
            if (is_distant(pq, pair, theta)) {
                g.add_edge(i, j);
            }
        }
    }
    return g;
}

namespace {

using Bits = std::vector<std::uint64_t>;

void set(Bits& b, std::size_t v) { b[v / 64] |= std::uint64_t{1} << (v % 64); }
void clear(Bits& b, std::size_t v) { b[v / 64] &= ~(std::uint64_t{1} << (v % 64)); }

bool any(const Bits& b) {
    return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t popcount_and(std::span<const std::uint64_t> a, const Bits& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    }
    return n;
}

template <typename Fn>
void for_each_bit(const Bits& b, Fn&& fn) {
    for (std::size_t w = 0; w < b.size(); ++w) {
        for (auto word = b[w]; word != 0; word &= word - 1) {
            fn(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
        }
    }
}

struct Group {
    std::vector<std::uint32_t> members;
    Hyperrect rect;
    bool alive = true;
};

std::vector<std::vector<std::uint32_t>> greedy_cliques(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts,
                                                       double theta, DBHGraph g) {
    const std::size_t n = pts.size();
    const std::size_t words = g.words();
    const bool filter = pq.size() > 2;
    Bits uncovered(words, 0);
    for (std::size_t v = 0; v < n; ++v) {
        set(uncovered, v);
    }
    std::vector<std::vector<std::uint32_t>> cliques;
    while (any(uncovered)) {
        std::size_t seed = n;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for_each_bit(uncovered, [&](std::size_t v) {
            const auto deg = popcount_and(g.row(v), uncovered);
            if (deg < best) {
                best = deg;
                seed = v;
            }
        });
        std::vector<std::uint32_t> clique{static_cast<std::uint32_t>(seed)};
        Hyperrect rect = point_rect(pts[seed]);
        clear(uncovered, seed);
        Bits cand(words, 0);
        for (std::size_t w = 0; w < words; ++w) {
            cand[w] = g.row(seed)[w] & uncovered[w];
        }
        while (true) {
            if (filter) {
                // Beyond two dimensions a pairwise-distant set can still
                // surround the query point, so test the grown box directly.
                Bits rejected(words, 0);
                for_each_bit(cand, [&](std::size_t v) {
                    Hyperrect grown = rect;
                    extend(grown, pts[v]);
                    if (!is_distant(pq, grown, theta)) {
                        set(rejected, v);
                    }
                });
                for_each_bit(rejected, [&](std::size_t v) {
                    for (auto u : clique) {
                        g.remove_edge(u, v);
                    }
                    clear(cand, v);
                });
            }
            if (!any(cand)) {
                break;
            }
            Bits others(words, 0);
            for (std::size_t w = 0; w < words; ++w) {
                others[w] = uncovered[w] & ~cand[w];
            }
            std::size_t pick = n;
            std::size_t pick_deg = std::numeric_limits<std::size_t>::max();
            for_each_bit(cand, [&](std::size_t v) {
                const auto deg = popcount_and(g.row(v), others);
                if (deg < pick_deg) {
                    pick_deg = deg;
                    pick = v;
                }
            });
            clique.push_back(static_cast<std::uint32_t>(pick));
            extend(rect, pts[pick]);
            clear(uncovered, pick);
            clear(cand, pick);
            for (std::size_t w = 0; w < words; ++w) {
                cand[w] &= g.row(pick)[w];
            }
        }
        std::sort(clique.begin(), clique.end());
        cliques.push_back(std::move(clique));
    }
    return cliques;
}

Group make_group(std::span<const EmbeddedPoint> pts, std::vector<std::uint32_t> members) {
    Group grp;
    grp.rect = point_rect(pts[members.front()]);
    for (auto m : members) {
        extend(grp.rect, pts[m]);
    }
    grp.members = std::move(members);
    return grp;
}

// Singleton boxes with identical points merged; always a valid partition.
std::vector<Group> identical_point_groups(std::span<const EmbeddedPoint> pts) {
    std::map<EmbeddedPoint, std::vector<std::uint32_t>> by_point;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        by_point[pts[i]].push_back(i);
    }
    std::vector<Group> groups;
    for (auto& [p, ids] : by_point) {
        groups.push_back(make_group(pts, std::move(ids)));
    }
    return groups;
}

bool resolve_overlaps(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta,
                      std::vector<Group>& groups) {
    const std::size_t max_passes = 64 + 4 * pts.size();
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size() && groups[i].alive; ++j) {
                if (!groups[j].alive || !groups[i].rect.overlaps(groups[j].rect)) {
                    continue;
                }
                changed = true;
                Hyperrect merged = envelope(groups[i].rect, groups[j].rect);
                if (is_distant(pq, merged, theta)) {
                    auto& into = groups[i].members;
                    into.insert(into.end(), groups[j].members.begin(), groups[j].members.end());
                    std::sort(into.begin(), into.end());
                    groups[i].rect = std::move(merged);
                    groups[j].alive = false;
                    continue;
                }
                const std::size_t smaller = groups[j].members.size() <= groups[i].members.size() ? j : i;
                groups[smaller].alive = false;
                const auto members = groups[smaller].members;
                for (auto m : members) {
                    groups.push_back(make_group(pts, {m}));
                }
            }
        }
        std::erase_if(groups, [](const Group& grp) { return !grp.alive; });
        if (!changed) {
            return true;
        }
    }
    return false;
}

DbhPartition finish(std::span<const EmbeddedPoint> pts, std::vector<Group> groups) {
    DbhPartition part;
    part.owner.assign(pts.size(), 0);
    for (auto& grp : groups) {
        for (auto m : grp.members) {
            part.owner[m] = static_cast<std::uint32_t>(part.rects.size());
        }
        part.rects.push_back(std::move(grp.rect));
        part.members.push_back(std::move(grp.members));
    }
    return part;
}

} // namespace

DbhPartition partition_points(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta) {
    if (pts.empty()) {
        return {};
    }
    auto cliques = greedy_cliques(pq, pts, theta, build_graph(pq, pts, theta));
    std::vector<Group> groups;
    for (auto& clique : cliques) {
        Group grp = make_group(pts, std::move(clique));
        if (is_distant(pq, grp.rect, theta)) {
            groups.push_back(std::move(grp));
            continue;
        }
        for (auto m : grp.members) {
            groups.push_back(make_group(pts, {m}));
        }
    }
    if (!resolve_overlaps(pq, pts, theta, groups)) {
        groups = identical_point_groups(pts);
    }
    return finish(pts, std::move(groups));
}

std::vector<Hyperrect> partition(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta) {
    return partition_points(pq, pts, theta).rects;
}

DbhPartition collinear_partition(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta) {
    if (pts.empty()) {
        return {};
    }
    const std::size_t d = pq.size();
    const EmbeddedPoint& a = pts.front();
    std::size_t far = 0;
    double far_dist = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dist = euclid(a, pts[i]);
        if (dist > far_dist) {
            far_dist = dist;
            far = i;
        }
    }
    std::vector<std::uint32_t> all(pts.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    if (far_dist == 0.0) {
        return finish(pts, {make_group(pts, std::move(all))});
    }

    EmbeddedPoint u(d);
    double uu = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        u[i] = pts[far][i] - a[i];
        uu += u[i] * u[i];
    }
    auto project = [&](const EmbeddedPoint& p) {
        double t = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            t += (p[i] - a[i]) * u[i];
        }
        return t / uu;
    };
    constexpr double kTolerance = 1e-9;
    const double scale = std::sqrt(uu);
    std::vector<double> ts(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        ts[k] = project(pts[k]);
        for (std::size_t i = 0; i < d; ++i) {
            const double residual = pts[k][i] - a[i] - ts[k] * u[i];
            if (std::abs(residual) > kTolerance * std::max(1.0, scale)) {
                throw Error("points are not collinear");
            }
        }
    }

    const double t0 = project(pq);
    EmbeddedPoint foot(d);
    for (std::size_t i = 0; i < d; ++i) {
        foot[i] = a[i] + t0 * u[i];
    }
    if (euclid(pq, foot) > theta) {
        return finish(pts, {make_group(pts, std::move(all))});
    }
    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (std::uint32_t k = 0; k < pts.size(); ++k) {
        (ts[k] <= t0 ? left : right).push_back(k);
    }
    std::vector<Group> groups;
    if (!left.empty()) {
        groups.push_back(make_group(pts, std::move(left)));
    }
    if (!right.empty()) {
        groups.push_back(make_group(pts, std::move(right)));
    }
    return finish(pts, std::move(groups));
}

bool partition_valid(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta,
                     const DbhPartition& part) {
    if (part.owner.size() != pts.size() || part.members.size() != part.rects.size()) {
        return false;
    }
    for (std::size_t i = 0; i < part.rects.size(); ++i) {
        if (!is_distant(pq, part.rects[i], theta)) {
            return false;
        }
        for (std::size_t j = i + 1; j < part.rects.size(); ++j) {
            if (part.rects[i].overlaps(part.rects[j])) {
                return false;
            }
        }
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (part.owner[k] >= part.rects.size() || !part.rects[part.owner[k]].contains(pts[k])) {
            return false;
        }
    }
    return true;
}

} // namespace autoss
