#include <gtest/gtest.h>

#include "autoss/dbh.hpp"
#include "oracles.hpp"

using namespace autoss;

namespace {

std::vector<EmbeddedPoint> random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<EmbeddedPoint> out(n, EmbeddedPoint(d));
    for (auto& p : out) {
        for (auto& x : p) {
            x = std::round(u(rng) * 4) / 4;
        }
    }
    return out;
}

// Points farther than theta from pq, drawn by rejection.
std::vector<EmbeddedPoint> far_points(std::mt19937_64& rng, std::size_t n, std::size_t d, const EmbeddedPoint& pq,
                                      double theta) {
    std::vector<EmbeddedPoint> out;
    while (out.size() < n) {
        auto p = random_points(rng, 1, d, 0, 6).front();
        if (oracle::point_distance(p, pq) > theta) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

void expect_valid(const EmbeddedPoint& pq, const std::vector<EmbeddedPoint>& pts, double theta,
                  const DbhPartition& part) {
    ASSERT_EQ(part.owner.size(), pts.size());
    for (std::size_t r = 0; r < part.rects.size(); ++r) {
        EXPECT_GT(dst_min_rect(pq, part.rects[r]), theta);
        for (std::size_t s = r + 1; s < part.rects.size(); ++s) {
            EXPECT_FALSE(part.rects[r].overlaps(part.rects[s]));
        }
    }
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        EXPECT_TRUE(part.rects.at(part.owner[i]).contains(pts[i]));
    }
    EXPECT_TRUE(partition_valid(pq, pts, theta, part));
}

} // namespace

TEST(Geometry, BoundingBoxes) {
    const std::vector<EmbeddedPoint> one{{1, 2}};
    EXPECT_EQ(mbh(one), (Hyperrect{{1, 2}, {1, 2}}));
    const std::vector<EmbeddedPoint> two{{0, 0}, {2, 1}};
    EXPECT_EQ(mbh(two), (Hyperrect{{0, 0}, {2, 1}}));
    const std::vector<EmbeddedPoint> a{{0, 3}, {1, 1}}, b{{4, 0}, {2, 2}};
    std::vector<EmbeddedPoint> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    EXPECT_EQ(mbh(ab), envelope(mbh(a), mbh(b)));
}

TEST(Geometry, RectDistance) {
    EXPECT_EQ(dst_min_rect({1.5, 1.5}, {{1, 1}, {2, 2}}), 0.0);
    EXPECT_DOUBLE_EQ(dst_min_rect({0, 0}, {{1, 1}, {2, 2}}), 1.0);
    const EmbeddedPoint p{0.25, 3.5, 1.0};
    EXPECT_EQ(dst_min_rect(p, point_rect({1, 2, 3})), euclid(p, {1, 2, 3}));
}

TEST(Geometry, RectDistanceLowerBoundsInteriorPoints) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5, 5), t(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t d = 1 + rng() % 6;
        EmbeddedPoint p(d), a(d), b(d), x(d);
        for (std::size_t k = 0; k < d; ++k) {
            p[k] = u(rng);
            a[k] = u(rng);
            b[k] = u(rng);
        }
        const std::vector<EmbeddedPoint> corners{a, b};
        const auto r = mbh(corners);
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = r.lo[k] + t(rng) * (r.hi[k] - r.lo[k]);
        }
        ASSERT_LE(dst_min_rect(p, r), oracle::point_distance(p, x));
    }
}

TEST(Graph, CompleteAndEmpty) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> same_side{{5, 5}, {6, 5}, {5, 7}, {8, 8}};
    const auto g = build_graph(pq, same_side, 1);
    EXPECT_EQ(g.edge_count(), 6u);

    const std::vector<EmbeddedPoint> opposite{{3, 0}, {-3, 0}};
    EXPECT_EQ(build_graph(pq, opposite, 1).edge_count(), 0u);

    const std::vector<EmbeddedPoint> too_close{{0.5, 0}};
    EXPECT_THROW(build_graph(pq, too_close, 1), Error);
}

TEST(Graph, MatchesPairwiseOracle) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const EmbeddedPoint pq{3, 3};
        const auto pts = far_points(rng, 8, 2, pq, 1.0);
        const auto g = build_graph(pq, pts, 1.0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) {
                    continue;
                }
                const std::vector<EmbeddedPoint> pair{pts[i], pts[j]};
                ASSERT_EQ(g.edge(i, j), dst_min_rect(pq, mbh(pair)) > 1.0);
            }
        }
    }
}

TEST(Partition, CompleteGraphGivesOneBox) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> pts{{5, 5}, {6, 5}, {5, 7}, {8, 8}};
    const auto part = partition_points(pq, pts, 1);
    EXPECT_EQ(part.rects.size(), 1u);
    expect_valid(pq, pts, 1, part);
}

TEST(Partition, EdgelessGraphGivesPointBoxes) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> pts{{3, 0}, {-3, 0}, {0, 3}, {0, -3}};
    ASSERT_EQ(build_graph(pq, pts, 1).edge_count(), 0u);
    const auto part = partition_points(pq, pts, 1);
    EXPECT_EQ(part.rects.size(), 4u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(part.rects[part.owner[i]], point_rect(pts[i]));
    }
}

TEST(Partition, HeuristicNeverBeatsExhaustiveOptimum) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const EmbeddedPoint pq{3, 3};
        const double theta = 1.0;
        const auto pts = far_points(rng, 1 + rng() % 10, 2, pq, theta);
        const auto part = partition_points(pq, pts, theta);
        expect_valid(pq, pts, theta, part);
        const auto optimum = oracle::min_partition(pts.size(), [&](const std::vector<std::uint32_t>& g) {
            std::vector<EmbeddedPoint> sub;
            for (auto v : g) {
                sub.push_back(pts[v]);
            }
            return dst_min_rect(pq, mbh(sub)) > theta;
        });
        ASSERT_GE(part.rects.size(), optimum);
    }
}

TEST(Partition, HigherDimensionsStayValid) {
    std::mt19937_64 rng(4);
    for (std::size_t d : {3u, 5u, 10u}) {
        for (int trial = 0; trial < 30; ++trial) {
            EmbeddedPoint pq(d, 3.0);
            const auto pts = far_points(rng, 40, d, pq, 1.0);
            expect_valid(pq, pts, 1.0, partition_points(pq, pts, 1.0));
        }
    }
}

// In the plane, a box around pairwise-compatible points clears the query.
TEST(Partition, PlanarCliquesAreDistant) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const EmbeddedPoint pq{3, 3};
        const auto pts = far_points(rng, 6, 2, pq, 1.0);
        const auto g = build_graph(pq, pts, 1.0);
        std::vector<std::uint32_t> clique;
        for (std::uint32_t v = 0; v < pts.size(); ++v) {
            if (std::all_of(clique.begin(), clique.end(), [&](std::uint32_t u) { return g.edge(u, v); })) {
                clique.push_back(v);
            }
        }
        std::vector<EmbeddedPoint> sub;
        for (auto v : clique) {
            sub.push_back(pts[v]);
        }
        ASSERT_GT(dst_min_rect(pq, mbh(sub)), 1.0);
    }
}

TEST(Collinear, FarLineIsOneBox) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> pts{{-3, 5}, {3, 5}, {0, 5}};
    const auto part = collinear_partition(pq, pts, 1);
    EXPECT_EQ(part.rects.size(), 1u);
    expect_valid(pq, pts, 1, part);
}

TEST(Collinear, BothSidesGiveTwoBoxes) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> pts{{3, 3}, {5, 5}, {-2, -2}, {-4, -4}};
    const auto part = collinear_partition(pq, pts, 1);
    EXPECT_EQ(part.rects.size(), 2u);
    expect_valid(pq, pts, 1, part);
}

TEST(Collinear, OneSideGivesOneBox) {
    const EmbeddedPoint pq{0, 0};
    const std::vector<EmbeddedPoint> pts{{3, 3}, {5, 5}, {4, 4}};
    EXPECT_EQ(collinear_partition(pq, pts, 1).rects.size(), 1u);
    const std::vector<EmbeddedPoint> bent{{3, 3}, {5, 5}, {4, 7}};
    EXPECT_THROW(collinear_partition(pq, bent, 1), Error);
}
