#include <gtest/gtest.h>

#include "autoss/harness.hpp"
#include "oracles.hpp"

using namespace autoss;

TEST(Embedding, SingletonCorpus) {
    const std::vector<std::string> corpus{"smith"};
    const auto f = build_embedding(corpus, 1, 0);
    ASSERT_EQ(f.reference_sets().size(), 1u);
    EXPECT_EQ(f.reference_sets()[0], corpus);
    EXPECT_EQ(f.embed("smith"), (EmbeddedPoint{0.0}));
    EXPECT_EQ(f.embed("smyth"), (EmbeddedPoint{1.0}));
}

TEST(Embedding, ReferenceSetSizesAndDeterminism) {
    const auto corpus = generate_corpus({.n = 1000}, 1);
    const auto f = build_embedding(corpus, 6, 42);
    const std::vector<std::size_t> sizes{2, 4, 8, 16, 16, 16};
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        EXPECT_EQ(f.reference_sets()[i].size(), sizes[i]);
        for (const auto& r : f.reference_sets()[i]) {
            EXPECT_TRUE(std::binary_search(corpus.begin(), corpus.end(), r));
        }
    }
    EXPECT_EQ(build_embedding(corpus, 6, 42), f);
    EXPECT_FALSE(build_embedding(corpus, 6, 43) == f);
    EXPECT_EQ(f.embed("anything"), f.embed("anything"));
}

TEST(Embedding, CoordinatesAreMinDistances) {
    const auto corpus = generate_corpus({.n = 300}, 2);
    const auto f = build_embedding(corpus, 4, 7);
    for (const auto& s : {std::string("smith"), corpus[5], std::string("")}) {
        const auto p = f.embed(s);
        for (std::size_t i = 0; i < 4; ++i) {
            std::size_t best = SIZE_MAX;
            for (const auto& r : f.reference_sets()[i]) {
                best = std::min(best, oracle::levenshtein(s, r));
            }
            EXPECT_EQ(p[i], static_cast<double>(best));
        }
    }
}

TEST(Embedding, MemberOfEverySetMapsToOrigin) {
    const std::vector<std::vector<std::string>> sets{{"abc", "x"}, {"abc"}, {"q", "abc"}};
    const EmbeddingFunction f(sets);
    EXPECT_EQ(f.embed("abc"), (EmbeddedPoint{0, 0, 0}));
}

TEST(Embedding, CoordinatesBoundedByMaxLength) {
    const auto corpus = generate_corpus({.n = 1000}, 3);
    const auto f = build_embedding(corpus, 5, 1);
    std::size_t max_len = 0;
    for (const auto& s : corpus) {
        max_len = std::max(max_len, s.size());
    }
    const EmbeddedCorpus points(f, corpus);
    for (std::uint32_t i = 0; i < corpus.size(); ++i) {
        for (double c : points.point(i)) {
            ASSERT_LE(c, static_cast<double>(max_len));
        }
    }
}

TEST(Embedding, Contractive) {
    const auto corpus = generate_corpus({.n = 500}, 4);
    std::mt19937_64 rng(9);
    for (std::uint32_t d : {2u, 5u}) {
        const auto f = build_embedding(corpus, d, d);
        for (int i = 0; i < 2000; ++i) {
            const auto a = oracle::random_string(rng, 1, 13);
            const auto& b = corpus[rng() % corpus.size()];
            ASSERT_LE(euclid(f.embed(a), f.embed(b)), static_cast<double>(edit_distance(a, b)));
        }
    }
}

TEST(Embedding, SerializeRoundTrip) {
    const auto corpus = generate_corpus({.n = 200}, 5);
    const auto f = build_embedding(corpus, 5, 11);
    const auto bytes = f.serialize();
    const auto g = EmbeddingFunction::deserialize(bytes);
    EXPECT_EQ(g, f);
    EXPECT_EQ(g.serialize(), bytes);
    EXPECT_THROW(EmbeddingFunction::deserialize(ByteView(bytes.data(), bytes.size() - 1)), Error);
}

TEST(Euclid, AnalyticValues) {
    EXPECT_EQ(euclid({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_EQ(euclid({3}, {1}), 2.0);
    EXPECT_EQ(euclid({1, 1, 1, 1}, {0, 0, 0, 0}), 1.0);
    EXPECT_THROW(euclid({1}, {1, 2}), Error);
}
