#include "autoss/embedding.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "autoss/metrics.hpp"

namespace autoss {
namespace {

constexpr std::string_view kEmbeddingMagic = "EMB1";

// Unbiased draw from [0, n) by rejection; std::uniform_int_distribution is not
// reproducible across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

} // namespace

EmbeddingFunction::EmbeddingFunction(std::vector<std::vector<std::string>> reference_sets, std::uint64_t seed)
    : sets_(std::move(reference_sets)), seed_(seed) {
    if (sets_.empty()) {
        throw Error("embedding needs at least one reference set");
    }
    decoded_.reserve(sets_.size());
    for (const auto& set : sets_) {
        if (set.empty()) {
            throw Error("empty reference set");
        }
        auto& out = decoded_.emplace_back();
        for (const auto& s : set) {
            out.push_back(decode_utf8(s));
        }
        cost_ += set.size();
    }
}

EmbeddedPoint EmbeddingFunction::embed(std::string_view s) const { return embed(decode_utf8(s)); }

EmbeddedPoint EmbeddingFunction::embed(std::u32string_view s) const {
    EmbeddedPoint p(decoded_.size());
    for (std::size_t i = 0; i < decoded_.size(); ++i) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (const auto& r : decoded_[i]) {
            best = std::min(best, edit_distance(s, r));
        }
        p[i] = static_cast<double>(best);
    }
    return p;
}

Bytes EmbeddingFunction::serialize() const {
    ByteWriter w;
    w.raw(kEmbeddingMagic);
    w.u32(dim());
    w.u64(seed_);
    for (const auto& set : sets_) {
        w.u32(static_cast<std::uint32_t>(set.size()));
        for (const auto& s : set) {
            w.str(s);
        }
    }
    return w.take();
}

EmbeddingFunction EmbeddingFunction::deserialize(ByteView bytes) {
    ByteReader r(bytes);
    r.expect_magic(kEmbeddingMagic);
    const auto d = r.u32();
    if (d == 0 || d > r.remaining() / 4) {
        r.fail("bad embedding dimension " + std::to_string(d));
    }
    const auto seed = r.u64();
    std::vector<std::vector<std::string>> sets(d);
    for (auto& set : sets) {
        const auto count = r.u32();
        if (count == 0 || count > r.remaining() / 4) {
            r.fail("bad reference set size " + std::to_string(count));
        }
        for (std::uint32_t k = 0; k < count; ++k) {
            auto s = r.str();
            if (!is_valid_utf8(s)) {
                r.fail("reference string is not valid UTF-8");
            }
            set.push_back(std::move(s));
        }
    }
    if (!r.done()) {
        r.fail("trailing bytes after embedding");
    }
    return EmbeddingFunction(std::move(sets), seed);
}

void EmbeddingFunction::save(const std::string& path) const { write_file(path, serialize()); }

EmbeddingFunction EmbeddingFunction::load(const std::string& path) { return deserialize(read_file(path)); }

EmbeddingFunction build_embedding(std::span<const std::string> corpus, std::uint32_t d, std::uint64_t seed) {
    if (d == 0) {
        throw Error("embedding dimension must be at least 1");
    }
    if (corpus.empty()) {
        throw Error("empty dataset");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> order(corpus.size());
    std::vector<std::vector<std::string>> sets;
    sets.reserve(d);
    for (std::uint32_t i = 1; i <= d; ++i) {
        const std::size_t want = std::min<std::size_t>({std::size_t{1} << std::min<std::uint32_t>(i, 16),
                                                        kMaxReferenceSet, corpus.size()});
        // Partial Fisher-Yates over a fresh identity permutation.
        std::iota(order.begin(), order.end(), 0u);
        std::vector<std::string> set;
        set.reserve(want);
        for (std::size_t k = 0; k < want; ++k) {
            const auto j = k + bounded(rng, order.size() - k);
            std::swap(order[k], order[j]);
            set.push_back(corpus[order[k]]);
        }
        sets.push_back(std::move(set));
    }
    return EmbeddingFunction(std::move(sets), seed);
}

EmbeddedCorpus::EmbeddedCorpus(const EmbeddingFunction& f, std::span<const std::string> corpus) {
    points_.reserve(corpus.size());
    for (const auto& s : corpus) {
        points_.push_back(f.embed(s));
    }
}

} // namespace autoss
