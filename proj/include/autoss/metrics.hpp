#pragma once

// Edit distance, the dictionary string ordering, and the per-range lower bound
// used to prune B^ed-tree nodes.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "autoss/bytes.hpp"

namespace autoss {

class Utf8Error : public Error {
public:
    using Error::Error;
};

bool is_valid_utf8(std::string_view s) noexcept;

/// Decodes UTF-8 into Unicode scalar values. Throws Utf8Error on overlong
/// forms, surrogates, truncated sequences and values above U+10FFFF.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

/// Unit-cost Levenshtein distance over Unicode scalar values.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Dictionary order by scalar value, proper prefixes first. For valid UTF-8
/// this coincides with unsigned bytewise order.
std::strong_ordering compare(std::string_view a, std::string_view b) noexcept;

inline bool phi_less(std::string_view a, std::string_view b) noexcept {
    return compare(a, b) < 0;
}

/// The string interval [lo, hi] under dictionary order.
struct StringRange {
    std::string lo;
    std::string hi;

    bool valid() const noexcept { return compare(lo, hi) <= 0; }
    bool contains(std::string_view s) const noexcept {
        return compare(lo, s) <= 0 && compare(s, hi) <= 0;
    }
    /// True when `inner` lies entirely inside this range.
    bool covers(const StringRange& inner) const noexcept {
        return compare(lo, inner.lo) <= 0 && compare(inner.hi, hi) <= 0;
    }

    friend bool operator==(const StringRange&, const StringRange&) = default;
};

/// A corpus string with its position in the dictionary-sorted corpus.
struct CorpusString {
    std::uint32_t id = 0;
    std::string text;
};

/// Longest common prefix of range.lo and range.hi, cut on a scalar boundary.
/// Every string inside the range starts with it.
std::string range_lcp(const StringRange& r);

/// min over prefixes q' of q of DST(p, q'): the last row of the edit-distance
/// table of p against q.
std::size_t prefix_row_min(std::u32string_view p, std::u32string_view q);

/// Lower bound on DST(q, s) for every s inside r.
std::size_t dst_min(std::string_view q, const StringRange& r);

} // namespace autoss
