#pragma once

// Verification objects: the bracketed proof a server ships next to a result.
// The wire format is canonical, so equal objects always encode to equal bytes
// and every accepted byte string decodes to exactly one object.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autoss/bytes.hpp"
#include "autoss/geometry.hpp"
#include "autoss/hash.hpp"
#include "autoss/metrics.hpp"

namespace autoss {

enum class Mode : std::uint8_t { vs2 = 0, evs2 = 1 };

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

namespace tag {
inline constexpr std::uint8_t group_begin = 0x10;
inline constexpr std::uint8_t group_end = 0x11;
inline constexpr std::uint8_t str = 0x12;
inline constexpr std::uint8_t mf = 0x13;
inline constexpr std::uint8_t dbh_set = 0x14;
inline constexpr std::uint8_t dbh_ref = 0x15;
// Only valid inside a multi-query bundle.
inline constexpr std::uint8_t shared_mf = 0x16;
inline constexpr std::uint8_t exempt_run = 0x17;
inline constexpr std::uint8_t shared_dbh_ref = 0x18;
} // namespace tag

struct VOEntry {
    enum class Kind : std::uint8_t { str, mf, dbh_ref, group, shared_mf, exempt_run, shared_dbh_ref };

    Kind kind = Kind::group;
    /// str, dbh_ref, shared_dbh_ref
    std::string text;
    /// mf
    StringRange range;
    Digest kids{};
    /// dbh_ref: offset into the VO's DBH set; shared_mf / shared_dbh_ref:
    /// offset into the bundle table; exempt_run: pivot query position.
    std::uint32_t index = 0;
    /// exempt_run: first pivot ordinal and one claimed pivot distance per
    /// covered string.
    std::uint32_t first = 0;
    std::vector<std::uint32_t> claimed;
    /// group
    std::vector<VOEntry> children;

    static VOEntry make_str(std::string text);
    static VOEntry make_mf(StringRange range, const Digest& kids);
    static VOEntry make_dbh_ref(std::string text, std::uint32_t rect);
    static VOEntry make_group(std::vector<VOEntry> children);
    static VOEntry make_shared_mf(std::uint32_t slot);
    static VOEntry make_exempt_run(std::uint32_t pivot, std::uint32_t first, std::vector<std::uint32_t> claimed);
    static VOEntry make_shared_dbh_ref(std::string text, std::uint32_t slot);

    bool is_group() const noexcept { return kind == Kind::group; }
    /// True for entries standing in for leaf strings.
    bool is_string_like() const noexcept;

    friend bool operator==(const VOEntry&, const VOEntry&) = default;
};

struct VerificationObject {
    VOEntry root;
    /// Present exactly in E-VS2 mode (possibly empty).
    std::optional<std::vector<Hyperrect>> dbhs;

    Mode mode() const noexcept { return dbhs ? Mode::evs2 : Mode::vs2; }
    friend bool operator==(const VerificationObject&, const VerificationObject&) = default;
};

void encode_entry(ByteWriter& w, const VOEntry& entry);
void encode_rects(ByteWriter& w, const std::vector<Hyperrect>& rects);
Bytes encode_vo(const VerificationObject& vo);
std::size_t encoded_size(const VOEntry& entry);
std::size_t encoded_size(const Hyperrect& rect);
std::size_t encoded_size(const VerificationObject& vo);

/// Nesting deeper than this is rejected while decoding.
inline constexpr std::size_t kMaxVODepth = 64;

VOEntry decode_entry(ByteReader& r, bool allow_bundle_tags, std::size_t depth = 0);
/// Rect body after the tag: d (u32) then lo and hi coordinates.
Hyperrect decode_rect(ByteReader& r);
std::vector<Hyperrect> decode_rects(ByteReader& r);
/// Strict decoder: rejects unknown tags, truncation, trailing bytes, excess
/// nesting and non-canonical doubles (NaN, infinities, negative zero).
VerificationObject decode_vo(ByteView bytes, bool allow_bundle_tags = false);

/// Calls `fn` on every non-group entry in left-to-right order.
template <typename Fn>
void for_each_leaf_entry(const VOEntry& entry, Fn&& fn) {
    if (entry.is_group()) {
        for (const auto& child : entry.children) {
            for_each_leaf_entry(child, fn);
        }
    } else {
        fn(entry);
    }
}

/// Human-readable bracket rendering, e.g. ((a, b), [c, d]).
std::string to_string(const VOEntry& entry);

} // namespace autoss
