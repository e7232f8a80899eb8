#include "autoss/metrics.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <vector>

namespace autoss {
namespace {

// Returns the length of the sequence starting at s[i], or 0 when invalid.
std::size_t utf8_sequence(std::string_view s, std::size_t i, char32_t& out) noexcept {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        out = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
        min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
        min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
        min = 0x10000;
    } else {
        return 0;
    }
    if (i + len > s.size()) {
        return 0;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            return 0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return 0;
    }
    out = cp;
    return len;
}

bool is_ascii(std::string_view s) noexcept {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

template <typename Char>
std::size_t levenshtein(const Char* a, std::size_t n, const Char* b, std::size_t m) {
    // Trim the common prefix and suffix; they never contribute.
    while (n > 0 && m > 0 && *a == *b) {
        ++a;
        ++b;
        --n;
        --m;
    }
    while (n > 0 && m > 0 && a[n - 1] == b[m - 1]) {
        --n;
        --m;
    }
    if (n == 0) {
        return m;
    }
    if (m == 0) {
        return n;
    }
    if (m > n) {
        std::swap(a, b);
        std::swap(n, m);
    }
    thread_local std::vector<std::size_t> row;
    row.resize(m + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        const Char ca = a[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t up = row[j];
            const std::size_t sub = diag + (ca == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return row[m];
}

} // namespace

bool is_valid_utf8(std::string_view s) noexcept {
    char32_t cp = 0;
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t len = utf8_sequence(s, i, cp);
        if (len == 0) {
            return false;
        }
        i += len;
    }
    return true;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    char32_t cp = 0;
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t len = utf8_sequence(s, i, cp);
        if (len == 0) {
            throw Utf8Error("invalid UTF-8 at byte " + std::to_string(i));
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    return levenshtein(a.data(), a.size(), b.data(), b.size());
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    if (is_ascii(a) && is_ascii(b)) {
        return levenshtein(a.data(), a.size(), b.data(), b.size());
    }
    const auto ua = decode_utf8(a);
    const auto ub = decode_utf8(b);
    return edit_distance(ua, ub);
}

std::strong_ordering compare(std::string_view a, std::string_view b) noexcept {
    const std::size_t n = std::min(a.size(), b.size());
    const int c = n == 0 ? 0 : std::memcmp(a.data(), b.data(), n);
    if (c != 0) {
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.size() <=> b.size();
}

std::string range_lcp(const StringRange& r) {
    const auto& a = r.lo;
    const auto& b = r.hi;
    std::size_t i = 0;
    const std::size_t n = std::min(a.size(), b.size());
    while (i < n && a[i] == b[i]) {
        ++i;
    }
    // Back off to the start of a scalar value so the prefix stays valid UTF-8.
    while (i > 0 && i < a.size() && (static_cast<unsigned char>(a[i]) & 0xC0) == 0x80) {
        --i;
    }
    return a.substr(0, i);
}

std::size_t prefix_row_min(std::u32string_view p, std::u32string_view q) {
    // row[j] = DST(p[..i], q[..j]); after the last row, take the minimum over j.
    thread_local std::vector<std::size_t> row;
    row.resize(q.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= p.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= q.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t sub = diag + (p[i - 1] == q[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return *std::min_element(row.begin(), row.end());
}

std::size_t dst_min(std::string_view q, const StringRange& r) {
    const auto p = decode_utf8(range_lcp(r));
    const auto uq = decode_utf8(q);
    return prefix_row_min(p, uq);
}

} // namespace autoss
