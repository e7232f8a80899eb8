#include "autoss/vo.hpp"

#include <algorithm>
#include <cmath>

namespace autoss {

std::string_view mode_name(Mode mode) noexcept { return mode == Mode::vs2 ? "vs2" : "evs2"; }

Mode parse_mode(std::string_view name) {
    if (name == "vs2") {
        return Mode::vs2;
    }
    if (name == "evs2") {
        return Mode::evs2;
    }
    throw Error("unknown mode '" + std::string(name) + "' (expected vs2 or evs2)");
}

VOEntry VOEntry::make_str(std::string text) {
    VOEntry e;
    e.kind = Kind::str;
    e.text = std::move(text);
    return e;
}

VOEntry VOEntry::make_mf(StringRange range, const Digest& kids) {
    VOEntry e;
    e.kind = Kind::mf;
    e.range = std::move(range);
    e.kids = kids;
    return e;
}

VOEntry VOEntry::make_dbh_ref(std::string text, std::uint32_t rect) {
    VOEntry e;
    e.kind = Kind::dbh_ref;
    e.text = std::move(text);
    e.index = rect;
    return e;
}

VOEntry VOEntry::make_group(std::vector<VOEntry> children) {
    VOEntry e;
    e.kind = Kind::group;
    e.children = std::move(children);
    return e;
}

VOEntry VOEntry::make_shared_mf(std::uint32_t slot) {
    VOEntry e;
    e.kind = Kind::shared_mf;
    e.index = slot;
    return e;
}

VOEntry VOEntry::make_exempt_run(std::uint32_t pivot, std::uint32_t first, std::vector<std::uint32_t> claimed) {
    VOEntry e;
    e.kind = Kind::exempt_run;
    e.index = pivot;
    e.first = first;
    e.claimed = std::move(claimed);
    return e;
}

VOEntry VOEntry::make_shared_dbh_ref(std::string text, std::uint32_t slot) {
    VOEntry e;
    e.kind = Kind::shared_dbh_ref;
    e.text = std::move(text);
    e.index = slot;
    return e;
}

bool VOEntry::is_string_like() const noexcept {
    return kind == Kind::str || kind == Kind::dbh_ref || kind == Kind::exempt_run ||
           kind == Kind::shared_dbh_ref;
}

void encode_entry(ByteWriter& w, const VOEntry& e) {
    switch (e.kind) {
    case VOEntry::Kind::group:
        w.u8(tag::group_begin);
        for (const auto& child : e.children) {
            encode_entry(w, child);
        }
        w.u8(tag::group_end);
        break;
    case VOEntry::Kind::str:
        w.u8(tag::str);
        w.str(e.text);
        break;
    case VOEntry::Kind::mf:
        w.u8(tag::mf);
        w.str(e.range.lo);
        w.str(e.range.hi);
        w.raw(e.kids);
        break;
    case VOEntry::Kind::dbh_ref:
        w.u8(tag::dbh_ref);
        w.str(e.text);
        w.u32(e.index);
        break;
    case VOEntry::Kind::shared_mf:
        w.u8(tag::shared_mf);
        w.u32(e.index);
        break;
    case VOEntry::Kind::exempt_run:
        w.u8(tag::exempt_run);
        w.u32(e.index);
        w.u32(e.first);
        w.u32(static_cast<std::uint32_t>(e.claimed.size()));
        for (auto d : e.claimed) {
            w.u32(d);
        }
        break;
    case VOEntry::Kind::shared_dbh_ref:
        w.u8(tag::shared_dbh_ref);
        w.str(e.text);
        w.u32(e.index);
        break;
    }
}

void encode_rects(ByteWriter& w, const std::vector<Hyperrect>& rects) {
    w.u32(static_cast<std::uint32_t>(rects.size()));
    for (const auto& rect : rects) {
        w.u32(static_cast<std::uint32_t>(rect.dim()));
        for (double v : rect.lo) {
            w.f64(v);
        }
        for (double v : rect.hi) {
            w.f64(v);
        }
    }
}

Bytes encode_vo(const VerificationObject& vo) {
    ByteWriter w;
    encode_entry(w, vo.root);
    if (vo.dbhs) {
        w.u8(tag::dbh_set);
        encode_rects(w, *vo.dbhs);
    }
    return w.take();
}

std::size_t encoded_size(const VOEntry& e) {
    switch (e.kind) {
    case VOEntry::Kind::group: {
        std::size_t n = 2;
        for (const auto& child : e.children) {
            n += encoded_size(child);
        }
        return n;
    }
    case VOEntry::Kind::str:
        return 5 + e.text.size();
    case VOEntry::Kind::mf:
        return 9 + e.range.lo.size() + e.range.hi.size() + 32;
    case VOEntry::Kind::dbh_ref:
    case VOEntry::Kind::shared_dbh_ref:
        return 9 + e.text.size();
    case VOEntry::Kind::shared_mf:
        return 5;
    case VOEntry::Kind::exempt_run:
        return 13 + 4 * e.claimed.size();
    }
    return 0;
}

std::size_t encoded_size(const Hyperrect& rect) { return 4 + 16 * rect.dim(); }

std::size_t encoded_size(const VerificationObject& vo) {
    std::size_t n = encoded_size(vo.root);
    if (vo.dbhs) {
        n += 5;
        for (const auto& rect : *vo.dbhs) {
            n += encoded_size(rect);
        }
    }
    return n;
}

namespace {

double canonical_f64(ByteReader& r) {
    const double v = r.f64();
    if (!std::isfinite(v) || (v == 0.0 && std::signbit(v))) {
        r.fail("non-canonical coordinate");
    }
    return v;
}

std::string utf8_str(ByteReader& r) {
    auto s = r.str();
    if (!is_valid_utf8(s)) {
        r.fail("string is not valid UTF-8");
    }
    return s;
}

} // namespace

VOEntry decode_entry(ByteReader& r, bool allow_bundle_tags, std::size_t depth) {
    if (depth > kMaxVODepth) {
        r.fail("VO nesting too deep");
    }
    const auto t = r.u8();
    switch (t) {
    case tag::group_begin: {
        std::vector<VOEntry> children;
        while (r.peek() != tag::group_end) {
            children.push_back(decode_entry(r, allow_bundle_tags, depth + 1));
        }
        r.u8();
        return VOEntry::make_group(std::move(children));
    }
    case tag::str:
        return VOEntry::make_str(utf8_str(r));
    case tag::mf: {
        auto lo = utf8_str(r);
        auto hi = utf8_str(r);
        auto raw = r.raw(32);
        Digest kids{};
        std::copy(raw.begin(), raw.end(), kids.begin());
        return VOEntry::make_mf({std::move(lo), std::move(hi)}, kids);
    }
    case tag::dbh_ref: {
        auto text = utf8_str(r);
        return VOEntry::make_dbh_ref(std::move(text), r.u32());
    }
    default:
        break;
    }
    if (allow_bundle_tags) {
        switch (t) {
        case tag::shared_mf:
            return VOEntry::make_shared_mf(r.u32());
        case tag::exempt_run: {
            const auto pivot = r.u32();
            const auto first = r.u32();
            const auto count = r.u32();
            if (count == 0 || count > r.remaining() / 4) {
                r.fail("bad exemption run length");
            }
            std::vector<std::uint32_t> claimed(count);
            for (auto& d : claimed) {
                d = r.u32();
            }
            return VOEntry::make_exempt_run(pivot, first, std::move(claimed));
        }
        case tag::shared_dbh_ref: {
            auto text = utf8_str(r);
            return VOEntry::make_shared_dbh_ref(std::move(text), r.u32());
        }
        default:
            break;
        }
    }
    throw ParseError("unknown VO tag " + std::to_string(t), r.pos() - 1);
}

Hyperrect decode_rect(ByteReader& r) {
    const auto d = r.u32();
    if (d == 0 || d > r.remaining() / 16) {
        r.fail("bad rectangle dimension " + std::to_string(d));
    }
    Hyperrect rect;
    rect.lo.resize(d);
    rect.hi.resize(d);
    for (auto& v : rect.lo) {
        v = canonical_f64(r);
    }
    for (auto& v : rect.hi) {
        v = canonical_f64(r);
    }
    return rect;
}

std::vector<Hyperrect> decode_rects(ByteReader& r) {
    const auto count = r.u32();
    if (count > r.remaining() / 20) {
        r.fail("implausible rectangle count " + std::to_string(count));
    }
    std::vector<Hyperrect> rects;
    rects.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        rects.push_back(decode_rect(r));
    }
    return rects;
}

VerificationObject decode_vo(ByteView bytes, bool allow_bundle_tags) {
    ByteReader r(bytes);
    VerificationObject vo;
    vo.root = decode_entry(r, allow_bundle_tags);
    if (!r.done()) {
        if (r.u8() != tag::dbh_set) {
            r.fail("expected DBH set or end of VO");
        }
        vo.dbhs = decode_rects(r);
    }
    if (!r.done()) {
        r.fail("trailing bytes after VO");
    }
    return vo;
}

namespace {

void render(const VOEntry& e, std::string& out) {
    switch (e.kind) {
    case VOEntry::Kind::group:
        out += '(';
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            render(e.children[i], out);
        }
        out += ')';
        break;
    case VOEntry::Kind::str:
        out += e.text;
        break;
    case VOEntry::Kind::mf:
        out += '[' + e.range.lo + ", " + e.range.hi + ']';
        break;
    case VOEntry::Kind::dbh_ref:
        out += '(' + e.text + ", R" + std::to_string(e.index) + ')';
        break;
    case VOEntry::Kind::shared_mf:
        out += "MF#" + std::to_string(e.index);
        break;
    case VOEntry::Kind::exempt_run:
        out += "exempt(q" + std::to_string(e.index) + ", " + std::to_string(e.first) + "+" +
               std::to_string(e.claimed.size()) + ')';
        break;
    case VOEntry::Kind::shared_dbh_ref:
        out += '(' + e.text + ", DBH#" + std::to_string(e.index) + ')';
        break;
    }
}

} // namespace

std::string to_string(const VOEntry& entry) {
    std::string out;
    render(entry, out);
    return out;
}

} // namespace autoss
