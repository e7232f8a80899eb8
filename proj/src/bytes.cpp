#include "autoss/bytes.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace autoss {

void ByteWriter::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void ByteWriter::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::raw(std::string_view s) { raw(as_bytes(s)); }

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
}

void ByteWriter::blob(ByteView bytes) {
    u32(static_cast<std::uint32_t>(bytes.size()));
    raw(bytes);
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        throw ParseError("unexpected end of input: need " + std::to_string(n) + " bytes, have " +
                             std::to_string(remaining()),
                         pos_);
    }
}

std::uint8_t ByteReader::u8() {
    need(1);
    return in_[pos_++];
}

std::uint8_t ByteReader::peek() const {
    need(1);
    return in_[pos_];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v = (v << 8) | in_[pos_++];
    }
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | in_[pos_++];
    }
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

ByteView ByteReader::raw(std::size_t n) {
    need(n);
    auto view = in_.subspan(pos_, n);
    pos_ += n;
    return view;
}

std::string ByteReader::str() {
    const std::uint32_t n = u32();
    auto view = raw(n);
    return {reinterpret_cast<const char*>(view.data()), view.size()};
}

Bytes ByteReader::blob() {
    const std::uint32_t n = u32();
    auto view = raw(n);
    return {view.begin(), view.end()};
}

void ByteReader::expect_magic(std::string_view magic) {
    const std::size_t at = pos_;
    auto view = raw(magic.size());
    if (std::memcmp(view.data(), magic.data(), magic.size()) != 0) {
        throw ParseError("bad magic, expected \"" + std::string(magic) + "\"", at);
    }
}

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("short write to " + path);
    }
}

std::string to_hex(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

} // namespace autoss
