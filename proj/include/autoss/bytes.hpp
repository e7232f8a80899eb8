#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace autoss {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated binary input. `offset` is the byte position where
/// decoding stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Big-endian writer used by every on-disk and wire format.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
    void raw(std::string_view s);
    /// u32 length prefix followed by the bytes.
    void str(std::string_view s);
    void blob(ByteView bytes);

    std::size_t size() const noexcept { return out_.size(); }
    const Bytes& bytes() const noexcept { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8();
    std::uint8_t peek() const;
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    ByteView raw(std::size_t n);
    std::string str();
    Bytes blob();
    void expect_magic(std::string_view magic);

    bool done() const noexcept { return pos_ == in_.size(); }
    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

private:
    void need(std::size_t n) const;

    ByteView in_;
    std::size_t pos_ = 0;
};

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView bytes);

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);

} // namespace autoss
