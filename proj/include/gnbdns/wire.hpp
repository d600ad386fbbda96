#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnbdns {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

/// Typed decode/encode failure shared by all wire codecs. Decoders throw
/// this (and only this) for any malformed input; they never crash or read
/// past the buffer.
class CodecError : public std::runtime_error {
public:
    enum class Kind {
        Truncated,
        LengthMismatch,
        UnsupportedVersion,
        MalformedExtension,
        InvalidExtensionLength,
        BadChecksum,
        NotIpv4,
        NotUdp,
        Fragmented,
        PayloadTooLarge,
        CompressionLoop,
        MultipleQuestions,
        MalformedName,
        NameTooLong,
        MalformedRecord,
    };

    CodecError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

const char* to_string(CodecError::Kind k);

/// Bounds-checked big-endian cursor over an input buffer.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    size_t pos() const { return pos_; }
    size_t remaining() const { return data_.size() - pos_; }

    void require(size_t n, CodecError::Kind kind = CodecError::Kind::Truncated) const {
        if (remaining() < n)
            throw CodecError(kind, "input ends after " + std::to_string(data_.size()) +
                                       " bytes, need " + std::to_string(n) + " more");
    }

    uint8_t u8() {
        require(1);
        return data_[pos_++];
    }
    uint16_t u16() {
        require(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        require(4);
        uint32_t v = static_cast<uint32_t>(data_[pos_]) << 24 |
                     static_cast<uint32_t>(data_[pos_ + 1]) << 16 |
                     static_cast<uint32_t>(data_[pos_ + 2]) << 8 |
                     static_cast<uint32_t>(data_[pos_ + 3]);
        pos_ += 4;
        return v;
    }
    ByteView take(size_t n) {
        require(n);
        ByteView v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }
    void skip(size_t n) {
        require(n);
        pos_ += n;
    }

private:
    ByteView data_;
    size_t pos_ = 0;
};

/// Big-endian append-only output buffer with offset patching.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v));
    }
    void u32(uint32_t v) {
        u16(static_cast<uint16_t>(v >> 16));
        u16(static_cast<uint16_t>(v));
    }
    void raw(ByteView v) { buf_.insert(buf_.end(), v.begin(), v.end()); }

    void patch_u16(size_t offset, uint16_t v) {
        buf_[offset] = static_cast<uint8_t>(v >> 8);
        buf_[offset + 1] = static_cast<uint8_t>(v);
    }

    size_t size() const { return buf_.size(); }
    Bytes take() { return std::move(buf_); }
    const Bytes& bytes() const { return buf_; }

private:
    Bytes buf_;
};

struct Ipv4Addr {
    uint32_t value = 0;

    static Ipv4Addr from_octets(uint8_t a, uint8_t b, uint8_t c, uint8_t d) {
        return {static_cast<uint32_t>(a) << 24 | static_cast<uint32_t>(b) << 16 |
                static_cast<uint32_t>(c) << 8 | d};
    }
    static Ipv4Addr parse(const std::string& dotted);  // throws std::invalid_argument

    std::string to_string() const;
    auto operator<=>(const Ipv4Addr&) const = default;
};

struct Ipv6Addr {
    std::array<uint8_t, 16> bytes{};
    std::string to_string() const;  // full 8-group lowercase hex form
    auto operator<=>(const Ipv6Addr&) const = default;
};

/// RFC 1071 ones'-complement sum folded to 16 bits; `initial` carries a
/// partial unfolded sum (pseudo-header) into the computation.
uint16_t ones_complement_checksum(ByteView data, uint32_t initial = 0);

/// Unfolded ones'-complement partial sum, for pseudo-header chaining.
uint32_t ones_complement_sum(ByteView data, uint32_t initial = 0);

Bytes parse_hex_octets(const std::string& text);  // "30 ff 00 ..." -> bytes
std::string to_hex_octets(ByteView data);         // bytes -> "30 ff 00 ..."

}  // namespace gnbdns
