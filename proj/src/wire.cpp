#include "gnbdns/wire.hpp"

#include <cctype>
#include <cstdio>

namespace gnbdns {

const char* to_string(CodecError::Kind k) {
    using K = CodecError::Kind;
    switch (k) {
        case K::Truncated: return "Truncated";
        case K::LengthMismatch: return "LengthMismatch";
        case K::UnsupportedVersion: return "UnsupportedVersion";
        case K::MalformedExtension: return "MalformedExtension";
        case K::InvalidExtensionLength: return "InvalidExtensionLength";
        case K::BadChecksum: return "BadChecksum";
        case K::NotIpv4: return "NotIpv4";
        case K::NotUdp: return "NotUdp";
        case K::Fragmented: return "Fragmented";
        case K::PayloadTooLarge: return "PayloadTooLarge";
        case K::CompressionLoop: return "CompressionLoop";
        case K::MultipleQuestions: return "MultipleQuestions";
        case K::MalformedName: return "MalformedName";
        case K::NameTooLong: return "NameTooLong";
        case K::MalformedRecord: return "MalformedRecord";
    }
    return "Unknown";
}

Ipv4Addr Ipv4Addr::parse(const std::string& dotted) {
    uint32_t parts[4];
    char extra;
    if (std::sscanf(dotted.c_str(), "%u.%u.%u.%u%c", &parts[0], &parts[1], &parts[2],
                    &parts[3], &extra) != 4)
        throw std::invalid_argument("bad IPv4 address: " + dotted);
    for (uint32_t p : parts)
        if (p > 255) throw std::invalid_argument("bad IPv4 address: " + dotted);
    return from_octets(static_cast<uint8_t>(parts[0]), static_cast<uint8_t>(parts[1]),
                       static_cast<uint8_t>(parts[2]), static_cast<uint8_t>(parts[3]));
}

std::string Ipv4Addr::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", value >> 24, (value >> 16) & 0xFF,
                  (value >> 8) & 0xFF, value & 0xFF);
    return buf;
}

std::string Ipv6Addr::to_string() const {
    char buf[40];
    char* p = buf;
    for (int i = 0; i < 8; ++i) {
        p += std::snprintf(p, 6, "%s%02x%02x", i ? ":" : "", bytes[2 * i],
                           bytes[2 * i + 1]);
    }
    return buf;
}

uint32_t ones_complement_sum(ByteView data, uint32_t initial) {
    uint32_t sum = initial;
    size_t i = 0;
    for (; i + 1 < data.size(); i += 2)
        sum += static_cast<uint32_t>(data[i]) << 8 | data[i + 1];
    if (i < data.size()) sum += static_cast<uint32_t>(data[i]) << 8;
    return sum;
}

uint16_t ones_complement_checksum(ByteView data, uint32_t initial) {
    uint32_t sum = ones_complement_sum(data, initial);
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    return static_cast<uint16_t>(~sum);
}

Bytes parse_hex_octets(const std::string& text) {
    Bytes out;
    int hi = -1;
    for (char c : text) {
        int v;
        if (c >= '0' && c <= '9')
            v = c - '0';
        else if (c >= 'a' && c <= 'f')
            v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            v = c - 'A' + 10;
        else if (std::isspace(static_cast<unsigned char>(c))) {
            if (hi >= 0) throw std::invalid_argument("odd hex digit group");
            continue;
        } else {
            throw std::invalid_argument(std::string("bad hex character '") + c + "'");
        }
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<uint8_t>(hi << 4 | v));
            hi = -1;
        }
    }
    if (hi >= 0) throw std::invalid_argument("trailing hex nibble");
    return out;
}

std::string to_hex_octets(ByteView data) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 3);
    for (size_t i = 0; i < data.size(); ++i) {
        if (i) s.push_back(' ');
        s.push_back(digits[data[i] >> 4]);
        s.push_back(digits[data[i] & 0xF]);
    }
    return s;
}

}  // namespace gnbdns
