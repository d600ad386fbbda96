#pragma once

#include <cstdint>

#include "gnbdns/wire.hpp"

namespace gnbdns::inner {

inline constexpr uint8_t kProtoUdp = 17;

/// An IPv4+UDP datagram. This is the shape of both the tunneled user
/// datagram inside a G-PDU and the outer transport the G-PDU rides on.
struct InnerDatagram {
    Ipv4Addr src_addr;
    Ipv4Addr dst_addr;
    uint8_t ttl_hops = 64;
    uint8_t protocol = kProtoUdp;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    Bytes udp_payload;

    bool operator==(const InnerDatagram&) const = default;
};

/// Header fields a switch can match on without validating the datagram.
/// Missing/short input yields zeroed ports rather than an error.
struct HeaderPeek {
    bool ipv4 = false;
    uint8_t protocol = 0;
    Ipv4Addr src_addr;
    Ipv4Addr dst_addr;
    bool has_ports = false;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
};

/// Throws CodecError: Truncated / BadChecksum / NotIpv4 / Fragmented /
/// NotUdp. The IPv4 header checksum is validated before any field is
/// interpreted; a nonzero UDP checksum is validated against the
/// pseudo-header.
InnerDatagram decode_inner(ByteView payload);

/// Emits a 20-byte IPv4 header with a fresh checksum and a UDP checksum
/// computed over the pseudo-header (0 is written as 0xFFFF per RFC 768).
/// Throws CodecError::PayloadTooLarge past the 65535-byte datagram limit.
Bytes encode_inner(const InnerDatagram& d);

/// Best-effort header extraction for flow matching; never throws.
HeaderPeek peek_headers(ByteView frame);

InnerDatagram make_udp(Ipv4Addr src, uint16_t src_port, Ipv4Addr dst,
                       uint16_t dst_port, Bytes payload, uint8_t ttl = 64);

}  // namespace gnbdns::inner
