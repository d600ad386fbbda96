#include "gnbdns/inner.hpp"

#include <algorithm>

namespace gnbdns::inner {

namespace {

uint32_t pseudo_header_sum(const InnerDatagram& d, size_t udp_len) {
    ByteWriter w;
    w.u32(d.src_addr.value);
    w.u32(d.dst_addr.value);
    w.u8(0);
    w.u8(d.protocol);
    w.u16(static_cast<uint16_t>(udp_len));
    return ones_complement_sum(w.bytes());
}

}  // namespace

InnerDatagram decode_inner(ByteView payload) {
    if (payload.size() < 20)
        throw CodecError(CodecError::Kind::Truncated, "IPv4 header needs 20 bytes");

    // Checksum first, over the declared header span (clamped to the buffer),
    // so corruption anywhere in the header surfaces as BadChecksum rather
    // than as a misleading field error.
    size_t ihl_bytes = static_cast<size_t>(payload[0] & 0x0F) * 4;
    size_t span = std::min(std::max(ihl_bytes, size_t{20}), payload.size());
    if (ones_complement_checksum(payload.subspan(0, span)) != 0)
        throw CodecError(CodecError::Kind::BadChecksum, "IPv4 header checksum");

    uint8_t version = payload[0] >> 4;
    if (version != 4)
        throw CodecError(CodecError::Kind::NotIpv4,
                         "IP version " + std::to_string(version));
    if (ihl_bytes != 20)
        throw CodecError(CodecError::Kind::NotIpv4,
                         "IPv4 options unsupported (IHL " +
                             std::to_string(ihl_bytes / 4) + ")");

    ByteReader r(payload);
    r.skip(2);
    uint16_t total_len = r.u16();
    r.skip(2);  // identification
    uint16_t frag = r.u16();
    uint8_t ttl = r.u8();
    uint8_t proto = r.u8();
    r.skip(2);  // checksum, already validated
    Ipv4Addr src{r.u32()};
    Ipv4Addr dst{r.u32()};

    if (total_len != payload.size())
        throw CodecError(CodecError::Kind::Truncated,
                         "IPv4 total length " + std::to_string(total_len) + " vs " +
                             std::to_string(payload.size()) + " bytes present");
    if ((frag & 0x2000) || (frag & 0x1FFF))
        throw CodecError(CodecError::Kind::Fragmented, "fragmented datagram");
    if (proto != kProtoUdp)
        throw CodecError(CodecError::Kind::NotUdp,
                         "IP protocol " + std::to_string(proto));

    r.require(8);
    InnerDatagram d;
    d.src_addr = src;
    d.dst_addr = dst;
    d.ttl_hops = ttl;
    d.protocol = proto;
    d.src_port = r.u16();
    d.dst_port = r.u16();
    uint16_t udp_len = r.u16();
    uint16_t udp_cksum = r.u16();
    if (udp_len != 8 + r.remaining())
        throw CodecError(CodecError::Kind::Truncated,
                         "UDP length " + std::to_string(udp_len) + " vs " +
                             std::to_string(8 + r.remaining()) + " bytes present");
    ByteView body = r.take(r.remaining());
    d.udp_payload.assign(body.begin(), body.end());

    if (udp_cksum != 0) {
        uint32_t sum = pseudo_header_sum(d, udp_len);
        if (ones_complement_checksum(payload.subspan(20), sum) != 0)
            throw CodecError(CodecError::Kind::BadChecksum, "UDP checksum");
    }
    return d;
}

Bytes encode_inner(const InnerDatagram& d) {
    size_t udp_len = 8 + d.udp_payload.size();
    size_t total = 20 + udp_len;
    if (total > 65535)
        throw CodecError(CodecError::Kind::PayloadTooLarge,
                         std::to_string(total) + "-byte datagram exceeds 65535");

    ByteWriter w;
    w.u8(0x45);
    w.u8(0);
    w.u16(static_cast<uint16_t>(total));
    w.u16(0);  // identification
    w.u16(0);  // flags/fragment offset
    w.u8(d.ttl_hops);
    w.u8(d.protocol);
    size_t cksum_at = w.size();
    w.u16(0);
    w.u32(d.src_addr.value);
    w.u32(d.dst_addr.value);
    w.patch_u16(cksum_at, ones_complement_checksum(w.bytes()));

    size_t udp_at = w.size();
    w.u16(d.src_port);
    w.u16(d.dst_port);
    w.u16(static_cast<uint16_t>(udp_len));
    w.u16(0);
    w.raw(d.udp_payload);
    uint16_t uck = ones_complement_checksum(
        ByteView(w.bytes()).subspan(udp_at), pseudo_header_sum(d, udp_len));
    if (uck == 0) uck = 0xFFFF;
    w.patch_u16(udp_at + 6, uck);
    return w.take();
}

HeaderPeek peek_headers(ByteView frame) {
    HeaderPeek h;
    if (frame.size() < 20 || (frame[0] >> 4) != 4) return h;
    h.ipv4 = true;
    h.protocol = frame[9];
    h.src_addr = Ipv4Addr{static_cast<uint32_t>(frame[12]) << 24 |
                          static_cast<uint32_t>(frame[13]) << 16 |
                          static_cast<uint32_t>(frame[14]) << 8 | frame[15]};
    h.dst_addr = Ipv4Addr{static_cast<uint32_t>(frame[16]) << 24 |
                          static_cast<uint32_t>(frame[17]) << 16 |
                          static_cast<uint32_t>(frame[18]) << 8 | frame[19]};
    size_t ihl_bytes = static_cast<size_t>(frame[0] & 0x0F) * 4;
    if (h.protocol == kProtoUdp && ihl_bytes >= 20 && frame.size() >= ihl_bytes + 4) {
        h.has_ports = true;
        h.src_port = static_cast<uint16_t>(frame[ihl_bytes] << 8 | frame[ihl_bytes + 1]);
        h.dst_port =
            static_cast<uint16_t>(frame[ihl_bytes + 2] << 8 | frame[ihl_bytes + 3]);
    }
    return h;
}

InnerDatagram make_udp(Ipv4Addr src, uint16_t src_port, Ipv4Addr dst,
                       uint16_t dst_port, Bytes payload, uint8_t ttl) {
    InnerDatagram d;
    d.src_addr = src;
    d.dst_addr = dst;
    d.ttl_hops = ttl;
    d.src_port = src_port;
    d.dst_port = dst_port;
    d.udp_payload = std::move(payload);
    return d;
}

}  // namespace gnbdns::inner
