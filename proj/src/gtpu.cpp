#include "gnbdns/gtpu.hpp"

namespace gnbdns::gtpu {

GtpUPacket decode_gtpu(ByteView raw) {
    ByteReader r(raw);
    r.require(8);

    GtpUPacket p;
    uint8_t flags = r.u8();
    p.version = flags >> 5;
    p.pt_flag = flags & 0x10;
    p.e_flag = flags & 0x04;
    p.s_flag = flags & 0x02;
    p.pn_flag = flags & 0x01;
    if (p.version != 1)
        throw CodecError(CodecError::Kind::UnsupportedVersion,
                         "GTP version " + std::to_string(p.version));
    p.message_type = r.u8();
    uint16_t declared = r.u16();
    p.teid = r.u32();

    if (r.remaining() < declared)
        throw CodecError(CodecError::Kind::Truncated,
                         "length field says " + std::to_string(declared) + " bytes, " +
                             std::to_string(r.remaining()) + " present");
    if (r.remaining() > declared)
        throw CodecError(CodecError::Kind::LengthMismatch,
                         std::to_string(r.remaining() - declared) +
                             " trailing bytes beyond declared length");

    if (p.e_flag || p.s_flag || p.pn_flag) {
        r.require(4, CodecError::Kind::Truncated);
        uint16_t seq = r.u16();
        uint8_t npdu = r.u8();
        uint8_t next = r.u8();
        if (p.s_flag) p.sequence = seq;
        if (p.pn_flag) p.npdu = npdu;
        while (next != 0) {
            if (r.remaining() < 2)
                throw CodecError(CodecError::Kind::MalformedExtension,
                                 "extension chain runs past frame end");
            uint8_t units = r.u8();
            if (units == 0)
                throw CodecError(CodecError::Kind::MalformedExtension,
                                 "zero-length extension");
            size_t total = static_cast<size_t>(units) * 4;
            if (r.remaining() < total - 1)
                throw CodecError(CodecError::Kind::MalformedExtension,
                                 "extension chain runs past frame end");
            ExtensionHeader ext;
            ext.ext_type = next;
            ByteView content = r.take(total - 2);
            ext.content.assign(content.begin(), content.end());
            next = r.u8();
            p.extensions.push_back(std::move(ext));
        }
    }

    ByteView rest = r.take(r.remaining());
    p.payload.assign(rest.begin(), rest.end());
    return p;
}

Bytes encode_gtpu(const GtpUPacket& p) {
    for (const auto& ext : p.extensions)
        if ((ext.content.size() + 2) % 4 != 0)
            throw CodecError(CodecError::Kind::InvalidExtensionLength,
                             "extension content of " + std::to_string(ext.content.size()) +
                                 " bytes cannot pad to 4-byte units");

    bool ext_bit = p.e_flag || !p.extensions.empty();
    bool opt_block = ext_bit || p.s_flag || p.pn_flag;
    ByteWriter w;
    uint8_t flags = static_cast<uint8_t>(p.version << 5);
    if (p.pt_flag) flags |= 0x10;
    if (ext_bit) flags |= 0x04;
    if (p.s_flag) flags |= 0x02;
    if (p.pn_flag) flags |= 0x01;
    w.u8(flags);
    w.u8(p.message_type);
    size_t len_at = w.size();
    w.u16(0);  // patched below
    w.u32(p.teid);

    if (opt_block) {
        w.u16(p.sequence.value_or(0));
        w.u8(p.npdu.value_or(0));
        w.u8(p.extensions.empty() ? 0 : p.extensions.front().ext_type);
        for (size_t i = 0; i < p.extensions.size(); ++i) {
            const auto& ext = p.extensions[i];
            w.u8(static_cast<uint8_t>((ext.content.size() + 2) / 4));
            w.raw(ext.content);
            w.u8(i + 1 < p.extensions.size() ? p.extensions[i + 1].ext_type : 0);
        }
    }
    w.raw(p.payload);
    w.patch_u16(len_at, static_cast<uint16_t>(w.size() - 8));
    return w.take();
}

GtpUPacket make_gpdu(uint32_t teid, Bytes payload) {
    GtpUPacket p;
    p.teid = teid;
    p.payload = std::move(payload);
    return p;
}

}  // namespace gnbdns::gtpu
