#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gnbdns/wire.hpp"

namespace gnbdns::gtpu {

inline constexpr uint16_t kUdpPort = 2152;
inline constexpr uint8_t kMsgGpdu = 255;
inline constexpr uint8_t kMsgEchoRequest = 1;
inline constexpr uint8_t kMsgEchoResponse = 2;
inline constexpr uint8_t kMsgEndMarker = 254;
inline constexpr uint8_t kExtPduSessionContainer = 0x85;

/// One element of the extension chain. Contents are opaque; on the wire the
/// container is [length-in-4-byte-units][content][next-type], so a content
/// length of 4n-2 bytes is the only valid shape.
struct ExtensionHeader {
    uint8_t ext_type = 0;
    Bytes content;

    bool operator==(const ExtensionHeader&) const = default;
};

/*
    Mandatory header (8 bytes), network order:

      0           1           2-3         4-7
    +-----------+-----------+-----------+-----------------+
    | ver|PT|*|E|S|PN  flags| msg type  | length | TEID   |
    +-----------+-----------+-----------+-----------------+

    If any of E/S/PN is set, a 4-byte optional block follows:
    sequence (2), N-PDU number (1), next-extension-type (1). The length
    field counts every byte after the mandatory header.
*/
struct GtpUPacket {
    uint8_t version = 1;
    bool pt_flag = true;
    bool e_flag = false;
    bool s_flag = false;
    bool pn_flag = false;
    uint8_t message_type = kMsgGpdu;
    uint32_t teid = 0;
    std::optional<uint16_t> sequence;
    std::optional<uint8_t> npdu;
    std::vector<ExtensionHeader> extensions;
    Bytes payload;

    bool operator==(const GtpUPacket&) const = default;
};

/// Throws CodecError: Truncated / LengthMismatch / UnsupportedVersion /
/// MalformedExtension.
GtpUPacket decode_gtpu(ByteView raw);

/// Throws CodecError::InvalidExtensionLength when an extension's content is
/// not sized 4n-2.
Bytes encode_gtpu(const GtpUPacket& p);

/// Convenience for G-PDUs carrying a user datagram, no optional fields.
GtpUPacket make_gpdu(uint32_t teid, Bytes payload);

}  // namespace gnbdns::gtpu
