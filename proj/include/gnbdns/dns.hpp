#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gnbdns/wire.hpp"

namespace gnbdns::dns {

inline constexpr uint16_t kPort = 53;
inline constexpr uint16_t kTypeA = 1;
inline constexpr uint16_t kTypeCname = 5;
inline constexpr uint16_t kTypeAaaa = 28;
inline constexpr uint16_t kClassIn = 1;
inline constexpr uint8_t kRcodeNoError = 0;
inline constexpr uint8_t kRcodeNxDomain = 3;

/// A domain name as an ordered list of labels, case preserved. Root is the
/// empty label list. Bounds (label 1-63 bytes, total encoding <= 255) are
/// enforced by from_string and by the decoder.
struct DnsName {
    std::vector<std::string> labels;

    static DnsName from_string(const std::string& dotted);  // throws CodecError
    std::string to_string() const;      // presentation form, "." for root
    std::string lowercase() const;      // case-folded key for matching
    size_t encoded_size() const;        // wire bytes, uncompressed

    bool operator==(const DnsName&) const = default;
};

struct Question {
    DnsName qname;
    uint16_t qtype = kTypeA;
    uint16_t qclass = kClassIn;

    bool operator==(const Question&) const = default;
};

/// rdata holds the decoded form for types in scope and raw bytes otherwise.
using RData = std::variant<Ipv4Addr, Ipv6Addr, DnsName, Bytes>;

struct ResourceRecord {
    DnsName name;
    uint16_t rtype = kTypeA;
    uint16_t rclass = kClassIn;
    uint32_t ttl = 0;  // < 2^31; larger wire values are clamped to 0
    RData rdata = Ipv4Addr{};

    bool operator==(const ResourceRecord&) const = default;
};

struct DnsMessage {
    uint16_t txid = 0;
    bool is_response = false;
    uint8_t rcode = kRcodeNoError;
    bool recursion_desired = false;
    bool recursion_available = false;
    Question question;
    std::vector<ResourceRecord> answers;

    bool operator==(const DnsMessage&) const = default;
};

/// Throws CodecError: Truncated / MultipleQuestions / CompressionLoop /
/// MalformedName / MalformedRecord. Compression pointers are followed with
/// a hop counter bounded by the message length. Authority and additional
/// records are parsed for validity and discarded.
DnsMessage decode_dns(ByteView raw);

/// Canonical encoding: no name compression, answers only. Semantic inverse
/// of decode_dns; byte inverse for messages that were never compressed.
Bytes encode_dns(const DnsMessage& m);

enum class ResponseStatus { Ok, NxDomain };

/// Builds a response echoing the query's txid, question, and RD bit.
/// rcode is 3 for NxDomain, else 0 (empty answers mean NODATA).
DnsMessage make_response(const DnsMessage& query,
                         std::vector<ResourceRecord> answers, bool ra,
                         ResponseStatus status = ResponseStatus::Ok);

DnsMessage make_query(uint16_t txid, const std::string& qname, uint16_t qtype);

std::string rtype_to_string(uint16_t rtype);  // "A", "AAAA", "CNAME", "TYPEn"
std::string rdata_to_string(const ResourceRecord& rr);

}  // namespace gnbdns::dns
