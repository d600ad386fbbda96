#include "gnbdns/dns.hpp"

#include <algorithm>
#include <cctype>

namespace gnbdns::dns {

namespace {

constexpr size_t kHeaderSize = 12;
constexpr size_t kMaxNameWire = 255;
constexpr size_t kMaxLabel = 63;

void check_name_bounds(const DnsName& n) {
    size_t total = 1;  // root terminator
    for (const auto& label : n.labels) {
        if (label.empty() || label.size() > kMaxLabel)
            throw CodecError(CodecError::Kind::MalformedName,
                             "label of " + std::to_string(label.size()) + " bytes");
        total += 1 + label.size();
    }
    if (total > kMaxNameWire)
        throw CodecError(CodecError::Kind::NameTooLong,
                         "name encodes to " + std::to_string(total) + " bytes");
}

/// Reads a possibly-compressed name starting at `offset` into the whole
/// message. Returns the name and advances `offset` past its in-place
/// encoding (pointers count as 2 bytes).
DnsName read_name(ByteView msg, size_t& offset) {
    DnsName name;
    size_t pos = offset;
    size_t hops = 0;
    bool jumped = false;
    size_t total = 1;

    while (true) {
        if (++hops > msg.size())
            throw CodecError(CodecError::Kind::CompressionLoop,
                             "pointer chain exceeds message length in hops");
        if (pos >= msg.size())
            throw CodecError(CodecError::Kind::Truncated, "name runs past message end");
        uint8_t len = msg[pos];
        if ((len & 0xC0) == 0xC0) {
            if (pos + 1 >= msg.size())
                throw CodecError(CodecError::Kind::Truncated, "dangling pointer byte");
            size_t target = (static_cast<size_t>(len & 0x3F) << 8) | msg[pos + 1];
            if (!jumped) offset = pos + 2;
            jumped = true;
            pos = target;
            continue;
        }
        if (len & 0xC0)
            throw CodecError(CodecError::Kind::MalformedName,
                             "reserved label type bits");
        ++pos;
        if (len == 0) break;
        if (len > kMaxLabel)
            throw CodecError(CodecError::Kind::MalformedName, "label too long");
        if (pos + len > msg.size())
            throw CodecError(CodecError::Kind::Truncated, "label runs past message end");
        total += 1 + len;
        if (total > kMaxNameWire)
            throw CodecError(CodecError::Kind::NameTooLong, "decoded name too long");
        name.labels.emplace_back(reinterpret_cast<const char*>(&msg[pos]), len);
        pos += len;
    }
    if (!jumped) offset = pos;
    return name;
}

void write_name(ByteWriter& w, const DnsName& n) {
    check_name_bounds(n);
    for (const auto& label : n.labels) {
        w.u8(static_cast<uint8_t>(label.size()));
        w.raw(ByteView(reinterpret_cast<const uint8_t*>(label.data()), label.size()));
    }
    w.u8(0);
}

ResourceRecord read_record(ByteView msg, size_t& offset) {
    ResourceRecord rr;
    rr.name = read_name(msg, offset);
    if (offset + 10 > msg.size())
        throw CodecError(CodecError::Kind::Truncated, "record header truncated");
    ByteReader r(msg.subspan(offset, 10));
    rr.rtype = r.u16();
    rr.rclass = r.u16();
    uint32_t ttl = r.u32();
    rr.ttl = (ttl & 0x80000000u) ? 0 : ttl;  // RFC 2181 §8
    uint16_t rdlength = r.u16();
    offset += 10;
    if (offset + rdlength > msg.size())
        throw CodecError(CodecError::Kind::Truncated, "rdata truncated");

    size_t rdata_at = offset;
    offset += rdlength;
    if (rr.rtype == kTypeA && rr.rclass == kClassIn) {
        if (rdlength != 4)
            throw CodecError(CodecError::Kind::MalformedRecord, "A rdata not 4 bytes");
        ByteReader a(msg.subspan(rdata_at, 4));
        rr.rdata = Ipv4Addr{a.u32()};
    } else if (rr.rtype == kTypeAaaa && rr.rclass == kClassIn) {
        if (rdlength != 16)
            throw CodecError(CodecError::Kind::MalformedRecord, "AAAA rdata not 16 bytes");
        Ipv6Addr v6;
        std::copy_n(msg.begin() + static_cast<long>(rdata_at), 16, v6.bytes.begin());
        rr.rdata = v6;
    } else if (rr.rtype == kTypeCname && rr.rclass == kClassIn) {
        size_t pos = rdata_at;
        DnsName target = read_name(msg, pos);
        if (pos != rdata_at + rdlength)
            throw CodecError(CodecError::Kind::MalformedRecord,
                             "CNAME rdata length mismatch");
        rr.rdata = std::move(target);
    } else {
        rr.rdata = Bytes(msg.begin() + static_cast<long>(rdata_at),
                         msg.begin() + static_cast<long>(rdata_at + rdlength));
    }
    return rr;
}

void write_record(ByteWriter& w, const ResourceRecord& rr) {
    write_name(w, rr.name);
    w.u16(rr.rtype);
    w.u16(rr.rclass);
    w.u32(rr.ttl);
    size_t len_at = w.size();
    w.u16(0);
    if (const auto* v4 = std::get_if<Ipv4Addr>(&rr.rdata)) {
        w.u32(v4->value);
    } else if (const auto* v6 = std::get_if<Ipv6Addr>(&rr.rdata)) {
        w.raw(ByteView(v6->bytes.data(), v6->bytes.size()));
    } else if (const auto* n = std::get_if<DnsName>(&rr.rdata)) {
        write_name(w, *n);
    } else {
        w.raw(std::get<Bytes>(rr.rdata));
    }
    w.patch_u16(len_at, static_cast<uint16_t>(w.size() - len_at - 2));
}

}  // namespace

DnsName DnsName::from_string(const std::string& dotted) {
    DnsName n;
    if (dotted.empty() || dotted == ".") return n;
    size_t start = 0;
    std::string s = dotted;
    if (!s.empty() && s.back() == '.') s.pop_back();
    while (start <= s.size()) {
        size_t dot = s.find('.', start);
        size_t end = dot == std::string::npos ? s.size() : dot;
        n.labels.push_back(s.substr(start, end - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    check_name_bounds(n);
    return n;
}

std::string DnsName::to_string() const {
    if (labels.empty()) return ".";
    std::string s;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (i) s.push_back('.');
        s += labels[i];
    }
    return s;
}

std::string DnsName::lowercase() const {
    std::string s = to_string();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

size_t DnsName::encoded_size() const {
    size_t total = 1;
    for (const auto& label : labels) total += 1 + label.size();
    return total;
}

DnsMessage decode_dns(ByteView raw) {
    if (raw.size() < kHeaderSize)
        throw CodecError(CodecError::Kind::Truncated, "DNS header needs 12 bytes");

    ByteReader r(raw);
    DnsMessage m;
    m.txid = r.u16();
    uint16_t flags = r.u16();
    m.is_response = flags & 0x8000;
    m.recursion_desired = flags & 0x0100;
    m.recursion_available = flags & 0x0080;
    m.rcode = flags & 0x000F;
    uint16_t qdcount = r.u16();
    uint16_t ancount = r.u16();
    uint16_t nscount = r.u16();
    uint16_t arcount = r.u16();

    if (qdcount != 1)
        throw CodecError(CodecError::Kind::MultipleQuestions,
                         "qdcount " + std::to_string(qdcount));

    size_t offset = kHeaderSize;
    m.question.qname = read_name(raw, offset);
    if (offset + 4 > raw.size())
        throw CodecError(CodecError::Kind::Truncated, "question truncated");
    m.question.qtype = static_cast<uint16_t>(raw[offset] << 8 | raw[offset + 1]);
    m.question.qclass = static_cast<uint16_t>(raw[offset + 2] << 8 | raw[offset + 3]);
    offset += 4;

    for (uint16_t i = 0; i < ancount; ++i)
        m.answers.push_back(read_record(raw, offset));
    // authority + additional: validated and dropped, out of modeled scope
    for (uint32_t i = 0; i < static_cast<uint32_t>(nscount) + arcount; ++i)
        read_record(raw, offset);
    return m;
}

Bytes encode_dns(const DnsMessage& m) {
    ByteWriter w;
    w.u16(m.txid);
    uint16_t flags = 0;
    if (m.is_response) flags |= 0x8000;
    if (m.recursion_desired) flags |= 0x0100;
    if (m.recursion_available) flags |= 0x0080;
    flags |= m.rcode & 0x000F;
    w.u16(flags);
    w.u16(1);
    w.u16(static_cast<uint16_t>(m.answers.size()));
    w.u16(0);
    w.u16(0);
    write_name(w, m.question.qname);
    w.u16(m.question.qtype);
    w.u16(m.question.qclass);
    for (const auto& rr : m.answers) write_record(w, rr);
    return w.take();
}

DnsMessage make_response(const DnsMessage& query, std::vector<ResourceRecord> answers,
                         bool ra, ResponseStatus status) {
    DnsMessage resp;
    resp.txid = query.txid;
    resp.is_response = true;
    resp.rcode = status == ResponseStatus::NxDomain ? kRcodeNxDomain : kRcodeNoError;
    resp.recursion_desired = query.recursion_desired;
    resp.recursion_available = ra;
    resp.question = query.question;
    resp.answers = std::move(answers);
    return resp;
}

DnsMessage make_query(uint16_t txid, const std::string& qname, uint16_t qtype) {
    DnsMessage q;
    q.txid = txid;
    q.recursion_desired = true;
    q.question.qname = DnsName::from_string(qname);
    q.question.qtype = qtype;
    return q;
}

std::string rtype_to_string(uint16_t rtype) {
    switch (rtype) {
        case kTypeA: return "A";
        case kTypeAaaa: return "AAAA";
        case kTypeCname: return "CNAME";
        default: return "TYPE" + std::to_string(rtype);
    }
}

std::string rdata_to_string(const ResourceRecord& rr) {
    if (const auto* v4 = std::get_if<Ipv4Addr>(&rr.rdata)) return v4->to_string();
    if (const auto* v6 = std::get_if<Ipv6Addr>(&rr.rdata)) return v6->to_string();
    if (const auto* n = std::get_if<DnsName>(&rr.rdata)) return n->to_string();
    const auto& b = std::get<Bytes>(rr.rdata);
    static const char digits[] = "0123456789abcdef";
    std::string s;
    for (uint8_t x : b) {
        s.push_back(digits[x >> 4]);
        s.push_back(digits[x & 0xF]);
    }
    return s;
}

}  // namespace gnbdns::dns
