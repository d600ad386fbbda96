#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gnbdns/bench.hpp"
#include "gnbdns/dns.hpp"
#include "gnbdns/gtpu.hpp"
#include "gnbdns/inner.hpp"

namespace gnbdns::bench {

namespace {

namespace fs = std::filesystem;

using FieldList = std::vector<std::pair<std::string, std::string>>;

FieldList read_expect(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    FieldList fields;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ": bad line '" + line + "'");
        fields.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return fields;
}

/// Decoded fields in the same key=value vocabulary the .expect files use.
FieldList describe_gtpu(const gtpu::GtpUPacket& p) {
    FieldList f;
    f.emplace_back("version", std::to_string(p.version));
    f.emplace_back("pt", p.pt_flag ? "1" : "0");
    f.emplace_back("e", p.e_flag ? "1" : "0");
    f.emplace_back("s", p.s_flag ? "1" : "0");
    f.emplace_back("pn", p.pn_flag ? "1" : "0");
    f.emplace_back("msg_type", std::to_string(p.message_type));
    f.emplace_back("teid", std::to_string(p.teid));
    if (p.sequence) f.emplace_back("seq", std::to_string(*p.sequence));
    if (p.npdu) f.emplace_back("npdu", std::to_string(*p.npdu));
    f.emplace_back("ext_count", std::to_string(p.extensions.size()));
    for (size_t i = 0; i < p.extensions.size(); ++i) {
        f.emplace_back("ext" + std::to_string(i) + "_type",
                       std::to_string(p.extensions[i].ext_type));
        f.emplace_back("ext" + std::to_string(i) + "_content",
                       to_hex_octets(p.extensions[i].content));
    }
    f.emplace_back("payload", to_hex_octets(p.payload));
    return f;
}

FieldList describe_inner(const inner::InnerDatagram& d) {
    FieldList f;
    f.emplace_back("src", d.src_addr.to_string());
    f.emplace_back("dst", d.dst_addr.to_string());
    f.emplace_back("ttl", std::to_string(d.ttl_hops));
    f.emplace_back("proto", std::to_string(d.protocol));
    f.emplace_back("sport", std::to_string(d.src_port));
    f.emplace_back("dport", std::to_string(d.dst_port));
    f.emplace_back("payload", to_hex_octets(d.udp_payload));
    return f;
}

FieldList describe_dns(const dns::DnsMessage& m) {
    FieldList f;
    f.emplace_back("txid", std::to_string(m.txid));
    f.emplace_back("qr", m.is_response ? "1" : "0");
    f.emplace_back("rcode", std::to_string(m.rcode));
    f.emplace_back("rd", m.recursion_desired ? "1" : "0");
    f.emplace_back("ra", m.recursion_available ? "1" : "0");
    f.emplace_back("qname", m.question.qname.to_string());
    f.emplace_back("qtype", std::to_string(m.question.qtype));
    f.emplace_back("qclass", std::to_string(m.question.qclass));
    f.emplace_back("ancount", std::to_string(m.answers.size()));
    for (size_t i = 0; i < m.answers.size(); ++i) {
        const dns::ResourceRecord& rr = m.answers[i];
        f.emplace_back("answer" + std::to_string(i),
                       rr.name.to_string() + " " + dns::rtype_to_string(rr.rtype) +
                           " " + std::to_string(rr.ttl) + " " +
                           dns::rdata_to_string(rr));
    }
    return f;
}

void compare_fields(const FieldList& expect, const FieldList& got,
                    const std::string& file, std::vector<std::string>& failures) {
    for (const auto& [key, want] : expect) {
        if (key == "roundtrip") continue;
        auto it = std::find_if(got.begin(), got.end(),
                               [&](const auto& kv) { return kv.first == key; });
        if (it == got.end()) {
            failures.push_back(file + ": missing field " + key);
        } else if (it->second != want) {
            failures.push_back(file + ": " + key + " = '" + it->second +
                               "', expected '" + want + "'");
        }
    }
}

std::string roundtrip_mode(const FieldList& expect) {
    for (const auto& [k, v] : expect)
        if (k == "roundtrip") return v;
    return "exact";
}

void check_one(const fs::path& hex_path, const std::string& kind,
               std::vector<std::string>& failures) {
    std::ifstream in(hex_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    Bytes raw = parse_hex_octets(ss.str());

    fs::path expect_path = hex_path;
    expect_path.replace_extension(".expect");
    FieldList expect = read_expect(expect_path);
    std::string file = hex_path.filename().string();
    std::string mode = roundtrip_mode(expect);

    try {
        if (kind == "gtpu") {
            gtpu::GtpUPacket p = gtpu::decode_gtpu(raw);
            compare_fields(expect, describe_gtpu(p), file, failures);
            if (mode == "exact" && gtpu::encode_gtpu(p) != raw)
                failures.push_back(file + ": re-encode is not byte-identical");
        } else if (kind == "inner") {
            inner::InnerDatagram d = inner::decode_inner(raw);
            compare_fields(expect, describe_inner(d), file, failures);
            if (mode == "exact" && inner::encode_inner(d) != raw)
                failures.push_back(file + ": re-encode is not byte-identical");
        } else if (kind == "dns") {
            dns::DnsMessage m = dns::decode_dns(raw);
            compare_fields(expect, describe_dns(m), file, failures);
            if (mode == "exact" && dns::encode_dns(m) != raw)
                failures.push_back(file + ": re-encode is not byte-identical");
            // compressed fixtures must still survive a semantic roundtrip
            if (mode == "semantic" && dns::decode_dns(dns::encode_dns(m)) != m)
                failures.push_back(file + ": semantic roundtrip changed the message");
        } else {
            failures.push_back(file + ": unknown fixture kind " + kind);
        }
    } catch (const std::exception& e) {
        failures.push_back(file + ": " + e.what());
    }
}

}  // namespace

FixtureReport verify_fixtures(const std::string& fixtures_dir) {
    FixtureReport report;
    for (const std::string kind : {"gtpu", "inner", "dns"}) {
        fs::path dir = fs::path(fixtures_dir) / kind;
        if (!fs::exists(dir)) {
            report.failures.push_back("missing fixture directory " + dir.string());
            continue;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".hex") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const fs::path& p : files) {
            ++report.files;
            check_one(p, kind, report.failures);
        }
    }
    return report;
}

}  // namespace gnbdns::bench
