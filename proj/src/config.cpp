#include <fstream>
#include <sstream>

#include "gnbdns/bench.hpp"

namespace gnbdns::bench {

const std::vector<std::string>& default_domains() {
    static const std::vector<std::string> names = {
        "device-metrics.com", "sensor-hub.net",   "telemetry-relay.org",
        "fleet-tracker.us",   "grid-monitor.co.uk", "plant-control.io",
        "meter-read.de",      "asset-ping.fr",    "pump-status.ca",
        "relay-check.jp",
    };
    return names;
}

std::vector<std::string> domain_list(uint32_t count) {
    std::vector<std::string> out;
    const auto& base = default_domains();
    for (uint32_t i = 0; i < count; ++i) {
        if (i < base.size())
            out.push_back(base[i]);
        else
            out.push_back("host" + std::to_string(i) + "." + base[i % base.size()]);
    }
    return out;
}

Ipv4Addr default_zone_addr(uint32_t index) {
    return Ipv4Addr::from_octets(198, 51, 100, static_cast<uint8_t>(1 + index % 250));
}

sim::SimTime parse_ms(const std::string& text) {
    size_t dot = text.find('.');
    std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("empty duration");
    if (frac.size() > 6)
        throw std::invalid_argument("sub-nanosecond duration: " + text);
    for (char c : whole + frac)
        if (c < '0' || c > '9')
            throw std::invalid_argument("bad duration: " + text);
    int64_t ns = whole.empty() ? 0 : std::stoll(whole) * 1000000;
    if (!frac.empty()) {
        int64_t scale = 1000000;
        for (size_t i = 0; i < frac.size(); ++i) scale /= 10;
        ns += std::stoll(frac) * scale;
    }
    return ns;
}

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};
struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<Section> tokenize(const std::string& text, const std::string& filename) {
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        if (sections.empty()) fail("key outside any section");
        sections.back().entries.push_back(
            {trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
    return sections;
}

class EntryReader {
public:
    EntryReader(const std::string& filename, const Entry& e)
        : filename_(filename), e_(e) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(filename_ + ":" + std::to_string(e_.line) + ": key '" +
                          e_.key + "': " + msg);
    }

    sim::SimTime duration_ms() const {
        try {
            return parse_ms(e_.value);
        } catch (const std::exception& ex) {
            fail(ex.what());
        }
    }
    int64_t integer(int64_t lo, int64_t hi) const {
        try {
            size_t used = 0;
            int64_t v = std::stoll(e_.value, &used);
            if (used != e_.value.size()) throw std::invalid_argument("trailing junk");
            if (v < lo || v > hi) throw std::invalid_argument("out of range");
            return v;
        } catch (const std::exception&) {
            fail("expected integer in [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "], got '" + e_.value + "'");
        }
    }
    double rate() const {
        try {
            size_t used = 0;
            double v = std::stod(e_.value, &used);
            if (used != e_.value.size() || v < 0.0 || v > 1.0)
                throw std::invalid_argument("bad");
            return v;
        } catch (const std::exception&) {
            fail("expected probability in [0, 1], got '" + e_.value + "'");
        }
    }
    bool boolean() const {
        if (e_.value == "true" || e_.value == "on" || e_.value == "1") return true;
        if (e_.value == "false" || e_.value == "off" || e_.value == "0") return false;
        fail("expected true/false, got '" + e_.value + "'");
    }
    Ipv4Addr addr() const {
        try {
            return Ipv4Addr::parse(e_.value);
        } catch (const std::exception&) {
            fail("expected IPv4 address, got '" + e_.value + "'");
        }
    }
    const std::string& text() const { return e_.value; }
    const std::string& key() const { return e_.key; }

private:
    const std::string& filename_;
    const Entry& e_;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

flow::FlowRule parse_flow_line(const EntryReader& r) {
    // <priority> [field=value ...] <action>
    std::vector<std::string> parts = split(r.text(), ' ');
    if (parts.size() < 2) r.fail("expected '<priority> [match...] <action>'");
    flow::FlowRule rule;
    try {
        rule.priority = std::stoi(parts.front());
    } catch (const std::exception&) {
        r.fail("bad priority '" + parts.front() + "'");
    }
    const std::string& action = parts.back();
    if (action == "controller")
        rule.action = flow::SendToController{};
    else if (action == "normal")
        rule.action = flow::ForwardNormal{};
    else if (action == "drop")
        rule.action = flow::Drop{};
    else if (action.rfind("port:", 0) == 0)
        rule.action = flow::Output{static_cast<uint32_t>(
            std::stoul(action.substr(5)))};
    else
        r.fail("unknown action '" + action + "'");

    for (size_t i = 1; i + 1 < parts.size(); ++i) {
        size_t eq = parts[i].find('=');
        if (eq == std::string::npos) r.fail("bad match term '" + parts[i] + "'");
        std::string k = parts[i].substr(0, eq), v = parts[i].substr(eq + 1);
        try {
            if (k == "in_port")
                rule.match.in_port = static_cast<uint32_t>(std::stoul(v));
            else if (k == "proto")
                rule.match.ip_protocol = static_cast<uint8_t>(std::stoul(v));
            else if (k == "src")
                rule.match.src_addr = Ipv4Addr::parse(v);
            else if (k == "dst")
                rule.match.dst_addr = Ipv4Addr::parse(v);
            else if (k == "udp_src")
                rule.match.src_port = static_cast<uint16_t>(std::stoul(v));
            else if (k == "udp_dst")
                rule.match.dst_port = static_cast<uint16_t>(std::stoul(v));
            else
                r.fail("unknown match field '" + k + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            r.fail("bad value for match field '" + k + "'");
        }
    }
    return rule;
}

bool apply_topology_key(Topology& t, const EntryReader& r) {
    const std::string& k = r.key();
    if (k == "ue_count")
        t.ue_count = static_cast<uint32_t>(r.integer(1, 1000));
    else if (k == "ue_gnb_ms")
        t.ue_gnb = r.duration_ms();
    else if (k == "gnb_upf_ms")
        t.gnb_upf = r.duration_ms();
    else if (k == "upf_dn_ms")
        t.upf_dn = r.duration_ms();
    else if (k == "gnb_edge_ms")
        t.gnb_edge = r.duration_ms();
    else if (k == "controller_ms")
        t.controller = r.duration_ms();
    else if (k == "gnb_addr")
        t.gnb_addr = r.addr();
    else if (k == "upf_addr")
        t.upf_addr = r.addr();
    else if (k == "controller_addr")
        t.controller_addr = r.addr();
    else if (k == "edge_dns_addr")
        t.edge_dns_addr = r.addr();
    else if (k == "echo_addr")
        t.echo_addr = r.addr();
    else if (k == "downlink_ext") {
        if (r.text() == "pdu_session")
            t.pdu_session_ext = true;
        else if (r.text() == "none")
            t.pdu_session_ext = false;
        else
            r.fail("expected none|pdu_session");
    } else if (k == "ue_prefix") {
        std::vector<std::string> parts = split(r.text(), '/');
        if (parts.size() != 2) r.fail("expected addr/len");
        try {
            int len = std::stoi(parts[1]);
            if (len < 1 || len > 30) throw std::invalid_argument("len");
            t.ue_mask = len == 0 ? 0 : 0xFFFFFFFFu << (32 - len);
            t.ue_net = Ipv4Addr::parse(parts[0]).value & t.ue_mask;
        } catch (const std::exception&) {
            r.fail("bad prefix '" + r.text() + "'");
        }
    } else {
        return false;
    }
    return true;
}

bool apply_scenario_key(Scenario& s, const EntryReader& r) {
    const std::string& k = r.key();
    if (k == "label")
        s.label = r.text();
    else if (k == "intercept")
        s.intercept = r.boolean();
    else if (k == "controller")
        s.controller_on = r.boolean();
    else if (k == "dns_server")
        s.dns_server = r.addr();
    else if (k == "queries")
        s.queries = static_cast<uint32_t>(r.integer(1, 10000000));
    else if (k == "domains")
        s.domains = domain_list(static_cast<uint32_t>(r.integer(1, 100000)));
    else if (k == "domain_list")
        s.domains = split(r.text(), ',');
    else if (k == "gap_ms")
        s.gap = r.duration_ms();
    else if (k == "query_timeout_ms")
        s.query_timeout = r.duration_ms();
    else if (k == "pending_timeout_ms")
        s.pending_timeout = r.duration_ms();
    else if (k == "seed")
        s.seed = static_cast<uint64_t>(r.integer(0, INT64_MAX));
    else if (k == "warmup")
        s.warmup = r.boolean();
    else if (k == "collide_txids")
        s.collide_txids = r.boolean();
    else if (k == "echo_count")
        s.echo_count = static_cast<uint32_t>(r.integer(0, 1000000));
    else if (k == "echo_start_ms")
        s.echo_start = r.duration_ms();
    else if (k == "echo_interval_ms")
        s.echo_interval = r.duration_ms();
    else if (k == "edge_processing_ms")
        s.edge_processing = r.duration_ms();
    else if (k == "negative_ttl_s")
        s.negative_ttl = sim::seconds(r.integer(0, 1000000));
    else if (k == "cache_capacity")
        s.cache_capacity = static_cast<size_t>(r.integer(0, INT32_MAX));
    else if (k == "upstream_rtt_ms")
        s.upstream_rtt = r.duration_ms();
    else if (k == "upstream_jitter_ms")
        s.upstream_jitter = r.duration_ms();
    else if (k == "upstream_failure_rate")
        s.upstream_failure_rate = r.rate();
    else if (k == "remote_processing_ms")
        s.remote_processing = r.duration_ms();
    else if (k == "remote_jitter_ms")
        s.remote_jitter = r.duration_ms();
    else if (k == "horizon_s")
        s.horizon = sim::seconds(r.integer(1, 10000000));
    else
        return false;
    return true;
}

}  // namespace

BenchConfig parse_config_text(const std::string& text, const std::string& filename) {
    std::vector<Section> sections = tokenize(text, filename);

    BenchConfig cfg;
    Topology base;
    std::vector<flow::FlowRule> flows;
    bool have_flows = false;
    bool have_zone = false;

    auto section_fail = [&](const Section& s, const std::string& msg) {
        throw ConfigError(filename + ":" + std::to_string(s.line) + ": " + msg);
    };

    // [topology] first so scenario sections can override it
    for (const Section& sec : sections) {
        if (sec.name != "topology") continue;
        for (const Entry& e : sec.entries) {
            EntryReader r(filename, e);
            if (!apply_topology_key(base, r)) r.fail("unknown key in [topology]");
        }
    }

    for (const Section& sec : sections) {
        if (sec.name == "topology") continue;
        if (sec.name == "flows") {
            have_flows = true;
            for (const Entry& e : sec.entries) {
                EntryReader r(filename, e);
                if (e.key != "flow") r.fail("only 'flow' entries belong in [flows]");
                flows.push_back(parse_flow_line(r));
            }
            continue;
        }
        if (sec.name == "zones") {
            have_zone = true;
            for (const Entry& e : sec.entries) {
                EntryReader r(filename, e);
                if (e.key != "record") r.fail("only 'record' entries belong in [zones]");
                std::vector<std::string> parts = split(e.value, ' ');
                if (parts.size() != 4)
                    r.fail("expected '<name> <A|AAAA|CNAME> <ttl_s> <value>'");
                uint16_t rtype;
                if (parts[1] == "A")
                    rtype = dns::kTypeA;
                else if (parts[1] == "AAAA")
                    rtype = dns::kTypeAaaa;
                else if (parts[1] == "CNAME")
                    rtype = dns::kTypeCname;
                else {
                    r.fail("unknown record type '" + parts[1] + "'");
                }
                try {
                    cfg.zone.add(parts[0], rtype,
                                 static_cast<uint32_t>(std::stoul(parts[2])), parts[3]);
                } catch (const std::exception& ex) {
                    r.fail(ex.what());
                }
            }
            continue;
        }
        if (sec.name.rfind("scenario.", 0) == 0) {
            Scenario s;
            s.name = sec.name.substr(9);
            if (s.name.empty()) section_fail(sec, "empty scenario name");
            s.label = s.name;
            s.topo = base;
            s.domains = domain_list(10);
            for (const Entry& e : sec.entries) {
                EntryReader r(filename, e);
                if (apply_scenario_key(s, r)) continue;
                if (apply_topology_key(s.topo, r)) continue;
                r.fail("unknown key in [" + sec.name + "]");
            }
            if (s.queries == 0)
                section_fail(sec, "scenario '" + s.name + "' needs 'queries'");
            if (s.domains.empty())
                section_fail(sec, "scenario '" + s.name + "' has an empty domain list");
            if (s.upstream_jitter > s.upstream_rtt)
                section_fail(sec, "upstream_jitter_ms exceeds upstream_rtt_ms");
            if (s.remote_jitter > s.remote_processing)
                section_fail(sec, "remote_jitter_ms exceeds remote_processing_ms");
            if (s.intercept && have_flows)
                s.custom_flows = flows;
            cfg.scenarios.push_back(std::move(s));
            continue;
        }
        section_fail(sec, "unknown section [" + sec.name + "]");
    }

    if (cfg.scenarios.empty())
        throw ConfigError(filename + ": no [scenario.*] sections");

    if (!have_zone) {
        // default zone: one A record per workload domain
        std::map<std::string, bool> seen;
        uint32_t idx = 0;
        for (const Scenario& s : cfg.scenarios)
            for (const std::string& d : s.domains)
                if (!seen.count(d)) {
                    seen[d] = true;
                    cfg.zone.add(d, dns::kTypeA, 86400, default_zone_addr(idx++).to_string());
                }
    }
    return cfg;
}

BenchConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace gnbdns::bench
