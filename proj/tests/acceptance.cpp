// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1 and 7 drive the installed CLI end to end; the rest go
// through the library against hand-computed or brute-force expectations.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "gnbdns/bench.hpp"

using namespace gnbdns;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail = "") {
    std::cout << "CRITERION " << criterion << " [" << what << "]: "
              << (ok ? "PASS" : "FAIL");
    if (!ok && !detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

fs::path work_dir() {
    fs::path p = fs::temp_directory_path() / "gnbdns_acceptance";
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_to) {
    std::string cmd = std::string(GNBDNS_CLI_PATH) + " " + args + " > " +
                      stdout_to.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

/// mean_ms column per (label, queries) from the summary CSV, as ms*100.
std::map<std::pair<std::string, uint32_t>, int64_t> parse_means(
    const std::string& csv) {
    std::map<std::pair<std::string, uint32_t>, int64_t> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        f.push_back(cur);
        if (f.size() < 7) continue;
        out[{f[1], static_cast<uint32_t>(std::stoul(f[2]))}] =
            bench::parse_ms(f[6]) / 10000;
    }
    return out;
}

bool within_pct(int64_t got, int64_t want, double pct) {
    return std::abs(static_cast<double>(got - want)) <=
           pct / 100.0 * static_cast<double>(want);
}

const char* kTableTargets =
    "label,mode,10,100,1000,10000\n"
    "Google,remote,24,22.32,21.05,20.12\n"
    "Our Approach,edge,35.20,17.60,17.27,17.26\n";

// ---------------------------------------------------------------- 1 -------

void criterion_1_table_trend() {
    fs::path dir = work_dir();
    write_file(dir / "targets.csv", kTableTargets);

    auto t0 = std::chrono::steady_clock::now();
    int rc_cal = run_cli("calibrate --targets " + (dir / "targets.csv").string() +
                             " --out " + (dir / "calibrated.ini").string(),
                         dir / "cal.log");
    int rc_run = run_cli("run --config " + (dir / "calibrated.ini").string() +
                             " --csv " + (dir / "table.csv").string(),
                         dir / "run.log");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();

    if (rc_cal != 0 || rc_run != 0) {
        report(1, "Table-I trend reproduction", false,
               "CLI exit codes: calibrate=" + std::to_string(rc_cal) +
                   " run=" + std::to_string(rc_run));
        return;
    }

    auto means = parse_means(read_file(dir / "table.csv"));
    struct Cell {
        const char* label;
        uint32_t n;
        int64_t want;
    };
    const std::vector<Cell> cells = {
        {"Our Approach", 10, 3520},   {"Our Approach", 100, 1760},
        {"Our Approach", 1000, 1727}, {"Our Approach", 10000, 1726},
        {"Google", 10, 2400},         {"Google", 100, 2232},
        {"Google", 1000, 2105},       {"Google", 10000, 2012},
    };
    bool ok = true;
    std::string detail;
    for (const Cell& c : cells) {
        auto it = means.find({c.label, c.n});
        if (it == means.end() || !within_pct(it->second, c.want, 2.0)) {
            ok = false;
            detail += std::string(c.label) + "@" + std::to_string(c.n) + " got " +
                      (it == means.end() ? "nothing" : std::to_string(it->second)) +
                      " want " + std::to_string(c.want) + "; ";
        }
    }

    double ratio = static_cast<double>(means[{"Our Approach", 10000}]) /
                   static_cast<double>(means[{"Google", 10000}]);
    if (ratio < 0.80 || ratio > 0.90) {
        ok = false;
        detail += "edge/google ratio " + std::to_string(ratio) + "; ";
    }
    if (secs >= 10.0) {
        ok = false;
        detail += "runtime " + std::to_string(secs) + " s; ";
    }
    report(1, "Table-I trend reproduction (calibrated, <10s)", ok, detail);
}

// ---------------------------------------------------------------- 2 -------

void criterion_2_cold_warm() {
    bool ok = true;
    std::string detail;
    int64_t prev_mean = INT64_MAX;
    for (uint32_t n : {10u, 100u, 1000u, 10000u}) {
        bench::Scenario s;
        s.name = "edge_n" + std::to_string(n);
        s.label = "edge";
        s.intercept = true;
        s.queries = n;
        s.domains = bench::domain_list(10);
        s.seed = 1;
        edge::ZoneMap zone;
        uint32_t i = 0;
        for (const auto& d : s.domains)
            zone.add(d, dns::kTypeA, 86400, bench::default_zone_addr(i++).to_string());

        bench::RunResult r = bench::run_scenario(s, zone);
        bench::RunStats st = bench::compute_stats(r);
        if (r.resolver.misses != 10) {
            ok = false;
            detail += "N=" + std::to_string(n) + ": " +
                      std::to_string(r.resolver.misses) + " misses; ";
        }
        if (n == 10000 && r.resolver.hits < 9990) {
            ok = false;
            detail += "N=10000: only " + std::to_string(r.resolver.hits) + " hits; ";
        }
        if (st.mean_x100 > prev_mean) {
            ok = false;
            detail += "mean increased at N=" + std::to_string(n) + "; ";
        }
        prev_mean = st.mean_x100;
    }
    report(2, "cold/warm dichotomy, exact miss counts", ok, detail);
}

// ---------------------------------------------------------------- 3 -------

void criterion_3_codecs() {
    bench::FixtureReport rep =
        bench::verify_fixtures(std::string(GNBDNS_REPO_ROOT) + "/fixtures");
    bool ok = rep.ok() && rep.files >= 25;
    std::string detail;
    if (!ok) {
        detail = std::to_string(rep.files) + " files, " +
                 std::to_string(rep.failures.size()) + " failures";
        for (size_t i = 0; i < rep.failures.size() && i < 3; ++i)
            detail += "; " + rep.failures[i];
    }

    sim::Rng rng(0xacce97);
    size_t bad = 0;
    for (int i = 0; i < 10000 && bad == 0; ++i) {
        gtpu::GtpUPacket p;
        p.message_type = static_cast<uint8_t>(rng.bounded(256));
        p.teid = static_cast<uint32_t>(rng.next_u64());
        if (rng.bounded(2)) {
            p.s_flag = true;
            p.sequence = static_cast<uint16_t>(rng.bounded(65536));
        }
        for (uint64_t e = rng.bounded(3); e > 0; --e) {
            gtpu::ExtensionHeader ext;
            ext.ext_type = static_cast<uint8_t>(1 + rng.bounded(255));
            ext.content.resize((1 + rng.bounded(2)) * 4 - 2);
            for (auto& b : ext.content) b = static_cast<uint8_t>(rng.bounded(256));
            p.extensions.push_back(ext);
        }
        p.e_flag = !p.extensions.empty();
        p.payload.resize(rng.bounded(48));
        for (auto& b : p.payload) b = static_cast<uint8_t>(rng.bounded(256));
        if (gtpu::decode_gtpu(gtpu::encode_gtpu(p)) != p) ++bad;
    }
    for (int i = 0; i < 10000 && bad == 0; ++i) {
        inner::InnerDatagram d;
        d.src_addr = Ipv4Addr{static_cast<uint32_t>(rng.next_u64())};
        d.dst_addr = Ipv4Addr{static_cast<uint32_t>(rng.next_u64())};
        d.ttl_hops = static_cast<uint8_t>(rng.bounded(256));
        d.src_port = static_cast<uint16_t>(rng.bounded(65536));
        d.dst_port = static_cast<uint16_t>(rng.bounded(65536));
        d.udp_payload.resize(rng.bounded(64));
        for (auto& b : d.udp_payload) b = static_cast<uint8_t>(rng.bounded(256));
        if (inner::decode_inner(inner::encode_inner(d)) != d) ++bad;
    }
    for (int i = 0; i < 10000 && bad == 0; ++i) {
        dns::DnsMessage m;
        m.txid = static_cast<uint16_t>(rng.bounded(65536));
        m.is_response = rng.bounded(2);
        m.rcode = static_cast<uint8_t>(rng.bounded(16));
        m.recursion_desired = rng.bounded(2);
        std::string name;
        for (uint64_t l = 1 + rng.bounded(3); l > 0; --l)
            name += std::string(1 + rng.bounded(10),
                                static_cast<char>('a' + rng.bounded(26))) + ".";
        name += "net";
        m.question.qname = dns::DnsName::from_string(name);
        m.question.qtype = static_cast<uint16_t>(1 + rng.bounded(40));
        if (m.is_response && rng.bounded(2)) {
            dns::ResourceRecord rr;
            rr.name = m.question.qname;
            rr.rtype = dns::kTypeA;
            rr.ttl = static_cast<uint32_t>(rng.bounded(1u << 31));
            rr.rdata = Ipv4Addr{static_cast<uint32_t>(rng.next_u64())};
            m.answers.push_back(rr);
        }
        if (dns::decode_dns(dns::encode_dns(m)) != m) ++bad;
    }
    if (bad) {
        ok = false;
        detail += "; randomized roundtrip failures: " + std::to_string(bad);
    }
    report(3, "codec fixture conformance + 10k roundtrips per codec", ok, detail);
}

// ---------------------------------------------------------------- 4 -------

void criterion_4_flow_oracle() {
    sim::Rng rng(0x0f10e);
    size_t mismatches = 0;
    int cases = 0;
    while (cases < 1000) {
        flow::FlowTable t;
        for (uint64_t i = 1 + rng.bounded(8); i > 0; --i) {
            flow::FlowRule r;
            r.priority = static_cast<int32_t>(rng.bounded(6));
            if (rng.bounded(3) == 0)
                r.match.in_port = static_cast<uint32_t>(rng.bounded(4));
            if (rng.bounded(3) == 0) r.match.ip_protocol = rng.bounded(2) ? 17 : 6;
            if (rng.bounded(3) == 0)
                r.match.src_addr = Ipv4Addr{static_cast<uint32_t>(rng.bounded(4))};
            if (rng.bounded(3) == 0)
                r.match.dst_addr = Ipv4Addr{static_cast<uint32_t>(rng.bounded(4))};
            if (rng.bounded(3) == 0)
                r.match.src_port = static_cast<uint16_t>(rng.bounded(4) * 100);
            if (rng.bounded(3) == 0)
                r.match.dst_port = static_cast<uint16_t>(rng.bounded(4) * 100);
            switch (rng.bounded(4)) {
                case 0: r.action = flow::SendToController{}; break;
                case 1: r.action = flow::ForwardNormal{}; break;
                case 2:
                    r.action = flow::Output{static_cast<uint32_t>(rng.bounded(4))};
                    break;
                default: r.action = flow::Drop{};
            }
            try {
                t.install(r);
            } catch (const flow::FlowError&) {
            }
        }
        for (int f = 0; f < 4; ++f, ++cases) {
            inner::HeaderPeek h;
            h.ipv4 = rng.bounded(8) != 0;
            if (h.ipv4) {
                h.protocol = rng.bounded(2) ? 17 : 6;
                h.src_addr = Ipv4Addr{static_cast<uint32_t>(rng.bounded(4))};
                h.dst_addr = Ipv4Addr{static_cast<uint32_t>(rng.bounded(4))};
                h.has_ports = h.protocol == 17;
                h.src_port = static_cast<uint16_t>(rng.bounded(4) * 100);
                h.dst_port = static_cast<uint16_t>(rng.bounded(4) * 100);
            }
            uint32_t in_port = static_cast<uint32_t>(rng.bounded(4));

            const flow::FlowRule* best = nullptr;
            for (const flow::FlowRule& r : t.rules()) {
                if (!r.match.matches(h, in_port)) continue;
                if (!best || r.priority > best->priority) best = &r;
            }
            std::optional<flow::Action> want;
            if (best) want = best->action;
            if (t.classify(h, in_port) != want) ++mismatches;
        }
    }
    report(4, "flow classify vs brute-force scan, 1000 cases", mismatches == 0,
           std::to_string(mismatches) + " mismatches");
}

// ---------------------------------------------------------------- 5 -------

void criterion_5_transparency() {
    bench::Scenario s;
    s.name = "collide";
    s.label = "collide";
    s.intercept = true;
    s.topo.ue_count = 2;
    s.collide_txids = true;
    s.queries = 50;
    s.domains = bench::domain_list(5);
    s.seed = 3;
    edge::ZoneMap zone;
    uint32_t i = 0;
    for (const auto& d : s.domains)
        zone.add(d, dns::kTypeA, 86400, bench::default_zone_addr(i++).to_string());

    bench::RunResult r = bench::run_scenario(s, zone);
    bool ok = true;
    std::string detail;
    for (size_t ue = 0; ue < r.per_ue.size(); ++ue) {
        size_t answered = 0;
        for (const auto& sample : r.per_ue[ue])
            if (sample.rtt) ++answered;
        if (answered != 50) {
            ok = false;
            detail += "ue" + std::to_string(ue) + " answered " +
                      std::to_string(answered) + "/50; ";
        }
    }
    if (r.mismatched_responses != 0) {
        ok = false;
        detail += std::to_string(r.mismatched_responses) +
                  " responses violated the reversed 5-tuple/txid/question contract; ";
    }
    if (r.controller.queries_extracted !=
        r.controller.responses_injected + r.controller.pending_timeouts) {
        ok = false;
        detail += "conservation broke: extracted " +
                  std::to_string(r.controller.queries_extracted) + " != injected " +
                  std::to_string(r.controller.responses_injected) + " + timeouts " +
                  std::to_string(r.controller.pending_timeouts) + "; ";
    }
    report(5, "2-UE txid collision transparency + conservation", ok, detail);
}

// ---------------------------------------------------------------- 6 -------

void criterion_6_differential() {
    bench::Scenario s;
    s.name = "diff";
    s.label = "diff";
    s.queries = 25;
    s.domains = bench::domain_list(10);
    s.echo_count = 10;
    s.echo_start = sim::ms(1);
    s.echo_interval = sim::ms(9);
    s.seed = 11;
    edge::ZoneMap zone;
    uint32_t i = 0;
    for (const auto& d : s.domains)
        zone.add(d, dns::kTypeA, 86400, bench::default_zone_addr(i++).to_string());

    bench::Scenario with_flows = s;
    with_flows.intercept = true;
    bench::Scenario no_flows = s;
    no_flows.intercept = false;
    bench::Scenario bare = s;
    bare.intercept = false;
    bare.controller_on = false;

    bench::RunResult a = bench::run_scenario(with_flows, zone);
    bench::RunResult b = bench::run_scenario(no_flows, zone);
    bench::RunResult c = bench::run_scenario(bare, zone);

    bool ok = true;
    std::string detail;
    auto payloads = [](const std::vector<net::EchoRecord>& v) {
        std::vector<Bytes> out;
        for (const auto& e : v) out.push_back(e.payload);
        return out;
    };
    if (payloads(a.echo_host_rx) != payloads(b.echo_host_rx) ||
        payloads(b.echo_host_rx) != payloads(c.echo_host_rx)) {
        ok = false;
        detail += "non-DNS uplink payloads differ across runs; ";
    }
    if (payloads(a.ue_echo_replies.at(0)) != payloads(b.ue_echo_replies.at(0))) {
        ok = false;
        detail += "non-DNS downlink payloads differ across runs; ";
    }
    // flows removed == no SDN machinery at all, to the nanosecond
    for (size_t k = 0; k < b.samples.size(); ++k) {
        if (b.samples[k].rtt != c.samples[k].rtt) {
            ok = false;
            detail += "remote-DNS latency " + std::to_string(k) + " changed; ";
            break;
        }
    }
    if (b.samples.size() != c.samples.size() || b.samples.size() != 25) {
        ok = false;
        detail += "sample counts differ; ";
    }
    report(6, "interception flows removed is a byte-exact no-op", ok, detail);
}

// ---------------------------------------------------------------- 7 -------

void criterion_7_determinism() {
    fs::path dir = work_dir();
    std::string config = R"(
[scenario.det_edge]
label = edge
intercept = true
queries = 200
domains = 10
upstream_rtt_ms = 20
upstream_jitter_ms = 4
seed = 9

[scenario.det_remote]
label = remote
intercept = false
queries = 200
remote_processing_ms = 1
remote_jitter_ms = 0.5
seed = 9
)";
    write_file(dir / "det.ini", config);

    int rc1 = run_cli("run --config " + (dir / "det.ini").string() +
                          " --trace --csv " + (dir / "det1.csv").string(),
                      dir / "det1.out");
    int rc2 = run_cli("run --config " + (dir / "det.ini").string() +
                          " --trace --csv " + (dir / "det2.csv").string(),
                      dir / "det2.out");

    bool ok = rc1 == 0 && rc2 == 0;
    std::string detail;
    if (!ok) detail = "CLI exits " + std::to_string(rc1) + "/" + std::to_string(rc2);
    std::string csv1 = read_file(dir / "det1.csv");
    if (csv1 != read_file(dir / "det2.csv") || csv1.empty()) {
        ok = false;
        detail += "; CSV outputs differ";
    }
    std::string trace1 = read_file(dir / "det1.out");
    if (trace1 != read_file(dir / "det2.out") || trace1.empty()) {
        ok = false;
        detail += "; trace outputs differ";
    }
    report(7, "identical config+seed give byte-identical CSV and trace", ok, detail);
}

}  // namespace

int main() {
    criterion_1_table_trend();
    criterion_2_cold_warm();
    criterion_3_codecs();
    criterion_4_flow_oracle();
    criterion_5_transparency();
    criterion_6_differential();
    criterion_7_determinism();
    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
