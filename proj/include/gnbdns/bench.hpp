#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnbdns/flow.hpp"
#include "gnbdns/netsim.hpp"
#include "gnbdns/resolver.hpp"
#include "gnbdns/sim.hpp"

namespace gnbdns::bench {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Per-link one-way latencies plus addressing. Scenario sections may
/// override any of these per run.
struct Topology {
    uint32_t ue_count = 1;
    sim::SimTime ue_gnb = sim::us(200);
    sim::SimTime gnb_upf = sim::us(300);
    sim::SimTime upf_dn = sim::ms(5);
    sim::SimTime gnb_edge = sim::us(50);
    sim::SimTime controller = sim::us(100);
    Ipv4Addr gnb_addr = Ipv4Addr::from_octets(10, 100, 0, 2);
    Ipv4Addr upf_addr = Ipv4Addr::from_octets(10, 100, 0, 1);
    Ipv4Addr controller_addr = Ipv4Addr::from_octets(10, 100, 0, 10);
    Ipv4Addr edge_dns_addr = Ipv4Addr::from_octets(10, 100, 0, 53);
    Ipv4Addr echo_addr = Ipv4Addr::from_octets(203, 0, 113, 7);
    uint32_t ue_net = Ipv4Addr::from_octets(10, 45, 0, 0).value;
    uint32_t ue_mask = 0xFFFF0000;
    bool pdu_session_ext = false;

    Ipv4Addr ue_addr(uint32_t index) const { return {ue_net | (2 + index)}; }
};

struct Scenario {
    std::string name;
    std::string label;
    Topology topo;
    bool intercept = false;
    bool controller_on = true;
    Ipv4Addr dns_server = Ipv4Addr::from_octets(8, 8, 8, 8);
    uint32_t queries = 0;
    std::vector<std::string> domains;
    sim::SimTime gap = sim::ms(1);
    sim::SimTime query_timeout = sim::seconds(5);
    sim::SimTime pending_timeout = sim::seconds(5);
    uint64_t seed = 1;
    bool warmup = true;
    bool collide_txids = false;
    uint32_t echo_count = 0;
    sim::SimTime echo_start = 0;
    sim::SimTime echo_interval = sim::ms(10);
    sim::SimTime edge_processing = sim::us(500);
    sim::SimTime negative_ttl = sim::seconds(30);
    size_t cache_capacity = 10000;
    sim::SimTime upstream_rtt = sim::ms(20);
    sim::SimTime upstream_jitter = 0;
    double upstream_failure_rate = 0.0;
    sim::SimTime remote_processing = 0;
    sim::SimTime remote_jitter = 0;
    sim::SimTime horizon = sim::seconds(3600);
    std::optional<std::vector<flow::FlowRule>> custom_flows;
};

struct BenchConfig {
    std::vector<Scenario> scenarios;
    edge::ZoneMap zone;  // explicit records plus defaults for workload domains
};

/// The workload's default name set, one per TLD family.
const std::vector<std::string>& default_domains();
std::vector<std::string> domain_list(uint32_t count);
/// Deterministic A record address for auto-populated zones.
Ipv4Addr default_zone_addr(uint32_t index);

/// Parses the [topology] / [flows] / [scenario.*] / [zones] config format.
/// Errors carry "file:line:" prefixes.
BenchConfig parse_config_file(const std::string& path);
BenchConfig parse_config_text(const std::string& text, const std::string& filename);

/// Exact decimal-milliseconds parse to nanoseconds (up to 6 fraction digits).
sim::SimTime parse_ms(const std::string& text);

struct RunResult {
    std::string name;
    std::string label;
    uint32_t queries = 0;  // per UE
    uint32_t ue_count = 1;
    std::vector<net::QuerySample> samples;               // all UEs, issue order per UE
    std::vector<std::vector<net::QuerySample>> per_ue;
    std::vector<net::EchoRecord> echo_host_rx;
    std::vector<std::vector<net::EchoRecord>> ue_echo_replies;
    uint64_t timeouts = 0;
    uint64_t mismatched_responses = 0;
    net::GnbCounters gnb;
    ctrl::ControllerCounters controller;
    edge::ResolverCounters resolver;
    uint64_t upf_dropped = 0;
    uint64_t remote_served = 0;
    uint64_t tunnel_entries = 0;
    bool horizon_exceeded = false;
};

using TraceSink = std::function<void(sim::SimTime, const std::string&,
                                     const std::string&, const std::string&)>;

RunResult run_scenario(const Scenario& s, const edge::ZoneMap& zone,
                       TraceSink trace = nullptr);
std::vector<RunResult> run_all(const BenchConfig& cfg,
                               std::optional<uint64_t> seed_override,
                               TraceSink trace = nullptr);

/// Mean/median/p95 computed from lossless nanosecond samples. The *_x100
/// values are milliseconds scaled by 100 and rounded half-up, the exact
/// numbers rendered everywhere.
struct RunStats {
    size_t answered = 0;
    size_t timeouts = 0;
    int64_t mean_x100 = 0;
    int64_t median_x100 = 0;
    int64_t p95_x100 = 0;
    double hit_ratio = 0.0;
};

RunStats compute_stats(const RunResult& r);
std::string format_x100(int64_t x100);  // "17.26"

std::string render_csv(const std::vector<RunResult>& results);
std::string render_table(const std::vector<RunResult>& results);
std::string render_summary(const std::vector<RunResult>& results);

// ------------------------------------------------------------ calibrate ---

struct TargetCell {
    uint32_t count = 0;
    sim::SimTime mean = 0;
};
struct TargetRow {
    std::string label;
    bool edge = false;  // "edge" mode rows get the interception pipeline
    std::vector<TargetCell> cells;
};

std::vector<TargetRow> parse_targets_csv(const std::string& text);

class InfeasibleTargets : public std::runtime_error {
public:
    explicit InfeasibleTargets(const std::string& what) : std::runtime_error(what) {}
};

/// Solves path budgets from the target table and emits a config whose
/// simulated means land on the targets: remote rows pin the N6 latency per
/// cell; the edge row pins warm path cost and cold penalty from its
/// extreme columns, and a per-cell distinct-domain count absorbs the rest.
std::string calibrate(const std::vector<TargetRow>& targets);

struct TargetCheck {
    std::string label;
    uint32_t count = 0;
    int64_t target_x100 = 0;
    int64_t simulated_x100 = 0;
    bool ok = false;
};

/// Compares simulated means against the target table at a percent tolerance.
std::vector<TargetCheck> check_targets(const std::vector<RunResult>& results,
                                       const std::vector<TargetRow>& targets,
                                       double tolerance_pct);

// ------------------------------------------------------------- fixtures ---

struct FixtureReport {
    size_t files = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Checks every fixtures/{gtpu,inner,dns}/*.hex against its .expect fields
/// and re-encodes byte-exactly where the fixture promises it.
FixtureReport verify_fixtures(const std::string& fixtures_dir);

}  // namespace gnbdns::bench
