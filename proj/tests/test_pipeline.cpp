#include <doctest.h>

#include "gnbdns/bench.hpp"

using namespace gnbdns;
using namespace gnbdns::bench;
using gnbdns::sim::ms;
using gnbdns::sim::us;

namespace {

Scenario base_scenario() {
    Scenario s;
    s.name = "t";
    s.label = "t";
    s.queries = 4;
    s.domains = domain_list(10);
    s.seed = 7;
    return s;
}

edge::ZoneMap zone_for(const Scenario& s) {
    edge::ZoneMap z;
    uint32_t i = 0;
    for (const auto& d : s.domains)
        z.add(d, dns::kTypeA, 86400, default_zone_addr(i++).to_string());
    return z;
}

std::vector<sim::SimTime> rtts(const RunResult& r) {
    std::vector<sim::SimTime> out;
    for (const auto& s : r.samples) out.push_back(s.rtt.value_or(-1));
    return out;
}

}  // namespace

TEST_CASE("pipeline: remote path is the exact sum of link latencies") {
    Scenario s = base_scenario();
    s.intercept = false;
    s.topo.ue_gnb = ms(2);
    s.topo.gnb_upf = ms(3);
    s.topo.upf_dn = ms(5);  // one-way total 10 ms
    s.remote_processing = 0;
    s.queries = 5;

    RunResult r = run_scenario(s, zone_for(s));
    REQUIRE(r.samples.size() == 5);
    for (const auto& sample : r.samples) {
        REQUIRE(sample.rtt.has_value());
        CHECK(*sample.rtt == ms(20));
    }
    CHECK(r.timeouts == 0);
    CHECK(r.remote_served == 5);
    CHECK(r.resolver.hits + r.resolver.misses == 0);  // edge untouched
}

TEST_CASE("pipeline: intercepted path costs controller hops + edge processing") {
    Scenario s = base_scenario();
    s.intercept = true;
    // warm = 2*ue_gnb + 4*controller + 2*gnb_edge + edge_processing = 1.4 ms
    s.topo.ue_gnb = us(200);
    s.topo.controller = us(100);
    s.topo.gnb_edge = us(50);
    s.edge_processing = us(500);
    s.upstream_rtt = ms(20);
    s.domains = domain_list(1);
    s.queries = 3;

    RunResult r = run_scenario(s, zone_for(s));
    REQUIRE(r.samples.size() == 3);
    CHECK(*r.samples[0].rtt == ms(21) + us(400));  // cold: warm + upstream rtt
    CHECK(*r.samples[1].rtt == ms(1) + us(400));
    CHECK(*r.samples[2].rtt == ms(1) + us(400));
    CHECK(r.resolver.misses == 1);
    CHECK(r.resolver.hits == 2);
    CHECK(r.remote_served == 0);  // the query never reached 8.8.8.8
    CHECK(r.controller.queries_extracted == 3);
    CHECK(r.controller.responses_injected == 3);
}

TEST_CASE("pipeline: zero controller latency removes the controller hops") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.topo.ue_gnb = us(200);
    s.topo.controller = 0;
    s.topo.gnb_edge = us(50);
    s.edge_processing = us(500);
    s.domains = domain_list(1);
    s.queries = 2;

    RunResult r = run_scenario(s, zone_for(s));
    CHECK(*r.samples[1].rtt == us(1000));  // 2*200 + 2*50 + 500
}

TEST_CASE("pipeline: every answer reverses the query 5-tuple exactly") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.queries = 20;
    RunResult r = run_scenario(s, zone_for(s));
    // UeNode only accepts responses matching source 8.8.8.8:53, its own
    // address/port, txid, and question; any deviation lands in mismatched
    CHECK(r.samples.size() == 20);
    CHECK(r.timeouts == 0);
    CHECK(r.mismatched_responses == 0);
    CHECK(r.resolver.misses == 10);
    CHECK(r.resolver.hits == 10);
}

TEST_CASE("pipeline: switch and controller counters conserve frames") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.queries = 12;
    s.echo_count = 3;
    RunResult r = run_scenario(s, zone_for(s));

    CHECK(r.gnb.frames_in ==
          r.gnb.forwarded_normal + r.gnb.dropped + r.gnb.to_controller);
    CHECK(r.gnb.to_controller == r.gnb.packet_outs + r.controller.no_pending_match +
                                     r.controller.no_downlink_teid);
    CHECK(r.controller.queries_extracted ==
          r.controller.responses_injected + r.controller.pending_timeouts);
    CHECK(r.gnb.bad_teid == 0);
    CHECK(r.upf_dropped == 0);
}

TEST_CASE("pipeline: colliding transaction ids across UEs stay separate") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.topo.ue_count = 2;
    s.collide_txids = true;
    s.queries = 10;
    s.domains = domain_list(3);

    RunResult r = run_scenario(s, zone_for(s));
    REQUIRE(r.per_ue.size() == 2);
    for (const auto& ue_samples : r.per_ue) {
        CHECK(ue_samples.size() == 10);
        for (const auto& sample : ue_samples) CHECK(sample.rtt.has_value());
    }
    CHECK(r.mismatched_responses == 0);
    CHECK(r.controller.queries_extracted == 20);
    CHECK(r.controller.responses_injected == 20);
    CHECK(r.controller.no_pending_match == 0);
}

TEST_CASE("pipeline: removing the interception flows is a transparent no-op") {
    Scenario s = base_scenario();
    s.queries = 6;
    s.echo_count = 4;
    s.echo_start = ms(2);
    s.echo_interval = ms(7);

    Scenario with_flows = s;
    with_flows.intercept = true;
    Scenario no_flows = s;
    no_flows.intercept = false;
    Scenario no_controller = s;
    no_controller.intercept = false;
    no_controller.controller_on = false;

    RunResult a = run_scenario(with_flows, zone_for(s));
    RunResult b = run_scenario(no_flows, zone_for(s));
    RunResult c = run_scenario(no_controller, zone_for(s));

    // non-DNS traffic arrives byte-identically whether or not the
    // controller sits in the path
    auto payloads = [](const std::vector<net::EchoRecord>& v) {
        std::vector<Bytes> out;
        for (const auto& e : v) out.push_back(e.payload);
        return out;
    };
    REQUIRE(a.echo_host_rx.size() == 5);  // 4 workload echoes + the warmup probe
    CHECK(payloads(a.echo_host_rx) == payloads(b.echo_host_rx));
    CHECK(payloads(b.echo_host_rx) == payloads(c.echo_host_rx));
    REQUIRE(a.ue_echo_replies.at(0).size() == 4);
    CHECK(payloads(a.ue_echo_replies[0]) == payloads(b.ue_echo_replies[0]));
    CHECK(payloads(b.ue_echo_replies[0]) == payloads(c.ue_echo_replies[0]));

    // with flows removed, remote DNS timing equals the controller-free run
    // to the nanosecond, echoes included
    CHECK(rtts(b) == rtts(c));
    for (size_t i = 0; i < b.echo_host_rx.size(); ++i)
        CHECK(b.echo_host_rx[i].at == c.echo_host_rx[i].at);
    CHECK(b.gnb.to_controller == 0);
    CHECK(c.gnb.to_controller == 0);

    // the interception run answered from the edge instead
    CHECK(a.remote_served == 0);
    CHECK(b.remote_served == 6);
}

TEST_CASE("pipeline: the mean is invariant to the inter-query gap") {
    Scenario fast = base_scenario();
    fast.intercept = true;
    fast.queries = 25;
    fast.gap = ms(1);
    Scenario slow = fast;
    slow.gap = ms(50);

    RunResult rf = run_scenario(fast, zone_for(fast));
    RunResult rs = run_scenario(slow, zone_for(slow));
    CHECK(rtts(rf) == rtts(rs));
}

TEST_CASE("pipeline: downlink extension chains survive the injection path") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.topo.pdu_session_ext = true;
    s.queries = 5;
    RunResult r = run_scenario(s, zone_for(s));
    CHECK(r.samples.size() == 5);
    CHECK(r.timeouts == 0);
    CHECK(r.gnb.bad_teid == 0);
}

TEST_CASE("pipeline: without warmup traffic no downlink tunnel is ever learned") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.warmup = false;
    s.queries = 3;
    s.query_timeout = ms(200);
    s.pending_timeout = ms(150);

    RunResult r = run_scenario(s, zone_for(s));
    CHECK(r.timeouts == 3);
    CHECK(r.controller.no_downlink_teid == 3);
    CHECK(r.controller.responses_injected == 0);
    CHECK(r.controller.queries_extracted ==
          r.controller.responses_injected + r.controller.pending_timeouts);
}

TEST_CASE("pipeline: upstream failures become timeouts on both sides") {
    Scenario s = base_scenario();
    s.intercept = true;
    s.upstream_failure_rate = 1.0;
    s.queries = 4;
    s.query_timeout = ms(200);
    s.pending_timeout = ms(150);

    RunResult r = run_scenario(s, zone_for(s));
    CHECK(r.timeouts == 4);
    CHECK(r.resolver.upstream_timeouts == 4);
    CHECK(r.controller.pending_timeouts == 4);
    CHECK(r.controller.queries_extracted == 4);
}

TEST_CASE("pipeline: an empty workload leaves an empty trace and zero counters") {
    Scenario s = base_scenario();
    s.queries = 0;
    s.warmup = false;
    s.intercept = true;
    size_t trace_lines = 0;
    RunResult r = run_scenario(s, zone_for(s),
                               [&](sim::SimTime, const std::string&,
                                   const std::string&, const std::string&) {
                                   ++trace_lines;
                               });
    CHECK(trace_lines == 0);
    CHECK(r.samples.empty());
    CHECK(r.gnb.frames_in == 0);
    CHECK(r.controller.queries_extracted == 0);
    CHECK(r.resolver.misses == 0);
}

TEST_CASE("pipeline: horizon cuts a run short with partial results") {
    Scenario s = base_scenario();
    s.intercept = false;
    s.queries = 1000;
    s.horizon = ms(50);
    RunResult r = run_scenario(s, zone_for(s));
    CHECK(r.horizon_exceeded);
    CHECK(r.samples.size() < 1000);
}
