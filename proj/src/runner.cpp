#include <algorithm>

#include "gnbdns/bench.hpp"

namespace gnbdns::bench {

RunResult run_scenario(const Scenario& s, const edge::ZoneMap& zone, TraceSink trace) {
    sim::EventLoop loop(s.seed);
    if (trace) loop.set_trace(trace);
    net::Network network(loop);

    std::optional<ctrl::Controller> controller;
    if (s.controller_on) {
        ctrl::ControllerConfig cc;
        cc.controller_addr = s.topo.controller_addr;
        cc.edge_dns_addr = s.topo.edge_dns_addr;
        cc.ue_net = s.topo.ue_net;
        cc.ue_mask = s.topo.ue_mask;
        cc.pending_timeout = s.pending_timeout;
        controller.emplace(cc, &loop);
    }

    flow::FlowTable table;
    if (s.intercept) {
        if (s.custom_flows) {
            for (const auto& rule : *s.custom_flows) table.install(rule);
        } else {
            table = flow::intercept_table(s.topo.edge_dns_addr);
        }
    } else {
        table = flow::passthrough_table();
    }

    net::GnbNode gnb("gnb", loop, network, s.topo.gnb_addr, s.topo.upf_addr,
                     s.topo.edge_dns_addr, std::move(table),
                     controller ? &*controller : nullptr, s.topo.controller,
                     s.pending_timeout);
    net::UpfNode upf("upf", loop, network, s.topo.upf_addr, s.topo.gnb_addr);
    net::EchoNode echo("echo", loop, network, s.topo.echo_addr);
    net::DnsServerNode remote("remote_dns", loop, network, s.dns_server, &zone,
                              s.remote_processing, s.remote_jitter);

    edge::ResolverConfig rc;
    rc.processing = s.edge_processing;
    rc.negative_ttl = s.negative_ttl;
    rc.cache_capacity = s.cache_capacity;
    edge::UpstreamModel up;
    up.rtt = s.upstream_rtt;
    up.jitter = s.upstream_jitter;
    up.failure_rate = s.upstream_failure_rate;
    net::EdgeDnsNode edge_dns("edge_dns", loop, network, s.topo.edge_dns_addr, rc,
                              &zone, up);

    network.connect(gnb, net::GnbNode::kPortN3, upf, net::UpfNode::kPortN3,
                    s.topo.gnb_upf);
    network.connect(gnb, net::GnbNode::kPortEdge, edge_dns, net::EdgeDnsNode::kPort,
                    s.topo.gnb_edge);
    network.connect(upf, net::UpfNode::kDnPortBase, echo, net::EchoNode::kPort,
                    s.topo.upf_dn);
    network.connect(upf, net::UpfNode::kDnPortBase + 1, remote,
                    net::DnsServerNode::kPort, s.topo.upf_dn);
    upf.add_dn_route(s.topo.echo_addr, net::UpfNode::kDnPortBase);
    upf.add_dn_route(s.dns_server, net::UpfNode::kDnPortBase + 1);

    if (s.topo.pdu_session_ext)
        upf.set_downlink_ext({{gtpu::kExtPduSessionContainer, {0x00, 0x09}}});

    std::vector<std::unique_ptr<net::UeNode>> ues;
    for (uint32_t i = 0; i < s.topo.ue_count; ++i) {
        net::UeWorkload wl;
        wl.query_count = s.queries;
        wl.domains = s.domains;
        wl.gap = s.gap;
        wl.query_timeout = s.query_timeout;
        wl.dns_target = s.dns_server;
        wl.warmup = s.warmup;
        wl.collide_txids = s.collide_txids;
        wl.echo_count = s.echo_count;
        wl.echo_start = s.echo_start;
        wl.echo_interval = s.echo_interval;

        Ipv4Addr addr = s.topo.ue_addr(i);
        auto ue = std::make_unique<net::UeNode>("ue" + std::to_string(i), loop,
                                                network, i, addr, s.topo.echo_addr, wl);
        uint32_t radio_port = net::GnbNode::kRadioPortBase + i;
        network.connect(*ue, net::UeNode::kPort, gnb, radio_port, s.topo.ue_gnb);
        gnb.add_session({addr, radio_port, 0x100 + i, 0x200 + i});
        upf.add_session(addr, 0x100 + i, 0x200 + i);
        ues.push_back(std::move(ue));
    }

    for (auto& ue : ues) ue->start();
    bool completed = loop.run(s.horizon);

    RunResult r;
    r.name = s.name;
    r.label = s.label;
    r.queries = s.queries;
    r.ue_count = s.topo.ue_count;
    r.horizon_exceeded = !completed;
    for (auto& ue : ues) {
        r.per_ue.push_back(ue->samples());
        r.ue_echo_replies.push_back(ue->echo_replies());
        r.mismatched_responses += ue->mismatched_responses();
        for (const auto& sample : ue->samples()) {
            r.samples.push_back(sample);
            if (!sample.rtt) ++r.timeouts;
        }
    }
    r.echo_host_rx = echo.received();
    r.gnb = gnb.counters();
    if (controller) {
        r.controller = controller->counters();
        r.tunnel_entries = controller->database().size();
    }
    r.resolver = edge_dns.counters();
    r.upf_dropped = upf.dropped();
    r.remote_served = remote.queries_served();
    return r;
}

std::vector<RunResult> run_all(const BenchConfig& cfg,
                               std::optional<uint64_t> seed_override, TraceSink trace) {
    std::vector<RunResult> out;
    for (const Scenario& s : cfg.scenarios) {
        Scenario run = s;
        if (seed_override) run.seed = *seed_override;
        out.push_back(run_scenario(run, cfg.zone, trace));
    }
    // aggregation is order-independent: rendering always sees name order
    std::sort(out.begin(), out.end(),
              [](const RunResult& a, const RunResult& b) { return a.name < b.name; });
    return out;
}

}  // namespace gnbdns::bench
