#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gnbdns/controller.hpp"
#include "gnbdns/dns.hpp"
#include "gnbdns/flow.hpp"
#include "gnbdns/gtpu.hpp"
#include "gnbdns/inner.hpp"
#include "gnbdns/resolver.hpp"
#include "gnbdns/sim.hpp"

namespace gnbdns::net {

class Node {
public:
    Node(std::string name, sim::EventLoop& loop) : name_(std::move(name)), loop_(loop) {}
    virtual ~Node() = default;
    virtual void on_frame(Bytes frame, uint32_t in_port) = 0;
    const std::string& name() const { return name_; }

protected:
    void trace(const std::string& event, const std::string& detail) const {
        loop_.trace(name_, event, detail);
    }
    std::string name_;
    sim::EventLoop& loop_;
};

/// Point-to-point links between (node, port) endpoints; pure delay, no
/// queuing. A frame sent on a port arrives at the peer after the link's
/// one-way latency.
class Network {
public:
    explicit Network(sim::EventLoop& loop) : loop_(loop) {}

    void connect(Node& a, uint32_t a_port, Node& b, uint32_t b_port,
                 sim::SimTime latency);
    void send(Node& from, uint32_t from_port, Bytes frame);
    bool has_link(Node& from, uint32_t from_port) const;

private:
    struct End {
        Node* node;
        uint32_t port;
    };
    sim::EventLoop& loop_;
    std::map<std::pair<Node*, uint32_t>, std::pair<End, sim::SimTime>> links_;
};

struct EchoRecord {
    sim::SimTime at = 0;
    Bytes payload;
};

struct QuerySample {
    sim::SimTime issued_at = 0;
    std::optional<sim::SimTime> rtt;  // nullopt = timed out
    uint16_t txid = 0;
    std::string qname;
    uint8_t rcode = 0;
};

struct UeWorkload {
    uint32_t query_count = 0;
    std::vector<std::string> domains;  // cycled round-robin
    uint16_t qtype = dns::kTypeA;
    sim::SimTime gap = sim::ms(1);  // delay between a completion and the next query
    sim::SimTime query_timeout = sim::seconds(5);
    Ipv4Addr dns_target;  // where the stub resolver addresses its queries
    bool warmup = true;   // one echo round-trip before queries, establishes tunnels
    bool collide_txids = false;  // all UEs reuse the same txid sequence
    uint32_t echo_count = 0;     // non-DNS side traffic, fixed schedule
    sim::SimTime echo_start = 0;
    sim::SimTime echo_interval = sim::ms(10);
    sim::SimTime start_at = 0;
};

/// Stub-resolver workload driver. Queries are issued sequentially: the next
/// query goes out `gap` after the previous response or timeout, matching a
/// query-in-a-loop measurement script.
class UeNode : public Node {
public:
    static constexpr uint32_t kPort = 1;

    UeNode(std::string name, sim::EventLoop& loop, Network& net, uint32_t index,
           Ipv4Addr addr, Ipv4Addr echo_host, UeWorkload wl);

    void start();
    void on_frame(Bytes frame, uint32_t in_port) override;

    Ipv4Addr addr() const { return addr_; }
    const std::vector<QuerySample>& samples() const { return samples_; }
    const std::vector<EchoRecord>& echo_replies() const { return echo_replies_; }
    uint64_t mismatched_responses() const { return mismatched_; }
    uint64_t undecodable() const { return undecodable_; }
    bool finished() const { return done_; }

private:
    void send_query(uint32_t k);
    void finish_query(std::optional<sim::SimTime> rtt, uint8_t rcode);
    void send_echo(uint16_t sport, Bytes payload);
    uint16_t txid_for(uint32_t k) const;

    Network& net_;
    uint32_t index_;
    Ipv4Addr addr_;
    Ipv4Addr echo_host_;
    UeWorkload wl_;

    struct Outstanding {
        uint32_t k = 0;
        uint16_t txid = 0;
        uint16_t sport = 0;
        dns::Question question;
        sim::SimTime issued_at = 0;
    };
    std::optional<Outstanding> outstanding_;
    uint32_t next_k_ = 0;
    bool warmup_done_ = false;
    bool done_ = false;
    std::vector<QuerySample> samples_;
    std::vector<EchoRecord> echo_replies_;
    uint64_t mismatched_ = 0;
    uint64_t undecodable_ = 0;
};

struct GnbCounters {
    uint64_t frames_in = 0;        // frames offered to the flow table
    uint64_t forwarded_normal = 0;
    uint64_t to_controller = 0;
    uint64_t packet_outs = 0;
    uint64_t dropped = 0;          // Drop action, no-match, no controller
    uint64_t bad_teid = 0;
};

struct UeSession {
    Ipv4Addr ue_addr;
    uint32_t radio_port = 0;
    uint32_t uplink_teid = 0;
    uint32_t downlink_teid = 0;
};

/// Base station: RAN tunnel endpoint plus the embedded SDN switch. Uplink
/// radio datagrams are encapsulated then offered to the flow table;
/// everything arriving on wired ports is offered directly. packet_in /
/// packet_out each cost the configured controller latency.
class GnbNode : public Node {
public:
    static constexpr uint32_t kPortRan = ctrl::kPortRan;    // decap toward UE
    static constexpr uint32_t kPortN3 = ctrl::kPortN3;      // to UPF
    static constexpr uint32_t kPortEdge = ctrl::kPortEdge;  // to edge resolver
    static constexpr uint32_t kRadioPortBase = 10;

    GnbNode(std::string name, sim::EventLoop& loop, Network& net, Ipv4Addr gnb_addr,
            Ipv4Addr upf_addr, Ipv4Addr edge_addr, flow::FlowTable table,
            ctrl::Controller* controller, sim::SimTime controller_latency,
            sim::SimTime pending_timeout);

    void add_session(const UeSession& s);
    void on_frame(Bytes frame, uint32_t in_port) override;

    const GnbCounters& counters() const { return counters_; }
    const std::vector<flow::SwitchPort>& ports() const { return ports_; }

private:
    void register_port(uint32_t port_id, const std::string& attached);
    void classify_and_switch(Bytes frame, uint32_t in_port);
    bool emit(Bytes frame, uint32_t out_port);
    bool forward_normal(Bytes frame, uint32_t in_port);
    bool decap_to_ue(const Bytes& frame);

    Network& net_;
    Ipv4Addr gnb_addr_;
    Ipv4Addr upf_addr_;
    Ipv4Addr edge_addr_;
    flow::FlowTable table_;
    ctrl::Controller* controller_;
    sim::SimTime controller_latency_;
    sim::SimTime pending_timeout_;
    std::vector<UeSession> sessions_;
    std::vector<flow::SwitchPort> ports_;
    std::map<uint32_t, size_t> by_downlink_teid_;
    std::map<uint32_t, size_t> by_radio_port_;
    std::map<Ipv4Addr, size_t> by_ue_addr_;
    GnbCounters counters_;
};

/// Core-side tunnel endpoint: decapsulates uplink G-PDUs toward data-network
/// hosts and encapsulates returning traffic into the downlink tunnel.
class UpfNode : public Node {
public:
    static constexpr uint32_t kPortN3 = 1;
    static constexpr uint32_t kDnPortBase = 10;

    UpfNode(std::string name, sim::EventLoop& loop, Network& net, Ipv4Addr upf_addr,
            Ipv4Addr gnb_addr);

    void add_session(Ipv4Addr ue_addr, uint32_t uplink_teid, uint32_t downlink_teid);
    void add_dn_route(Ipv4Addr host, uint32_t port);
    /// Extension chain stamped onto every downlink G-PDU (e.g. a PDU session
    /// container), exercising the controller's copy-through.
    void set_downlink_ext(std::vector<gtpu::ExtensionHeader> ext) {
        downlink_ext_ = std::move(ext);
    }

    void on_frame(Bytes frame, uint32_t in_port) override;

    uint64_t dropped() const { return dropped_; }

private:
    Network& net_;
    Ipv4Addr upf_addr_;
    Ipv4Addr gnb_addr_;
    struct Session {
        uint32_t uplink_teid;
        uint32_t downlink_teid;
    };
    std::map<Ipv4Addr, Session> sessions_;
    std::map<uint32_t, Ipv4Addr> by_uplink_teid_;
    std::map<Ipv4Addr, uint32_t> dn_routes_;
    std::vector<gtpu::ExtensionHeader> downlink_ext_;
    uint64_t dropped_ = 0;
};

/// Remote resolver model: static zone, fixed processing delay plus optional
/// jitter, no cache (every query costs the same).
class DnsServerNode : public Node {
public:
    static constexpr uint32_t kPort = 1;

    DnsServerNode(std::string name, sim::EventLoop& loop, Network& net, Ipv4Addr addr,
                  const edge::ZoneMap* zone, sim::SimTime processing,
                  sim::SimTime jitter);

    void on_frame(Bytes frame, uint32_t in_port) override;
    uint64_t queries_served() const { return served_; }

private:
    Network& net_;
    Ipv4Addr addr_;
    const edge::ZoneMap* zone_;
    sim::SimTime processing_;
    sim::SimTime jitter_;
    uint64_t served_ = 0;
};

/// The caching resolver at the gNB, wrapping edge::Resolver.
class EdgeDnsNode : public Node {
public:
    static constexpr uint32_t kPort = 1;

    EdgeDnsNode(std::string name, sim::EventLoop& loop, Network& net, Ipv4Addr addr,
                edge::ResolverConfig cfg, const edge::ZoneMap* zone,
                edge::UpstreamModel upstream);

    void on_frame(Bytes frame, uint32_t in_port) override;
    const edge::ResolverCounters& counters() const { return resolver_.counters(); }

private:
    Network& net_;
    Ipv4Addr addr_;
    edge::Resolver resolver_;
};

/// UDP echo responder on the data-network side.
class EchoNode : public Node {
public:
    static constexpr uint32_t kPort = 1;

    EchoNode(std::string name, sim::EventLoop& loop, Network& net, Ipv4Addr addr)
        : Node(std::move(name), loop), net_(net), addr_(addr) {}

    void on_frame(Bytes frame, uint32_t in_port) override;
    const std::vector<EchoRecord>& received() const { return received_; }

private:
    Network& net_;
    Ipv4Addr addr_;
    std::vector<EchoRecord> received_;
};

}  // namespace gnbdns::net
