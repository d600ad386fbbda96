#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnbdns/dns.hpp"
#include "gnbdns/gtpu.hpp"
#include "gnbdns/inner.hpp"
#include "gnbdns/sim.hpp"
#include "gnbdns/wire.hpp"

namespace gnbdns::ctrl {

/// Switch ports as the controller addresses them in packet_out commands.
/// Port 0 is the RAN side of the gNB (frames sent there are de-tunneled
/// toward the UE), 1 faces the UPF, 2 faces the edge resolver.
inline constexpr uint32_t kPortRan = 0;
inline constexpr uint32_t kPortN3 = 1;
inline constexpr uint32_t kPortEdge = 2;

struct TunnelEntry {
    std::optional<uint32_t> uplink_teid;
    std::optional<uint32_t> downlink_teid;
    Ipv4Addr gnb_addr;
    Ipv4Addr upf_addr;
    sim::SimTime last_seen = 0;
    std::vector<gtpu::ExtensionHeader> downlink_ext;  // copied into injections
};

/// Learned UE address -> tunnel bindings, built from observed G-PDUs.
class TunnelDatabase {
public:
    TunnelEntry& entry(Ipv4Addr ue) { return entries_[ue]; }
    const TunnelEntry* find(Ipv4Addr ue) const {
        auto it = entries_.find(ue);
        return it == entries_.end() ? nullptr : &it->second;
    }
    size_t size() const { return entries_.size(); }
    uint64_t rebinds() const { return rebinds_; }
    void note_rebind() { ++rebinds_; }

private:
    std::map<Ipv4Addr, TunnelEntry> entries_;
    uint64_t rebinds_ = 0;
};

struct PendingKey {
    Ipv4Addr ue_addr;
    uint16_t ue_port = 0;
    uint16_t txid = 0;
    std::string qname_lc;
    uint16_t qtype = 0;
    auto operator<=>(const PendingKey&) const = default;
};

struct PendingQuery {
    PendingKey key;
    Ipv4Addr original_dst;    // the DNS server the UE targeted
    uint16_t ephemeral = 0;   // controller-side source port, 1:1 with the key
    sim::SimTime issued_at = 0;
};

struct ControllerConfig {
    Ipv4Addr controller_addr;
    Ipv4Addr edge_dns_addr;
    uint32_t ue_net = 0;       // UE range that drives direction inference
    uint32_t ue_mask = 0;
    sim::SimTime pending_timeout = sim::seconds(5);
};

struct ControllerCounters {
    uint64_t queries_extracted = 0;
    uint64_t responses_injected = 0;
    uint64_t no_pending_match = 0;
    uint64_t no_downlink_teid = 0;
    uint64_t fail_open_forwards = 0;
    uint64_t pending_timeouts = 0;
};

struct PacketOut {
    Bytes frame;
    uint32_t out_port = 0;
};

struct HandleResult {
    std::vector<PacketOut> outputs;
    bool pending_touched = false;  // host should arm an expiry sweep
};

/// Three-stage pipeline over packet_in frames: learn tunnel bindings,
/// divert tunneled DNS queries to the edge resolver, and re-encapsulate
/// resolver answers into the learned downlink tunnel. Anything it cannot
/// interpret is forwarded unmodified.
class Controller {
public:
    Controller(ControllerConfig cfg, sim::EventLoop* loop = nullptr)
        : cfg_(cfg), loop_(loop) {}

    HandleResult handle_packet_in(ByteView frame, uint32_t in_port, sim::SimTime now);

    /// Removes pending entries whose deadline has passed; returns how many.
    size_t expire_due(sim::SimTime now);
    std::optional<sim::SimTime> next_expiry() const;

    const ControllerCounters& counters() const { return counters_; }
    const TunnelDatabase& database() const { return db_; }
    size_t pending_size() const { return by_ephemeral_.size(); }
    const std::vector<sim::SimTime>& injection_latencies() const {
        return inject_latencies_;
    }

private:
    bool in_ue_range(Ipv4Addr a) const {
        return (a.value & cfg_.ue_mask) == cfg_.ue_net;
    }
    void learn_tunnel(const gtpu::GtpUPacket& p, const inner::InnerDatagram& in,
                      Ipv4Addr outer_src, Ipv4Addr outer_dst, sim::SimTime now);
    std::optional<PacketOut> extract_query(const inner::InnerDatagram& tunneled,
                                           sim::SimTime now, bool& pending_touched);
    std::optional<PacketOut> inject_response(const inner::InnerDatagram& resp,
                                             const dns::DnsMessage& msg,
                                             sim::SimTime now);
    PacketOut fail_open(ByteView frame, uint32_t in_port);
    uint16_t allocate_ephemeral();
    void trace(const std::string& event, const std::string& detail) const;

    ControllerConfig cfg_;
    sim::EventLoop* loop_;
    TunnelDatabase db_;
    std::map<uint16_t, PendingQuery> by_ephemeral_;
    std::map<PendingKey, uint16_t> by_key_;
    uint16_t next_ephemeral_ = 49152;
    ControllerCounters counters_;
    std::vector<sim::SimTime> inject_latencies_;
};

}  // namespace gnbdns::ctrl
