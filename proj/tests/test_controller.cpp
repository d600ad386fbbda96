#include <doctest.h>

#include "gnbdns/controller.hpp"

using namespace gnbdns;
using namespace gnbdns::ctrl;

namespace {

const Ipv4Addr kUe = Ipv4Addr::parse("10.45.0.2");
const Ipv4Addr kUe2 = Ipv4Addr::parse("10.45.0.3");
const Ipv4Addr kGnb = Ipv4Addr::parse("10.100.0.2");
const Ipv4Addr kUpf = Ipv4Addr::parse("10.100.0.1");
const Ipv4Addr kCtrl = Ipv4Addr::parse("10.100.0.10");
const Ipv4Addr kEdge = Ipv4Addr::parse("10.100.0.53");
const Ipv4Addr kGoogle = Ipv4Addr::parse("8.8.8.8");

ControllerConfig config() {
    ControllerConfig c;
    c.controller_addr = kCtrl;
    c.edge_dns_addr = kEdge;
    c.ue_net = Ipv4Addr::parse("10.45.0.0").value;
    c.ue_mask = 0xFFFF0000;
    c.pending_timeout = sim::seconds(5);
    return c;
}

Bytes tunnel_frame(Ipv4Addr outer_src, Ipv4Addr outer_dst, uint32_t teid,
                   const inner::InnerDatagram& tunneled,
                   std::vector<gtpu::ExtensionHeader> ext = {}) {
    gtpu::GtpUPacket gpdu = gtpu::make_gpdu(teid, inner::encode_inner(tunneled));
    gpdu.extensions = std::move(ext);
    return inner::encode_inner(inner::make_udp(outer_src, gtpu::kUdpPort, outer_dst,
                                               gtpu::kUdpPort,
                                               gtpu::encode_gtpu(gpdu)));
}

Bytes uplink_query(Ipv4Addr ue, uint16_t sport, uint16_t txid,
                   const std::string& qname, uint32_t teid = 0x101) {
    dns::DnsMessage q = dns::make_query(txid, qname, dns::kTypeA);
    inner::InnerDatagram d =
        inner::make_udp(ue, sport, kGoogle, dns::kPort, dns::encode_dns(q));
    return tunnel_frame(kGnb, kUpf, teid, d);
}

Bytes downlink_frame(Ipv4Addr ue, uint32_t teid,
                     std::vector<gtpu::ExtensionHeader> ext = {}) {
    inner::InnerDatagram d = inner::make_udp(Ipv4Addr::parse("203.0.113.7"), 7, ue,
                                             50001, Bytes{'s', 'y', 'n', 'c'});
    return tunnel_frame(kUpf, kGnb, teid, d, std::move(ext));
}

Bytes edge_response(uint16_t dst_port, uint16_t txid, const std::string& qname) {
    dns::DnsMessage q = dns::make_query(txid, qname, dns::kTypeA);
    dns::ResourceRecord a;
    a.name = q.question.qname;
    a.rtype = dns::kTypeA;
    a.ttl = 60;
    a.rdata = Ipv4Addr::parse("93.184.216.34");
    dns::DnsMessage resp = dns::make_response(q, {a}, true);
    return inner::encode_inner(
        inner::make_udp(kEdge, dns::kPort, kCtrl, dst_port, dns::encode_dns(resp)));
}

}  // namespace

TEST_CASE("controller: learning binds tunnel directions to UE addresses") {
    Controller c(config());

    Bytes up = uplink_query(kUe, 40000, 0x1111, "device-metrics.com", 0x101);
    c.handle_packet_in(up, kPortRan + 10, 0);
    const TunnelEntry* e = c.database().find(kUe);
    REQUIRE(e != nullptr);
    CHECK(e->uplink_teid == 0x101);
    CHECK_FALSE(e->downlink_teid.has_value());
    CHECK(e->gnb_addr == kGnb);
    CHECK(e->upf_addr == kUpf);

    c.handle_packet_in(downlink_frame(kUe, 0x201), kPortN3, sim::ms(1));
    e = c.database().find(kUe);
    CHECK(e->downlink_teid == 0x201);
    CHECK(e->uplink_teid == 0x101);
    CHECK(e->last_seen == sim::ms(1));

    // re-observation changes nothing but last_seen
    c.handle_packet_in(downlink_frame(kUe, 0x201), kPortN3, sim::ms(2));
    CHECK(c.database().size() == 1);
    CHECK(c.database().find(kUe)->downlink_teid == 0x201);
    CHECK(c.database().find(kUe)->last_seen == sim::ms(2));
    CHECK(c.database().rebinds() == 0);

    // a different TEID for a bound direction is a logged rebind
    c.handle_packet_in(downlink_frame(kUe, 0x299), kPortN3, sim::ms(3));
    CHECK(c.database().find(kUe)->downlink_teid == 0x299);
    CHECK(c.database().rebinds() == 1);
}

TEST_CASE("controller: non-DNS tunnel traffic is forwarded unmodified") {
    Controller c(config());
    inner::InnerDatagram echo = inner::make_udp(kUe, 50001,
                                                Ipv4Addr::parse("203.0.113.7"), 7,
                                                Bytes{'h', 'i'});
    Bytes frame = tunnel_frame(kGnb, kUpf, 0x101, echo);
    HandleResult r = c.handle_packet_in(frame, 10, 0);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].frame == frame);
    CHECK(r.outputs[0].out_port == kPortN3);
    CHECK(c.counters().fail_open_forwards == 1);
    CHECK(c.counters().queries_extracted == 0);
    CHECK(c.database().find(kUe) != nullptr);  // learning still happened

    // downlink non-DNS goes back toward the RAN
    HandleResult r2 = c.handle_packet_in(downlink_frame(kUe, 0x201), kPortN3, 0);
    REQUIRE(r2.outputs.size() == 1);
    CHECK(r2.outputs[0].out_port == kPortRan);
}

TEST_CASE("controller: undecodable frames fail open") {
    Controller c(config());
    Bytes junk = {0xde, 0xad};
    HandleResult r = c.handle_packet_in(junk, kPortN3, 0);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].frame == junk);
    CHECK(c.counters().fail_open_forwards == 1);
}

TEST_CASE("controller: query extraction rewrites addressing, copies payload bytes") {
    Controller c(config());
    Bytes frame = uplink_query(kUe, 40007, 0x1234, "example.com");
    HandleResult r = c.handle_packet_in(frame, 10, sim::ms(3));

    REQUIRE(r.outputs.size() == 1);
    CHECK(r.pending_touched);
    CHECK(r.outputs[0].out_port == kPortEdge);
    CHECK(c.counters().queries_extracted == 1);
    CHECK(c.pending_size() == 1);

    inner::InnerDatagram out = inner::decode_inner(r.outputs[0].frame);
    CHECK(out.src_addr == kCtrl);
    CHECK(out.dst_addr == kEdge);
    CHECK(out.dst_port == dns::kPort);

    // the DNS bytes the edge resolver sees are the tunneled bytes verbatim
    dns::DnsMessage q = dns::make_query(0x1234, "example.com", dns::kTypeA);
    CHECK(out.udp_payload == dns::encode_dns(q));
}

TEST_CASE("controller: responses are injected into the learned downlink tunnel") {
    Controller c(config());
    std::vector<gtpu::ExtensionHeader> pdu_ext = {{0x85, {0x00, 0x09}}};
    c.handle_packet_in(downlink_frame(kUe, 0x201, pdu_ext), kPortN3, 0);
    Bytes query = uplink_query(kUe, 40007, 0x1234, "example.com", 0x101);
    HandleResult ext = c.handle_packet_in(query, 10, sim::ms(1));
    uint16_t eph = inner::decode_inner(ext.outputs.at(0).frame).src_port;

    HandleResult inj =
        c.handle_packet_in(edge_response(eph, 0x1234, "example.com"), kPortEdge,
                           sim::ms(2));
    REQUIRE(inj.outputs.size() == 1);
    CHECK(inj.outputs[0].out_port == kPortRan);
    CHECK(c.counters().responses_injected == 1);
    CHECK(c.pending_size() == 0);
    REQUIRE(c.injection_latencies().size() == 1);
    CHECK(c.injection_latencies()[0] == sim::ms(1));

    inner::InnerDatagram outer = inner::decode_inner(inj.outputs[0].frame);
    CHECK(outer.src_addr == kUpf);
    CHECK(outer.dst_addr == kGnb);
    CHECK(outer.dst_port == gtpu::kUdpPort);

    gtpu::GtpUPacket gpdu = gtpu::decode_gtpu(outer.udp_payload);
    CHECK(gpdu.teid == 0x201);
    CHECK(gpdu.extensions == pdu_ext);  // downlink chain copied through

    // the UE sees the reverse of its original 5-tuple
    inner::InnerDatagram to_ue = inner::decode_inner(gpdu.payload);
    CHECK(to_ue.src_addr == kGoogle);
    CHECK(to_ue.src_port == dns::kPort);
    CHECK(to_ue.dst_addr == kUe);
    CHECK(to_ue.dst_port == 40007);
    dns::DnsMessage resp = dns::decode_dns(to_ue.udp_payload);
    CHECK(resp.txid == 0x1234);
    CHECK(resp.question.qname.to_string() == "example.com");
}

TEST_CASE("controller: unsolicited responses are dropped and counted") {
    Controller c(config());
    HandleResult r =
        c.handle_packet_in(edge_response(50000, 0x9999, "example.com"), kPortEdge, 0);
    CHECK(r.outputs.empty());
    CHECK(c.counters().no_pending_match == 1);
}

TEST_CASE("controller: response before the downlink tunnel is known is dropped") {
    Controller c(config());
    Bytes query = uplink_query(kUe, 40007, 0x1234, "example.com", 0x101);
    HandleResult ext = c.handle_packet_in(query, 10, 0);
    uint16_t eph = inner::decode_inner(ext.outputs.at(0).frame).src_port;

    HandleResult inj =
        c.handle_packet_in(edge_response(eph, 0x1234, "example.com"), kPortEdge,
                           sim::ms(1));
    CHECK(inj.outputs.empty());
    CHECK(c.counters().no_downlink_teid == 1);
    CHECK(c.counters().responses_injected == 0);
    // the entry stays pending and ages out as a timeout
    CHECK(c.pending_size() == 1);
    CHECK(c.expire_due(sim::seconds(5)) == 1);
    CHECK(c.counters().pending_timeouts == 1);
    CHECK(c.pending_size() == 0);
}

TEST_CASE("controller: retransmission refreshes the pending deadline") {
    Controller c(config());
    Bytes query = uplink_query(kUe, 40007, 0x1234, "example.com");
    c.handle_packet_in(query, 10, 0);
    CHECK(c.pending_size() == 1);
    c.handle_packet_in(query, 10, sim::seconds(3));
    CHECK(c.pending_size() == 1);
    CHECK(c.counters().queries_extracted == 2);

    // the old deadline no longer applies
    CHECK(c.expire_due(sim::seconds(5)) == 0);
    CHECK(c.expire_due(sim::seconds(8)) == 1);
}

TEST_CASE("controller: identical txid and question from two UEs stay distinct") {
    Controller c(config());
    c.handle_packet_in(downlink_frame(kUe, 0x201), kPortN3, 0);
    c.handle_packet_in(downlink_frame(kUe2, 0x202), kPortN3, 0);

    HandleResult e1 =
        c.handle_packet_in(uplink_query(kUe, 40000, 0x7777, "example.com", 0x101), 10, 0);
    HandleResult e2 =
        c.handle_packet_in(uplink_query(kUe2, 40000, 0x7777, "example.com", 0x102), 11, 0);
    CHECK(c.pending_size() == 2);
    uint16_t eph1 = inner::decode_inner(e1.outputs.at(0).frame).src_port;
    uint16_t eph2 = inner::decode_inner(e2.outputs.at(0).frame).src_port;
    REQUIRE(eph1 != eph2);

    // each response lands on its own UE
    HandleResult i2 =
        c.handle_packet_in(edge_response(eph2, 0x7777, "example.com"), kPortEdge, 0);
    inner::InnerDatagram d2 = inner::decode_inner(
        gtpu::decode_gtpu(inner::decode_inner(i2.outputs.at(0).frame).udp_payload)
            .payload);
    CHECK(d2.dst_addr == kUe2);

    HandleResult i1 =
        c.handle_packet_in(edge_response(eph1, 0x7777, "example.com"), kPortEdge, 0);
    inner::InnerDatagram d1 = inner::decode_inner(
        gtpu::decode_gtpu(inner::decode_inner(i1.outputs.at(0).frame).udp_payload)
            .payload);
    CHECK(d1.dst_addr == kUe);
    CHECK(c.counters().responses_injected == 2);
}

TEST_CASE("controller: a response whose txid mismatches the pending key is dropped") {
    Controller c(config());
    c.handle_packet_in(downlink_frame(kUe, 0x201), kPortN3, 0);
    HandleResult ext =
        c.handle_packet_in(uplink_query(kUe, 40000, 0x1234, "example.com"), 10, 0);
    uint16_t eph = inner::decode_inner(ext.outputs.at(0).frame).src_port;

    HandleResult inj =
        c.handle_packet_in(edge_response(eph, 0x4321, "example.com"), kPortEdge, 0);
    CHECK(inj.outputs.empty());
    CHECK(c.counters().no_pending_match == 1);
    CHECK(c.pending_size() == 1);
}

TEST_CASE("controller: tunneled responses inside the uplink are not queries") {
    Controller c(config());
    // a DNS response riding the uplink tunnel must fail open, not extract
    dns::DnsMessage q = dns::make_query(0x1, "example.com", dns::kTypeA);
    dns::DnsMessage resp = dns::make_response(q, {}, true);
    inner::InnerDatagram d =
        inner::make_udp(kUe, 40000, kGoogle, dns::kPort, dns::encode_dns(resp));
    Bytes frame = tunnel_frame(kGnb, kUpf, 0x101, d);
    HandleResult r = c.handle_packet_in(frame, 10, 0);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].frame == frame);
    CHECK(c.counters().queries_extracted == 0);
    CHECK(c.counters().fail_open_forwards == 1);
}
