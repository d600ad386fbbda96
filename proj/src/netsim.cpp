#include "gnbdns/netsim.hpp"

namespace gnbdns::net {

void Network::connect(Node& a, uint32_t a_port, Node& b, uint32_t b_port,
                      sim::SimTime latency) {
    links_[{&a, a_port}] = {{&b, b_port}, latency};
    links_[{&b, b_port}] = {{&a, a_port}, latency};
}

bool Network::has_link(Node& from, uint32_t from_port) const {
    return links_.count({&from, from_port}) > 0;
}

void Network::send(Node& from, uint32_t from_port, Bytes frame) {
    auto it = links_.find({&from, from_port});
    if (it == links_.end()) return;  // unwired port: frame vanishes
    auto [end, latency] = it->second;
    Node* dst = end.node;
    uint32_t dst_port = end.port;
    loop_.schedule(latency, [dst, dst_port, f = std::move(frame)]() mutable {
        dst->on_frame(std::move(f), dst_port);
    });
}

// ------------------------------------------------------------------ UE ----

UeNode::UeNode(std::string name, sim::EventLoop& loop, Network& net, uint32_t index,
               Ipv4Addr addr, Ipv4Addr echo_host, UeWorkload wl)
    : Node(std::move(name), loop),
      net_(net),
      index_(index),
      addr_(addr),
      echo_host_(echo_host),
      wl_(std::move(wl)) {}

uint16_t UeNode::txid_for(uint32_t k) const {
    if (wl_.collide_txids) return static_cast<uint16_t>(k & 0xFFFF);
    return static_cast<uint16_t>((index_ * 7919u + k * 131u + 0x1D0Du) & 0xFFFF);
}

void UeNode::start() {
    // side traffic on its own fixed schedule
    for (uint32_t i = 0; i < wl_.echo_count; ++i) {
        loop_.schedule(wl_.start_at + wl_.echo_start + i * wl_.echo_interval, [this, i] {
            Bytes payload;
            for (int b = 0; b < 24; ++b)
                payload.push_back(static_cast<uint8_t>(index_ * 37 + i * 11 + b));
            send_echo(static_cast<uint16_t>(52000 + i), std::move(payload));
        });
    }

    loop_.schedule(wl_.start_at, [this] {
        if (wl_.warmup) {
            Bytes payload = {'s', 'y', 'n', 'c'};
            send_echo(50001, std::move(payload));
        } else if (wl_.query_count > 0) {
            send_query(0);
        } else {
            done_ = true;
        }
    });
}

void UeNode::send_echo(uint16_t sport, Bytes payload) {
    trace("echo_sent", "sport=" + std::to_string(sport));
    inner::InnerDatagram d =
        inner::make_udp(addr_, sport, echo_host_, 7, std::move(payload));
    net_.send(*this, kPort, inner::encode_inner(d));
}

void UeNode::send_query(uint32_t k) {
    Outstanding o;
    o.k = k;
    o.txid = txid_for(k);
    o.sport = static_cast<uint16_t>(40000 + k % 20000);
    const std::string& domain = wl_.domains[k % wl_.domains.size()];
    dns::DnsMessage q = dns::make_query(o.txid, domain, wl_.qtype);
    o.question = q.question;
    o.issued_at = loop_.now();
    outstanding_ = o;
    next_k_ = k + 1;
    trace("query_sent", "txid=" + std::to_string(o.txid) + " qname=" + domain);

    inner::InnerDatagram d = inner::make_udp(addr_, o.sport, wl_.dns_target,
                                             dns::kPort, dns::encode_dns(q));
    net_.send(*this, kPort, inner::encode_inner(d));

    loop_.schedule(wl_.query_timeout, [this, k] {
        if (outstanding_ && outstanding_->k == k) {
            trace("query_timeout", "txid=" + std::to_string(outstanding_->txid));
            finish_query(std::nullopt, 0);
        }
    });
}

void UeNode::finish_query(std::optional<sim::SimTime> rtt, uint8_t rcode) {
    QuerySample s;
    s.issued_at = outstanding_->issued_at;
    s.rtt = rtt;
    s.txid = outstanding_->txid;
    s.qname = outstanding_->question.qname.to_string();
    s.rcode = rcode;
    samples_.push_back(std::move(s));
    outstanding_.reset();

    if (next_k_ < wl_.query_count) {
        uint32_t k = next_k_;
        loop_.schedule(wl_.gap, [this, k] { send_query(k); });
    } else {
        done_ = true;
        trace("workload_done", std::to_string(samples_.size()) + " samples");
    }
}

void UeNode::on_frame(Bytes frame, uint32_t) {
    inner::InnerDatagram d;
    try {
        d = inner::decode_inner(frame);
    } catch (const CodecError&) {
        ++undecodable_;
        return;
    }

    if (d.src_port == 7) {  // echo reply
        if (!warmup_done_ && d.dst_port == 50001) {
            warmup_done_ = true;
            trace("warmup_done", "");
            if (wl_.query_count > 0) {
                loop_.schedule(wl_.gap, [this] { send_query(0); });
            } else {
                done_ = true;
            }
        } else {
            echo_replies_.push_back({loop_.now(), d.udp_payload});
        }
        return;
    }

    if (d.src_port == dns::kPort) {
        dns::DnsMessage m;
        try {
            m = dns::decode_dns(d.udp_payload);
        } catch (const CodecError&) {
            ++undecodable_;
            return;
        }
        // a matching response reverses the query 5-tuple exactly and echoes
        // txid and question
        bool match = outstanding_ && m.is_response &&
                     d.src_addr == wl_.dns_target && d.dst_addr == addr_ &&
                     d.dst_port == outstanding_->sport &&
                     m.txid == outstanding_->txid &&
                     m.question == outstanding_->question;
        if (!match) {
            ++mismatched_;
            trace("response_unmatched", "txid=" + std::to_string(m.txid));
            return;
        }
        sim::SimTime rtt = loop_.now() - outstanding_->issued_at;
        trace("response", "txid=" + std::to_string(m.txid) +
                              " rtt_ns=" + std::to_string(rtt));
        finish_query(rtt, m.rcode);
        return;
    }
    // other inbound traffic is outside the workload's interest
}

// ----------------------------------------------------------------- gNB ----

GnbNode::GnbNode(std::string name, sim::EventLoop& loop, Network& net,
                 Ipv4Addr gnb_addr, Ipv4Addr upf_addr, Ipv4Addr edge_addr,
                 flow::FlowTable table, ctrl::Controller* controller,
                 sim::SimTime controller_latency, sim::SimTime pending_timeout)
    : Node(std::move(name), loop),
      net_(net),
      gnb_addr_(gnb_addr),
      upf_addr_(upf_addr),
      edge_addr_(edge_addr),
      table_(std::move(table)),
      controller_(controller),
      controller_latency_(controller_latency),
      pending_timeout_(pending_timeout) {
    register_port(kPortRan, "ran");
    register_port(kPortN3, "upf");
    register_port(kPortEdge, "edge_dns");
}

void GnbNode::register_port(uint32_t port_id, const std::string& attached) {
    for (const auto& p : ports_)
        if (p.port_id == port_id)
            throw flow::FlowError(flow::FlowError::Kind::UnknownPort,
                                  "duplicate switch port " + std::to_string(port_id));
    ports_.push_back({port_id, attached});
}

void GnbNode::add_session(const UeSession& s) {
    register_port(s.radio_port, "ue " + s.ue_addr.to_string());
    sessions_.push_back(s);
    size_t idx = sessions_.size() - 1;
    by_downlink_teid_[s.downlink_teid] = idx;
    by_radio_port_[s.radio_port] = idx;
    by_ue_addr_[s.ue_addr] = idx;
}

void GnbNode::on_frame(Bytes frame, uint32_t in_port) {
    if (auto it = by_radio_port_.find(in_port); it != by_radio_port_.end()) {
        // uplink: encapsulate, then let the switch see the tunnel frame
        const UeSession& s = sessions_[it->second];
        gtpu::GtpUPacket gpdu = gtpu::make_gpdu(s.uplink_teid, std::move(frame));
        inner::InnerDatagram outer =
            inner::make_udp(gnb_addr_, gtpu::kUdpPort, upf_addr_, gtpu::kUdpPort,
                            gtpu::encode_gtpu(gpdu));
        classify_and_switch(inner::encode_inner(outer), in_port);
        return;
    }
    classify_and_switch(std::move(frame), in_port);
}

void GnbNode::classify_and_switch(Bytes frame, uint32_t in_port) {
    ++counters_.frames_in;
    std::optional<flow::Action> action = table_.classify_frame(frame, in_port);
    if (!action) {
        ++counters_.dropped;
        trace("no_match", "in_port=" + std::to_string(in_port));
        return;
    }
    trace("classify", "in_port=" + std::to_string(in_port) +
                          " action=" + flow::to_string(*action));

    if (std::holds_alternative<flow::SendToController>(*action)) {
        if (!controller_) {
            ++counters_.dropped;
            trace("drop", "no controller registered");
            return;
        }
        ++counters_.to_controller;
        loop_.schedule(controller_latency_, [this, f = std::move(frame), in_port] {
            ctrl::HandleResult r = controller_->handle_packet_in(f, in_port, loop_.now());
            if (r.pending_touched) {
                loop_.schedule(pending_timeout_,
                               [this] { controller_->expire_due(loop_.now()); });
            }
            for (auto& out : r.outputs) {
                loop_.schedule(controller_latency_,
                               [this, o = std::move(out)]() mutable {
                                   ++counters_.packet_outs;
                                   trace("packet_out",
                                         "port=" + std::to_string(o.out_port));
                                   emit(std::move(o.frame), o.out_port);
                               });
            }
        });
        return;
    }
    if (std::holds_alternative<flow::ForwardNormal>(*action)) {
        if (forward_normal(std::move(frame), in_port))
            ++counters_.forwarded_normal;
        else
            ++counters_.dropped;
        return;
    }
    if (const auto* out = std::get_if<flow::Output>(&*action)) {
        if (emit(std::move(frame), out->port_id))
            ++counters_.forwarded_normal;
        else
            ++counters_.dropped;
        return;
    }
    ++counters_.dropped;
}

bool GnbNode::emit(Bytes frame, uint32_t out_port) {
    if (out_port == kPortRan) return decap_to_ue(frame);
    if (!net_.has_link(*this, out_port)) {
        trace("unwired_port", std::to_string(out_port));
        return false;
    }
    net_.send(*this, out_port, std::move(frame));
    return true;
}

bool GnbNode::forward_normal(Bytes frame, uint32_t in_port) {
    inner::HeaderPeek h = inner::peek_headers(frame);
    if (h.has_ports && h.dst_port == gtpu::kUdpPort) {
        if (h.dst_addr == gnb_addr_) return decap_to_ue(frame);
        return emit(std::move(frame), kPortN3);
    }
    if (h.ipv4) {
        if (auto it = by_ue_addr_.find(h.dst_addr); it != by_ue_addr_.end())
            return emit(std::move(frame), sessions_[it->second].radio_port);
        if (h.dst_addr == edge_addr_) return emit(std::move(frame), kPortEdge);
    }
    // not ours to interpret: toward the core unless it arrived from there
    if (in_port != kPortN3) return emit(std::move(frame), kPortN3);
    trace("unroutable", "in_port=" + std::to_string(in_port));
    return false;
}

bool GnbNode::decap_to_ue(const Bytes& frame) {
    try {
        inner::InnerDatagram outer = inner::decode_inner(frame);
        gtpu::GtpUPacket gpdu = gtpu::decode_gtpu(outer.udp_payload);
        if (gpdu.message_type != gtpu::kMsgGpdu) return false;
        auto it = by_downlink_teid_.find(gpdu.teid);
        if (it == by_downlink_teid_.end()) {
            ++counters_.bad_teid;
            trace("bad_teid", std::to_string(gpdu.teid));
            return false;
        }
        net_.send(*this, sessions_[it->second].radio_port, std::move(gpdu.payload));
        return true;
    } catch (const CodecError& e) {
        trace("decap_error", e.what());
        return false;
    }
}

// ----------------------------------------------------------------- UPF ----

UpfNode::UpfNode(std::string name, sim::EventLoop& loop, Network& net,
                 Ipv4Addr upf_addr, Ipv4Addr gnb_addr)
    : Node(std::move(name), loop), net_(net), upf_addr_(upf_addr), gnb_addr_(gnb_addr) {}

void UpfNode::add_session(Ipv4Addr ue_addr, uint32_t uplink_teid,
                          uint32_t downlink_teid) {
    sessions_[ue_addr] = {uplink_teid, downlink_teid};
    by_uplink_teid_[uplink_teid] = ue_addr;
}

void UpfNode::add_dn_route(Ipv4Addr host, uint32_t port) { dn_routes_[host] = port; }

void UpfNode::on_frame(Bytes frame, uint32_t in_port) {
    try {
        if (in_port == kPortN3) {
            inner::InnerDatagram outer = inner::decode_inner(frame);
            if (outer.dst_port != gtpu::kUdpPort) {
                ++dropped_;
                return;
            }
            gtpu::GtpUPacket gpdu = gtpu::decode_gtpu(outer.udp_payload);
            if (gpdu.message_type != gtpu::kMsgGpdu) {
                ++dropped_;
                return;
            }
            if (!by_uplink_teid_.count(gpdu.teid)) {
                ++dropped_;
                trace("bad_teid", std::to_string(gpdu.teid));
                return;
            }
            inner::HeaderPeek h = inner::peek_headers(gpdu.payload);
            auto route = h.ipv4 ? dn_routes_.find(h.dst_addr) : dn_routes_.end();
            if (route == dn_routes_.end()) {
                ++dropped_;
                trace("no_route", h.ipv4 ? h.dst_addr.to_string() : "non-ipv4");
                return;
            }
            net_.send(*this, route->second, std::move(gpdu.payload));
            return;
        }

        // data-network side: encapsulate toward the UE's downlink tunnel
        inner::HeaderPeek h = inner::peek_headers(frame);
        auto it = h.ipv4 ? sessions_.find(h.dst_addr) : sessions_.end();
        if (it == sessions_.end()) {
            ++dropped_;
            return;
        }
        gtpu::GtpUPacket gpdu = gtpu::make_gpdu(it->second.downlink_teid,
                                                std::move(frame));
        gpdu.extensions = downlink_ext_;
        inner::InnerDatagram outer =
            inner::make_udp(upf_addr_, gtpu::kUdpPort, gnb_addr_, gtpu::kUdpPort,
                            gtpu::encode_gtpu(gpdu));
        net_.send(*this, kPortN3, inner::encode_inner(outer));
    } catch (const CodecError& e) {
        ++dropped_;
        trace("decode_error", e.what());
    }
}

// --------------------------------------------------------- DNS servers ----

DnsServerNode::DnsServerNode(std::string name, sim::EventLoop& loop, Network& net,
                             Ipv4Addr addr, const edge::ZoneMap* zone,
                             sim::SimTime processing, sim::SimTime jitter)
    : Node(std::move(name), loop),
      net_(net),
      addr_(addr),
      zone_(zone),
      processing_(processing),
      jitter_(jitter) {}

void DnsServerNode::on_frame(Bytes frame, uint32_t) {
    try {
        inner::InnerDatagram d = inner::decode_inner(frame);
        if (d.dst_port != dns::kPort) return;
        dns::DnsMessage q = dns::decode_dns(d.udp_payload);
        if (q.is_response) return;

        edge::ZoneMap::Result zr =
            zone_ ? zone_->resolve(q.question.qname, q.question.qtype)
                  : edge::ZoneMap::Result{};
        dns::DnsMessage resp = dns::make_response(
            q, zr.answers, true,
            zr.answers.empty() && !zr.name_exists ? dns::ResponseStatus::NxDomain
                                                  : dns::ResponseStatus::Ok);
        ++served_;

        sim::SimTime delay = processing_;
        if (jitter_ > 0) {
            sim::SimTime lo = processing_ > jitter_ ? processing_ - jitter_ : 0;
            delay = lo + static_cast<sim::SimTime>(loop_.rng().bounded(
                             static_cast<uint64_t>(processing_ + jitter_ - lo + 1)));
        }
        trace("serve", q.question.qname.to_string() +
                           " answers=" + std::to_string(resp.answers.size()));

        inner::InnerDatagram reply = inner::make_udp(
            addr_, dns::kPort, d.src_addr, d.src_port, dns::encode_dns(resp));
        loop_.schedule(delay, [this, f = inner::encode_inner(reply)]() mutable {
            net_.send(*this, kPort, std::move(f));
        });
    } catch (const CodecError& e) {
        trace("decode_error", e.what());
    }
}

EdgeDnsNode::EdgeDnsNode(std::string name, sim::EventLoop& loop, Network& net,
                         Ipv4Addr addr, edge::ResolverConfig cfg,
                         const edge::ZoneMap* zone, edge::UpstreamModel upstream)
    : Node(std::move(name), loop),
      net_(net),
      addr_(addr),
      resolver_(cfg, zone, upstream) {}

void EdgeDnsNode::on_frame(Bytes frame, uint32_t) {
    try {
        inner::InnerDatagram d = inner::decode_inner(frame);
        if (d.dst_port != dns::kPort) return;
        dns::DnsMessage q = dns::decode_dns(d.udp_payload);
        if (q.is_response) return;

        edge::Resolver::Outcome out =
            resolver_.resolve(q.question, loop_.now(), loop_.rng());
        if (out.timeout) {
            trace("upstream_timeout", q.question.qname.to_string());
            return;  // no answer; the querier's timeout handles it
        }
        trace("resolve",
              q.question.qname.to_string() + " source=" +
                  (out.source == edge::Resolver::Source::Upstream ? "upstream"
                                                                  : "cache"));

        dns::DnsMessage resp = dns::make_response(
            q, out.answers, true,
            out.nxdomain ? dns::ResponseStatus::NxDomain : dns::ResponseStatus::Ok);
        inner::InnerDatagram reply = inner::make_udp(
            addr_, dns::kPort, d.src_addr, d.src_port, dns::encode_dns(resp));
        loop_.schedule(out.completes_at - loop_.now(),
                       [this, f = inner::encode_inner(reply)]() mutable {
                           net_.send(*this, kPort, std::move(f));
                       });
    } catch (const CodecError& e) {
        trace("decode_error", e.what());
    }
}

void EchoNode::on_frame(Bytes frame, uint32_t) {
    try {
        inner::InnerDatagram d = inner::decode_inner(frame);
        if (d.dst_port != 7) return;
        received_.push_back({loop_.now(), d.udp_payload});
        inner::InnerDatagram reply =
            inner::make_udp(addr_, 7, d.src_addr, d.src_port, d.udp_payload);
        net_.send(*this, kPort, inner::encode_inner(reply));
    } catch (const CodecError&) {
    }
}

}  // namespace gnbdns::net
