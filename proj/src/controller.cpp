#include "gnbdns/controller.hpp"

#include <algorithm>

namespace gnbdns::ctrl {

void Controller::trace(const std::string& event, const std::string& detail) const {
    if (loop_) loop_->trace("ctrl", event, detail);
}

PacketOut Controller::fail_open(ByteView frame, uint32_t in_port) {
    ++counters_.fail_open_forwards;
    // Normal next hop: UE-bound frames toward the RAN, everything else
    // toward the core; unparseable frames bounce to the opposite side.
    inner::HeaderPeek h = inner::peek_headers(frame);
    uint32_t out = kPortN3;
    if (h.ipv4) {
        if (h.has_ports && h.dst_port == gtpu::kUdpPort) {
            // outer GTP-U addressing decides tunnel direction
            bool downlink = false;
            if (ByteView gb = frame.size() >= 28 ? frame.subspan(28) : ByteView{};
                gb.size() >= 8) {
                try {
                    gtpu::GtpUPacket p = gtpu::decode_gtpu(gb);
                    if (p.message_type == gtpu::kMsgGpdu && !p.payload.empty()) {
                        inner::HeaderPeek ih = inner::peek_headers(p.payload);
                        downlink = ih.ipv4 && in_ue_range(ih.dst_addr);
                    }
                } catch (const CodecError&) {
                }
            }
            out = downlink ? kPortRan : kPortN3;
        } else if (in_ue_range(h.dst_addr)) {
            out = kPortRan;
        } else if (h.dst_addr == cfg_.edge_dns_addr) {
            out = kPortEdge;
        }
    } else {
        out = in_port == kPortN3 ? kPortRan : kPortN3;
    }
    trace("fail_open", "out_port=" + std::to_string(out));
    return PacketOut{Bytes(frame.begin(), frame.end()), out};
}

void Controller::learn_tunnel(const gtpu::GtpUPacket& p, const inner::InnerDatagram& in,
                              Ipv4Addr outer_src, Ipv4Addr outer_dst,
                              sim::SimTime now) {
    if (p.message_type != gtpu::kMsgGpdu) return;

    if (in_ue_range(in.src_addr)) {
        TunnelEntry& e = db_.entry(in.src_addr);
        if (e.uplink_teid && *e.uplink_teid != p.teid) {
            db_.note_rebind();
            trace("rebind", "ue=" + in.src_addr.to_string() +
                                " uplink_teid=" + std::to_string(p.teid));
        }
        e.uplink_teid = p.teid;
        e.gnb_addr = outer_src;
        e.upf_addr = outer_dst;
        e.last_seen = now;
        trace("learn", "ue=" + in.src_addr.to_string() + " dir=uplink teid=" +
                           std::to_string(p.teid));
    } else if (in_ue_range(in.dst_addr)) {
        TunnelEntry& e = db_.entry(in.dst_addr);
        if (e.downlink_teid && *e.downlink_teid != p.teid) {
            db_.note_rebind();
            trace("rebind", "ue=" + in.dst_addr.to_string() +
                                " downlink_teid=" + std::to_string(p.teid));
        }
        e.downlink_teid = p.teid;
        e.gnb_addr = outer_dst;
        e.upf_addr = outer_src;
        e.last_seen = now;
        e.downlink_ext = p.extensions;
        trace("learn", "ue=" + in.dst_addr.to_string() + " dir=downlink teid=" +
                           std::to_string(p.teid));
    }
}

uint16_t Controller::allocate_ephemeral() {
    for (int tries = 0; tries < 65536; ++tries) {
        uint16_t candidate = next_ephemeral_;
        next_ephemeral_ = next_ephemeral_ == 65535 ? 49152 : next_ephemeral_ + 1;
        if (!by_ephemeral_.count(candidate)) return candidate;
    }
    return 0;  // pending table saturated; caller drops
}

std::optional<PacketOut> Controller::extract_query(const inner::InnerDatagram& tunneled,
                                                   sim::SimTime now,
                                                   bool& pending_touched) {
    dns::DnsMessage query = dns::decode_dns(tunneled.udp_payload);  // may throw
    if (query.is_response) return std::nullopt;  // not a query; caller fails open

    PendingKey key{tunneled.src_addr, tunneled.src_port, query.txid,
                   query.question.qname.lowercase(), query.question.qtype};

    uint16_t ephemeral;
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        // retransmission: refresh the deadline, reuse the mapping
        ephemeral = it->second;
        by_ephemeral_[ephemeral].issued_at = now;
        trace("retransmit", "txid=" + std::to_string(key.txid));
    } else {
        ephemeral = allocate_ephemeral();
        if (ephemeral == 0) return std::nullopt;
        PendingQuery pq;
        pq.key = key;
        pq.original_dst = tunneled.dst_addr;
        pq.ephemeral = ephemeral;
        pq.issued_at = now;
        by_ephemeral_[ephemeral] = pq;
        by_key_[key] = ephemeral;
    }
    pending_touched = true;
    ++counters_.queries_extracted;
    trace("extract", "ue=" + tunneled.src_addr.to_string() +
                         " txid=" + std::to_string(query.txid) +
                         " qname=" + query.question.qname.to_string() +
                         " eph=" + std::to_string(ephemeral));

    // DNS payload is byte-copied; only the addressing is re-crafted.
    inner::InnerDatagram to_edge = inner::make_udp(
        cfg_.controller_addr, ephemeral, cfg_.edge_dns_addr, dns::kPort,
        tunneled.udp_payload);
    return PacketOut{inner::encode_inner(to_edge), kPortEdge};
}

std::optional<PacketOut> Controller::inject_response(const inner::InnerDatagram& resp,
                                                     const dns::DnsMessage& msg,
                                                     sim::SimTime now) {
    auto it = by_ephemeral_.find(resp.dst_port);
    if (it == by_ephemeral_.end()) {
        ++counters_.no_pending_match;
        trace("drop", "no_pending_match dst_port=" + std::to_string(resp.dst_port));
        return std::nullopt;
    }
    const PendingQuery& pq = it->second;
    if (pq.key.txid != msg.txid ||
        pq.key.qname_lc != msg.question.qname.lowercase() ||
        pq.key.qtype != msg.question.qtype) {
        ++counters_.no_pending_match;
        trace("drop", "pending mismatch txid=" + std::to_string(msg.txid));
        return std::nullopt;
    }

    const TunnelEntry* tunnel = db_.find(pq.key.ue_addr);
    if (!tunnel || !tunnel->downlink_teid) {
        // keep the entry; it will either match a later response after the
        // tunnel is learned or age out as a timeout
        ++counters_.no_downlink_teid;
        trace("drop", "no_downlink_teid ue=" + pq.key.ue_addr.to_string());
        return std::nullopt;
    }

    inner::InnerDatagram to_ue = inner::make_udp(
        pq.original_dst, dns::kPort, pq.key.ue_addr, pq.key.ue_port,
        resp.udp_payload);

    gtpu::GtpUPacket gpdu = gtpu::make_gpdu(*tunnel->downlink_teid,
                                            inner::encode_inner(to_ue));
    gpdu.extensions = tunnel->downlink_ext;

    inner::InnerDatagram outer = inner::make_udp(
        tunnel->upf_addr, gtpu::kUdpPort, tunnel->gnb_addr, gtpu::kUdpPort,
        gtpu::encode_gtpu(gpdu));

    ++counters_.responses_injected;
    inject_latencies_.push_back(now - pq.issued_at);
    trace("inject", "ue=" + pq.key.ue_addr.to_string() +
                        " teid=" + std::to_string(*tunnel->downlink_teid) +
                        " txid=" + std::to_string(msg.txid));

    by_key_.erase(pq.key);
    by_ephemeral_.erase(it);
    return PacketOut{inner::encode_inner(outer), kPortRan};
}

HandleResult Controller::handle_packet_in(ByteView frame, uint32_t in_port,
                                          sim::SimTime now) {
    HandleResult result;

    inner::InnerDatagram outer;
    try {
        outer = inner::decode_inner(frame);
    } catch (const CodecError&) {
        result.outputs.push_back(fail_open(frame, in_port));
        return result;
    }

    if (outer.dst_port == gtpu::kUdpPort) {
        gtpu::GtpUPacket p;
        inner::InnerDatagram tunneled;
        try {
            p = gtpu::decode_gtpu(outer.udp_payload);
            if (p.message_type != gtpu::kMsgGpdu) {
                result.outputs.push_back(fail_open(frame, in_port));
                return result;
            }
            tunneled = inner::decode_inner(p.payload);
        } catch (const CodecError&) {
            result.outputs.push_back(fail_open(frame, in_port));
            return result;
        }

        learn_tunnel(p, tunneled, outer.src_addr, outer.dst_addr, now);

        bool uplink_dns = in_ue_range(tunneled.src_addr) &&
                          tunneled.protocol == inner::kProtoUdp &&
                          tunneled.dst_port == dns::kPort;
        if (uplink_dns) {
            try {
                if (auto out = extract_query(tunneled, now, result.pending_touched)) {
                    result.outputs.push_back(std::move(*out));
                    return result;  // consumed; the UPF never sees this query
                }
            } catch (const CodecError&) {
            }
        }
        result.outputs.push_back(fail_open(frame, in_port));
        return result;
    }

    if (outer.src_addr == cfg_.edge_dns_addr && outer.src_port == dns::kPort) {
        dns::DnsMessage msg;
        bool decoded = false;
        try {
            msg = dns::decode_dns(outer.udp_payload);
            decoded = true;
        } catch (const CodecError&) {
        }
        if (decoded && msg.is_response) {
            if (auto out = inject_response(outer, msg, now))
                result.outputs.push_back(std::move(*out));
            return result;  // matched, mismatched, or unroutable: never forwarded
        }
        result.outputs.push_back(fail_open(frame, in_port));
        return result;
    }

    result.outputs.push_back(fail_open(frame, in_port));
    return result;
}

size_t Controller::expire_due(sim::SimTime now) {
    size_t expired = 0;
    for (auto it = by_ephemeral_.begin(); it != by_ephemeral_.end();) {
        if (now >= it->second.issued_at + cfg_.pending_timeout) {
            trace("pending_timeout", "txid=" + std::to_string(it->second.key.txid) +
                                         " ue=" + it->second.key.ue_addr.to_string());
            by_key_.erase(it->second.key);
            it = by_ephemeral_.erase(it);
            ++counters_.pending_timeouts;
            ++expired;
        } else {
            ++it;
        }
    }
    return expired;
}

std::optional<sim::SimTime> Controller::next_expiry() const {
    std::optional<sim::SimTime> t;
    for (const auto& [eph, pq] : by_ephemeral_) {
        sim::SimTime due = pq.issued_at + cfg_.pending_timeout;
        if (!t || due < *t) t = due;
    }
    return t;
}

}  // namespace gnbdns::ctrl
