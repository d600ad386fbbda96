#include "gnbdns/flow.hpp"

#include <algorithm>

#include "gnbdns/gtpu.hpp"

namespace gnbdns::flow {

bool MatchCriteria::matches(const inner::HeaderPeek& h, uint32_t frame_in_port) const {
    if (in_port && *in_port != frame_in_port) return false;
    if (ip_protocol && (!h.ipv4 || h.protocol != *ip_protocol)) return false;
    if (src_addr && (!h.ipv4 || h.src_addr != *src_addr)) return false;
    if (dst_addr && (!h.ipv4 || h.dst_addr != *dst_addr)) return false;
    if (src_port && (!h.has_ports || h.src_port != *src_port)) return false;
    if (dst_port && (!h.has_ports || h.dst_port != *dst_port)) return false;
    return true;
}

namespace {

template <typename T>
bool fields_compatible(const std::optional<T>& a, const std::optional<T>& b) {
    return !a || !b || *a == *b;
}

}  // namespace

bool MatchCriteria::overlaps(const MatchCriteria& other) const {
    return fields_compatible(in_port, other.in_port) &&
           fields_compatible(ip_protocol, other.ip_protocol) &&
           fields_compatible(src_addr, other.src_addr) &&
           fields_compatible(dst_addr, other.dst_addr) &&
           fields_compatible(src_port, other.src_port) &&
           fields_compatible(dst_port, other.dst_port);
}

std::string to_string(const Action& a) {
    if (std::holds_alternative<SendToController>(a)) return "controller";
    if (std::holds_alternative<ForwardNormal>(a)) return "normal";
    if (std::holds_alternative<Drop>(a)) return "drop";
    return "port:" + std::to_string(std::get<Output>(a).port_id);
}

void FlowTable::install(const FlowRule& rule) {
    for (const auto& existing : rules_) {
        if (existing.priority == rule.priority && existing.match.overlaps(rule.match) &&
            existing.action != rule.action)
            throw FlowError(FlowError::Kind::DuplicatePriorityConflict,
                            "rule at priority " + std::to_string(rule.priority) +
                                " overlaps an existing rule with a different action");
    }
    auto at = std::upper_bound(
        rules_.begin(), rules_.end(), rule,
        [](const FlowRule& a, const FlowRule& b) { return a.priority > b.priority; });
    rules_.insert(at, rule);
}

std::optional<Action> FlowTable::classify(const inner::HeaderPeek& h,
                                          uint32_t in_port) const {
    for (const auto& rule : rules_)
        if (rule.match.matches(h, in_port)) return rule.action;
    return std::nullopt;
}

std::optional<Action> FlowTable::classify_frame(ByteView frame,
                                                uint32_t in_port) const {
    return classify(inner::peek_headers(frame), in_port);
}

FlowTable intercept_table(Ipv4Addr edge_dns_addr) {
    FlowTable t;
    FlowRule tunnel;
    tunnel.priority = 200;
    tunnel.match.ip_protocol = inner::kProtoUdp;
    tunnel.match.dst_port = gtpu::kUdpPort;
    tunnel.action = SendToController{};
    t.install(tunnel);

    FlowRule edge_answers;
    edge_answers.priority = 200;
    edge_answers.match.ip_protocol = inner::kProtoUdp;
    edge_answers.match.src_addr = edge_dns_addr;
    edge_answers.match.src_port = 53;
    edge_answers.action = SendToController{};
    t.install(edge_answers);

    FlowRule rest;
    rest.priority = 0;
    rest.action = ForwardNormal{};
    t.install(rest);
    return t;
}

FlowTable passthrough_table() {
    FlowTable t;
    FlowRule rest;
    rest.priority = 0;
    rest.action = ForwardNormal{};
    t.install(rest);
    return t;
}

}  // namespace gnbdns::flow
