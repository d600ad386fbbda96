#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gnbdns/inner.hpp"
#include "gnbdns/wire.hpp"

namespace gnbdns::flow {

class FlowError : public std::runtime_error {
public:
    enum class Kind { DuplicatePriorityConflict, UnknownPort, NoControllerRegistered };
    FlowError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Equality match over outer-header fields; absent fields are wildcards.
/// A criteria matches a frame iff every present field equals the frame's
/// corresponding field (a field the frame lacks never matches a present
/// criterion).
struct MatchCriteria {
    std::optional<uint32_t> in_port;
    std::optional<uint8_t> ip_protocol;
    std::optional<Ipv4Addr> src_addr;
    std::optional<Ipv4Addr> dst_addr;
    std::optional<uint16_t> src_port;  // outer UDP
    std::optional<uint16_t> dst_port;  // outer UDP

    bool is_wildcard() const {
        return !in_port && !ip_protocol && !src_addr && !dst_addr && !src_port &&
               !dst_port;
    }
    bool matches(const inner::HeaderPeek& h, uint32_t frame_in_port) const;

    /// True when some frame could satisfy both criteria: every field present
    /// in both carries the same value.
    bool overlaps(const MatchCriteria& other) const;

    bool operator==(const MatchCriteria&) const = default;
};

struct SendToController {
    bool operator==(const SendToController&) const = default;
};
struct ForwardNormal {
    bool operator==(const ForwardNormal&) const = default;
};
struct Output {
    uint32_t port_id = 0;
    bool operator==(const Output&) const = default;
};
struct Drop {
    bool operator==(const Drop&) const = default;
};
using Action = std::variant<SendToController, ForwardNormal, Output, Drop>;

std::string to_string(const Action& a);

struct FlowRule {
    int32_t priority = 0;  // higher wins
    MatchCriteria match;
    Action action = ForwardNormal{};

    bool operator==(const FlowRule&) const = default;
};

struct SwitchPort {
    uint32_t port_id = 0;
    std::string attached_node;
};

/// Priority-ordered match table. Equal-priority rules are accepted only if
/// their matches are disjoint or their actions identical, so lookup is
/// deterministic by construction.
class FlowTable {
public:
    /// Throws FlowError::DuplicatePriorityConflict on an ambiguous insert.
    void install(const FlowRule& rule);

    /// Action of the highest-priority matching rule; nullopt when nothing
    /// matches (callers treat that as a counted drop).
    std::optional<Action> classify(const inner::HeaderPeek& h, uint32_t in_port) const;
    std::optional<Action> classify_frame(ByteView frame, uint32_t in_port) const;

    const std::vector<FlowRule>& rules() const { return rules_; }
    size_t size() const { return rules_.size(); }
    void clear() { rules_.clear(); }

private:
    std::vector<FlowRule> rules_;  // kept sorted by descending priority
};

/// The standard interception setup: tunnel traffic and edge-resolver
/// answers go to the controller, everything else is switched normally.
FlowTable intercept_table(Ipv4Addr edge_dns_addr);
FlowTable passthrough_table();

}  // namespace gnbdns::flow
