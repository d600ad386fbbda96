#include "gnbdns/resolver.hpp"

#include <algorithm>

namespace gnbdns::edge {

void Cache::insert(const CacheKey& key, CacheEntry entry) {
    auto it = map_.find(key);
    if (it != map_.end()) {
        lru_.erase(it->second.lru_it);
        map_.erase(it);
    }
    if (capacity_ == 0) return;
    while (map_.size() >= capacity_) {
        map_.erase(lru_.back());
        lru_.pop_back();
    }
    lru_.push_front(key);
    map_.emplace(key, Slot{std::move(entry), lru_.begin()});
}

const CacheEntry* Cache::lookup(const CacheKey& key, sim::SimTime now) {
    auto it = map_.find(key);
    if (it == map_.end()) return nullptr;
    if (now >= it->second.entry.expires_at) {
        lru_.erase(it->second.lru_it);
        map_.erase(it);
        return nullptr;
    }
    lru_.splice(lru_.begin(), lru_, it->second.lru_it);
    return &it->second.entry;
}

namespace {

Ipv6Addr parse_ipv6(const std::string& text) {
    std::vector<uint16_t> head, tail;
    bool seen_gap = false;
    size_t i = 0;
    auto parse_group = [&](size_t start, size_t end) {
        uint32_t v = 0;
        if (end == start || end - start > 4)
            throw std::invalid_argument("bad IPv6 group in " + text);
        for (size_t k = start; k < end; ++k) {
            char c = text[k];
            int d = c >= '0' && c <= '9'   ? c - '0'
                    : c >= 'a' && c <= 'f' ? c - 'a' + 10
                    : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                           : -1;
            if (d < 0) throw std::invalid_argument("bad IPv6 digit in " + text);
            v = v << 4 | static_cast<uint32_t>(d);
        }
        return static_cast<uint16_t>(v);
    };
    while (i < text.size()) {
        if (text.compare(i, 2, "::") == 0) {
            if (seen_gap) throw std::invalid_argument("two '::' in " + text);
            seen_gap = true;
            i += 2;
            continue;
        }
        if (text[i] == ':') {
            ++i;
            continue;
        }
        size_t end = text.find(':', i);
        if (end == std::string::npos) end = text.size();
        (seen_gap ? tail : head).push_back(parse_group(i, end));
        i = end;
    }
    size_t total = head.size() + tail.size();
    if ((seen_gap && total > 8) || (!seen_gap && total != 8))
        throw std::invalid_argument("bad IPv6 group count in " + text);
    Ipv6Addr out;
    for (size_t k = 0; k < head.size(); ++k) {
        out.bytes[2 * k] = static_cast<uint8_t>(head[k] >> 8);
        out.bytes[2 * k + 1] = static_cast<uint8_t>(head[k]);
    }
    for (size_t k = 0; k < tail.size(); ++k) {
        size_t at = 16 - 2 * (tail.size() - k);
        out.bytes[at] = static_cast<uint8_t>(tail[k] >> 8);
        out.bytes[at + 1] = static_cast<uint8_t>(tail[k]);
    }
    return out;
}

}  // namespace

void ZoneMap::add(const std::string& name, uint16_t rtype, uint32_t ttl_s,
                  const std::string& value) {
    dns::ResourceRecord rr;
    rr.name = dns::DnsName::from_string(name);
    rr.rtype = rtype;
    rr.rclass = dns::kClassIn;
    rr.ttl = ttl_s;
    if (rtype == dns::kTypeA)
        rr.rdata = Ipv4Addr::parse(value);
    else if (rtype == dns::kTypeAaaa)
        rr.rdata = parse_ipv6(value);
    else if (rtype == dns::kTypeCname)
        rr.rdata = dns::DnsName::from_string(value);
    else
        throw std::invalid_argument("zone record type " + std::to_string(rtype) +
                                    " not supported");
    add(std::move(rr));
}

void ZoneMap::add(dns::ResourceRecord rr) {
    records_.emplace(rr.name.lowercase(), std::move(rr));
}

ZoneMap::Result ZoneMap::resolve(const dns::DnsName& qname, uint16_t qtype) const {
    Result res;
    std::string name = qname.lowercase();
    res.name_exists = records_.count(name) > 0;

    for (int depth = 0; depth < 8; ++depth) {
        auto [lo, hi] = records_.equal_range(name);
        const dns::ResourceRecord* cname = nullptr;
        bool found = false;
        for (auto it = lo; it != hi; ++it) {
            if (it->second.rtype == qtype) {
                res.answers.push_back(it->second);
                found = true;
            } else if (it->second.rtype == dns::kTypeCname) {
                cname = &it->second;
            }
        }
        if (found || qtype == dns::kTypeCname) return res;
        if (!cname) return res;
        res.answers.push_back(*cname);
        name = std::get<dns::DnsName>(cname->rdata).lowercase();
    }
    return res;
}

sim::SimTime UpstreamModel::sample_rtt(sim::Rng& rng) const {
    if (jitter == 0) return rtt;
    sim::SimTime lo = rtt > jitter ? rtt - jitter : 0;
    sim::SimTime hi = rtt + jitter;
    return lo + static_cast<sim::SimTime>(
                    rng.bounded(static_cast<uint64_t>(hi - lo + 1)));
}

uint32_t remaining_ttl_s(sim::SimTime expires_at, sim::SimTime now) {
    sim::SimTime left = expires_at - now;
    if (left <= 0) return 0;
    return static_cast<uint32_t>((left + sim::seconds(1) - 1) / sim::seconds(1));
}

Resolver::Outcome Resolver::resolve(const dns::Question& q, sim::SimTime now,
                                    sim::Rng& rng) {
    CacheKey key{q.qname.lowercase(), q.qtype};
    Outcome out;

    if (const CacheEntry* hit = cache_.lookup(key, now)) {
        out.source = hit->nxdomain || hit->answers.empty() ? Source::NegativeCache
                                                           : Source::Cache;
        if (out.source == Source::NegativeCache)
            ++counters_.negative_hits;
        else
            ++counters_.hits;
        out.nxdomain = hit->nxdomain;
        out.answers = hit->answers;
        uint32_t remaining = remaining_ttl_s(hit->expires_at, now);
        for (auto& rr : out.answers) rr.ttl = remaining;
        out.completes_at = now + cfg_.processing;
        return out;
    }

    ++counters_.misses;
    if (rng.chance(upstream_.failure_rate)) {
        ++counters_.upstream_timeouts;
        out.timeout = true;
        return out;
    }

    sim::SimTime fetch = upstream_.sample_rtt(rng);
    out.source = Source::Upstream;
    out.completes_at = now + cfg_.processing + fetch;

    ZoneMap::Result zr =
        zone_ ? zone_->resolve(q.qname, q.qtype) : ZoneMap::Result{};
    CacheEntry entry;
    entry.inserted_at = now;
    if (zr.answers.empty()) {
        entry.nxdomain = !zr.name_exists;
        entry.expires_at = now + cfg_.negative_ttl;
    } else {
        uint32_t min_ttl = zr.answers.front().ttl;
        for (const auto& rr : zr.answers) min_ttl = std::min(min_ttl, rr.ttl);
        entry.answers = zr.answers;
        entry.expires_at = now + sim::seconds(min_ttl);
    }
    out.nxdomain = entry.nxdomain;
    out.answers = entry.answers;
    cache_.insert(key, std::move(entry));
    return out;
}

}  // namespace gnbdns::edge
