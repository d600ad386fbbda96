#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnbdns/dns.hpp"
#include "gnbdns/sim.hpp"

namespace gnbdns::edge {

struct CacheKey {
    std::string qname_lc;
    uint16_t qtype = dns::kTypeA;
    auto operator<=>(const CacheKey&) const = default;
};

struct CacheEntry {
    std::vector<dns::ResourceRecord> answers;  // original TTLs as fetched
    bool nxdomain = false;
    sim::SimTime inserted_at = 0;
    sim::SimTime expires_at = 0;
};

/// TTL-bounded LRU cache. A lookup at time t hits iff t < expires_at and
/// refreshes the entry's LRU position.
class Cache {
public:
    explicit Cache(size_t capacity) : capacity_(capacity) {}

    void insert(const CacheKey& key, CacheEntry entry);
    const CacheEntry* lookup(const CacheKey& key, sim::SimTime now);
    size_t size() const { return map_.size(); }

private:
    size_t capacity_;
    std::list<CacheKey> lru_;  // front = most recent
    struct Slot {
        CacheEntry entry;
        std::list<CacheKey>::iterator lru_it;
    };
    std::map<CacheKey, Slot> map_;
};

/// Static authoritative data for the simulated upstreams.
class ZoneMap {
public:
    void add(const std::string& name, uint16_t rtype, uint32_t ttl_s,
             const std::string& value);  // throws std::invalid_argument
    void add(dns::ResourceRecord rr);

    struct Result {
        bool name_exists = false;  // any record under the queried name
        std::vector<dns::ResourceRecord> answers;  // CNAME chain included
    };
    Result resolve(const dns::DnsName& qname, uint16_t qtype) const;

    size_t size() const { return records_.size(); }

private:
    std::multimap<std::string, dns::ResourceRecord> records_;  // key: lowercase name
};

struct UpstreamModel {
    sim::SimTime rtt = sim::ms(20);
    sim::SimTime jitter = 0;  // sample uniform in [rtt-jitter, rtt+jitter]
    double failure_rate = 0.0;
    sim::SimTime sample_rtt(sim::Rng& rng) const;
};

struct ResolverConfig {
    sim::SimTime processing = 500 * 1000;  // 0.5 ms
    sim::SimTime negative_ttl = sim::seconds(30);
    size_t cache_capacity = 10000;
};

struct ResolverCounters {
    uint64_t hits = 0;
    uint64_t misses = 0;
    uint64_t negative_hits = 0;
    uint64_t upstream_timeouts = 0;
};

/// The caching service at the edge: cache hit, negative hit, or a simulated
/// upstream fetch whose result is cached before completion is reported.
class Resolver {
public:
    Resolver(ResolverConfig cfg, const ZoneMap* zone, UpstreamModel upstream)
        : cfg_(cfg), zone_(zone), upstream_(upstream), cache_(cfg.cache_capacity) {}

    enum class Source { Cache, NegativeCache, Upstream };

    struct Outcome {
        bool timeout = false;  // upstream failure sampled; no response
        bool nxdomain = false;
        Source source = Source::Cache;
        std::vector<dns::ResourceRecord> answers;  // TTLs = remaining seconds
        sim::SimTime completes_at = 0;
    };

    Outcome resolve(const dns::Question& q, sim::SimTime now, sim::Rng& rng);

    const ResolverCounters& counters() const { return counters_; }
    Cache& cache() { return cache_; }

private:
    ResolverConfig cfg_;
    const ZoneMap* zone_;
    UpstreamModel upstream_;
    Cache cache_;
    ResolverCounters counters_;
};

/// Remaining whole seconds until expiry, rounded up.
uint32_t remaining_ttl_s(sim::SimTime expires_at, sim::SimTime now);

}  // namespace gnbdns::edge
