#include <doctest.h>

#include <set>

#include "gnbdns/resolver.hpp"

using namespace gnbdns;
using namespace gnbdns::edge;
using gnbdns::sim::ms;
using gnbdns::sim::seconds;

namespace {

ZoneMap test_zone() {
    ZoneMap z;
    z.add("example.com", dns::kTypeA, 60, "93.184.216.34");
    z.add("example.com", dns::kTypeA, 300, "93.184.216.35");
    z.add("slow.example.net", dns::kTypeA, 3600, "198.51.100.7");
    z.add("alias.example.org", dns::kTypeCname, 120, "example.com");
    return z;
}

dns::Question q(const std::string& name, uint16_t type = dns::kTypeA) {
    return {dns::DnsName::from_string(name), type, dns::kClassIn};
}

}  // namespace

TEST_CASE("resolver: miss pays processing plus upstream rtt, hit only processing") {
    ZoneMap zone = test_zone();
    ResolverConfig cfg;
    cfg.processing = 500000;  // 0.5 ms
    UpstreamModel up;
    up.rtt = ms(20);
    Resolver r(cfg, &zone, up);
    sim::Rng rng(1);

    auto cold = r.resolve(q("example.com"), 0, rng);
    CHECK_FALSE(cold.timeout);
    CHECK(cold.source == Resolver::Source::Upstream);
    CHECK(cold.completes_at == ms(20) + 500000);

    auto warm = r.resolve(q("example.com"), cold.completes_at, rng);
    CHECK(warm.source == Resolver::Source::Cache);
    CHECK(warm.completes_at == cold.completes_at + 500000);

    CHECK(r.counters().misses == 1);
    CHECK(r.counters().hits == 1);
}

TEST_CASE("resolver: expiry is the min answer TTL, boundary exclusive") {
    ZoneMap zone = test_zone();
    Resolver r(ResolverConfig{}, &zone, UpstreamModel{});
    sim::Rng rng(1);

    // example.com has TTLs {60, 300}: entry lives exactly 60 s
    (void)r.resolve(q("example.com"), 0, rng);
    CHECK(r.resolve(q("example.com"), seconds(59), rng).source ==
          Resolver::Source::Cache);
    CHECK(r.resolve(q("example.com"), seconds(61), rng).source ==
          Resolver::Source::Upstream);
    CHECK(r.counters().misses == 2);
}

TEST_CASE("resolver: served TTLs are the remaining lifetime, rounded up") {
    ZoneMap zone = test_zone();
    Resolver r(ResolverConfig{}, &zone, UpstreamModel{});
    sim::Rng rng(1);

    (void)r.resolve(q("slow.example.net"), 0, rng);
    auto at_1s = r.resolve(q("slow.example.net"), seconds(1), rng);
    REQUIRE(at_1s.answers.size() == 1);
    CHECK(at_1s.answers[0].ttl == 3599);

    // ceil: 100 ms into the second still counts it
    auto frac = r.resolve(q("slow.example.net"), seconds(1) + ms(100), rng);
    CHECK(frac.answers[0].ttl == 3599);

    // successive hits never report an increasing TTL
    uint32_t prev = 3600;
    for (int t = 0; t < 12; ++t) {
        auto out = r.resolve(q("slow.example.net"), seconds(t * 7), rng);
        REQUIRE(out.answers.size() == 1);
        CHECK(out.answers[0].ttl <= prev);
        prev = out.answers[0].ttl;
    }
}

TEST_CASE("resolver: cname chain resolves through the zone") {
    ZoneMap zone = test_zone();
    Resolver r(ResolverConfig{}, &zone, UpstreamModel{});
    sim::Rng rng(1);
    auto out = r.resolve(q("alias.example.org"), 0, rng);
    REQUIRE(out.answers.size() == 3);  // CNAME + two A records
    CHECK(out.answers[0].rtype == dns::kTypeCname);
    CHECK(out.answers[1].rtype == dns::kTypeA);
}

TEST_CASE("resolver: negative answers are cached for negative_ttl") {
    ZoneMap zone = test_zone();
    ResolverConfig cfg;
    cfg.negative_ttl = seconds(30);
    Resolver r(cfg, &zone, UpstreamModel{});
    sim::Rng rng(1);

    auto first = r.resolve(q("no-such.example"), 0, rng);
    CHECK(first.nxdomain);
    CHECK(first.source == Resolver::Source::Upstream);

    auto again = r.resolve(q("no-such.example"), seconds(10), rng);
    CHECK(again.nxdomain);
    CHECK(again.source == Resolver::Source::NegativeCache);
    CHECK(r.counters().negative_hits == 1);

    auto after = r.resolve(q("no-such.example"), seconds(31), rng);
    CHECK(after.source == Resolver::Source::Upstream);
    CHECK(r.counters().misses == 2);

    // NODATA: name exists, type doesn't; negative but not nxdomain
    auto nodata = r.resolve(q("example.com", dns::kTypeAaaa), 0, rng);
    CHECK_FALSE(nodata.nxdomain);
    CHECK(nodata.answers.empty());
}

TEST_CASE("resolver: LRU eviction at capacity") {
    Cache cache(2);
    auto entry = [](sim::SimTime expires) {
        CacheEntry e;
        e.expires_at = expires;
        return e;
    };
    cache.insert({"a.com", 1}, entry(seconds(100)));
    cache.insert({"b.com", 1}, entry(seconds(100)));
    CHECK(cache.lookup({"a.com", 1}, 0) != nullptr);  // touch a
    cache.insert({"c.com", 1}, entry(seconds(100)));  // evicts b
    CHECK(cache.lookup({"b.com", 1}, 0) == nullptr);
    CHECK(cache.lookup({"a.com", 1}, 0) != nullptr);
    CHECK(cache.lookup({"c.com", 1}, 0) != nullptr);
    CHECK(cache.size() == 2);
}

TEST_CASE("resolver: lookup of a never-inserted key misses") {
    Cache cache(8);
    CHECK(cache.lookup({"nope.example", 1}, 0) == nullptr);
}

TEST_CASE("resolver: upstream failures surface as timeouts, nothing cached") {
    ZoneMap zone = test_zone();
    UpstreamModel up;
    up.failure_rate = 1.0;
    Resolver r(ResolverConfig{}, &zone, up);
    sim::Rng rng(1);
    auto out = r.resolve(q("example.com"), 0, rng);
    CHECK(out.timeout);
    CHECK(r.counters().upstream_timeouts == 1);
    CHECK(r.counters().misses == 1);
    CHECK(r.cache().size() == 0);
}

TEST_CASE("resolver: jittered rtt stays within bounds") {
    UpstreamModel up;
    up.rtt = ms(20);
    up.jitter = ms(3);
    sim::Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        sim::SimTime s = up.sample_rtt(rng);
        CHECK(s >= ms(17));
        CHECK(s <= ms(23));
    }
}

TEST_CASE("resolver: any repeat within TTL after first resolution is a hit") {
    ZoneMap zone;
    std::vector<std::string> names;
    for (int i = 0; i < 12; ++i) {
        names.push_back("host" + std::to_string(i) + ".example.net");
        zone.add(names.back(), dns::kTypeA, 600, "198.51.100." + std::to_string(i + 1));
    }
    Resolver r(ResolverConfig{}, &zone, UpstreamModel{});
    sim::Rng rng(0xabc);

    std::map<std::string, sim::SimTime> first_resolved;
    sim::SimTime now = 0;
    for (int step = 0; step < 2000; ++step) {
        now += static_cast<sim::SimTime>(rng.bounded(ms(200)));
        const std::string& name = names[rng.bounded(names.size())];
        auto out = r.resolve(q(name), now, rng);
        auto it = first_resolved.find(name);
        bool within = it != first_resolved.end() && now < it->second + seconds(600);
        if (within) {
            REQUIRE(out.source == Resolver::Source::Cache);
        } else {
            REQUIRE(out.source == Resolver::Source::Upstream);
            first_resolved[name] = now;
        }
    }
}
