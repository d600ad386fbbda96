#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

namespace gnbdns::sim {

/// Simulated time in integer nanoseconds; exact arithmetic, no float drift.
using SimTime = int64_t;

constexpr SimTime us(int64_t v) { return v * 1000; }
constexpr SimTime ms(int64_t v) { return v * 1000000; }
constexpr SimTime seconds(int64_t v) { return v * 1000000000; }

std::string format_ms(SimTime t);  // "17.242042" style, trailing zeros trimmed

/// splitmix64; self-contained so event traces are reproducible across
/// standard-library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound); bound 0 yields 0. Modulo bias is irrelevant at
    /// the bounds this simulator draws.
    uint64_t bounded(uint64_t bound) { return bound ? next_u64() % bound : 0; }

    /// True with probability `rate` (clamped to [0,1]).
    bool chance(double rate) {
        if (rate <= 0.0) return false;
        if (rate >= 1.0) return true;
        return next_u64() < static_cast<uint64_t>(rate * 18446744073709551616.0);
    }

private:
    uint64_t state_;
};

/// Deterministic discrete-event loop. Events run in (fire_at, seq) order;
/// seq is assigned at schedule time so equal timestamps preserve FIFO.
class EventLoop {
public:
    using TraceFn = std::function<void(SimTime, const std::string& node,
                                       const std::string& event,
                                       const std::string& detail)>;

    explicit EventLoop(uint64_t seed) : rng_(seed) {}

    SimTime now() const { return now_; }
    Rng& rng() { return rng_; }

    uint64_t schedule(SimTime delay, std::function<void()> fn) {
        if (delay < 0) delay = 0;
        uint64_t id = next_seq_++;
        queue_.push(Event{now_ + delay, id, std::move(fn)});
        return id;
    }

    /// Drains the queue up to `horizon` (inclusive). Returns false when
    /// events remained beyond the horizon.
    bool run(SimTime horizon) {
        while (!queue_.empty()) {
            if (queue_.top().fire_at > horizon) return false;
            Event ev = std::move(const_cast<Event&>(queue_.top()));
            queue_.pop();
            now_ = ev.fire_at;
            ev.fn();
        }
        return true;
    }

    void set_trace(TraceFn fn) { trace_ = std::move(fn); }
    bool tracing() const { return static_cast<bool>(trace_); }
    void trace(const std::string& node, const std::string& event,
               const std::string& detail) const {
        if (trace_) trace_(now_, node, event, detail);
    }

private:
    struct Event {
        SimTime fire_at;
        uint64_t seq;
        std::function<void()> fn;
        bool operator>(const Event& o) const {
            return fire_at != o.fire_at ? fire_at > o.fire_at : seq > o.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    SimTime now_ = 0;
    uint64_t next_seq_ = 0;
    Rng rng_;
    TraceFn trace_;
};

}  // namespace gnbdns::sim
