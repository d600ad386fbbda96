#include <algorithm>
#include <sstream>

#include "gnbdns/bench.hpp"

namespace gnbdns::bench {

namespace {

/// round(num/den) half-up in integer arithmetic, num/den >= 0.
int64_t round_div(int64_t num, int64_t den) { return (2 * num + den) / (2 * den); }

/// milliseconds*100, rounded half-up, from a nanosecond rational num/den.
int64_t ms_x100(int64_t num_ns, int64_t den = 1) { return round_div(num_ns, den * 10000); }

}  // namespace

RunStats compute_stats(const RunResult& r) {
    RunStats st;
    std::vector<int64_t> rtts;
    for (const auto& s : r.samples) {
        if (s.rtt)
            rtts.push_back(*s.rtt);
        else
            ++st.timeouts;
    }
    st.answered = rtts.size();
    uint64_t lookups = r.resolver.hits + r.resolver.misses + r.resolver.negative_hits;
    if (lookups > 0)
        st.hit_ratio = static_cast<double>(r.resolver.hits + r.resolver.negative_hits) /
                       static_cast<double>(lookups);
    if (rtts.empty()) return st;

    std::sort(rtts.begin(), rtts.end());
    int64_t total = 0;
    for (int64_t v : rtts) total += v;
    st.mean_x100 = ms_x100(total, static_cast<int64_t>(rtts.size()));

    size_t n = rtts.size();
    if (n % 2 == 1)
        st.median_x100 = ms_x100(rtts[n / 2]);
    else
        st.median_x100 = ms_x100(rtts[n / 2 - 1] + rtts[n / 2], 2);

    size_t rank = (95 * n + 99) / 100;  // ceil(0.95n), nearest-rank
    if (rank == 0) rank = 1;
    st.p95_x100 = ms_x100(rtts[rank - 1]);
    return st;
}

std::string format_x100(int64_t x100) {
    std::string sign = x100 < 0 ? "-" : "";
    if (x100 < 0) x100 = -x100;
    return sign + std::to_string(x100 / 100) + "." +
           (x100 % 100 < 10 ? "0" : "") + std::to_string(x100 % 100);
}

std::string render_csv(const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "scenario,label,queries,ue_count,answered,timeouts,mean_ms,median_ms,"
           "p95_ms,cache_hits,cache_misses,negative_hits,upstream_timeouts,"
           "queries_extracted,responses_injected,no_pending_match,no_downlink_teid,"
           "fail_open_forwards,pending_timeouts,remote_served\n";
    for (const RunResult& r : results) {
        RunStats st = compute_stats(r);
        out << r.name << ',' << r.label << ',' << r.queries << ',' << r.ue_count << ','
            << st.answered << ',' << st.timeouts << ',' << format_x100(st.mean_x100)
            << ',' << format_x100(st.median_x100) << ',' << format_x100(st.p95_x100)
            << ',' << r.resolver.hits << ',' << r.resolver.misses << ','
            << r.resolver.negative_hits << ',' << r.resolver.upstream_timeouts << ','
            << r.controller.queries_extracted << ',' << r.controller.responses_injected
            << ',' << r.controller.no_pending_match << ','
            << r.controller.no_downlink_teid << ',' << r.controller.fail_open_forwards
            << ',' << r.controller.pending_timeouts << ',' << r.remote_served << '\n';
    }
    return out.str();
}

std::string render_table(const std::vector<RunResult>& results) {
    std::vector<std::string> labels;
    std::vector<uint32_t> counts;
    std::map<std::pair<std::string, uint32_t>, std::string> cells;
    for (const RunResult& r : results) {
        uint32_t total = r.queries * r.ue_count;
        if (std::find(labels.begin(), labels.end(), r.label) == labels.end())
            labels.push_back(r.label);
        if (std::find(counts.begin(), counts.end(), total) == counts.end())
            counts.push_back(total);
        cells[{r.label, total}] = format_x100(compute_stats(r).mean_x100);
    }
    std::sort(counts.begin(), counts.end());

    size_t label_w = std::string("DNS Server").size();
    for (const auto& l : labels) label_w = std::max(label_w, l.size());
    std::vector<size_t> col_w(counts.size());
    for (size_t c = 0; c < counts.size(); ++c) {
        col_w[c] = std::to_string(counts[c]).size();
        for (const auto& l : labels) {
            auto it = cells.find({l, counts[c]});
            if (it != cells.end()) col_w[c] = std::max(col_w[c], it->second.size());
        }
    }

    std::ostringstream out;
    out << "Average DNS query response times (ms)\n";
    auto pad = [](const std::string& s, size_t w) {
        return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    out << pad("DNS Server", label_w);
    for (size_t c = 0; c < counts.size(); ++c)
        out << "  " << pad(std::to_string(counts[c]), col_w[c]);
    out << '\n';
    for (const auto& l : labels) {
        out << pad(l, label_w);
        for (size_t c = 0; c < counts.size(); ++c) {
            auto it = cells.find({l, counts[c]});
            out << "  " << pad(it == cells.end() ? "-" : it->second, col_w[c]);
        }
        out << '\n';
    }
    return out.str();
}

std::string render_summary(const std::vector<RunResult>& results) {
    std::ostringstream out;
    for (const RunResult& r : results) {
        RunStats st = compute_stats(r);
        out << r.name << ": " << st.answered << " answered, " << st.timeouts
            << " timeouts, mean " << format_x100(st.mean_x100) << " ms, median "
            << format_x100(st.median_x100) << " ms, p95 " << format_x100(st.p95_x100)
            << " ms\n"
            << "  resolver: hits=" << r.resolver.hits
            << " misses=" << r.resolver.misses
            << " negative_hits=" << r.resolver.negative_hits
            << " upstream_timeouts=" << r.resolver.upstream_timeouts
            << " hit_ratio=" << static_cast<int>(st.hit_ratio * 100 + 0.5) << "%\n"
            << "  controller: tunnels=" << r.tunnel_entries
            << " queries_extracted=" << r.controller.queries_extracted
            << " responses_injected=" << r.controller.responses_injected
            << " no_pending_match=" << r.controller.no_pending_match
            << " no_downlink_teid=" << r.controller.no_downlink_teid
            << " fail_open_forwards=" << r.controller.fail_open_forwards
            << " pending_timeouts=" << r.controller.pending_timeouts << '\n';
        if (r.horizon_exceeded)
            out << "  WARNING: horizon exceeded, results are partial\n";
    }
    return out.str();
}

}  // namespace gnbdns::bench
