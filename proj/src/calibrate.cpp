#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "gnbdns/bench.hpp"

namespace gnbdns::bench {

namespace {

int64_t round_div_signed(int64_t num, int64_t den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num >= 0) return (2 * num + den) / (2 * den);
    return -((2 * -num + den) / (2 * den));
}

std::string slug(const std::string& label) {
    std::string s;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!s.empty() && s.back() != '_')
            s.push_back('_');
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s.empty() ? "row" : s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        size_t a = f.find_first_not_of(" \t");
        size_t b = f.find_last_not_of(" \t");
        f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
    }
    return out;
}

Ipv4Addr server_addr_for(const std::string& label, bool edge, size_t row_index) {
    std::string l;
    for (char c : label) l.push_back(static_cast<char>(std::tolower(c)));
    if (l.find("google") != std::string::npos) return Ipv4Addr::parse("8.8.8.8");
    if (l.find("opendns") != std::string::npos)
        return Ipv4Addr::parse("208.67.222.222");
    if (l.find("verisign") != std::string::npos) return Ipv4Addr::parse("64.6.64.6");
    // intercepted rows query some public resolver and never reach it
    if (edge) return Ipv4Addr::parse("8.8.8.8");
    return Ipv4Addr::from_octets(198, 18, static_cast<uint8_t>(row_index), 53);
}

}  // namespace

std::vector<TargetRow> parse_targets_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw InfeasibleTargets("empty targets table");
    std::vector<std::string> head = split_csv_line(line);
    if (head.size() < 3 || head[0] != "label" || head[1] != "mode")
        throw InfeasibleTargets("targets header must be 'label,mode,<count>,...'");
    std::vector<uint32_t> counts;
    for (size_t i = 2; i < head.size(); ++i) {
        try {
            counts.push_back(static_cast<uint32_t>(std::stoul(head[i])));
        } catch (const std::exception&) {
            throw InfeasibleTargets("bad count column '" + head[i] + "'");
        }
    }

    std::vector<TargetRow> rows;
    while (std::getline(in, line)) {
        if (split_csv_line(line).size() == 1 && split_csv_line(line)[0].empty())
            continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != head.size())
            throw InfeasibleTargets("row '" + line + "' has " +
                                    std::to_string(fields.size()) + " fields, expected " +
                                    std::to_string(head.size()));
        TargetRow row;
        row.label = fields[0];
        if (fields[1] == "edge")
            row.edge = true;
        else if (fields[1] == "remote")
            row.edge = false;
        else
            throw InfeasibleTargets("mode must be edge|remote, got '" + fields[1] + "'");
        for (size_t i = 2; i < fields.size(); ++i) {
            if (fields[i].empty()) continue;
            try {
                row.cells.push_back({counts[i - 2], parse_ms(fields[i])});
            } catch (const std::exception&) {
                throw InfeasibleTargets("bad mean '" + fields[i] + "' in row " +
                                        row.label);
            }
        }
        if (row.cells.empty())
            throw InfeasibleTargets("row " + row.label + " has no cells");
        std::sort(row.cells.begin(), row.cells.end(),
                  [](const TargetCell& a, const TargetCell& b) {
                      return a.count < b.count;
                  });
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InfeasibleTargets("no target rows");
    return rows;
}

std::string calibrate(const std::vector<TargetRow>& targets) {
    Topology base;  // defaults; the emitted config restates them

    const sim::SimTime remote_fixed = 2 * (base.ue_gnb + base.gnb_upf);
    const sim::SimTime edge_fixed =
        2 * base.ue_gnb + 4 * base.controller + 2 * base.gnb_edge;

    std::ostringstream out;
    out << "# generated by 'gnbdns calibrate'\n"
        << "[topology]\n"
        << "ue_count = 1\n"
        << "ue_gnb_ms = " << sim::format_ms(base.ue_gnb) << "\n"
        << "gnb_upf_ms = " << sim::format_ms(base.gnb_upf) << "\n"
        << "gnb_edge_ms = " << sim::format_ms(base.gnb_edge) << "\n"
        << "controller_ms = " << sim::format_ms(base.controller) << "\n";

    for (size_t row_i = 0; row_i < targets.size(); ++row_i) {
        const TargetRow& row = targets[row_i];
        std::string base_name = slug(row.label);
        Ipv4Addr server = server_addr_for(row.label, row.edge, row_i);

        sim::SimTime warm = 0, penalty = 0;
        if (row.edge) {
            const TargetCell& lo = row.cells.front();
            const TargetCell& hi = row.cells.back();
            if (lo.count == hi.count) {
                warm = lo.mean;  // single column: treat it all as warm path
                penalty = 0;
            } else {
                int64_t d_lo = std::min<int64_t>(10, lo.count);
                int64_t d_hi = std::min<int64_t>(10, hi.count);
                int64_t denom = d_lo * hi.count - d_hi * lo.count;
                if (denom <= 0)
                    throw InfeasibleTargets("edge row '" + row.label +
                                            "': columns do not pin a cold penalty");
                penalty = round_div_signed(
                    (lo.mean - hi.mean) * lo.count * hi.count, denom);
                if (penalty < 0)
                    throw InfeasibleTargets(
                        "edge row '" + row.label +
                        "': cold mean is below warm mean, no upstream cost fits");
                warm = lo.mean - round_div_signed(d_lo * penalty, lo.count);
            }
            if (warm <= edge_fixed)
                throw InfeasibleTargets(
                    "edge row '" + row.label + "': warm mean " + sim::format_ms(warm) +
                    " ms is under the fixed path cost " + sim::format_ms(edge_fixed) +
                    " ms");
        }

        for (const TargetCell& cell : row.cells) {
            out << "\n[scenario." << base_name << "_n" << cell.count << "]\n"
                << "label = " << row.label << "\n"
                << "queries = " << cell.count << "\n"
                << "seed = 1\n"
                << "gap_ms = 1\n"
                << "dns_server = " << server.to_string() << "\n";
            if (row.edge) {
                int64_t domains;
                if (penalty == 0) {
                    domains = std::min<int64_t>(10, cell.count);
                } else {
                    domains = round_div_signed((cell.mean - warm) * cell.count, penalty);
                    domains = std::clamp<int64_t>(domains, 1, cell.count);
                }
                out << "intercept = true\n"
                    << "domains = " << domains << "\n"
                    << "edge_processing_ms = " << sim::format_ms(warm - edge_fixed)
                    << "\n"
                    << "upstream_rtt_ms = " << sim::format_ms(penalty) << "\n"
                    << "upstream_jitter_ms = 0\n";
            } else {
                sim::SimTime n6 = (cell.mean - remote_fixed) / 2;
                if (n6 < 0)
                    throw InfeasibleTargets(
                        "remote row '" + row.label + "' at " +
                        std::to_string(cell.count) + " queries: target " +
                        sim::format_ms(cell.mean) + " ms is under the fixed path cost " +
                        sim::format_ms(remote_fixed) + " ms");
                out << "intercept = false\n"
                    << "upf_dn_ms = " << sim::format_ms(n6) << "\n"
                    << "remote_processing_ms = 0\n";
            }
        }
    }
    return out.str();
}

std::vector<TargetCheck> check_targets(const std::vector<RunResult>& results,
                                       const std::vector<TargetRow>& targets,
                                       double tolerance_pct) {
    std::vector<TargetCheck> checks;
    for (const TargetRow& row : targets) {
        for (const TargetCell& cell : row.cells) {
            TargetCheck c;
            c.label = row.label;
            c.count = cell.count;
            c.target_x100 = cell.mean / 10000;
            c.ok = false;
            for (const RunResult& r : results) {
                if (r.label != row.label || r.queries * r.ue_count != cell.count)
                    continue;
                c.simulated_x100 = compute_stats(r).mean_x100;
                double diff = std::abs(static_cast<double>(c.simulated_x100) -
                                       static_cast<double>(c.target_x100));
                c.ok = diff <= tolerance_pct / 100.0 *
                                   static_cast<double>(c.target_x100);
                break;
            }
            checks.push_back(c);
        }
    }
    return checks;
}

}  // namespace gnbdns::bench
