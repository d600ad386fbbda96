// gnbdns: scenario runner, calibration, and fixture checks for the edge DNS
// interception simulator.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gnbdns/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitThreshold = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gnbdns::bench::ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gnbdns::bench::ConfigError(path + ": cannot write");
    out << text;
}

int report_checks(const std::vector<gnbdns::bench::TargetCheck>& checks) {
    bool all_ok = true;
    for (const auto& c : checks) {
        std::cout << (c.ok ? "OK  " : "MISS") << " " << c.label << " @" << c.count
                  << ": simulated " << gnbdns::bench::format_x100(c.simulated_x100)
                  << " ms, target " << gnbdns::bench::format_x100(c.target_x100)
                  << " ms\n";
        all_ok = all_ok && c.ok;
    }
    return all_ok ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gnbdns;

    CLI::App app{"gNB-edge DNS interception bench"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run every scenario in a config file");
    std::string config_path, csv_path, expect_path;
    std::optional<uint64_t> seed;
    bool trace = false, table = false;
    double tolerance = 2.0;
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--seed", seed, "override every scenario seed");
    run->add_flag("--trace", trace, "print one line per simulation event");
    run->add_option("--csv", csv_path, "write the summary CSV here");
    run->add_flag("--table", table, "print the scenario-by-count mean table");
    run->add_option("--expect", expect_path,
                    "targets CSV; exit 2 if any mean misses its target");
    run->add_option("--tolerance", tolerance, "percent tolerance for --expect");

    // calibrate
    auto* cal = app.add_subcommand("calibrate",
                                   "derive a scenario config from a target table");
    std::string targets_path, out_path;
    bool verify = false;
    double cal_tolerance = 2.0;
    cal->add_option("--targets", targets_path, "CSV: label,mode,<count>,...")
        ->required();
    cal->add_option("--out", out_path, "write the config here (default stdout)");
    cal->add_flag("--verify", verify, "run the emitted config against the targets");
    cal->add_option("--tolerance", cal_tolerance, "percent tolerance for --verify");

    // fixtures verify
    auto* fix = app.add_subcommand("fixtures", "fixture corpus operations");
    auto* fix_verify = fix->add_subcommand("verify", "check fixtures against .expect");
    std::string fixtures_dir = "fixtures";
    fix_verify->add_option("--dir", fixtures_dir, "fixture corpus root");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            bench::BenchConfig cfg = bench::parse_config_file(config_path);
            bench::TraceSink sink;
            if (trace)
                sink = [](sim::SimTime t, const std::string& node,
                          const std::string& event, const std::string& detail) {
                    std::cout << t << " " << node << " " << event
                              << (detail.empty() ? "" : " " + detail) << "\n";
                };
            std::vector<bench::RunResult> results;
            for (const bench::Scenario& s : cfg.scenarios) {
                if (trace) std::cout << "# trace " << s.name << "\n";
                bench::Scenario one = s;
                if (seed) one.seed = *seed;
                results.push_back(bench::run_scenario(one, cfg.zone, sink));
            }
            std::sort(results.begin(), results.end(),
                      [](const bench::RunResult& a, const bench::RunResult& b) {
                          return a.name < b.name;
                      });
            std::cout << bench::render_summary(results);
            if (table) std::cout << bench::render_table(results);
            if (!csv_path.empty()) write_file(csv_path, bench::render_csv(results));
            if (!expect_path.empty()) {
                auto targets = bench::parse_targets_csv(read_file(expect_path));
                return report_checks(bench::check_targets(results, targets, tolerance));
            }
            return kExitOk;
        }

        if (*cal) {
            auto targets = bench::parse_targets_csv(read_file(targets_path));
            std::string config_text = bench::calibrate(targets);
            if (out_path.empty())
                std::cout << config_text;
            else
                write_file(out_path, config_text);
            if (verify) {
                bench::BenchConfig cfg =
                    bench::parse_config_text(config_text, "<calibrated>");
                auto results = bench::run_all(cfg, std::nullopt);
                return report_checks(
                    bench::check_targets(results, targets, cal_tolerance));
            }
            return kExitOk;
        }

        if (*fix_verify) {
            bench::FixtureReport report = bench::verify_fixtures(fixtures_dir);
            for (const std::string& f : report.failures) std::cout << "FAIL " << f << "\n";
            std::cout << report.files << " fixtures, " << report.failures.size()
                      << " failures\n";
            if (report.files == 0) return kExitConfig;
            return report.ok() ? kExitOk : kExitThreshold;
        }
    } catch (const bench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bench::InfeasibleTargets& e) {
        std::cerr << "infeasible targets: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
