#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hkdelay/experiments.hpp"

namespace {

double parse_p(const std::string& s) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "1") {
        return 1.0;
    }
    if (s == "2") {
        return 2.0;
    }
    throw hkdelay::ConfigError("--p must be 1, 2 or inf");
}

int cmd_run(const std::string& config, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed, const std::optional<double>& step,
            const std::optional<double>& t_end) {
    hkdelay::Scenario s = hkdelay::load_scenario(config);
    if (seed) {
        s.set_seed(*seed);
    }
    if (step) {
        s.numerics.step = *step;
    }
    if (t_end) {
        s.numerics.t_end = *t_end;
    }
    const hkdelay::RunReport report = hkdelay::run(s);
    const std::string dir = out ? *out : s.output.dir;
    hkdelay::write_report_files(report, dir, s.output.csv, s.output.json);

    const auto& c = report.certificate;
    std::printf("mode=%s gamma=%.10g D0=%.10g checks=%zu certificate=%s status=%d\n",
                hkdelay::mode_name(report.mode).c_str(), c.gamma, c.D0, c.checks.size(),
                c.passed() ? "pass" : "FAIL", report.exit_status());
    return report.exit_status();
}

int cmd_stability(const std::string& config, double epsilon, const std::string& p) {
    const hkdelay::Scenario s = hkdelay::load_scenario(config);
    const hkdelay::StabilityReport r = hkdelay::stability_study(s, epsilon, parse_p(p));
    std::cout << hkdelay::to_json(r);
    return r.passed ? 0 : 2;
}

int cmd_limit(const std::string& config, std::size_t n0, std::size_t levels) {
    const hkdelay::Scenario s = hkdelay::load_scenario(config);
    const hkdelay::LimitReport r = hkdelay::limit_study(s, n0, levels);
    std::cout << hkdelay::to_json(r);
    return r.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed leader-follower opinion dynamics: simulations and consensus certificates"};
    app.set_version_flag("--version", "hkdelay " + hkdelay::version_string());
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<double> t_end;
    auto* run = app.add_subcommand("run", "Run a scenario and write report.csv / report.json");
    run->add_option("--config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (defaults to output.dir)");
    run->add_option("--seed", seed, "Override the history generator seed");
    run->add_option("--step", step, "Override the integration step")->check(CLI::PositiveNumber);
    run->add_option("--t-end", t_end, "Override the final time")->check(CLI::PositiveNumber);

    double epsilon = 1e-3;
    std::string p = "2";
    auto* stab = app.add_subcommand("stability", "Perturbation sweep eps, 2 eps, 4 eps");
    stab->add_option("--config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    stab->add_option("--epsilon", epsilon, "Base perturbation size")->check(CLI::NonNegativeNumber);
    stab->add_option("--p", p, "Transport order")->check(CLI::IsMember({"1", "2", "inf"}));

    std::size_t n0 = 8;
    std::size_t levels = 4;
    auto* lim = app.add_subcommand("limit", "Refinement study N0, 2 N0, ...");
    lim->add_option("--config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    lim->add_option("--n0", n0, "Smallest atom count")->check(CLI::PositiveNumber);
    lim->add_option("--levels", levels, "Number of refinement levels")->check(CLI::Range(2, 16));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help / --version exit 0; every usage error maps to 1.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            return cmd_run(config, out, seed, step, t_end);
        }
        if (*stab) {
            return cmd_stability(config, epsilon, p);
        }
        return cmd_limit(config, n0, levels);
    } catch (const hkdelay::DivergenceError& e) {
        std::cerr << "error: " << e.what() << " (t=" << e.blow_up_time() << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
}
