#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "hkdelay/experiments.hpp"

namespace hkdelay {
namespace {

using nlohmann::ordered_json;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json number_or_null(std::optional<double> x) {
    if (!x || !std::isfinite(*x)) {
        return nullptr;
    }
    return *x;
}

ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(); }

std::string perturbation_name(Perturbation p) {
    return p == Perturbation::translation ? "translation" : "random";
}

ordered_json order_json(double p) { return std::isinf(p) ? ordered_json("inf") : ordered_json(p); }

ordered_json velocity_json(const VelocityBoundReport& r) {
    return {{"radius", r.radius},
            {"leader_bound", r.leader_bound},
            {"speed_bound", r.speed_bound},
            {"lipschitz_bound", r.lipschitz_bound},
            {"max_speed", r.max_speed},
            {"max_lipschitz_quotient", r.max_lipschitz_quotient},
            {"worst_speed_ratio", r.worst_speed_ratio},
            {"worst_lipschitz_ratio", r.worst_lipschitz_ratio},
            {"pass", r.passed}};
}

ordered_json constants_json(const ConsensusCertificate& c) {
    return {{"K", c.K},       {"C0", c.C0},   {"psi0", c.psi0},     {"phi0", c.phi0},
            {"rho0", c.rho0}, {"lambda", c.Lambda}, {"C", c.C}, {"Ctilde", c.Ctilde},
            {"gamma", c.gamma}, {"D0", c.D0}};
}

ordered_json stability_json(const StabilityReport& s) {
    ordered_json sweep = ordered_json::array();
    for (const auto& cmp : s.sweep) {
        ordered_json cps = ordered_json::array();
        for (const auto& c : cmp.checkpoints) {
            cps.push_back({{"t", c.t},
                           {"follower_distance", c.follower_distance},
                           {"leader_distance", c.leader_distance},
                           {"numerator", c.numerator}});
        }
        sweep.push_back({{"epsilon", cmp.epsilon},
                         {"initial_follower", cmp.initial_follower},
                         {"initial_leader", cmp.initial_leader},
                         {"initial_discrepancy", cmp.initial_discrepancy},
                         {"checkpoints", cps},
                         {"ratios", cmp.ratios},
                         {"max_ratio", number_or_null(cmp.max_ratio)}});
    }
    return {{"case", s.which == MeanFieldCase::case1 ? "case1" : "case2"},
            {"p", order_json(s.p)},
            {"perturbation", perturbation_name(s.perturbation)},
            {"sweep", sweep},
            {"variation", finite_or_null(s.variation)},
            {"finite", s.finite},
            {"pass", s.passed}};
}

ordered_json limit_json(const LimitReport& l) {
    ordered_json levels = ordered_json::array();
    for (const auto& lv : l.levels) {
        levels.push_back({{"N", lv.atoms},
                          {"gamma", lv.certificate.gamma},
                          {"D0", lv.certificate.D0},
                          {"pass", lv.certificate.passed()}});
    }
    ordered_json rows = ordered_json::array();
    for (const auto& r : l.rows) {
        rows.push_back({{"N", r.atoms}, {"dinf", r.distances}});
    }
    return {{"checkpoints", l.checkpoints},
            {"levels", levels},
            {"table", rows},
            {"certificates_pass", l.certificates_pass},
            {"gamma_identical", l.gamma_identical},
            {"refinement_ok", l.refinement_ok},
            {"pass", l.passed()}};
}

}  // namespace

std::string report_csv(const RunReport& report) {
    std::string out = "t,d,bound,pass\n";
    for (const auto& c : report.certificate.checks) {
        out += g17(c.t);
        out += ',';
        out += g17(c.d);
        out += ',';
        out += g17(c.bound);
        out += c.pass ? ",1\n" : ",0\n";
    }
    return out;
}

std::string report_json(const RunReport& report) {
    ordered_json checks = ordered_json::array();
    ordered_json violations = ordered_json::array();
    for (const auto& c : report.certificate.checks) {
        ordered_json row = {{"t", c.t}, {"d", c.d}, {"bound", c.bound}, {"pass", c.pass}};
        if (!c.pass) {
            violations.push_back(row);
        }
        checks.push_back(std::move(row));
    }
    ordered_json j;
    j["mode"] = mode_name(report.mode);
    j["seed"] = report.seed ? ordered_json(*report.seed) : ordered_json();
    j["constants"] = constants_json(report.certificate);
    j["gamma_emp"] = number_or_null(report.gamma_emp);
    j["consensus_reached"] = !report.gamma_emp.has_value();
    j["certificate_pass"] = report.certificate.passed();
    j["exit_status"] = report.exit_status();
    j["D"] = report.D;
    j["violations"] = violations;
    j["checks"] = checks;
    if (report.velocity_case1) {
        j["velocity_bounds"] = velocity_json(*report.velocity_case1);
    }
    if (report.velocity_case2) {
        j["velocity_bounds"] = {{"leader_field", velocity_json(report.velocity_case2->leader_field)},
                                {"follower_field",
                                 velocity_json(report.velocity_case2->follower_field)}};
    }
    if (report.stability) {
        j["stability"] = stability_json(*report.stability);
    }
    if (report.limit) {
        j["limit"] = limit_json(*report.limit);
    }
    return j.dump(2) + "\n";
}

std::string to_json(const StabilityReport& report) { return stability_json(report).dump(2) + "\n"; }

std::string to_json(const LimitReport& report) { return limit_json(report).dump(2) + "\n"; }

void write_report_files(const RunReport& report, const std::filesystem::path& dir, bool csv,
                        bool json) {
    std::filesystem::create_directories(dir);
    const auto put = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + path.string());
        }
        out << text;
        if (!out) {
            throw Error("write failed for " + path.string());
        }
    };
    if (csv) {
        put(dir / "report.csv", report_csv(report));
    }
    if (json) {
        put(dir / "report.json", report_json(report));
    }
}

}  // namespace hkdelay
