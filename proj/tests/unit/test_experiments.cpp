#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hkdelay/experiments.hpp"
#include "hkdelay/wasserstein.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace hk = hkdelay;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

hk::Scenario minimal() { return hk::load_scenario(fs::path(HKDELAY_TEST_DATA) / "minimal_particle.json"); }

const char* kTwoLeaders = R"({
  "mode": "particle",
  "kernels": {"psi": {"family": "constant", "c": 1},
              "phi": {"family": "constant", "c": 1},
              "rho": {"family": "constant", "c": 1}},
  "delays": {"tau1": 0, "tau2": 0},
  "histories": {"kind": "explicit",
                "leaders": [[[0, 1.0]], [[0, -1.0]]],
                "followers": [[[0, 0.0]], [[0, 0.0]], [[0, 0.0]]]},
  "numerics": {"step": 0.001, "t_end": 5, "output_stride": 100}
})";

const char* kConsensus = R"({
  "mode": "particle",
  "kernels": {"psi": {"family": "inverse_power", "c": 1, "beta": 0.5},
              "phi": {"family": "constant", "c": 2},
              "rho": {"family": "truncated_exponential", "c": 1, "sigma": 1, "floor": 0.2}},
  "delays": {"tau1": 0.5, "tau2": 0.25},
  "histories": {"kind": "explicit",
                "leaders": [[[-0.5, [1, 2]], [0, [1, 2]]], [[-0.5, [1, 2]], [0, [1, 2]]]],
                "followers": [[[-0.5, [1, 2]], [0, [1, 2]]], [[-0.5, [1, 2]], [0, [1, 2]]],
                              [[-0.5, [1, 2]], [0, [1, 2]]]]},
  "numerics": {"step": 0.05, "t_end": 2}
})";

std::vector<std::string> csv_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    return rows;
}

}  // namespace

TEST(FitDecayRate, WorkedExamples) {
    std::vector<double> t, d1, d2, d3;
    for (int k = 0; k <= 50; ++k) {
        t.push_back(0.1 * k);
        d1.push_back(std::exp(-0.3 * t.back()));
        d2.push_back(2.0);
        d3.push_back(5.0 * std::exp(-t.back()));
    }
    EXPECT_NEAR(*hk::fit_decay_rate(t, d1, 0.0), 0.3, 1e-9);
    EXPECT_NEAR(*hk::fit_decay_rate(t, d2, 0.0), 0.0, 1e-9);
    EXPECT_NEAR(*hk::fit_decay_rate(t, d3, 1.0), 1.0, 1e-9);
}

TEST(FitDecayRate, FloorAndErrors) {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    EXPECT_FALSE(hk::fit_decay_rate(t, std::vector<double>{0.0, 0.0, 1e-15, 0.0}, 0.0).has_value());
    // The floor drops the tail; the remaining points are still exponential.
    const std::vector<double> d{1.0, std::exp(-2.0), 0.0, 0.0};
    EXPECT_NEAR(*hk::fit_decay_rate(t, d, 0.0), 2.0, 1e-12);
    EXPECT_THROW(hk::fit_decay_rate(t, std::vector<double>{1.0, 0.0, 0.0, 0.0}, 0.0),
                 hk::InvalidArgument);
    EXPECT_THROW(hk::fit_decay_rate(t, std::vector<double>{1.0, 1.0}, 0.0), hk::InvalidArgument);
}

TEST(Scenario, RejectsBadConfigs) {
    EXPECT_THROW(hk::parse_scenario("{"), hk::ConfigError);
    EXPECT_THROW(hk::parse_scenario(R"({"mode": "particle", "bogus": 1})"), hk::ConfigError);
    EXPECT_THROW(hk::parse_scenario(R"({"mode": "nonsense"})"), hk::ConfigError);
    // random generator without a seed
    EXPECT_THROW(hk::parse_scenario(R"({
      "mode": "particle",
      "kernels": {"psi": {"family": "constant", "c": 1}, "phi": {"family": "constant", "c": 1},
                  "rho": {"family": "constant", "c": 1}},
      "delays": {"tau1": 0.25, "tau2": 0.25},
      "population": {"m": 2, "n": 3},
      "histories": {"kind": "random", "radius": 1}
    })"), hk::ConfigError);
    EXPECT_THROW(hk::parse_scenario(R"({
      "mode": "particle",
      "kernels": {"psi": {"family": "constant", "c": -1}, "phi": {"family": "constant", "c": 1},
                  "rho": {"family": "constant", "c": 1}},
      "delays": {"tau1": 0.25, "tau2": 0.25},
      "population": {"m": 2, "n": 3},
      "histories": {"kind": "random", "seed": 1}
    })"), hk::Error);
}

TEST(Scenario, ParticleRegimeEnforcedOnRun) {
    auto s = minimal();
    s.n = 2;
    EXPECT_THROW(hk::run(s), hk::ConfigError);
    s = minimal();
    s.m = 1;
    EXPECT_THROW(hk::run(s), hk::ConfigError);
}

TEST(Scenario, PrefixSharingAcrossPopulationSizes) {
    const auto s = minimal();
    const auto small = hk::make_initial_data(s, 2, 4);
    const auto large = hk::make_initial_data(s, 2, 8);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(small.followers[k].values(), large.followers[k].values());
    }
    EXPECT_EQ(small.leaders[0].values(), large.leaders[0].values());
}

TEST(Run, MinimalParticleScenario) {
    const auto s = minimal();
    const auto report = hk::run(s);
    EXPECT_EQ(report.exit_status(), 0);
    EXPECT_TRUE(report.certificate_passed());
    const auto rows = csv_rows(hk::report_csv(report));
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0], "t,d,bound,pass");
    EXPECT_EQ(hk::report_csv(report).find('\r'), std::string::npos);
    const auto j = nlohmann::json::parse(hk::report_json(report));
    for (const char* key : {"constants", "gamma_emp", "checks", "mode", "seed"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    for (const char* key : {"K", "C0", "psi0", "phi0", "rho0", "lambda", "C", "Ctilde", "gamma", "D0"}) {
        EXPECT_TRUE(j["constants"].contains(key)) << key;
    }
    EXPECT_EQ(j["mode"], "particle");
    EXPECT_EQ(j["seed"], 42);
    EXPECT_EQ(j["checks"].size(), rows.size() - 1);
}

TEST(Run, CsvUsesSeventeenDigits) {
    const auto report = hk::run(minimal());
    const auto rows = csv_rows(hk::report_csv(report));
    // every float field round-trips exactly
    for (std::size_t r = 1; r < rows.size(); ++r) {
        std::istringstream in(rows[r]);
        std::string field;
        std::getline(in, field, ',');
        EXPECT_EQ(std::stod(field), report.certificate.checks[r - 1].t);
        std::getline(in, field, ',');
        EXPECT_EQ(std::stod(field), report.certificate.checks[r - 1].d);
    }
}

TEST(Run, ConsensusDataGivesZeroDiameter) {
    const auto report = hk::run(hk::parse_scenario(kConsensus));
    EXPECT_EQ(report.exit_status(), 0);
    for (const auto& c : report.certificate.checks) EXPECT_EQ(c.d, 0.0);
    EXPECT_FALSE(report.gamma_emp.has_value());
    const auto j = nlohmann::json::parse(hk::report_json(report));
    EXPECT_TRUE(j["gamma_emp"].is_null());
    EXPECT_EQ(j["consensus_reached"], true);
}

TEST(Run, TwoLeaderAnalyticRate) {
    const auto report = hk::run(hk::parse_scenario(kTwoLeaders));
    EXPECT_EQ(report.exit_status(), 0);
    ASSERT_TRUE(report.gamma_emp.has_value());
    EXPECT_NEAR(*report.gamma_emp, 1.0, 1e-3);
    EXPECT_GE(*report.gamma_emp, report.certificate.gamma - 1e-3);
}

TEST(Run, EmpiricalRateAtLeastGuaranteed) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto s = minimal();
        s.set_seed(seed);
        const auto report = hk::run(s);
        ASSERT_EQ(report.exit_status(), 0);
        if (report.gamma_emp) EXPECT_GE(*report.gamma_emp, report.certificate.gamma - 1e-3);
    }
}

TEST(Run, MeanFieldModes) {
    for (auto mode : {hk::Mode::meanfield_case1, hk::Mode::meanfield_case2}) {
        auto s = minimal();
        s.mode = mode;
        s.m = 2;
        s.n = 6;
        s.numerics.t_end = 2.0;
        const auto report = hk::run(s);
        EXPECT_EQ(report.exit_status(), 0) << hk::mode_name(mode);
        EXPECT_TRUE(report.velocity_case1.has_value() || report.velocity_case2.has_value());
    }
}

TEST(Run, Reproducible) {
    const auto s = minimal();
    const auto a = hk::run(s);
    const auto b = hk::run(s);
    EXPECT_EQ(hk::report_csv(a), hk::report_csv(b));
    EXPECT_EQ(hk::report_json(a), hk::report_json(b));
    const fs::path dir = fs::temp_directory_path() / "hkdelay_repro_test";
    fs::remove_all(dir);
    hk::write_report_files(a, dir / "a", true, true);
    hk::write_report_files(b, dir / "b", true, true);
    EXPECT_EQ(slurp(dir / "a" / "report.csv"), slurp(dir / "b" / "report.csv"));
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    EXPECT_EQ(slurp(dir / "a" / "report.csv"), hk::report_csv(a));
    fs::remove_all(dir);
}

TEST(Stability, ZeroPerturbationGivesZeroDistances) {
    auto s = minimal();
    s.n = 6;
    const auto base = hk::make_initial_data(s);
    const auto same = hk::perturb(base, 0.0, hk::Perturbation::random, 1, s.dim);
    const auto cmp = hk::compare_runs(hk::MeanFieldCase::case1, base, same, s.kernels, s.delays,
                                      2.0, 0.0125, 32, 2.0);
    EXPECT_EQ(cmp.initial_discrepancy, 0.0);
    for (const auto& c : cmp.checkpoints) {
        EXPECT_EQ(c.follower_distance, 0.0);
        EXPECT_EQ(c.leader_distance, 0.0);
    }
    EXPECT_FALSE(cmp.max_ratio.has_value());
    EXPECT_TRUE(cmp.ratios.empty());
}

TEST(Stability, TranslationRatioIsOne) {
    auto s = minimal();
    s.n = 6;
    const auto base = hk::make_initial_data(s);
    const auto moved = hk::perturb(base, 1e-3, hk::Perturbation::translation, 9, s.dim);
    for (auto which : {hk::MeanFieldCase::case1, hk::MeanFieldCase::case2}) {
        const auto cmp = hk::compare_runs(which, base, moved, s.kernels, s.delays, 2.0, 0.0125, 32,
                                          hk::kInfiniteOrder);
        ASSERT_EQ(cmp.ratios.size(), 5u);
        for (double r : cmp.ratios) EXPECT_NEAR(r, 1.0, 1e-9);
        EXPECT_EQ(cmp.checkpoints.front().t, 0.0);
        EXPECT_EQ(cmp.checkpoints.back().t, 2.0);
    }
}

TEST(Stability, RandomSweepLinearResponse) {
    auto s = minimal();
    s.mode = hk::Mode::stability_case1;
    s.n = 6;
    s.kernels.psi = hk::Kernel::inverse_power(1.0, 1.0);
    s.kernels.phi = hk::Kernel::inverse_power(1.0, 1.0);
    s.kernels.rho = hk::Kernel::inverse_power(1.0, 1.0);
    s.numerics.t_end = 2.0;
    for (double p : {1.0, 2.0, hk::kInfiniteOrder}) {
        const auto r = hk::stability_study(s, 1e-3, p);
        EXPECT_TRUE(r.finite);
        EXPECT_TRUE(r.passed) << "p=" << p << " variation " << r.variation;
        EXPECT_EQ(r.sweep.size(), 3u);
        EXPECT_EQ(r.sweep[1].epsilon, 2e-3);
    }
}

TEST(Stability, LeaderDiscrepancy) {
    const hk::PointSet a(1, std::vector<double>{0.0, 0.0});
    const hk::PointSet b(1, std::vector<double>{1.0, 3.0});
    EXPECT_DOUBLE_EQ(hk::leader_discrepancy(a, b, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(hk::leader_discrepancy(a, b, 2.0), std::sqrt(5.0));
    EXPECT_EQ(hk::leader_discrepancy(a, b, hk::kInfiniteOrder), 3.0);
}

TEST(Limit, IdenticalAtomsGiveZeroDistances) {
    auto s = hk::parse_scenario(kConsensus);
    s.mode = hk::Mode::limit_study;
    const auto r = hk::limit_study(s, 2, 3);
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) {
        for (double d : row.distances) EXPECT_EQ(d, 0.0);
    }
    EXPECT_TRUE(r.passed());
}

TEST(Limit, InitialDistanceMatchesOracle) {
    auto s = minimal();
    s.mode = hk::Mode::limit_study;
    s.numerics.t_end = 1.0;
    const auto r = hk::limit_study(s, 4, 2);
    ASSERT_EQ(r.rows.size(), 1u);
    const auto small = hk::make_initial_data(s, s.m, 4);
    const auto large = hk::make_initial_data(s, s.m, 8);
    std::vector<double> dup, big;
    for (const auto& h : small.followers) {
        dup.push_back(h(0.0)[0]);
        dup.push_back(h(0.0)[0]);
    }
    for (const auto& h : large.followers) big.push_back(h(0.0)[0]);
    EXPECT_EQ(r.checkpoints.front(), 0.0);
    EXPECT_EQ(r.rows[0].distances.front(),
              hk::oracle::brute_force_dinf(hk::PointSet(1, dup), hk::PointSet(1, big)));
}

TEST(Limit, CertificatesShareGamma) {
    auto s = minimal();
    s.mode = hk::Mode::limit_study;
    s.numerics.t_end = 3.0;
    const auto r = hk::limit_study(s, 4, 3);
    ASSERT_EQ(r.levels.size(), 3u);
    EXPECT_TRUE(r.certificates_pass);
    EXPECT_TRUE(r.gamma_identical);
    EXPECT_EQ(r.levels[0].certificate.gamma, r.levels[2].certificate.gamma);
    EXPECT_EQ(r.levels[2].atoms, 16u);
    EXPECT_TRUE(r.passed());
}
