#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hkdelay/meanfield.hpp"
#include "hkdelay/particle.hpp"
#include "oracles.hpp"

namespace hk = hkdelay;

namespace {

hk::EmpiricalMeasure line(std::vector<double> xs) {
    return hk::EmpiricalMeasure::uniform(hk::PointSet(1, std::move(xs)));
}

hk::PointSet pts(std::vector<double> xs) { return hk::PointSet(1, std::move(xs)); }

std::vector<hk::HistoryFunction> constants(std::vector<double> xs, double tau) {
    std::vector<hk::HistoryFunction> out;
    for (double x : xs) out.push_back(hk::HistoryFunction::constant({x}, tau));
    return out;
}

const hk::Kernel one;

}  // namespace

TEST(EmpiricalMeasure, Validation) {
    EXPECT_THROW(hk::EmpiricalMeasure(pts({0.0, 1.0}), {0.5, 0.4}), hk::InvalidArgument);
    EXPECT_THROW(hk::EmpiricalMeasure(pts({0.0, 1.0}), {1.0, 0.0}), hk::InvalidArgument);
    EXPECT_THROW(hk::EmpiricalMeasure(pts({0.0, 1.0}), {1.0}), hk::InvalidArgument);
    EXPECT_THROW(hk::EmpiricalMeasure(hk::PointSet(), {}), hk::InvalidArgument);
    EXPECT_NO_THROW(hk::EmpiricalMeasure(pts({0.0, 1.0}), {0.25, 0.75}));
    EXPECT_TRUE(line({1, 2, 3}).is_uniform());
    EXPECT_FALSE(hk::EmpiricalMeasure(pts({0.0, 1.0}), {0.25, 0.75}).is_uniform());
}

TEST(VelocityCase1, WorkedExamples) {
    const hk::Vec x1{1.0};
    EXPECT_EQ(hk::velocity_case1(x1, line({0.0}), pts({0.0}), one, one)[0], -2.0);
    const hk::Vec x2{0.3};
    EXPECT_EQ(hk::velocity_case1(x2, line({0.3}), pts({0.3}), one, one)[0], 0.0);
    const hk::Vec x3{0.0};
    EXPECT_EQ(hk::velocity_case1(x3, line({-1.0, 1.0}), pts({0.0}), one, one)[0], 0.0);
    EXPECT_THROW(hk::velocity_case1(x3, line({0.0}), hk::PointSet::from_points({{0, 0}}), one, one),
                 hk::InvalidArgument);
}

TEST(VelocityCase2, WorkedExamples) {
    const hk::Vec x0{0.0}, x1{1.0};
    EXPECT_EQ(hk::velocity_case2_leader(x0, line({1.0}), one)[0], 1.0);
    EXPECT_EQ(hk::velocity_case2_leader(x1, line({1.0}), one)[0], 0.0);
    EXPECT_EQ(hk::velocity_case2_leader(x1, line({0.0, 2.0}), one)[0], 0.0);
    EXPECT_EQ(hk::velocity_case2_follower(x0, line({0.0}), line({1.0}), one, one)[0], 1.0);
    EXPECT_EQ(hk::velocity_case2_follower(x1, line({1.0}), line({1.0}), one, one)[0], 0.0);
    EXPECT_EQ(hk::velocity_case2_follower(x0, line({-1.0, 1.0}), line({0.0}), one, one)[0], 0.0);
}

TEST(VelocityCase1, WeightedIntegral) {
    const hk::EmpiricalMeasure nu(pts({0.0, 4.0}), {0.75, 0.25});
    const hk::Vec x{1.0};
    // 0.75 * (0 - 1) + 0.25 * (4 - 1) + (2 - 1)
    EXPECT_DOUBLE_EQ(hk::velocity_case1(x, nu, pts({2.0}), one, one)[0], 1.0);
}

TEST(EvolveCase1, SingleAtomDecay) {
    const auto ev = hk::evolve_case1(constants({0.0}, 0.0),
                                     hk::MeasureHistory::uniform(constants({0.5}, 0.0)), {},
                                     hk::DelayConfig(0.0, 0.0), 1.0, 1e-3);
    EXPECT_NEAR(ev.followers.atom(0, 1.0)[0], 0.1839397, 1e-6);
    EXPECT_NEAR(ev.followers.atom(0, 1.0)[0], 0.5 * std::exp(-1.0), 1e-9);
    EXPECT_EQ(ev.leaders_at(1.0)[0][0], 0.0);
}

TEST(EvolveCase1, ConsensusIsStationary) {
    const auto ev = hk::evolve_case1(constants({0.7, 0.7}, 0.5),
                                     hk::MeasureHistory::uniform(constants({0.7, 0.7, 0.7}, 0.5)),
                                     {}, hk::DelayConfig(0.5, 0.5), 2.0, 0.05);
    for (double t : {0.0, 0.33, 1.0, 2.0}) {
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(ev.followers.atom(k, t)[0], 0.7);
    }
}

TEST(EvolveCase2, SingleAtoms) {
    const auto ev = hk::evolve_case2(hk::MeasureHistory::uniform(constants({0.0}, 0.0)),
                                     hk::MeasureHistory::uniform(constants({1.0}, 0.0)), {},
                                     hk::DelayConfig(0.0, 0.0), 1.0, 1e-3);
    EXPECT_EQ(ev.leaders.atom(0, 1.0)[0], 0.0);
    EXPECT_NEAR(ev.followers.atom(0, 1.0)[0], 0.3678794, 1e-6);

    const auto same = hk::evolve_case2(hk::MeasureHistory::uniform(constants({2.0}, 0.25)),
                                       hk::MeasureHistory::uniform(constants({2.0}, 0.25)), {},
                                       hk::DelayConfig(0.25, 0.25), 1.0, 0.05);
    EXPECT_EQ(same.followers.atom(0, 1.0)[0], 2.0);
    EXPECT_EQ(same.leaders.atom(0, 1.0)[0], 2.0);
}

TEST(EvolveCase2, LeaderMeasureIgnoresFollowers) {
    const auto leaders = hk::MeasureHistory::uniform(constants({-1.0, 0.5, 2.0}, 0.25));
    const auto a = hk::evolve_case2(leaders, hk::MeasureHistory::uniform(constants({9.0}, 0.25)),
                                    {}, hk::DelayConfig(0.25, 0.25), 1.0, 0.05);
    const auto b = hk::evolve_case2(leaders, hk::MeasureHistory::uniform(constants({-4.0, 3.0}, 0.25)),
                                    {}, hk::DelayConfig(0.25, 0.25), 1.0, 0.05);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(a.leaders.atom(k, 1.0), b.leaders.atom(k, 1.0));
    }
}

TEST(ParticleConsistency, BitwiseOnRandomConfigs) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        const auto c = hk::testgen::random_model(rng);
        const double step = hk::testgen::default_step(c.delays);
        const auto particles = hk::simulate(c, 2.0, step);
        const auto followers = hk::MeasureHistory::uniform(c.follower_histories);
        const auto ev1 = hk::evolve_case1(c.leader_histories, followers, c.kernels, c.delays, 2.0, step);
        EXPECT_EQ(ev1.solution->value_table(), particles.value_table()) << trial;
        const auto ev2 = hk::evolve_case2(hk::MeasureHistory::uniform(c.leader_histories), followers,
                                          c.kernels, c.delays, 2.0, step);
        EXPECT_EQ(ev2.solution->value_table(), particles.value_table()) << trial;
    }
}

TEST(MeasureTrajectory, MassConservationAndPushForward) {
    std::mt19937_64 rng(5);
    const auto c = hk::testgen::random_model(rng);
    std::vector<double> w(c.follower_count());
    double total = 0.0;
    for (double& x : w) total += (x = hk::testgen::uniform(rng, 0.5, 2.0));
    for (double& x : w) x /= total;
    const hk::MeasureHistory g{c.follower_histories, w};
    const auto ev = hk::evolve_case1(c.leader_histories, g, c.kernels, c.delays, 1.0,
                                     hk::testgen::default_step(c.delays));
    for (double t : {0.0, 0.5, 1.0}) {
        const auto nu = ev.followers.at(t);
        EXPECT_EQ(nu.weights(), w);
        for (std::size_t k = 0; k < nu.size(); ++k) {
            hk::Vec direct(c.dim);
            ev.solution->eval_block_into(t, c.leader_count() + k, direct);
            EXPECT_EQ(nu.atoms().point(k), direct);
        }
    }
}

TEST(SupportDiameter, WorkedExamples) {
    EXPECT_EQ(hk::support_diameter_case1(pts({0.0, 2.0}), line({1.0})), 2.0);
    EXPECT_EQ(hk::support_diameter_case1(pts({0.5, 0.5}), line({0.5, 0.5})), 0.0);
    EXPECT_EQ(hk::support_diameter_case1(pts({0.0}), line({-1.0, 4.0})), 5.0);
    EXPECT_EQ(hk::support_diameter_case2(line({0.0}), line({3.0})), 3.0);
    EXPECT_EQ(hk::support_diameter_case2(line({1.5}), line({1.5})), 0.0);
    EXPECT_EQ(hk::support_diameter_case2(line({0.0, 1.0}), line({-2.0, 0.5})), 3.0);
}

TEST(SupportRadius, WorkedExamples) {
    const auto fixed = hk::evolve_case1(constants({0.0}, 0.0),
                                        hk::MeasureHistory::uniform(constants({-1.0, 1.0}, 0.0)),
                                        {}, hk::DelayConfig(0.0, 0.0), 1.0, 0.01);
    // Two atoms at +-1 contract toward each other, but the history max stays.
    for (double t : {0.0, 0.5, 1.0}) EXPECT_EQ(hk::support_radius(fixed, t), 1.0);

    const auto decay = hk::evolve_case1(constants({0.0}, 0.0),
                                        hk::MeasureHistory::uniform(constants({0.5}, 0.0)), {},
                                        hk::DelayConfig(0.0, 0.0), 1.0, 0.01);
    for (double t : {0.0, 0.5, 1.0}) EXPECT_EQ(hk::support_radius(decay, t), 0.5);

    const auto origin = hk::evolve_case2(hk::MeasureHistory::uniform(constants({0.0}, 0.0)),
                                         hk::MeasureHistory::uniform(constants({0.0}, 0.0)), {},
                                         hk::DelayConfig(0.0, 0.0), 1.0, 0.01);
    EXPECT_EQ(hk::support_radius(origin, 1.0), 0.0);
    EXPECT_THROW(hk::support_radius(origin, 2.0), hk::OutOfRange);
}

TEST(SupportRadius, NeverExceedsInitialRadius) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const auto c = hk::testgen::random_model(rng);
        const auto ev = hk::evolve_case1(c.leader_histories,
                                         hk::MeasureHistory::uniform(c.follower_histories),
                                         c.kernels, c.delays, 3.0, hk::testgen::default_step(c.delays));
        const double r0 = hk::support_radius(ev, 0.0);
        double prev = r0;
        for (double t = 0.25; t <= 3.0; t += 0.25) {
            const double r = hk::support_radius(ev, t);
            EXPECT_LE(r, r0 + 1e-6);
            EXPECT_GE(r, prev);  // running max over [-tau, t]
            prev = r;
        }
    }
}

TEST(VelocityBoundCheck, SingleAtomCase1) {
    const auto ev = hk::evolve_case1(constants({0.0}, 0.0),
                                     hk::MeasureHistory::uniform(constants({0.5}, 0.0)), {},
                                     hk::DelayConfig(0.0, 0.0), 1.0, 0.01);
    const auto r = hk::velocity_bound_check(ev, {}, hk::DelayConfig(0.0, 0.0));
    EXPECT_EQ(r.radius, 0.5);
    EXPECT_EQ(r.leader_bound, 0.5);
    EXPECT_DOUBLE_EQ(r.speed_bound, 2.0);
    // |X - x| + |x| <= 1.5 on the ball of radius 0.5
    EXPECT_LE(r.max_speed, 1.5 + 1e-12);
    EXPECT_TRUE(r.passed);
}

TEST(VelocityBoundCheck, ConsensusGivesZeroSpeed) {
    const auto ev = hk::evolve_case2(hk::MeasureHistory::uniform(constants({0.3, 0.3}, 0.25)),
                                     hk::MeasureHistory::uniform(constants({0.3, 0.3, 0.3}, 0.25)),
                                     {}, hk::DelayConfig(0.25, 0.25), 1.0, 0.05);
    const auto r = hk::velocity_bound_check(ev, {}, hk::DelayConfig(0.25, 0.25));
    EXPECT_TRUE(r.passed());
}

TEST(VelocityBoundCheck, SymmetricPairSpeedBound) {
    // Atom term alone at x = 1 is 1; with a leader at 1, R = C0 = 1 gives the bound 4.
    const hk::Vec x{1.0};
    EXPECT_EQ(std::abs(hk::velocity_case2_leader(x, line({-1.0, 1.0}), one)[0]), 1.0);
    const auto ev = hk::evolve_case1(constants({1.0}, 0.0),
                                     hk::MeasureHistory::uniform(constants({-1.0, 1.0}, 0.0)), {},
                                     hk::DelayConfig(0.0, 0.0), 1.0, 0.01);
    const auto r = hk::velocity_bound_check(ev, {}, hk::DelayConfig(0.0, 0.0));
    EXPECT_EQ(r.radius, 1.0);
    EXPECT_DOUBLE_EQ(r.speed_bound, 4.0);
    EXPECT_TRUE(r.passed);
}

TEST(VelocityBoundCheck, RandomRunsPass) {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = hk::testgen::random_model(rng);
        const double step = hk::testgen::default_step(c.delays);
        const auto ev1 = hk::evolve_case1(c.leader_histories,
                                          hk::MeasureHistory::uniform(c.follower_histories),
                                          c.kernels, c.delays, 2.0, step);
        EXPECT_TRUE(hk::velocity_bound_check(ev1, c.kernels, c.delays).passed);
        const auto ev2 = hk::evolve_case2(hk::MeasureHistory::uniform(c.leader_histories),
                                          hk::MeasureHistory::uniform(c.follower_histories),
                                          c.kernels, c.delays, 2.0, step);
        EXPECT_TRUE(hk::velocity_bound_check(ev2, c.kernels, c.delays).passed());
    }
}

TEST(MeanFieldDecay, CertificatePassesOnAtoms) {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = hk::testgen::random_model(rng);
        const auto ev = hk::evolve_case2(hk::MeasureHistory::uniform(c.leader_histories),
                                         hk::MeasureHistory::uniform(c.follower_histories),
                                         c.kernels, c.delays, 5.0, hk::testgen::default_step(c.delays));
        std::vector<double> times;
        for (int k = 0; k <= 20; ++k) times.push_back(0.25 * k);
        EXPECT_TRUE(hk::certify_trajectory(c.kernels, *ev.solution, times).passed()) << trial;
    }
}
