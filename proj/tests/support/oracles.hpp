#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the routine it is meant to check.

#include <cstddef>
#include <random>
#include <vector>

#include "hkdelay/meanfield.hpp"
#include "hkdelay/model_config.hpp"

namespace hkdelay::oracle {

/// min over all n! permutations of the ascending-order sum of |a_i - b_s(i)|^p,
/// returned as (cost / n)^{1/p}. Uses the library's float cost model.
double brute_force_dp(const PointSet& a, const PointSet& b, double p);

/// min over all permutations of max_i |a_i - b_s(i)|.
double brute_force_dinf(const PointSet& a, const PointSet& b);

/// Plain double loop over all pairs of the given point lists.
double brute_force_diameter(const std::vector<Vec>& points);

/// Kernel minimum over a lattice of points along the first axis of the ball
/// (both arguments independently), `per_axis` points each.
double lattice_kernel_min(const Kernel& k, double radius, std::size_t dim, std::size_t per_axis);

/// Closed-form constants evaluated in long double with the textbook formulas.
struct Constants {
    long double C;
    long double Ctilde;
    long double gamma;
};
Constants decay_constants_ld(long double K, long double Lambda, long double tau);

/// x'(t) = -x(t-1), x = 1 on [-1, 0]; method of steps on [0, 2].
double delayed_decay_exact(double t);

}  // namespace hkdelay::oracle

namespace hkdelay::testgen {

struct ModelOptions {
    std::size_t m_min = 2, m_max = 3;
    std::size_t n_min = 4, n_max = 16;
    std::vector<std::size_t> dims{1, 2, 3};
    std::vector<double> taus{0.0, 0.25, 1.0};
    double radius_max = 5.0;
};

/// One of the three builtin families with random parameters.
Kernel random_kernel(std::mt19937_64& rng);
KernelSet random_kernels(std::mt19937_64& rng);

/// Random constant or linear history with endpoints in the ball of `radius`.
HistoryFunction random_history(std::mt19937_64& rng, std::size_t dim, double tau, double radius);

/// Random configuration following `opts`; tau2 is tau or tau/2 and tau1 the other value.
ModelConfig random_model(std::mt19937_64& rng, const ModelOptions& opts = {});

/// n uniform points in [-scale, scale]^dim.
PointSet random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim, double scale = 1.0);

double uniform(std::mt19937_64& rng, double lo, double hi);
std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi);

/// Integration step used by the randomized suites: 0.0125 or the smallest positive lag.
double default_step(const DelayConfig& delays);

}  // namespace hkdelay::testgen
