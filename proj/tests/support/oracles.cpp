#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hkdelay/wasserstein.hpp"

namespace hkdelay::oracle {

double brute_force_dp(const PointSet& a, const PointSet& b, double p) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        std::vector<double> entries;
        for (std::size_t i = 0; i < n; ++i) {
            entries.push_back(transport_cost(a[i], b[perm[i]], p));
        }
        best = std::min(best, assignment_total(entries));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double mean = best / static_cast<double>(n);
    return p == 1.0 ? mean : std::pow(mean, 1.0 / p);
}

double brute_force_dinf(const PointSet& a, const PointSet& b) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, distance(a[i], b[perm[i]]));
        }
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double brute_force_diameter(const std::vector<Vec>& points) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < points[i].size(); ++k) {
                const double diff = points[i][k] - points[j][k];
                s += diff * diff;
            }
            best = std::max(best, std::sqrt(s));
        }
    }
    return best;
}

double lattice_kernel_min(const Kernel& k, double radius, std::size_t dim, std::size_t per_axis) {
    double best = std::numeric_limits<double>::infinity();
    Vec x(dim, 0.0), y(dim, 0.0);
    for (std::size_t i = 0; i < per_axis; ++i) {
        x[0] = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(per_axis - 1);
        for (std::size_t j = 0; j < per_axis; ++j) {
            y[0] = -radius + 2.0 * radius * static_cast<double>(j) / static_cast<double>(per_axis - 1);
            best = std::min(best, k(x, y));
        }
    }
    return best;
}

Constants decay_constants_ld(long double K, long double Lambda, long double tau) {
    const long double a = (Lambda / (2.0L * K)) * (1.0L - std::exp(-K * tau));
    Constants c;
    c.C = 1.0L - a;
    c.Ctilde = 1.0L - std::exp(-2.0L * K * tau) * a;
    c.gamma = -std::log(c.Ctilde) / (3.0L * tau);
    return c;
}

double delayed_decay_exact(double t) {
    if (t <= 0.0) {
        return 1.0;
    }
    if (t <= 1.0) {
        return 1.0 - t;
    }
    // x' = -(1 - (t - 1)) = t - 2 on [1, 2], x(1) = 0
    return 0.5 * t * t - 2.0 * t + 1.5;
}

}  // namespace hkdelay::oracle

namespace hkdelay::testgen {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Kernel random_kernel(std::mt19937_64& rng) {
    switch (pick(rng, 0, 2)) {
        case 0:
            return Kernel::constant(uniform(rng, 0.5, 2.0));
        case 1:
            return Kernel::inverse_power(uniform(rng, 0.5, 2.0), uniform(rng, 0.25, 1.5));
        default:
            return Kernel::truncated_exponential(uniform(rng, 0.5, 1.5), uniform(rng, 1.0, 4.0),
                                                 uniform(rng, 0.05, 0.3));
    }
}

KernelSet random_kernels(std::mt19937_64& rng) {
    KernelSet k;
    k.psi = random_kernel(rng);
    k.phi = random_kernel(rng);
    k.rho = random_kernel(rng);
    return k;
}

namespace {

Vec ball_point(std::mt19937_64& rng, std::size_t dim, double radius) {
    for (;;) {
        Vec v(dim);
        for (double& x : v) {
            x = uniform(rng, -radius, radius);
        }
        if (norm(v) <= radius) {
            return v;
        }
    }
}

}  // namespace

HistoryFunction random_history(std::mt19937_64& rng, std::size_t dim, double tau, double radius) {
    if (pick(rng, 0, 1) == 0) {
        return HistoryFunction::constant(ball_point(rng, dim, radius), tau);
    }
    const Vec a = ball_point(rng, dim, radius);
    const Vec b = ball_point(rng, dim, radius);
    return HistoryFunction::linear(a, b, tau);
}

ModelConfig random_model(std::mt19937_64& rng, const ModelOptions& opts) {
    ModelConfig c;
    c.dim = opts.dims[pick(rng, 0, opts.dims.size() - 1)];
    c.kernels = random_kernels(rng);
    const double tau = opts.taus[pick(rng, 0, opts.taus.size() - 1)];
    const double other = pick(rng, 0, 1) == 0 ? tau : 0.5 * tau;
    c.delays = pick(rng, 0, 1) == 0 ? DelayConfig(tau, other) : DelayConfig(other, tau);
    const std::size_t m = pick(rng, opts.m_min, opts.m_max);
    const std::size_t n = pick(rng, std::max(opts.n_min, m + 1), std::max(opts.n_max, m + 1));
    const double radius = uniform(rng, 0.5, opts.radius_max);
    for (std::size_t i = 0; i < m; ++i) {
        c.leader_histories.push_back(random_history(rng, c.dim, tau, radius));
    }
    for (std::size_t i = 0; i < n; ++i) {
        c.follower_histories.push_back(random_history(rng, c.dim, tau, radius));
    }
    return c;
}

PointSet random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim, double scale) {
    std::vector<double> coords(n * dim);
    for (double& x : coords) {
        x = uniform(rng, -scale, scale);
    }
    return PointSet(dim, std::move(coords));
}

double default_step(const DelayConfig& delays) {
    double h = 0.0125;
    for (double lag : {delays.tau1, delays.tau2}) {
        if (lag > 0.0) {
            h = std::min(h, lag);
        }
    }
    return h;
}

}  // namespace hkdelay::testgen
