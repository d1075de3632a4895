#include "hkdelay/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hkdelay/interaction.hpp"

namespace hkdelay {
namespace {

/// Precomputed uniform weights 1/m and 1/N for the stacked particle layout.
class ParticleField {
public:
    explicit ParticleField(const ModelConfig& config)
        : config_(config),
          m_(config.leader_count()),
          n_(config.follower_count()),
          d_(config.dim),
          leader_weights_(m_, 1.0 / static_cast<double>(m_)),
          follower_weights_(n_, 1.0 / static_cast<double>(n_)) {}

    void operator()(std::span<const double> current, std::span<const double> at_tau1,
                    std::span<const double> at_tau2, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        const AtomView leaders_delayed{at_tau1.subspan(0, m_ * d_), leader_weights_, d_};
        const AtomView followers_delayed{at_tau2.subspan(m_ * d_, n_ * d_), follower_weights_, d_};
        for (std::size_t i = 0; i < m_; ++i) {
            accumulate_attraction(config_.kernels.psi, current.subspan(i * d_, d_),
                                  leaders_delayed, out.subspan(i * d_, d_));
        }
        for (std::size_t i = 0; i < n_; ++i) {
            const auto x = current.subspan((m_ + i) * d_, d_);
            const auto dx = out.subspan((m_ + i) * d_, d_);
            accumulate_attraction(config_.kernels.phi, x, followers_delayed, dx);
            accumulate_attraction(config_.kernels.rho, x, leaders_delayed, dx);
        }
    }

private:
    const ModelConfig& config_;
    std::size_t m_;
    std::size_t n_;
    std::size_t d_;
    std::vector<double> leader_weights_;
    std::vector<double> follower_weights_;
};

std::vector<double> stack(const ParticleState& s) {
    std::vector<double> out(s.leaders.coords().begin(), s.leaders.coords().end());
    out.insert(out.end(), s.followers.coords().begin(), s.followers.coords().end());
    return out;
}

void check_state_shape(const ModelConfig& config, const ParticleState& s) {
    if (s.leaders.size() != config.leader_count() || s.followers.size() != config.follower_count() ||
        s.leaders.dim() != config.dim || s.followers.dim() != config.dim) {
        throw InvalidArgument("particle_rhs: state shape does not match the configuration");
    }
}

/// All agents at all given times as one point set.
PointSet collect_points(const DenseSolution& sol, std::span<const double> times) {
    const std::size_t dim = sol.dim();
    std::vector<double> coords;
    coords.reserve(times.size() * dim);
    std::vector<double> buf(dim);
    for (double t : times) {
        sol.eval_into(t, buf);
        coords.insert(coords.end(), buf.begin(), buf.end());
    }
    return PointSet(sol.block_dim(0), std::move(coords));
}

void require_uniform_blocks(const DenseSolution& sol) {
    for (std::size_t b = 1; b < sol.block_count(); ++b) {
        if (sol.block_dim(b) != sol.block_dim(0)) {
            throw InvalidArgument("trajectory blocks have different dimensions");
        }
    }
}

}  // namespace

ParticleState state_at(const DenseSolution& sol, std::size_t leader_count, double t) {
    require_uniform_blocks(sol);
    const std::size_t d = sol.block_dim(0);
    if (leader_count > sol.block_count()) {
        throw InvalidArgument("state_at: more leaders than trajectory blocks");
    }
    Vec full = sol(t);
    const auto split = full.begin() + static_cast<std::ptrdiff_t>(leader_count * d);
    ParticleState s;
    s.leaders = PointSet(d, std::vector<double>(full.begin(), split));
    s.followers = PointSet(d, std::vector<double>(split, full.end()));
    s.t = t;
    return s;
}

void particle_rhs(const ModelConfig& config, double /*t*/, std::span<const double> current,
                  const LaggedStates& lagged, std::span<double> derivative) {
    const ParticleField field(config);
    field(current, lagged[0], lagged[1], derivative);
}

ParticleState particle_rhs(const ModelConfig& config, const ParticleState& current,
                           const ParticleState& at_leader_delay,
                           const ParticleState& at_follower_delay) {
    check_state_shape(config, current);
    check_state_shape(config, at_leader_delay);
    check_state_shape(config, at_follower_delay);
    const auto x = stack(current);
    const auto x1 = stack(at_leader_delay);
    const auto x2 = stack(at_follower_delay);
    std::vector<double> dx(x.size());
    const ParticleField field(config);
    field(x, x1, x2, dx);
    const std::size_t split = config.leader_count() * config.dim;
    ParticleState out;
    out.leaders = PointSet(config.dim, std::vector<double>(dx.begin(), dx.begin() + static_cast<std::ptrdiff_t>(split)));
    out.followers = PointSet(config.dim, std::vector<double>(dx.begin() + static_cast<std::ptrdiff_t>(split), dx.end()));
    out.t = current.t;
    return out;
}

DenseSolution simulate(const ModelConfig& config, double t_end, double step) {
    config.validate_structure();
    std::vector<HistoryFunction> history = config.leader_histories;
    history.insert(history.end(), config.follower_histories.begin(),
                   config.follower_histories.end());
    const ParticleField field(config);
    DelayedRhs rhs = [&field](double, std::span<const double> x, const LaggedStates& lagged,
                              std::span<double> dx) { field(x, lagged[0], lagged[1], dx); };
    return integrate(rhs, std::move(history), {config.delays.tau1, config.delays.tau2}, t_end,
                     step);
}

double diameter(const ParticleState& state) {
    double best = 0.0;
    const auto scan = [&best](const PointSet& a, const PointSet& b, bool same) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = same ? i + 1 : 0; j < b.size(); ++j) {
                best = std::max(best, distance(a[i], b[j]));
            }
        }
    };
    scan(state.followers, state.followers, true);
    scan(state.leaders, state.leaders, true);
    scan(state.leaders, state.followers, false);
    return best;
}

double trajectory_diameter(const DenseSolution& sol, double t) {
    require_uniform_blocks(sol);
    const double times[] = {t};
    return point_set_diameter(collect_points(sol, times));
}

std::vector<double> window_sample_times(const DenseSolution& sol, double a, double b,
                                        std::size_t sample_count) {
    if (a > b) {
        throw InvalidArgument("window_sample_times: window start exceeds its end");
    }
    if (sample_count < 2) {
        throw InvalidArgument("window_sample_times: need at least two samples per window");
    }
    std::vector<double> times;
    if (a == b) {
        times.push_back(a);
    } else {
        times.reserve(sample_count);
        for (std::size_t k = 0; k < sample_count; ++k) {
            times.push_back(k + 1 == sample_count
                                ? b
                                : a + (b - a) * static_cast<double>(k) /
                                          static_cast<double>(sample_count - 1));
        }
    }
    if (a < 0.0) {
        for (const auto& h : sol.history()) {
            for (double knot : h.times()) {
                if (knot > a && knot < std::min(b, 0.0)) {
                    times.push_back(knot);
                }
            }
        }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

double windowed_diameter(const DenseSolution& sol, std::size_t n, std::size_t sample_count) {
    require_uniform_blocks(sol);
    const double tau = -sol.history_start();
    const double hi = static_cast<double>(n) * tau;
    const double lo = hi - tau;
    if (hi > sol.t_end() * (1.0 + 1e-12) + 1e-12) {
        throw OutOfRange("windowed_diameter: window extends past the end of the solution");
    }
    const auto times = window_sample_times(sol, lo, std::min(hi, sol.t_end()), sample_count);
    return point_set_diameter(collect_points(sol, times));
}

ProjectionRange directional_extremes(const DenseSolution& sol, std::span<const double> v,
                                     double a, double b, std::size_t sample_count) {
    require_uniform_blocks(sol);
    if (a > b) {
        throw InvalidArgument("directional_extremes: degenerate window");
    }
    if (v.size() != sol.block_dim(0) || !(norm(v) > 0.0)) {
        throw InvalidArgument("directional_extremes: direction must be non-zero with the agent dimension");
    }
    const auto times = window_sample_times(sol, a, b, sample_count);
    const PointSet pts = collect_points(sol, times);
    ProjectionRange r{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double p = dot(pts[i], v);
        r.min = std::min(r.min, p);
        r.max = std::max(r.max, p);
    }
    return r;
}

double initial_bound(const DenseSolution& sol) {
    double c0 = 0.0;
    for (const auto& h : sol.history()) {
        c0 = std::max(c0, h.max_norm(8));
    }
    return c0;
}

DecayConstants decay_constants(double K, double Lambda, double tau) {
    if (!(K > 0.0) || !(Lambda > 0.0) || !std::isfinite(K) || !std::isfinite(Lambda)) {
        throw ConfigError("decay_constants: K and Lambda must be finite and positive");
    }
    if (Lambda > K) {
        throw ConfigError("decay_constants: Lambda exceeds K");
    }
    if (!std::isfinite(tau) || tau < 0.0) {
        throw InvalidArgument("decay_constants: tau must be finite and non-negative");
    }
    DecayConstants out;
    out.K = K;
    out.Lambda = Lambda;
    if (tau == 0.0) {
        out.C = 1.0;
        out.Ctilde = 1.0;
        out.gamma = Lambda / 6.0;
        return out;
    }
    const double ratio = Lambda / (2.0 * K);
    const double one_minus = -std::expm1(-K * tau);  // 1 - e^{-K tau}
    out.C = 1.0 - ratio * one_minus;
    const double contraction = std::exp(-2.0 * K * tau) * ratio * one_minus;
    out.Ctilde = 1.0 - contraction;
    out.gamma = -std::log1p(-contraction) / (3.0 * tau);
    return out;
}

bool ConsensusCertificate::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.pass; });
}

double ConsensusCertificate::bound_at(double t) const {
    return std::exp(-gamma * (t - 2.0 * tau)) * D0;
}

ConsensusCertificate certify_trajectory(const KernelSet& kernels, const DenseSolution& sol,
                                        std::span<const double> sample_times,
                                        const CertificateOptions& options) {
    require_uniform_blocks(sol);
    ConsensusCertificate cert;
    cert.tau = -sol.history_start();
    cert.K = kernels.max_sup_bound();
    cert.C0 = initial_bound(sol);
    if (options.c0_override) {
        if (*options.c0_override < cert.C0) {
            throw ConfigError("certificate: C0 override is smaller than the initial data bound");
        }
        cert.C0 = *options.c0_override;
    }
    const std::size_t d = sol.block_dim(0);
    cert.psi0 = kernel_min_on_ball(kernels.psi, cert.C0, d);
    cert.phi0 = kernel_min_on_ball(kernels.phi, cert.C0, d);
    cert.rho0 = kernel_min_on_ball(kernels.rho, cert.C0, d);
    cert.Lambda = std::min({cert.psi0, cert.phi0, cert.rho0});
    if (!(cert.Lambda > 0.0)) {
        throw ConfigError("certificate: Lambda is not positive");
    }
    const DecayConstants dc = decay_constants(cert.K, cert.Lambda, cert.tau);
    cert.C = dc.C;
    cert.Ctilde = dc.Ctilde;
    cert.gamma = dc.gamma;
    cert.D0 = windowed_diameter(sol, 0, options.samples_per_window);

    cert.checks.reserve(sample_times.size());
    for (double t : sample_times) {
        if (t < 0.0) {
            throw InvalidArgument("certificate: sample times must be non-negative");
        }
        CertificateCheck c;
        c.t = t;
        c.d = trajectory_diameter(sol, t);
        c.bound = cert.bound_at(t);
        c.pass = c.d <= c.bound + options.slack;
        cert.checks.push_back(c);
    }
    return cert;
}

ConsensusCertificate certificate(const ModelConfig& config, const DenseSolution& sol,
                                 std::span<const double> sample_times,
                                 const CertificateOptions& options) {
    if (sol.block_count() != config.leader_count() + config.follower_count()) {
        throw InvalidArgument("certificate: solution does not match the configuration");
    }
    return certify_trajectory(config.kernels, sol, sample_times, options);
}

}  // namespace hkdelay
