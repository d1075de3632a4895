#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hkdelay/dde.hpp"
#include "hkdelay/model_config.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

/// Leader opinions y_1..y_m and follower opinions x_1..x_N at time t.
struct ParticleState {
    PointSet leaders;
    PointSet followers;
    double t = 0.0;
};

/// Splits the stacked state of a trajectory whose first `leader_count` blocks are leaders.
ParticleState state_at(const DenseSolution& sol, std::size_t leader_count, double t);

/// Right-hand side of the delayed leader-follower system in stacked form
/// [y_1..y_m, x_1..x_N]. lagged[0] is the state at t - tau1, lagged[1] at t - tau2.
///
///   y_i' = 1/m sum_j psi(y_i, y_j(t-tau1)) (y_j(t-tau1) - y_i)
///   x_i' = 1/N sum_j phi(x_i, x_j(t-tau2)) (x_j(t-tau2) - x_i)
///        + 1/m sum_j rho(x_i, y_j(t-tau1)) (y_j(t-tau1) - x_i)
void particle_rhs(const ModelConfig& config, double t, std::span<const double> current,
                  const LaggedStates& lagged, std::span<double> derivative);

/// Same as above on structured states; returns the velocities as a ParticleState.
ParticleState particle_rhs(const ModelConfig& config, const ParticleState& current,
                           const ParticleState& at_leader_delay,
                           const ParticleState& at_follower_delay);

/// Integrates the particle system on [-tau, t_end]. Blocks are the m leaders then the N followers.
DenseSolution simulate(const ModelConfig& config, double t_end, double step);

/// Global diameter d(t): largest distance over leader-leader, follower-follower
/// and leader-follower pairs.
double diameter(const ParticleState& state);

/// d(t) for any stacked trajectory, treating every block as one agent.
double trajectory_diameter(const DenseSolution& sol, double t);

/// Times used to sample [a, b]: `sample_count` equispaced points plus any
/// history knots inside the window (histories are piecewise linear, so the
/// knots make sampled suprema over [-tau, 0] exact).
std::vector<double> window_sample_times(const DenseSolution& sol, double a, double b,
                                        std::size_t sample_count);

/// Sampled D_n: sup over s,t in [n tau - tau, n tau] of all pairwise agent distances.
double windowed_diameter(const DenseSolution& sol, std::size_t n, std::size_t sample_count);

struct ProjectionRange {
    double min = 0.0;
    double max = 0.0;
};

/// Sampled min / max of <agent(t), v> over all agents and t in [a, b].
ProjectionRange directional_extremes(const DenseSolution& sol, std::span<const double> v,
                                     double a, double b, std::size_t sample_count);

/// Largest agent norm over the initial histories (8 interior points per segment).
double initial_bound(const DenseSolution& sol);

/// Rate constants of the exponential consensus estimate.
struct DecayConstants {
    double K = 0.0;
    double Lambda = 0.0;
    double C = 0.0;
    double Ctilde = 0.0;
    double gamma = 0.0;
};

/// C = 1 - (L/2K)(1 - e^{-K tau}), C~ = 1 - e^{-2K tau}(L/2K)(1 - e^{-K tau}),
/// gamma = -ln(C~) / (3 tau). At tau = 0 the tau -> 0 limit gamma = Lambda/6 is used.
DecayConstants decay_constants(double K, double Lambda, double tau);

struct CertificateCheck {
    double t = 0.0;
    double d = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ConsensusCertificate {
    double K = 0.0;
    double C0 = 0.0;
    double psi0 = 0.0;
    double phi0 = 0.0;
    double rho0 = 0.0;
    double Lambda = 0.0;
    double C = 0.0;
    double Ctilde = 0.0;
    double gamma = 0.0;
    double D0 = 0.0;
    double tau = 0.0;
    std::vector<CertificateCheck> checks;

    bool passed() const;
    /// e^{-gamma (t - 2 tau)} D0
    double bound_at(double t) const;
};

struct CertificateOptions {
    std::size_t samples_per_window = 32;
    double slack = 1e-9;
    /// Replaces the data-derived C0 by a caller-supplied radius bound. Must not
    /// be smaller than the data's C0; a larger radius only weakens gamma.
    std::optional<double> c0_override;
};

/// Constants and decay checks for any stacked trajectory of the model family
/// (particles, or atoms of the mean-field systems).
ConsensusCertificate certify_trajectory(const KernelSet& kernels, const DenseSolution& sol,
                                        std::span<const double> sample_times,
                                        const CertificateOptions& options = {});

ConsensusCertificate certificate(const ModelConfig& config, const DenseSolution& sol,
                                 std::span<const double> sample_times,
                                 const CertificateOptions& options = {});

}  // namespace hkdelay
