#pragma once

#include <vector>

#include "hkdelay/history.hpp"
#include "hkdelay/kernel.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

/// psi: leader-leader, phi: follower-follower, rho: leader-to-follower.
struct KernelSet {
    Kernel psi;
    Kernel phi;
    Kernel rho;

    /// Uniform bound on all interaction strengths.
    double max_sup_bound() const;
    /// Largest of the three Lipschitz constants.
    double max_lipschitz() const;
};

/// The leader-follower particle system: m leaders, N followers in R^d.
struct ModelConfig {
    std::size_t dim = 1;
    KernelSet kernels;
    DelayConfig delays;
    std::vector<HistoryFunction> leader_histories;
    std::vector<HistoryFunction> follower_histories;

    std::size_t leader_count() const noexcept { return leader_histories.size(); }
    std::size_t follower_count() const noexcept { return follower_histories.size(); }

    /// Throws ConfigError unless m >= 1, N >= 1, all dimensions agree and
    /// every history starts at -tau. This is what the integrators need.
    void validate_structure() const;

    /// validate_structure() plus the population regime N > m >= 2.
    void validate() const;
};

/// Checks dimension and that the history starts at -tau (within 1e-12).
void validate_history(const HistoryFunction& h, std::size_t dim, double tau, const char* what);

}  // namespace hkdelay
