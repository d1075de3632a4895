#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hkdelay/dde.hpp"
#include "hkdelay/interaction.hpp"
#include "hkdelay/model_config.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

/// Finitely supported probability measure: positive weights summing to 1 (within 1e-12).
class EmpiricalMeasure {
public:
    EmpiricalMeasure(PointSet atoms, std::vector<double> weights);

    /// Every atom carries mass 1/n.
    static EmpiricalMeasure uniform(PointSet atoms);

    const PointSet& atoms() const noexcept { return atoms_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return atoms_.dim(); }
    bool is_uniform() const;

    AtomView view() const { return {atoms_.coords(), weights_, atoms_.dim()}; }

private:
    PointSet atoms_;
    std::vector<double> weights_;
};

/// Weights that are exactly 1.0/n each (the value used everywhere for uniform clouds).
std::vector<double> uniform_weights(std::size_t n);

/// Checks positivity and unit total mass; throws InvalidArgument.
void validate_weights(std::span<const double> weights);

/// Measure-valued initial datum on [-tau, 0], given atom by atom.
struct MeasureHistory {
    std::vector<HistoryFunction> atoms;
    std::vector<double> weights;

    static MeasureHistory uniform(std::vector<HistoryFunction> atoms);
    EmpiricalMeasure at(double s) const;
};

/// nu_t = X(t; .) # nu_0: atom k at time t is the value of its own characteristic.
///
/// Views a contiguous range of blocks inside a shared stacked solution; the
/// weights never change in time.
class MeasureTrajectory {
public:
    MeasureTrajectory(std::shared_ptr<const DenseSolution> solution, std::size_t first_block,
                      std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const { return solution_->block_dim(first_block_); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const DenseSolution& solution() const noexcept { return *solution_; }
    std::size_t first_block() const noexcept { return first_block_; }

    /// Characteristic X(t; x_k) of atom k.
    Vec atom(std::size_t k, double t) const;
    EmpiricalMeasure at(double t) const;

    /// Sampled max atom norm over [-tau, t].
    double support_radius(double t) const;

private:
    std::shared_ptr<const DenseSolution> solution_;
    std::size_t first_block_;
    std::vector<double> weights_;
};

/// v(x) = int phi(x,y)(y-x) nu(dy) + 1/m sum_j rho(x, y_j)(y_j - x), with
/// nu taken at t - tau2 and the leaders at t - tau1.
Vec velocity_case1(std::span<const double> x, const EmpiricalMeasure& nu_delayed,
                   const PointSet& leaders_delayed, const Kernel& phi, const Kernel& rho);

/// u(x) = int psi(x,y)(y-x) mu(dy), mu at t - tau1.
Vec velocity_case2_leader(std::span<const double> x, const EmpiricalMeasure& mu_delayed,
                          const Kernel& psi);

/// v(x) = int phi(x,y)(y-x) nu(dy) + int rho(x,y)(y-x) mu(dy).
Vec velocity_case2_follower(std::span<const double> x, const EmpiricalMeasure& nu_delayed,
                            const EmpiricalMeasure& mu_delayed, const Kernel& phi,
                            const Kernel& rho);

/// Finitely many leaders, follower population as a measure.
struct Case1Evolution {
    std::shared_ptr<const DenseSolution> solution;  ///< blocks: m leaders, then the atoms
    std::size_t leader_count = 0;
    MeasureTrajectory followers;

    PointSet leaders_at(double t) const;
};

/// Both populations as measures.
struct Case2Evolution {
    std::shared_ptr<const DenseSolution> solution;  ///< blocks: leader atoms, then follower atoms
    MeasureTrajectory leaders;
    MeasureTrajectory followers;
};

Case1Evolution evolve_case1(const std::vector<HistoryFunction>& leader_histories,
                            const MeasureHistory& followers, const KernelSet& kernels,
                            const DelayConfig& delays, double t_end, double step);

Case2Evolution evolve_case2(const MeasureHistory& leaders, const MeasureHistory& followers,
                            const KernelSet& kernels, const DelayConfig& delays, double t_end,
                            double step);

/// d^nu: max over follower-support pairs, leader pairs and leader-support pairs.
double support_diameter_case1(const PointSet& leaders, const EmpiricalMeasure& nu);
/// d^{mu,nu}
double support_diameter_case2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// R_X(t): sampled max atom norm over [-tau, t], and at least the leader history bound.
double support_radius(const Case1Evolution& evolution, double t);
/// Max of both measures' support radii over [-tau, t].
double support_radius(const Case2Evolution& evolution, double t);

struct VelocityCheckOptions {
    std::size_t time_samples = 16;
    std::size_t probe_points = 32;  ///< extra random probes in the support ball
    std::size_t lipschitz_pairs = 256;
    std::uint64_t seed = 7;
    double slack = 1e-9;
};

/// Measured vs. analytic bounds for one velocity field on one ball.
struct VelocityBoundReport {
    double radius = 0.0;           ///< R (or R1 / R2)
    double leader_bound = 0.0;     ///< C0 of the initial data (Case (i) only)
    double speed_bound = 0.0;      ///< bound on |v(x)| for |x| <= radius
    double lipschitz_bound = 0.0;  ///< Lipschitz constant on the ball
    double max_speed = 0.0;
    double max_lipschitz_quotient = 0.0;
    double worst_speed_ratio = 0.0;
    double worst_lipschitz_ratio = 0.0;
    bool passed = true;
};

/// Case (i): speed bound K(3R + C0) and Lipschitz constant 2R L_phi + 2K + L_rho (C0 + R).
VelocityBoundReport velocity_bound_check(const Case1Evolution& evolution,
                                         const KernelSet& kernels, const DelayConfig& delays,
                                         const VelocityCheckOptions& options = {});

struct Case2VelocityBoundReport {
    VelocityBoundReport leader_field;    ///< K1 = K + 2 R1 L, C1 = 2 K R1
    VelocityBoundReport follower_field;  ///< K2 = 2K + L(R1 + 3 R2), C2 = K(R1 + 3 R2)
    bool passed() const { return leader_field.passed && follower_field.passed; }
};

Case2VelocityBoundReport velocity_bound_check(const Case2Evolution& evolution,
                                              const KernelSet& kernels, const DelayConfig& delays,
                                              const VelocityCheckOptions& options = {});

}  // namespace hkdelay
