#include "hkdelay/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hkdelay/particle.hpp"

namespace hkdelay {

std::vector<double> uniform_weights(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

void validate_weights(std::span<const double> weights) {
    if (weights.empty()) {
        throw InvalidArgument("empirical measure: no atoms");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || !(w > 0.0)) {
            throw InvalidArgument("empirical measure: weights must be positive and finite");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidArgument("empirical measure: weights must sum to 1");
    }
}

EmpiricalMeasure::EmpiricalMeasure(PointSet atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) {
        throw InvalidArgument("empirical measure: atom and weight counts differ");
    }
    validate_weights(weights_);
    require_finite(atoms_.coords(), "empirical measure atoms");
}

EmpiricalMeasure EmpiricalMeasure::uniform(PointSet atoms) {
    const std::size_t n = atoms.size();
    return EmpiricalMeasure(std::move(atoms), uniform_weights(n));
}

bool EmpiricalMeasure::is_uniform() const {
    const double w = 1.0 / static_cast<double>(weights_.size());
    return std::all_of(weights_.begin(), weights_.end(), [w](double v) { return v == w; });
}

MeasureHistory MeasureHistory::uniform(std::vector<HistoryFunction> atoms) {
    MeasureHistory h;
    h.weights = uniform_weights(atoms.size());
    h.atoms = std::move(atoms);
    return h;
}

EmpiricalMeasure MeasureHistory::at(double s) const {
    if (atoms.empty()) {
        throw InvalidArgument("MeasureHistory: no atoms");
    }
    const std::size_t d = atoms.front().dim();
    std::vector<double> coords(atoms.size() * d);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        atoms[k].eval_into(s, std::span<double>(coords).subspan(k * d, d));
    }
    return EmpiricalMeasure(PointSet(d, std::move(coords)), weights);
}

MeasureTrajectory::MeasureTrajectory(std::shared_ptr<const DenseSolution> solution,
                                     std::size_t first_block, std::vector<double> weights)
    : solution_(std::move(solution)), first_block_(first_block), weights_(std::move(weights)) {
    if (!solution_ || first_block_ + weights_.size() > solution_->block_count()) {
        throw InvalidArgument("MeasureTrajectory: block range outside the solution");
    }
    validate_weights(weights_);
}

Vec MeasureTrajectory::atom(std::size_t k, double t) const {
    Vec out(dim());
    solution_->eval_block_into(t, first_block_ + k, out);
    return out;
}

EmpiricalMeasure MeasureTrajectory::at(double t) const {
    const std::size_t d = dim();
    std::vector<double> coords(size() * d);
    for (std::size_t k = 0; k < size(); ++k) {
        solution_->eval_block_into(t, first_block_ + k, std::span<double>(coords).subspan(k * d, d));
    }
    return EmpiricalMeasure(PointSet(d, std::move(coords)), weights_);
}

namespace {

/// Norm samples of blocks [first, first+count) over [-tau, t]: history samples
/// (with interior points) and every grid node up to t, plus t itself.
double blocks_radius(const DenseSolution& sol, std::size_t first, std::size_t count, double t) {
    if (t > sol.t_end() * (1.0 + 1e-12) + 1e-12) {
        throw OutOfRange("support_radius: t beyond the end of the solution");
    }
    double r = 0.0;
    for (std::size_t b = first; b < first + count; ++b) {
        r = std::max(r, sol.history()[b].max_norm(8));
    }
    const auto& times = sol.grid_times();
    for (std::size_t k = 1; k < times.size() && times[k] <= t; ++k) {
        auto node = sol.node_value(k);
        for (std::size_t b = first; b < first + count; ++b) {
            r = std::max(r, norm(node.subspan(sol.block_offset(b), sol.block_dim(b))));
        }
    }
    if (t > 0.0) {
        Vec buf(sol.block_dim(first));
        for (std::size_t b = first; b < first + count; ++b) {
            sol.eval_block_into(t, b, buf);
            r = std::max(r, norm(buf));
        }
    }
    return r;
}

void stack_histories(std::vector<HistoryFunction>& out, const std::vector<HistoryFunction>& src) {
    out.insert(out.end(), src.begin(), src.end());
}

void check_measure_history(const MeasureHistory& h, std::size_t dim, double tau, const char* what) {
    if (h.atoms.empty() || h.atoms.size() != h.weights.size()) {
        throw InvalidArgument(std::string(what) + ": atom and weight counts differ or are empty");
    }
    validate_weights(h.weights);
    for (const auto& a : h.atoms) {
        validate_history(a, dim, tau, what);
    }
}

}  // namespace

double MeasureTrajectory::support_radius(double t) const {
    return blocks_radius(*solution_, first_block_, size(), t);
}

Vec velocity_case1(std::span<const double> x, const EmpiricalMeasure& nu_delayed,
                   const PointSet& leaders_delayed, const Kernel& phi, const Kernel& rho) {
    if (nu_delayed.size() == 0) {
        throw InvalidArgument("velocity_case1: empty measure");
    }
    if (leaders_delayed.size() == 0 || leaders_delayed.dim() != nu_delayed.dim() ||
        x.size() != nu_delayed.dim()) {
        throw InvalidArgument("velocity_case1: leader / point dimensions do not match the measure");
    }
    Vec v(x.size(), 0.0);
    const auto lw = uniform_weights(leaders_delayed.size());
    accumulate_attraction(phi, x, nu_delayed.view(), v);
    accumulate_attraction(rho, x, AtomView{leaders_delayed.coords(), lw, leaders_delayed.dim()}, v);
    return v;
}

Vec velocity_case2_leader(std::span<const double> x, const EmpiricalMeasure& mu_delayed,
                          const Kernel& psi) {
    if (mu_delayed.size() == 0 || x.size() != mu_delayed.dim()) {
        throw InvalidArgument("velocity_case2_leader: empty measure or dimension mismatch");
    }
    Vec v(x.size(), 0.0);
    accumulate_attraction(psi, x, mu_delayed.view(), v);
    return v;
}

Vec velocity_case2_follower(std::span<const double> x, const EmpiricalMeasure& nu_delayed,
                            const EmpiricalMeasure& mu_delayed, const Kernel& phi,
                            const Kernel& rho) {
    if (nu_delayed.size() == 0 || mu_delayed.size() == 0 || x.size() != nu_delayed.dim() ||
        x.size() != mu_delayed.dim()) {
        throw InvalidArgument("velocity_case2_follower: empty measure or dimension mismatch");
    }
    Vec v(x.size(), 0.0);
    accumulate_attraction(phi, x, nu_delayed.view(), v);
    accumulate_attraction(rho, x, mu_delayed.view(), v);
    return v;
}

PointSet Case1Evolution::leaders_at(double t) const {
    const std::size_t d = solution->block_dim(0);
    std::vector<double> coords(leader_count * d);
    for (std::size_t i = 0; i < leader_count; ++i) {
        solution->eval_block_into(t, i, std::span<double>(coords).subspan(i * d, d));
    }
    return PointSet(d, std::move(coords));
}

Case1Evolution evolve_case1(const std::vector<HistoryFunction>& leader_histories,
                            const MeasureHistory& followers, const KernelSet& kernels,
                            const DelayConfig& delays, double t_end, double step) {
    if (leader_histories.empty()) {
        throw InvalidArgument("evolve_case1: need at least one leader");
    }
    const std::size_t d = leader_histories.front().dim();
    const double tau = delays.tau();
    for (const auto& h : leader_histories) {
        validate_history(h, d, tau, "leader");
    }
    check_measure_history(followers, d, tau, "follower measure");

    const std::size_t m = leader_histories.size();
    const std::size_t n = followers.atoms.size();
    const auto leader_weights = uniform_weights(m);
    const std::vector<double>& atom_weights = followers.weights;

    std::vector<HistoryFunction> blocks;
    blocks.reserve(m + n);
    stack_histories(blocks, leader_histories);
    stack_histories(blocks, followers.atoms);

    // Leaders: finite delayed block. Atoms: dX/dt = v_t(X) with nu at t - tau2.
    DelayedRhs rhs = [&](double, std::span<const double> x, const LaggedStates& lagged,
                         std::span<double> dx) {
        std::fill(dx.begin(), dx.end(), 0.0);
        const AtomView leaders_delayed{lagged[0].subspan(0, m * d), leader_weights, d};
        const AtomView nu_delayed{lagged[1].subspan(m * d, n * d), atom_weights, d};
        for (std::size_t i = 0; i < m; ++i) {
            accumulate_attraction(kernels.psi, x.subspan(i * d, d), leaders_delayed,
                                  dx.subspan(i * d, d));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const auto xk = x.subspan((m + k) * d, d);
            const auto vk = dx.subspan((m + k) * d, d);
            accumulate_attraction(kernels.phi, xk, nu_delayed, vk);
            accumulate_attraction(kernels.rho, xk, leaders_delayed, vk);
        }
    };
    auto sol = std::make_shared<const DenseSolution>(
        integrate(rhs, std::move(blocks), {delays.tau1, delays.tau2}, t_end, step));
    MeasureTrajectory traj(sol, m, atom_weights);
    return Case1Evolution{sol, m, std::move(traj)};
}

Case2Evolution evolve_case2(const MeasureHistory& leaders, const MeasureHistory& followers,
                            const KernelSet& kernels, const DelayConfig& delays, double t_end,
                            double step) {
    if (leaders.atoms.empty()) {
        throw InvalidArgument("evolve_case2: empty leader measure");
    }
    const std::size_t d = leaders.atoms.front().dim();
    const double tau = delays.tau();
    check_measure_history(leaders, d, tau, "leader measure");
    check_measure_history(followers, d, tau, "follower measure");

    const std::size_t m = leaders.atoms.size();
    const std::size_t n = followers.atoms.size();
    const std::vector<double>& mu_weights = leaders.weights;
    const std::vector<double>& nu_weights = followers.weights;

    std::vector<HistoryFunction> blocks;
    blocks.reserve(m + n);
    stack_histories(blocks, leaders.atoms);
    stack_histories(blocks, followers.atoms);

    // The mu block is autonomous: leader atoms never see the followers.
    DelayedRhs rhs = [&](double, std::span<const double> x, const LaggedStates& lagged,
                         std::span<double> dx) {
        std::fill(dx.begin(), dx.end(), 0.0);
        const AtomView mu_delayed{lagged[0].subspan(0, m * d), mu_weights, d};
        const AtomView nu_delayed{lagged[1].subspan(m * d, n * d), nu_weights, d};
        for (std::size_t i = 0; i < m; ++i) {
            accumulate_attraction(kernels.psi, x.subspan(i * d, d), mu_delayed, dx.subspan(i * d, d));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const auto zk = x.subspan((m + k) * d, d);
            const auto vk = dx.subspan((m + k) * d, d);
            accumulate_attraction(kernels.phi, zk, nu_delayed, vk);
            accumulate_attraction(kernels.rho, zk, mu_delayed, vk);
        }
    };
    auto sol = std::make_shared<const DenseSolution>(
        integrate(rhs, std::move(blocks), {delays.tau1, delays.tau2}, t_end, step));
    MeasureTrajectory mu(sol, 0, mu_weights);
    MeasureTrajectory nu(sol, m, nu_weights);
    return Case2Evolution{sol, std::move(mu), std::move(nu)};
}

double support_diameter_case1(const PointSet& leaders, const EmpiricalMeasure& nu) {
    if (nu.size() == 0) {
        throw InvalidArgument("support_diameter_case1: empty measure");
    }
    ParticleState s;
    s.leaders = leaders;
    s.followers = nu.atoms();
    return diameter(s);
}

double support_diameter_case2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (nu.size() == 0 || mu.size() == 0) {
        throw InvalidArgument("support_diameter_case2: empty measure");
    }
    ParticleState s;
    s.leaders = mu.atoms();
    s.followers = nu.atoms();
    return diameter(s);
}

double support_radius(const Case1Evolution& evolution, double t) {
    const DenseSolution& sol = *evolution.solution;
    double leader_bound = 0.0;  // C0^y from the leader histories
    for (std::size_t i = 0; i < evolution.leader_count; ++i) {
        leader_bound = std::max(leader_bound, sol.history()[i].max_norm(8));
    }
    return std::max(leader_bound, evolution.followers.support_radius(t));
}

double support_radius(const Case2Evolution& evolution, double t) {
    return std::max(evolution.leaders.support_radius(t), evolution.followers.support_radius(t));
}

namespace {

PointSet random_ball_points(std::size_t count, std::size_t dim, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointSet pts(dim, count);
    for (std::size_t i = 0; i < count; ++i) {
        auto row = pts.row(i);
        double n2 = 0.0;
        for (auto& c : row) {
            c = gauss(rng);
            n2 += c * c;
        }
        const double n = std::sqrt(n2);
        const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
        for (auto& c : row) {
            c = n > 0.0 ? c / n * r : 0.0;
        }
    }
    return pts;
}

std::vector<double> check_times(double t_end, std::size_t count) {
    std::vector<double> times;
    if (count < 2 || t_end == 0.0) {
        times.push_back(t_end);
        return times;
    }
    for (std::size_t k = 0; k < count; ++k) {
        times.push_back(k + 1 == count ? t_end
                                       : t_end * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    return times;
}

/// Accumulates speed and Lipschitz quotients of `field` at the given probes.
template <class Field>
void probe_field(const Field& field, const PointSet& atoms_now, std::size_t dim, double radius,
                 const VelocityCheckOptions& options, std::mt19937_64& rng,
                 VelocityBoundReport& report) {
    const PointSet extra = random_ball_points(options.probe_points, dim, radius, rng);
    std::vector<double> probe_coords(atoms_now.coords().begin(), atoms_now.coords().end());
    probe_coords.insert(probe_coords.end(), extra.coords().begin(), extra.coords().end());
    const PointSet probes(dim, std::move(probe_coords));

    std::vector<Vec> velocities;
    velocities.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        velocities.push_back(field(probes[i]));
        const double speed = norm(velocities.back());
        report.max_speed = std::max(report.max_speed, speed);
        if (speed > report.speed_bound + options.slack) {
            report.passed = false;
        }
    }
    if (probes.size() < 2) {
        return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, probes.size() - 1);
    for (std::size_t p = 0; p < options.lipschitz_pairs; ++p) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        const double gap = distance(probes[i], probes[j]);
        if (!(gap > 0.0)) {
            continue;
        }
        const double dv = distance(velocities[i], velocities[j]);
        report.max_lipschitz_quotient = std::max(report.max_lipschitz_quotient, dv / gap);
        if (dv > report.lipschitz_bound * gap + options.slack) {
            report.passed = false;
        }
    }
}

void finish_ratios(VelocityBoundReport& r) {
    r.worst_speed_ratio = r.speed_bound > 0.0 ? r.max_speed / r.speed_bound : 0.0;
    r.worst_lipschitz_ratio = r.lipschitz_bound > 0.0 ? r.max_lipschitz_quotient / r.lipschitz_bound : 0.0;
}

}  // namespace

VelocityBoundReport velocity_bound_check(const Case1Evolution& evolution,
                                         const KernelSet& kernels, const DelayConfig& delays,
                                         const VelocityCheckOptions& options) {
    const DenseSolution& sol = *evolution.solution;
    const double t_end = sol.t_end();
    const double K = kernels.max_sup_bound();
    VelocityBoundReport report;
    report.radius = support_radius(evolution, t_end);
    // C0 bounds every initial datum, leaders and atoms alike.
    report.leader_bound = support_radius(evolution, 0.0);
    const double R = report.radius;
    const double C0 = report.leader_bound;
    report.lipschitz_bound = 2.0 * R * kernels.phi.lipschitz_const() + 2.0 * K +
                             kernels.rho.lipschitz_const() * (C0 + R);
    report.speed_bound = K * (3.0 * R + C0);

    std::mt19937_64 rng(options.seed);
    const std::size_t d = evolution.followers.dim();
    for (double t : check_times(t_end, options.time_samples)) {
        const EmpiricalMeasure nu = evolution.followers.at(std::max(t - delays.tau2, sol.history_start()));
        const PointSet leaders = evolution.leaders_at(std::max(t - delays.tau1, sol.history_start()));
        const auto field = [&](std::span<const double> x) {
            return velocity_case1(x, nu, leaders, kernels.phi, kernels.rho);
        };
        probe_field(field, evolution.followers.at(t).atoms(), d, R, options, rng, report);
    }
    finish_ratios(report);
    return report;
}

Case2VelocityBoundReport velocity_bound_check(const Case2Evolution& evolution,
                                              const KernelSet& kernels, const DelayConfig& delays,
                                              const VelocityCheckOptions& options) {
    const DenseSolution& sol = *evolution.solution;
    const double t_end = sol.t_end();
    const double K = kernels.max_sup_bound();
    const double L = kernels.max_lipschitz();
    const double R1 = evolution.leaders.support_radius(t_end);
    const double R2 = evolution.followers.support_radius(t_end);

    Case2VelocityBoundReport out;
    out.leader_field.radius = R1;
    out.leader_field.lipschitz_bound = K + 2.0 * R1 * L;
    out.leader_field.speed_bound = 2.0 * K * R1;
    out.follower_field.radius = R2;
    out.follower_field.lipschitz_bound = 2.0 * K + L * (R1 + 3.0 * R2);
    out.follower_field.speed_bound = K * (R1 + 3.0 * R2);

    std::mt19937_64 rng(options.seed);
    const std::size_t d = evolution.leaders.dim();
    for (double t : check_times(t_end, options.time_samples)) {
        const EmpiricalMeasure mu = evolution.leaders.at(std::max(t - delays.tau1, sol.history_start()));
        const EmpiricalMeasure nu = evolution.followers.at(std::max(t - delays.tau2, sol.history_start()));
        const auto u = [&](std::span<const double> x) { return velocity_case2_leader(x, mu, kernels.psi); };
        const auto v = [&](std::span<const double> x) {
            return velocity_case2_follower(x, nu, mu, kernels.phi, kernels.rho);
        };
        probe_field(u, evolution.leaders.at(t).atoms(), d, R1, options, rng, out.leader_field);
        probe_field(v, evolution.followers.at(t).atoms(), d, R2, options, rng, out.follower_field);
    }
    finish_ratios(out.leader_field);
    finish_ratios(out.follower_field);
    return out;
}

}  // namespace hkdelay
