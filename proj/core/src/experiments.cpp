#include "hkdelay/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hkdelay/wasserstein.hpp"

namespace hkdelay {
namespace {

constexpr double kDecayFloor = 1e-14;
constexpr std::uint64_t kPerturbationStream = 5;

std::vector<double> checkpoint_times(double t_end) {
    return {0.0, 0.25 * t_end, 0.5 * t_end, 0.75 * t_end, t_end};
}

MeanFieldCase case_of(Mode mode) {
    return (mode == Mode::meanfield_case2 || mode == Mode::stability_case2) ? MeanFieldCase::case2
                                                                            : MeanFieldCase::case1;
}

MeasureHistory measure_history(const std::vector<HistoryFunction>& atoms,
                               const std::vector<double>& weights) {
    MeasureHistory h;
    h.atoms = atoms;
    h.weights = weights;
    return h;
}

std::mt19937_64 perturbation_stream(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kPerturbationStream)};
    return std::mt19937_64(seq);
}

// Common view over the two evolutions so the study code stays case-agnostic.
struct Evolved {
    MeanFieldCase which;
    std::shared_ptr<const DenseSolution> solution;
    std::optional<Case1Evolution> c1;
    std::optional<Case2Evolution> c2;

    EmpiricalMeasure followers_at(double t) const {
        return c1 ? c1->followers.at(t) : c2->followers.at(t);
    }
};

Evolved evolve(MeanFieldCase which, const InitialData& data, const KernelSet& kernels,
               const DelayConfig& delays, double t_end, double step) {
    Evolved e{which, nullptr, std::nullopt, std::nullopt};
    if (which == MeanFieldCase::case1) {
        e.c1 = evolve_case1(data.leaders, measure_history(data.followers, data.follower_weights),
                            kernels, delays, t_end, step);
        e.solution = e.c1->solution;
    } else {
        e.c2 = evolve_case2(measure_history(data.leaders, data.leader_weights),
                            measure_history(data.followers, data.follower_weights), kernels,
                            delays, t_end, step);
        e.solution = e.c2->solution;
    }
    return e;
}

// (follower term, leader term) between two evolutions at time t.
std::pair<double, double> discrepancy(const Evolved& a, const Evolved& b, double t, double p) {
    const double follower = cloud_distance(a.followers_at(t), b.followers_at(t), p);
    double leader = 0.0;
    if (a.c1) {
        leader = leader_discrepancy(a.c1->leaders_at(t), b.c1->leaders_at(t), p);
    } else {
        leader = cloud_distance(a.c2->leaders.at(t), b.c2->leaders.at(t), p);
    }
    return {follower, leader};
}

std::vector<double> diameter_sequence(const DenseSolution& sol, double tau,
                                      std::size_t samples_per_window) {
    std::vector<double> D;
    if (tau <= 0.0) {
        return D;
    }
    for (std::size_t n = 0; static_cast<double>(n) * tau <= sol.t_end() + 1e-9 * tau; ++n) {
        D.push_back(windowed_diameter(sol, n, samples_per_window));
    }
    return D;
}

std::optional<double> fitted_rate(const ConsensusCertificate& cert) {
    std::vector<double> t, d;
    for (const auto& c : cert.checks) {
        t.push_back(c.t);
        d.push_back(c.d);
    }
    try {
        return fit_decay_rate(t, d, 2.0 * cert.tau);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

EmpiricalMeasure duplicated(const EmpiricalMeasure& m) {
    const std::size_t n = m.size();
    const std::size_t d = m.dim();
    std::vector<double> coords;
    coords.reserve(2 * n * d);
    for (std::size_t k = 0; k < n; ++k) {
        const auto a = m.atoms()[k];
        coords.insert(coords.end(), a.begin(), a.end());
        coords.insert(coords.end(), a.begin(), a.end());
    }
    std::vector<double> w;
    if (m.is_uniform()) {
        w = uniform_weights(2 * n);
    } else {
        for (double x : m.weights()) {
            w.push_back(0.5 * x);
            w.push_back(0.5 * x);
        }
    }
    return EmpiricalMeasure(PointSet(d, std::move(coords)), std::move(w));
}

}  // namespace

std::optional<double> fit_decay_rate(std::span<const double> t, std::span<const double> d,
                                     double t_min) {
    if (t.size() != d.size()) {
        throw InvalidArgument("fit_decay_rate: t and d differ in length");
    }
    std::vector<double> xs, ys;
    std::size_t candidates = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min) {
            continue;
        }
        ++candidates;
        if (d[i] >= kDecayFloor) {
            xs.push_back(t[i]);
            ys.push_back(std::log(d[i]));
        }
    }
    if (candidates > 0 && xs.empty()) {
        return std::nullopt;
    }
    if (xs.size() < 2) {
        throw InvalidArgument("fit_decay_rate: fewer than two usable points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (!(sxx > 0.0)) {
        throw InvalidArgument("fit_decay_rate: all usable points share one time");
    }
    return -sxy / sxx;
}

std::vector<double> output_times(const DenseSolution& sol, std::size_t stride) {
    if (stride == 0) {
        throw InvalidArgument("output_times: stride must be positive");
    }
    const auto& grid = sol.grid_times();
    std::vector<double> out;
    for (std::size_t k = 0; k < grid.size(); k += stride) {
        out.push_back(grid[k]);
    }
    if (out.back() != grid.back()) {
        out.push_back(grid.back());
    }
    return out;
}

double cloud_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    return wasserstein_distance(a, b, p);
}

double leader_discrepancy(const PointSet& a, const PointSet& b, double p) {
    if (a.size() != b.size() || a.dim() != b.dim() || a.size() == 0) {
        throw InvalidArgument("leader_discrepancy: leader sets do not match");
    }
    if (std::isinf(p)) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, distance(a[i], b[i]));
        }
        return worst;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total += transport_cost(a[i], b[i], p);
    }
    const double mean = total / static_cast<double>(a.size());
    return p == 1.0 ? mean : std::pow(mean, 1.0 / p);
}

InitialData perturb(const InitialData& base, double epsilon, Perturbation kind,
                    std::uint64_t seed, std::size_t dim) {
    std::mt19937_64 rng = perturbation_stream(seed);
    const Vec common = random_unit_vector(rng, dim);
    const auto offset = [&]() {
        Vec u = kind == Perturbation::translation ? common : random_unit_vector(rng, dim);
        for (double& x : u) {
            x *= epsilon;
        }
        return u;
    };
    InitialData out = base;
    for (auto& h : out.followers) {
        h = h.shifted(offset());
    }
    for (auto& h : out.leaders) {
        h = h.shifted(offset());
    }
    return out;
}

StabilityComparison compare_runs(MeanFieldCase which, const InitialData& base,
                                 const InitialData& perturbed, const KernelSet& kernels,
                                 const DelayConfig& delays, double t_end, double step,
                                 std::size_t samples_per_window, double p) {
    const Evolved a = evolve(which, base, kernels, delays, t_end, step);
    const Evolved b = evolve(which, perturbed, kernels, delays, t_end, step);

    StabilityComparison cmp;
    const double tau = delays.tau();
    for (double s : window_sample_times(*a.solution, -tau, 0.0, samples_per_window)) {
        const auto [f, l] = discrepancy(a, b, s, p);
        cmp.initial_follower = std::max(cmp.initial_follower, f);
        cmp.initial_leader = std::max(cmp.initial_leader, l);
    }
    cmp.initial_discrepancy = cmp.initial_follower + cmp.initial_leader;

    for (double t : checkpoint_times(t_end)) {
        const auto [f, l] = discrepancy(a, b, t, p);
        cmp.checkpoints.push_back({t, f, l, f + l});
    }
    if (cmp.initial_discrepancy > 0.0) {
        double worst = 0.0;
        for (const auto& c : cmp.checkpoints) {
            const double r = c.numerator / cmp.initial_discrepancy;
            cmp.ratios.push_back(r);
            worst = std::max(worst, r);
        }
        cmp.max_ratio = worst;
    }
    return cmp;
}

StabilityReport stability_study(const Scenario& base, double epsilon, double p) {
    StabilityReport report;
    report.which = case_of(base.mode);
    report.p = p;
    report.perturbation = base.study.perturbation;
    const InitialData data = make_initial_data(base);
    const double step = base.numerics.effective_step(base.delays);

    for (double factor : {1.0, 2.0, 4.0}) {
        const double eps = factor * epsilon;
        StabilityComparison cmp = compare_runs(
            report.which, data,
            perturb(data, eps, base.study.perturbation, base.study.perturbation_seed, base.dim),
            base.kernels, base.delays, base.numerics.t_end, step,
            base.numerics.samples_per_window, p);
        cmp.epsilon = eps;
        report.sweep.push_back(std::move(cmp));
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& cmp : report.sweep) {
        if (!cmp.max_ratio || !std::isfinite(*cmp.max_ratio)) {
            report.finite = false;
            continue;
        }
        lo = std::min(lo, *cmp.max_ratio);
        hi = std::max(hi, *cmp.max_ratio);
    }
    if (report.finite && lo > 0.0) {
        report.variation = (hi - lo) / lo;
        report.passed = report.variation < 0.5;
    } else {
        report.variation = std::numeric_limits<double>::infinity();
        report.passed = false;
    }
    return report;
}

LimitReport limit_study(const Scenario& scenario, std::size_t n0, std::size_t levels) {
    if (n0 == 0 || levels < 2) {
        throw InvalidArgument("limit_study: need n0 >= 1 and at least two levels");
    }
    LimitReport report;
    const double t_end = scenario.numerics.t_end;
    const double step = scenario.numerics.effective_step(scenario.delays);
    report.checkpoints = checkpoint_times(t_end);

    std::vector<Evolved> runs;
    for (std::size_t k = 0; k < levels; ++k) {
        const std::size_t atoms = n0 << k;
        const InitialData data = make_initial_data(scenario, scenario.m, atoms);
        runs.push_back(evolve(MeanFieldCase::case1, data, scenario.kernels, scenario.delays,
                              t_end, step));
        report.levels.push_back({atoms, {}});
    }

    // One C0 for all levels: the generator radius, or the largest explicit bound.
    double c0 = 0.0;
    if (const auto* r = std::get_if<RandomHistories>(&scenario.histories)) {
        c0 = r->radius;
    }
    for (const auto& e : runs) {
        c0 = std::max(c0, initial_bound(*e.solution));
    }
    CertificateOptions opts;
    opts.samples_per_window = scenario.numerics.samples_per_window;
    opts.c0_override = c0;

    report.certificates_pass = true;
    report.gamma_identical = true;
    for (std::size_t k = 0; k < levels; ++k) {
        const DenseSolution& sol = *runs[k].solution;
        report.levels[k].certificate = certify_trajectory(
            scenario.kernels, sol, output_times(sol, scenario.numerics.output_stride), opts);
        report.certificates_pass = report.certificates_pass && report.levels[k].certificate.passed();
        report.gamma_identical = report.gamma_identical &&
                                 report.levels[k].certificate.gamma ==
                                     report.levels[0].certificate.gamma;
    }

    for (std::size_t k = 0; k + 1 < levels; ++k) {
        LimitRow row;
        row.atoms = report.levels[k].atoms;
        for (double t : report.checkpoints) {
            const EmpiricalMeasure coarse = duplicated(runs[k].followers_at(t));
            const EmpiricalMeasure fine = runs[k + 1].followers_at(t);
            row.distances.push_back(cloud_distance(coarse, fine, kInfiniteOrder));
        }
        report.rows.push_back(std::move(row));
    }

    report.refinement_ok = true;
    for (std::size_t k = 0; k + 1 < report.rows.size(); ++k) {
        for (std::size_t c = 0; c < report.checkpoints.size(); ++c) {
            if (report.rows[k + 1].distances[c] > 2.0 * report.rows[k].distances[c] + 1e-12) {
                report.refinement_ok = false;
            }
        }
    }
    return report;
}

int RunReport::exit_status() const {
    bool ok = certificate.passed();
    if (velocity_case1) {
        ok = ok && velocity_case1->passed;
    }
    if (velocity_case2) {
        ok = ok && velocity_case2->passed();
    }
    if (stability) {
        ok = ok && stability->passed;
    }
    if (limit) {
        ok = ok && limit->passed();
    }
    return ok ? 0 : 2;
}

RunReport run(const Scenario& scenario) {
    scenario.validate();
    RunReport report;
    report.mode = scenario.mode;
    report.seed = scenario.seed();

    const double step = scenario.numerics.effective_step(scenario.delays);
    const double t_end = scenario.numerics.t_end;
    CertificateOptions opts;
    opts.samples_per_window = scenario.numerics.samples_per_window;

    if (scenario.mode == Mode::limit_study) {
        report.limit = limit_study(scenario, scenario.study.n0, scenario.study.levels);
        report.certificate = report.limit->levels.back().certificate;
        report.gamma_emp = fitted_rate(report.certificate);
        return report;
    }

    const InitialData data = make_initial_data(scenario);
    std::shared_ptr<const DenseSolution> sol;
    if (scenario.mode == Mode::particle) {
        ModelConfig config;
        config.dim = scenario.dim;
        config.kernels = scenario.kernels;
        config.delays = scenario.delays;
        config.leader_histories = data.leaders;
        config.follower_histories = data.followers;
        config.validate();
        sol = std::make_shared<const DenseSolution>(simulate(config, t_end, step));
    } else {
        const MeanFieldCase which = case_of(scenario.mode);
        Evolved e = evolve(which, data, scenario.kernels, scenario.delays, t_end, step);
        sol = e.solution;
        if (scenario.mode == Mode::meanfield_case1) {
            report.velocity_case1 = velocity_bound_check(*e.c1, scenario.kernels, scenario.delays);
        } else if (scenario.mode == Mode::meanfield_case2) {
            report.velocity_case2 = velocity_bound_check(*e.c2, scenario.kernels, scenario.delays);
        } else {
            report.stability = stability_study(scenario, scenario.study.epsilon, scenario.study.p);
        }
    }

    report.certificate =
        certify_trajectory(scenario.kernels, *sol, output_times(*sol, scenario.numerics.output_stride), opts);
    report.D = diameter_sequence(*sol, scenario.delays.tau(), scenario.numerics.samples_per_window);
    report.gamma_emp = fitted_rate(report.certificate);
    return report;
}

std::string version_string() {
#ifdef HKDELAY_VERSION
    return HKDELAY_VERSION;
#else
    return "unknown";
#endif
}

}  // namespace hkdelay
