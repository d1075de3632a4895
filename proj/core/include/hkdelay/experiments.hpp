#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkdelay/meanfield.hpp"
#include "hkdelay/particle.hpp"
#include "hkdelay/scenario.hpp"

namespace hkdelay {

/// Least-squares slope of ln d(t) over t >= t_min, negated. Points with
/// d < 1e-14 are dropped. Returns nullopt when every candidate point is below
/// that floor (consensus reached); throws InvalidArgument when fewer than two
/// usable points remain otherwise.
std::optional<double> fit_decay_rate(std::span<const double> t, std::span<const double> d,
                                     double t_min);

/// Grid times in [0, t_end] keeping every `stride`-th node and always the last one.
std::vector<double> output_times(const DenseSolution& sol, std::size_t stride);

/// d_p between two clouds; uniform equal-size clouds use assignment, weighted 1-D input
/// the quantile coupling.
double cloud_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// ((1/m) sum_i |a_i - b_i|^p)^{1/p}, or max_i |a_i - b_i| for p = inf.
double leader_discrepancy(const PointSet& a, const PointSet& b, double p);

/// Applies eps * u_k to every history (u_k a seeded unit vector per agent, or one
/// common vector for translations). Leaders draw after followers from the same stream.
InitialData perturb(const InitialData& base, double epsilon, Perturbation kind,
                    std::uint64_t seed, std::size_t dim);

enum class MeanFieldCase { case1, case2 };

struct StabilityCheckpoint {
    double t = 0.0;
    double follower_distance = 0.0;  ///< d_p(nu^1_t, nu^2_t)
    double leader_distance = 0.0;    ///< leader l^p term (Case (i)) or d_p(mu^1_t, mu^2_t)
    double numerator = 0.0;
};

/// One base / perturbed pair compared at the checkpoints.
struct StabilityComparison {
    double epsilon = 0.0;
    double initial_follower = 0.0;  ///< sup over s in [-tau, 0]
    double initial_leader = 0.0;    ///< sup over s in [-tau, 0]
    double initial_discrepancy = 0.0;
    std::vector<StabilityCheckpoint> checkpoints;
    std::vector<double> ratios;     ///< empty when the initial discrepancy is zero
    std::optional<double> max_ratio;
};

/// Evolves both initial data in the given case and compares them at
/// {0, T/4, T/2, 3T/4, T}.
StabilityComparison compare_runs(MeanFieldCase which, const InitialData& base,
                                 const InitialData& perturbed, const KernelSet& kernels,
                                 const DelayConfig& delays, double t_end, double step,
                                 std::size_t samples_per_window, double p);

struct StabilityReport {
    MeanFieldCase which = MeanFieldCase::case1;
    double p = 2.0;
    Perturbation perturbation = Perturbation::random;
    std::vector<StabilityComparison> sweep;  ///< eps, 2 eps, 4 eps
    double variation = 0.0;                  ///< (max - min) / min of the max ratios
    bool finite = true;
    bool passed = false;
};

/// Sweep over {eps, 2 eps, 4 eps}. Passes when every max ratio is finite and they
/// vary by less than 50 %. A zero base discrepancy leaves the ratios undefined and fails.
StabilityReport stability_study(const Scenario& base, double epsilon, double p);

struct LimitLevel {
    std::size_t atoms = 0;
    ConsensusCertificate certificate;
};

struct LimitRow {
    std::size_t atoms = 0;  ///< N; the row compares N with 2N
    std::vector<double> distances;  ///< d_inf at each checkpoint
};

struct LimitReport {
    std::vector<double> checkpoints;
    std::vector<LimitLevel> levels;
    std::vector<LimitRow> rows;
    bool certificates_pass = false;
    bool gamma_identical = false;
    bool refinement_ok = false;  ///< dist(2N) <= 2 dist(N) at every checkpoint
    bool passed() const { return certificates_pass && gamma_identical && refinement_ok; }
};

/// Case (i) runs with N = n0, 2 n0, ..., 2^{levels-1} n0 follower atoms drawn from
/// the scenario's generator; certificates use C0 = generator radius for all N.
LimitReport limit_study(const Scenario& scenario, std::size_t n0, std::size_t levels);

/// Everything one run produces.
struct RunReport {
    Mode mode = Mode::particle;
    std::optional<std::uint64_t> seed;
    ConsensusCertificate certificate;
    std::vector<double> D;  ///< D_0, D_1, ... up to t_end
    std::optional<double> gamma_emp;
    std::optional<Case2VelocityBoundReport> velocity_case2;
    std::optional<VelocityBoundReport> velocity_case1;
    std::optional<StabilityReport> stability;
    std::optional<LimitReport> limit;

    bool certificate_passed() const { return certificate.passed(); }
    /// 0 when every check holds, 2 otherwise.
    int exit_status() const;
};

RunReport run(const Scenario& scenario);

/// CSV time series: header `t,d,bound,pass`, 17 significant digits, LF endings.
std::string report_csv(const RunReport& report);
/// JSON document with `constants`, `gamma_emp`, `checks`, `mode`, `seed` and per-mode extras.
std::string report_json(const RunReport& report);
/// Standalone JSON documents for the study reports (used by the CLI subcommands).
std::string to_json(const StabilityReport& report);
std::string to_json(const LimitReport& report);
/// Writes report.csv / report.json into `dir` (created if needed).
void write_report_files(const RunReport& report, const std::filesystem::path& dir, bool csv,
                        bool json);

std::string version_string();

}  // namespace hkdelay
