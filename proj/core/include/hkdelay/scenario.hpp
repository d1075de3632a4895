#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hkdelay/history.hpp"
#include "hkdelay/model_config.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

enum class Mode {
    particle,
    meanfield_case1,
    meanfield_case2,
    stability_case1,
    stability_case2,
    limit_study,
};

std::string mode_name(Mode mode);
Mode parse_mode(std::string_view name);

enum class HistoryShape { constant, linear, mixed };
enum class WeightScheme { uniform, random };
enum class Perturbation { random, translation };

/// Histories given sample by sample. Follower weights are optional (uniform if empty).
struct ExplicitHistories {
    std::vector<HistoryFunction> leaders;
    std::vector<HistoryFunction> followers;
    std::vector<double> leader_weights;
    std::vector<double> follower_weights;
};

/// Seeded generator: every agent gets a constant or linear history whose
/// endpoints are uniform in the closed ball of `radius`.
struct RandomHistories {
    std::uint64_t seed = 0;
    double radius = 1.0;
    HistoryShape shape = HistoryShape::mixed;
    WeightScheme weights = WeightScheme::uniform;
};

using HistorySpec = std::variant<ExplicitHistories, RandomHistories>;

struct Numerics {
    double step = 0.0;  ///< 0 selects min(0.01, smallest positive delay)
    double t_end = 5.0;
    std::size_t samples_per_window = 32;
    std::size_t output_stride = 10;  ///< every k-th grid time goes into the time series

    double effective_step(const DelayConfig& delays) const;
};

struct OutputSpec {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
};

struct StudySpec {
    double epsilon = 1e-3;
    double p = 2.0;  ///< may be infinite
    Perturbation perturbation = Perturbation::random;
    std::uint64_t perturbation_seed = 1;
    std::size_t n0 = 8;
    std::size_t levels = 4;
};

struct Scenario {
    Mode mode = Mode::particle;
    KernelSet kernels;
    DelayConfig delays;
    std::size_t m = 2;  ///< leaders (or leader atoms in Case (ii))
    std::size_t n = 3;  ///< followers (or follower atoms)
    std::size_t dim = 1;
    HistorySpec histories = RandomHistories{};
    Numerics numerics;
    OutputSpec output;
    StudySpec study;

    /// Seed of the random history generator, if any.
    std::optional<std::uint64_t> seed() const;
    /// Replaces the generator seed; ConfigError for explicit histories.
    void set_seed(std::uint64_t seed);

    /// Structural checks beyond what parsing already enforces.
    void validate() const;
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Initial data of one run, uniform in shape across all modes.
struct InitialData {
    std::vector<HistoryFunction> leaders;
    std::vector<double> leader_weights;
    std::vector<HistoryFunction> followers;
    std::vector<double> follower_weights;
};

/// Materializes the histories of `scenario` with `m` leaders and `n` followers.
/// Random generators draw leaders and followers from two separate streams, so
/// a run with more agents shares its first agents with a run with fewer.
InitialData make_initial_data(const Scenario& scenario, std::size_t m, std::size_t n);
InitialData make_initial_data(const Scenario& scenario);

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);
/// Uniform direction on the unit sphere of R^dim (Box-Muller normals, normalized).
Vec random_unit_vector(std::mt19937_64& rng, std::size_t dim);
/// Uniform point in the closed ball of `radius` in R^dim.
Vec sample_ball(std::mt19937_64& rng, std::size_t dim, double radius);

}  // namespace hkdelay
