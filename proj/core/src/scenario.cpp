#include "hkdelay/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hkdelay/meanfield.hpp"

namespace hkdelay {
namespace {

using nlohmann::json;

constexpr std::uint64_t kLeaderStream = 1;
constexpr std::uint64_t kFollowerStream = 2;
constexpr std::uint64_t kLeaderWeightStream = 3;
constexpr std::uint64_t kFollowerWeightStream = 4;

void require_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ConfigError(std::string(where) + ": expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

double get_number(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw ConfigError(std::string(where) + ": missing '" + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string(where) + "." + key + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(std::string(where) + "." + key + ": not finite");
    }
    return x;
}

double get_number_or(const json& j, const char* key, const char* where, double fallback) {
    return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::size_t get_count(const json& j, const char* key, const char* where) {
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string(where) + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& j, const char* key, const char* where) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<long long>() >= 0) {
        return static_cast<std::uint64_t>(v.get<long long>());
    }
    throw ConfigError(std::string(where) + "." + key + ": expected an unsigned integer");
}

bool get_bool_or(const json& j, const char* key, const char* where, bool fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_boolean()) {
        throw ConfigError(std::string(where) + "." + key + ": expected true/false");
    }
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(std::string(where) + ": missing string '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

Kernel parse_kernel(const json& j, const char* where) {
    if (!j.is_object()) {
        throw ConfigError(std::string(where) + ": expected an object");
    }
    const std::string family = get_string(j, "family", where);
    try {
        if (family == "constant") {
            require_keys(j, where, {"family", "c"});
            return Kernel::constant(get_number_or(j, "c", where, 1.0));
        }
        if (family == "inverse_power") {
            require_keys(j, where, {"family", "c", "beta"});
            return Kernel::inverse_power(get_number_or(j, "c", where, 1.0),
                                         get_number_or(j, "beta", where, 1.0));
        }
        if (family == "truncated_exponential") {
            require_keys(j, where, {"family", "c", "sigma", "floor"});
            return Kernel::truncated_exponential(get_number_or(j, "c", where, 1.0),
                                                 get_number_or(j, "sigma", where, 1.0),
                                                 get_number_or(j, "floor", where, 0.1));
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    throw ConfigError(std::string(where) + ": unknown kernel family '" + family + "'");
}

Vec parse_point(const json& v, const char* where) {
    if (v.is_number()) {
        return {v.get<double>()};
    }
    if (!v.is_array() || v.empty()) {
        throw ConfigError(std::string(where) + ": expected a number or a non-empty array");
    }
    Vec p;
    for (const json& c : v) {
        if (!c.is_number()) {
            throw ConfigError(std::string(where) + ": coordinates must be numbers");
        }
        p.push_back(c.get<double>());
    }
    return p;
}

// [[t, x], [t, x], ...] with x a number or a coordinate array.
HistoryFunction parse_history(const json& j, const char* where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(std::string(where) + ": expected a list of [t, value] samples");
    }
    std::vector<double> times;
    std::vector<Vec> values;
    for (const json& sample : j) {
        if (!sample.is_array() || sample.size() != 2 || !sample[0].is_number()) {
            throw ConfigError(std::string(where) + ": each sample must be [t, value]");
        }
        times.push_back(sample[0].get<double>());
        values.push_back(parse_point(sample[1], where));
    }
    try {
        return HistoryFunction(std::move(times), PointSet::from_points(values));
    } catch (const Error& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

std::vector<HistoryFunction> parse_history_list(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ConfigError(std::string("histories: missing list '") + key + "'");
    }
    std::vector<HistoryFunction> out;
    for (const json& h : j.at(key)) {
        out.push_back(parse_history(h, key));
    }
    return out;
}

std::vector<double> parse_weights(const json& j, const char* key) {
    std::vector<double> w;
    if (!j.contains(key)) {
        return w;
    }
    if (!j.at(key).is_array()) {
        throw ConfigError(std::string("histories.") + key + ": expected a list of numbers");
    }
    for (const json& v : j.at(key)) {
        if (!v.is_number()) {
            throw ConfigError(std::string("histories.") + key + ": expected a list of numbers");
        }
        w.push_back(v.get<double>());
    }
    return w;
}

HistorySpec parse_histories(const json& j) {
    const std::string kind = get_string(j, "kind", "histories");
    if (kind == "explicit") {
        require_keys(j, "histories",
                     {"kind", "leaders", "followers", "leader_weights", "follower_weights"});
        ExplicitHistories e;
        e.leaders = parse_history_list(j, "leaders");
        e.followers = parse_history_list(j, "followers");
        e.leader_weights = parse_weights(j, "leader_weights");
        e.follower_weights = parse_weights(j, "follower_weights");
        return e;
    }
    if (kind == "random") {
        require_keys(j, "histories", {"kind", "seed", "radius", "shape", "weights"});
        if (!j.contains("seed")) {
            throw ConfigError("histories: random generators need a 'seed'");
        }
        RandomHistories r;
        r.seed = get_seed(j, "seed", "histories");
        r.radius = get_number_or(j, "radius", "histories", 1.0);
        const std::string shape = j.contains("shape") ? get_string(j, "shape", "histories") : "mixed";
        if (shape == "constant") {
            r.shape = HistoryShape::constant;
        } else if (shape == "linear") {
            r.shape = HistoryShape::linear;
        } else if (shape == "mixed") {
            r.shape = HistoryShape::mixed;
        } else {
            throw ConfigError("histories.shape: expected constant, linear or mixed");
        }
        const std::string weights =
            j.contains("weights") ? get_string(j, "weights", "histories") : "uniform";
        if (weights == "uniform") {
            r.weights = WeightScheme::uniform;
        } else if (weights == "random") {
            r.weights = WeightScheme::random;
        } else {
            throw ConfigError("histories.weights: expected uniform or random");
        }
        return r;
    }
    throw ConfigError("histories.kind: expected explicit or random, got '" + kind + "'");
}

double parse_order(const json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") {
            return std::numeric_limits<double>::infinity();
        }
        throw ConfigError("study.p: expected a number >= 1 or \"inf\"");
    }
    if (!v.is_number()) {
        throw ConfigError("study.p: expected a number >= 1 or \"inf\"");
    }
    return v.get<double>();
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t which) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(which)};
    return std::mt19937_64(seq);
}

std::vector<double> random_weights(std::uint64_t seed, std::uint64_t which, std::size_t n) {
    std::mt19937_64 rng = stream(seed, which);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
        x = 0.5 + uniform01(rng);
        total += x;
    }
    for (double& x : w) {
        x /= total;
    }
    return w;
}

std::vector<HistoryFunction> random_histories(const RandomHistories& spec, std::uint64_t which,
                                              std::size_t count, std::size_t dim, double tau) {
    std::mt19937_64 rng = stream(spec.seed, which);
    // Pull endpoints strictly inside the ball so rounding never lifts a norm above the radius.
    const double r = spec.radius * (1.0 - 1e-12);
    std::vector<HistoryFunction> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        bool linear = spec.shape == HistoryShape::linear;
        if (spec.shape == HistoryShape::mixed) {
            linear = uniform01(rng) < 0.5;
        }
        if (linear) {
            const Vec start = sample_ball(rng, dim, r);
            const Vec zero = sample_ball(rng, dim, r);
            out.push_back(HistoryFunction::linear(start, zero, tau));
        } else {
            out.push_back(HistoryFunction::constant(sample_ball(rng, dim, r), tau));
        }
    }
    return out;
}

std::vector<HistoryFunction> cyclic(const std::vector<HistoryFunction>& src, std::size_t count) {
    std::vector<HistoryFunction> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(src[k % src.size()]);
    }
    return out;
}

}  // namespace

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::particle: return "particle";
        case Mode::meanfield_case1: return "meanfield_case1";
        case Mode::meanfield_case2: return "meanfield_case2";
        case Mode::stability_case1: return "stability_case1";
        case Mode::stability_case2: return "stability_case2";
        case Mode::limit_study: return "limit_study";
    }
    return "unknown";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : {Mode::particle, Mode::meanfield_case1, Mode::meanfield_case2,
                   Mode::stability_case1, Mode::stability_case2, Mode::limit_study}) {
        if (mode_name(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + std::string(name) + "'");
}

double Numerics::effective_step(const DelayConfig& delays) const {
    if (step > 0.0) {
        return step;
    }
    double h = 0.01;
    for (double lag : {delays.tau1, delays.tau2}) {
        if (lag > 0.0) {
            h = std::min(h, lag);
        }
    }
    return h;
}

std::optional<std::uint64_t> Scenario::seed() const {
    if (const auto* r = std::get_if<RandomHistories>(&histories)) {
        return r->seed;
    }
    return std::nullopt;
}

void Scenario::set_seed(std::uint64_t s) {
    auto* r = std::get_if<RandomHistories>(&histories);
    if (r == nullptr) {
        throw ConfigError("a seed only applies to random histories");
    }
    r->seed = s;
}

void Scenario::validate() const {
    if (dim == 0) {
        throw ConfigError("population.dim must be positive");
    }
    if (m == 0 || n == 0) {
        throw ConfigError("population: m and n must be positive");
    }
    if (mode == Mode::particle && !(n > m && m >= 2)) {
        throw ConfigError("particle mode needs n > m >= 2");
    }
    if (!(numerics.t_end > 0.0)) {
        throw ConfigError("numerics.t_end must be positive");
    }
    if (numerics.step < 0.0) {
        throw ConfigError("numerics.step must be positive");
    }
    if (numerics.samples_per_window < 2) {
        throw ConfigError("numerics.samples_per_window must be at least 2");
    }
    if (numerics.output_stride == 0) {
        throw ConfigError("numerics.output_stride must be positive");
    }
    if (!(study.p >= 1.0)) {
        throw ConfigError("study.p must be >= 1");
    }
    if (!(study.epsilon >= 0.0) || !std::isfinite(study.epsilon)) {
        throw ConfigError("study.epsilon must be finite and non-negative");
    }
    if (mode == Mode::limit_study && (study.n0 == 0 || study.levels < 2)) {
        throw ConfigError("limit study needs n0 >= 1 and levels >= 2");
    }
    if (const auto* r = std::get_if<RandomHistories>(&histories)) {
        if (!(r->radius > 0.0) || !std::isfinite(r->radius)) {
            throw ConfigError("histories.radius must be positive");
        }
    } else {
        const auto& e = std::get<ExplicitHistories>(histories);
        if (e.leaders.empty() || e.followers.empty()) {
            throw ConfigError("explicit histories need at least one leader and one follower");
        }
        try {
            for (const auto& h : e.leaders) {
                validate_history(h, dim, delays.tau(), "leader");
            }
            for (const auto& h : e.followers) {
                validate_history(h, dim, delays.tau(), "follower");
            }
            if (!e.leader_weights.empty()) {
                if (e.leader_weights.size() != e.leaders.size()) {
                    throw ConfigError("leader_weights: one weight per leader");
                }
                validate_weights(e.leader_weights);
            }
            if (!e.follower_weights.empty()) {
                if (e.follower_weights.size() != e.followers.size()) {
                    throw ConfigError("follower_weights: one weight per follower");
                }
                validate_weights(e.follower_weights);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& ex) {
            throw ConfigError(std::string("histories: ") + ex.what());
        }
    }
}

Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    require_keys(j, "scenario",
                 {"mode", "kernels", "delays", "population", "histories", "numerics", "output",
                  "study"});
    Scenario s;
    s.mode = parse_mode(get_string(j, "mode", "scenario"));

    if (!j.contains("kernels")) {
        throw ConfigError("scenario: missing 'kernels'");
    }
    const json& k = j.at("kernels");
    require_keys(k, "kernels", {"psi", "phi", "rho"});
    for (const char* name : {"psi", "phi", "rho"}) {
        if (!k.contains(name)) {
            throw ConfigError(std::string("kernels: missing '") + name + "'");
        }
    }
    s.kernels.psi = parse_kernel(k.at("psi"), "kernels.psi");
    s.kernels.phi = parse_kernel(k.at("phi"), "kernels.phi");
    s.kernels.rho = parse_kernel(k.at("rho"), "kernels.rho");

    if (!j.contains("delays")) {
        throw ConfigError("scenario: missing 'delays'");
    }
    const json& d = j.at("delays");
    require_keys(d, "delays", {"tau1", "tau2"});
    try {
        s.delays = DelayConfig(get_number(d, "tau1", "delays"), get_number(d, "tau2", "delays"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("delays: ") + e.what());
    }

    if (!j.contains("histories")) {
        throw ConfigError("scenario: missing 'histories'");
    }
    s.histories = parse_histories(j.at("histories"));

    if (const auto* e = std::get_if<ExplicitHistories>(&s.histories)) {
        s.m = e->leaders.size();
        s.n = e->followers.size();
        s.dim = e->leaders.empty() ? 1 : e->leaders.front().dim();
    }
    if (j.contains("population")) {
        const json& p = j.at("population");
        require_keys(p, "population", {"m", "n", "dim"});
        const bool is_explicit = std::holds_alternative<ExplicitHistories>(s.histories);
        const auto take = [&](const char* key, std::size_t& field) {
            if (!p.contains(key)) {
                return;
            }
            const std::size_t v = get_count(p, key, "population");
            if (is_explicit && v != field) {
                throw ConfigError(std::string("population.") + key +
                                  " disagrees with the explicit histories");
            }
            field = v;
        };
        take("m", s.m);
        take("n", s.n);
        take("dim", s.dim);
    } else if (std::holds_alternative<RandomHistories>(s.histories)) {
        throw ConfigError("scenario: random histories need 'population'");
    }

    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        require_keys(n, "numerics", {"step", "t_end", "samples_per_window", "output_stride"});
        s.numerics.step = get_number_or(n, "step", "numerics", 0.0);
        s.numerics.t_end = get_number_or(n, "t_end", "numerics", s.numerics.t_end);
        if (n.contains("samples_per_window")) {
            s.numerics.samples_per_window = get_count(n, "samples_per_window", "numerics");
        }
        if (n.contains("output_stride")) {
            s.numerics.output_stride = get_count(n, "output_stride", "numerics");
        }
        if (n.contains("step") && !(s.numerics.step > 0.0)) {
            throw ConfigError("numerics.step must be positive");
        }
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        require_keys(o, "output", {"dir", "csv", "json"});
        if (o.contains("dir")) {
            s.output.dir = get_string(o, "dir", "output");
        }
        s.output.csv = get_bool_or(o, "csv", "output", true);
        s.output.json = get_bool_or(o, "json", "output", true);
    }

    if (j.contains("study")) {
        const json& st = j.at("study");
        require_keys(st, "study", {"epsilon", "p", "perturbation", "seed", "n0", "levels"});
        s.study.epsilon = get_number_or(st, "epsilon", "study", s.study.epsilon);
        if (st.contains("p")) {
            s.study.p = parse_order(st.at("p"));
        }
        if (st.contains("perturbation")) {
            const std::string kind = get_string(st, "perturbation", "study");
            if (kind == "random") {
                s.study.perturbation = Perturbation::random;
            } else if (kind == "translation") {
                s.study.perturbation = Perturbation::translation;
            } else {
                throw ConfigError("study.perturbation: expected random or translation");
            }
        }
        if (st.contains("seed")) {
            s.study.perturbation_seed = get_seed(st, "seed", "study");
        }
        if (st.contains("n0")) {
            s.study.n0 = get_count(st, "n0", "study");
        }
        if (st.contains("levels")) {
            s.study.levels = get_count(st, "levels", "study");
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open scenario file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

InitialData make_initial_data(const Scenario& s, std::size_t m, std::size_t n) {
    InitialData data;
    const double tau = s.delays.tau();
    if (const auto* r = std::get_if<RandomHistories>(&s.histories)) {
        data.leaders = random_histories(*r, kLeaderStream, m, s.dim, tau);
        data.followers = random_histories(*r, kFollowerStream, n, s.dim, tau);
        if (r->weights == WeightScheme::random) {
            data.leader_weights = random_weights(r->seed, kLeaderWeightStream, m);
            data.follower_weights = random_weights(r->seed, kFollowerWeightStream, n);
        } else {
            data.leader_weights = uniform_weights(m);
            data.follower_weights = uniform_weights(n);
        }
        return data;
    }
    const auto& e = std::get<ExplicitHistories>(s.histories);
    data.leaders = cyclic(e.leaders, m);
    data.followers = cyclic(e.followers, n);
    data.leader_weights = (!e.leader_weights.empty() && m == e.leaders.size())
                              ? e.leader_weights
                              : uniform_weights(m);
    data.follower_weights = (!e.follower_weights.empty() && n == e.followers.size())
                                ? e.follower_weights
                                : uniform_weights(n);
    return data;
}

InitialData make_initial_data(const Scenario& s) { return make_initial_data(s, s.m, s.n); }

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    Vec v(dim);
    for (;;) {
        for (std::size_t i = 0; i < dim; i += 2) {
            const double u1 = 1.0 - uniform01(rng);
            const double u2 = uniform01(rng);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double theta = 2.0 * std::numbers::pi * u2;
            v[i] = r * std::cos(theta);
            if (i + 1 < dim) {
                v[i + 1] = r * std::sin(theta);
            }
        }
        const double len = norm(v);
        if (len > 1e-300) {
            for (double& x : v) {
                x /= len;
            }
            return v;
        }
    }
}

Vec sample_ball(std::mt19937_64& rng, std::size_t dim, double radius) {
    Vec v = random_unit_vector(rng, dim);
    const double u = uniform01(rng);
    const double scale = radius * (dim == 1 ? u : std::pow(u, 1.0 / static_cast<double>(dim)));
    for (double& x : v) {
        x *= scale;
    }
    return v;
}

}  // namespace hkdelay
