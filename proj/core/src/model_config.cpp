#include "hkdelay/model_config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hkdelay {

double KernelSet::max_sup_bound() const {
    return std::max({psi.sup_bound(), phi.sup_bound(), rho.sup_bound()});
}

double KernelSet::max_lipschitz() const {
    return std::max({psi.lipschitz_const(), phi.lipschitz_const(), rho.lipschitz_const()});
}

void validate_history(const HistoryFunction& h, std::size_t dim, double tau, const char* what) {
    if (h.dim() != dim) {
        throw ConfigError(std::string(what) + ": history dimension does not match the model");
    }
    if (std::abs(h.start_time() + tau) > 1e-12 * std::max(1.0, tau)) {
        throw ConfigError(std::string(what) + ": history must start at -tau=" +
                          std::to_string(-tau) + " (starts at " +
                          std::to_string(h.start_time()) + ")");
    }
}

void ModelConfig::validate() const {
    validate_structure();
    if (leader_count() < 2) {
        throw ConfigError("ModelConfig: need at least two leaders");
    }
    if (follower_count() <= leader_count()) {
        throw ConfigError("ModelConfig: follower count must exceed leader count");
    }
}

void ModelConfig::validate_structure() const {
    if (dim == 0) {
        throw ConfigError("ModelConfig: dimension must be at least 1");
    }
    if (leader_count() == 0 || follower_count() == 0) {
        throw ConfigError("ModelConfig: need at least one leader and one follower");
    }
    const double tau = delays.tau();
    for (const auto& h : leader_histories) {
        validate_history(h, dim, tau, "leader");
    }
    for (const auto& h : follower_histories) {
        validate_history(h, dim, tau, "follower");
    }
}

}  // namespace hkdelay
