#pragma once

#include <random>
#include <string>

#include "hkdelay/particle.hpp"

namespace hkdelay::props {

struct Outcome {
    bool ok = true;
    std::string detail;  ///< first violation, if any
};

/// Every projection onto 20 random unit vectors stays inside the range seen on [-tau, 0].
Outcome hull_confinement(const DenseSolution& sol, std::mt19937_64& rng, std::size_t directions,
                         double slack);

/// max agent norm over the grid on [0, t_end] <= C0 + slack.
Outcome norm_bound(const DenseSolution& sol, double c0, double slack);

/// D_0 >= D_1 >= ... (sampled), slack added on the right.
Outcome diameter_monotone(const std::vector<double>& D, double slack);

/// D_{n+1} <= Ctilde D_{n-2} + slack for every valid n.
Outcome three_step_contraction(const std::vector<double>& D, double ctilde, double slack);

/// All certificate checks hold with the given slack (recomputed, not the stored flags).
Outcome certificate_holds(const ConsensusCertificate& cert, double slack);

/// Sampled D_n for n = 0 .. floor(t_end / tau).
std::vector<double> diameter_windows(const DenseSolution& sol, double tau, std::size_t samples);

}  // namespace hkdelay::props
