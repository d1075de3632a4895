#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hkdelay/meanfield.hpp"

namespace hkdelay {

struct TransportPair {
    std::size_t source = 0;
    std::size_t target = 0;
    double mass = 0.0;
};

/// A coupling between two empirical measures, listed by its positive entries.
struct TransportPlan {
    std::vector<TransportPair> pairs;
    double cost = 0.0;  ///< sum of cost entries over the pairs (unnormalized for dp)
};

struct TransportResult {
    double distance = 0.0;
    TransportPlan plan;
};

inline constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();

/// |x - y|^p as used by every d_p routine here (and by the test oracles).
double transport_cost(std::span<const double> x, std::span<const double> y, double p);

/// Total of an assignment: the selected cost entries summed in ascending order,
/// so the value does not depend on which measure is the source.
double assignment_total(std::vector<double> entries);

/// d_p for equal-size uniform clouds by optimal assignment; distance = (cost / n)^{1/p}.
TransportResult dp_uniform(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// d_inf for equal-size uniform clouds: the minimal bottleneck over all assignments.
TransportResult dinf_uniform(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// d_p on the real line by monotone coupling, arbitrary weights. p may be kInfiniteOrder.
double dp_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// Dispatches to dp_uniform / dinf_uniform, falling back to dp_1d for weighted 1-D input.
double wasserstein_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// Checks that the plan's marginals reproduce both weight vectors within `tol`.
bool plan_is_coupling(const TransportPlan& plan, std::span<const double> a_weights,
                      std::span<const double> b_weights, double tol = 1e-10);

}  // namespace hkdelay
