#pragma once

#include <span>
#include <vector>

#include "hkdelay/types.hpp"

namespace hkdelay {

/// Piecewise-linear initial datum on [start_time(), 0].
///
/// Sample times are strictly increasing and end at 0. A single sample at t=0
/// is allowed and represents the zero-delay case.
class HistoryFunction {
public:
    HistoryFunction(std::vector<double> times, PointSet values);

    static HistoryFunction constant(const Vec& value, double tau);
    static HistoryFunction linear(const Vec& at_start, const Vec& at_zero, double tau);

    std::size_t dim() const noexcept { return values_.dim(); }
    double start_time() const noexcept { return times_.front(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const PointSet& values() const noexcept { return values_; }

    Vec operator()(double t) const;
    void eval_into(double t, std::span<double> out) const;

    /// Largest |h(t_{k+1}) - h(t_k)| / (t_{k+1} - t_k) over segments.
    double max_slope() const;

    /// Largest |h(t)| over the samples and `interior_points` equispaced points per segment.
    double max_norm(std::size_t interior_points = 8) const;

    /// Same sample times, every value shifted by `offset`.
    HistoryFunction shifted(std::span<const double> offset) const;

private:
    std::vector<double> times_;
    PointSet values_;
};

/// Interpolated value at t in [start_time(), 0]; throws OutOfRange otherwise.
Vec history_eval(const HistoryFunction& h, double t);

}  // namespace hkdelay
