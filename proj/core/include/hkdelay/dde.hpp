#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hkdelay/history.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

/// Stacked state vectors at t - lag_k, one per configured lag.
///
/// A zero lag refers to the current stage state itself.
class LaggedStates {
public:
    explicit LaggedStates(std::vector<std::span<const double>> states)
        : states_(std::move(states)) {}

    std::span<const double> operator[](std::size_t lag_index) const { return states_[lag_index]; }
    std::size_t size() const noexcept { return states_.size(); }

private:
    std::vector<std::span<const double>> states_;
};

/// dx/dt = f(t, x(t), x(t - lag_0), x(t - lag_1), ...). Writes into `derivative`.
using DelayedRhs = std::function<void(double t, std::span<const double> state,
                                      const LaggedStates& lagged, std::span<double> derivative)>;

/// Trajectory on [-tau, t_end]: the initial histories for t <= 0 and a table of
/// cubic Hermite segments (node values + node derivatives) for t > 0.
///
/// The stacked state is the concatenation of the history blocks, so block b
/// occupies components [block_offset(b), block_offset(b) + block_dim(b)).
class DenseSolution {
public:
    std::size_t dim() const noexcept { return dim_; }
    double t_end() const noexcept { return times_.back(); }
    double history_start() const noexcept { return history_start_; }

    const std::vector<HistoryFunction>& history() const noexcept { return history_; }
    std::size_t block_count() const noexcept { return history_.size(); }
    std::size_t block_offset(std::size_t b) const { return offsets_[b]; }
    std::size_t block_dim(std::size_t b) const { return history_[b].dim(); }

    const std::vector<double>& grid_times() const noexcept { return times_; }
    std::size_t node_count() const noexcept { return times_.size(); }
    std::span<const double> node_value(std::size_t k) const {
        return {values_.data() + k * dim_, dim_};
    }
    std::span<const double> node_derivative(std::size_t k) const {
        return {derivatives_.data() + k * dim_, dim_};
    }
    const std::vector<double>& value_table() const noexcept { return values_; }
    const std::vector<double>& derivative_table() const noexcept { return derivatives_; }

    /// Stacked state at t; throws OutOfRange outside [history_start(), t_end()].
    Vec operator()(double t) const;
    void eval_into(double t, std::span<double> out) const;
    /// State of a single block at t.
    void eval_block_into(double t, std::size_t block, std::span<double> out) const;

private:
    friend DenseSolution integrate(const DelayedRhs&, std::vector<HistoryFunction>,
                                   std::vector<double>, double, double);

    void history_into(double t, std::span<double> out) const;
    /// Hermite evaluation on committed nodes [0, last_node]; t is clamped into range.
    void segment_into(double t, std::size_t last_node, std::span<double> out) const;
    void segment_block_into(double t, std::size_t last_node, std::size_t offset,
                            std::size_t len, std::span<double> out) const;
    std::size_t locate(double t, std::size_t last_node) const;
    void check_range(double t) const;

    std::size_t dim_ = 0;
    double step_ = 0.0;
    double history_start_ = 0.0;
    std::vector<HistoryFunction> history_;
    std::vector<std::size_t> offsets_;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<double> derivatives_;
};

/// Fixed-step classical RK4 for delay equations (method of steps).
///
/// Delayed arguments at every stage time are read from the committed dense
/// interpolant, which requires step <= every positive lag. Zero lags read the
/// current stage state, so an all-zero lag set integrates a plain ODE.
/// The state update uses compensated summation.
///
/// Throws InvalidArgument on a bad step / lag combination and DivergenceError
/// when the state becomes non-finite.
DenseSolution integrate(const DelayedRhs& rhs, std::vector<HistoryFunction> history,
                        std::vector<double> lags, double t_end, double step);

Vec solution_eval(const DenseSolution& sol, double t);

}  // namespace hkdelay
