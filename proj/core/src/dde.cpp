#include "hkdelay/dde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hkdelay {
namespace {

constexpr double kRangeSlack = 1e-12;

double range_slack(double t) { return kRangeSlack * std::max(1.0, std::abs(t)); }

}  // namespace

void DenseSolution::check_range(double t) const {
    if (!(t >= history_start_ - range_slack(history_start_)) ||
        !(t <= t_end() + range_slack(t_end()))) {
        throw OutOfRange("solution_eval: t=" + std::to_string(t) + " outside [" +
                         std::to_string(history_start_) + ", " + std::to_string(t_end()) + "]");
    }
}

void DenseSolution::history_into(double t, std::span<double> out) const {
    const double clamped = std::min(0.0, std::max(t, history_start_));
    for (std::size_t b = 0; b < history_.size(); ++b) {
        history_[b].eval_into(clamped, out.subspan(offsets_[b], history_[b].dim()));
    }
}

std::size_t DenseSolution::locate(double t, std::size_t last_node) const {
    // Returns k with times_[k] <= t <= times_[k+1], k + 1 <= last_node.
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
    k = std::min(k, last_node - 1);
    while (k > 0 && times_[k] > t) {
        --k;
    }
    while (k + 1 < last_node && times_[k + 1] < t) {
        ++k;
    }
    return k;
}

void DenseSolution::segment_block_into(double t, std::size_t last_node, std::size_t offset,
                                       std::size_t len, std::span<double> out) const {
    t = std::min(t, times_[last_node]);
    const std::size_t k = locate(t, last_node);
    const double* y0 = values_.data() + k * dim_ + offset;
    const double* y1 = values_.data() + (k + 1) * dim_ + offset;
    if (t == times_[k]) {
        std::copy(y0, y0 + len, out.begin());
        return;
    }
    if (t == times_[k + 1]) {
        std::copy(y1, y1 + len, out.begin());
        return;
    }
    const double* f0 = derivatives_.data() + k * dim_ + offset;
    const double* f1 = derivatives_.data() + (k + 1) * dim_ + offset;
    const double h = times_[k + 1] - times_[k];
    const double s = (t - times_[k]) / h;
    // Difference form: reproduces constant segments exactly.
    const double w = s * (s - 1.0);
    for (std::size_t c = 0; c < len; ++c) {
        const double dy = y1[c] - y0[c];
        out[c] = y0[c] + s * dy + w * ((1.0 - 2.0 * s) * dy + h * ((s - 1.0) * f0[c] + s * f1[c]));
    }
}

void DenseSolution::segment_into(double t, std::size_t last_node, std::span<double> out) const {
    segment_block_into(t, last_node, 0, dim_, out);
}

void DenseSolution::eval_into(double t, std::span<double> out) const {
    check_range(t);
    if (t <= 0.0 || times_.size() == 1) {
        history_into(t, out);
        return;
    }
    segment_into(t, times_.size() - 1, out);
}

void DenseSolution::eval_block_into(double t, std::size_t block, std::span<double> out) const {
    check_range(t);
    if (t <= 0.0 || times_.size() == 1) {
        history_[block].eval_into(std::min(0.0, std::max(t, history_start_)), out);
        return;
    }
    segment_block_into(t, times_.size() - 1, offsets_[block], history_[block].dim(), out);
}

Vec DenseSolution::operator()(double t) const {
    Vec out(dim_);
    eval_into(t, out);
    return out;
}

Vec solution_eval(const DenseSolution& sol, double t) { return sol(t); }

DenseSolution integrate(const DelayedRhs& rhs, std::vector<HistoryFunction> history,
                        std::vector<double> lags, double t_end, double step) {
    if (!rhs) {
        throw InvalidArgument("integrate: right-hand side is empty");
    }
    if (history.empty()) {
        throw InvalidArgument("integrate: need at least one history block");
    }
    if (!std::isfinite(step) || step <= 0.0) {
        throw InvalidArgument("integrate: step must be finite and positive");
    }
    if (!std::isfinite(t_end) || t_end < 0.0) {
        throw InvalidArgument("integrate: t_end must be finite and non-negative");
    }
    double max_lag = 0.0;
    for (double lag : lags) {
        if (!std::isfinite(lag) || lag < 0.0) {
            throw InvalidArgument("integrate: lags must be finite and non-negative");
        }
        if (lag > 0.0 && step > lag * (1.0 + 1e-12)) {
            throw InvalidArgument("integrate: step " + std::to_string(step) +
                                  " exceeds positive delay " + std::to_string(lag));
        }
        max_lag = std::max(max_lag, lag);
    }

    DenseSolution sol;
    sol.step_ = step;
    sol.history_start_ = -max_lag;
    sol.offsets_.reserve(history.size());
    for (const auto& h : history) {
        if (h.start_time() > -max_lag + range_slack(max_lag)) {
            throw InvalidArgument("integrate: a history block does not reach back to -tau");
        }
        sol.offsets_.push_back(sol.dim_);
        sol.dim_ += h.dim();
    }
    sol.history_ = std::move(history);
    const std::size_t dim = sol.dim_;

    std::size_t steps = 0;
    if (t_end > 0.0) {
        steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
        steps = std::max<std::size_t>(steps, 1);
    }
    sol.times_.resize(steps + 1);
    for (std::size_t k = 0; k < steps; ++k) {
        sol.times_[k] = static_cast<double>(k) * step;
    }
    sol.times_[steps] = t_end;
    sol.values_.assign((steps + 1) * dim, 0.0);
    sol.derivatives_.assign((steps + 1) * dim, 0.0);

    std::vector<double> x(dim);
    sol.history_into(0.0, x);
    std::copy(x.begin(), x.end(), sol.values_.begin());

    std::vector<std::vector<double>> lag_buffers(lags.size(), std::vector<double>(dim));
    std::vector<std::span<const double>> lag_views(lags.size());
    std::size_t committed = 0;  // last node with a known value

    auto delayed_into = [&](double t, std::span<double> out) {
        if (t <= 0.0 || committed == 0) {
            sol.history_into(t, out);
        } else {
            sol.segment_into(t, committed, out);
        }
    };

    auto eval_rhs = [&](double t, std::span<const double> state, std::span<double> out) {
        for (std::size_t l = 0; l < lags.size(); ++l) {
            if (lags[l] == 0.0) {
                lag_views[l] = state;
            } else {
                delayed_into(t - lags[l], lag_buffers[l]);
                lag_views[l] = lag_buffers[l];
            }
        }
        rhs(t, state, LaggedStates(lag_views), out);
    };

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), stage(dim), comp(dim, 0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = sol.times_[n];
        const double h = sol.times_[n + 1] - t;
        std::span<double> deriv_n(sol.derivatives_.data() + n * dim, dim);
        if (n > 0) {
            // Provisional slope so lookups landing a rounding error past t_{n-1} stay finite.
            std::copy_n(sol.derivatives_.data() + (n - 1) * dim, dim, deriv_n.begin());
        }

        eval_rhs(t, x, k1);
        std::copy(k1.begin(), k1.end(), deriv_n.begin());

        for (std::size_t c = 0; c < dim; ++c) stage[c] = x[c] + 0.5 * h * k1[c];
        eval_rhs(t + 0.5 * h, stage, k2);
        for (std::size_t c = 0; c < dim; ++c) stage[c] = x[c] + 0.5 * h * k2[c];
        eval_rhs(t + 0.5 * h, stage, k3);
        for (std::size_t c = 0; c < dim; ++c) stage[c] = x[c] + h * k3[c];
        eval_rhs(t + h, stage, k4);

        for (std::size_t c = 0; c < dim; ++c) {
            const double increment = h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            const double y = increment - comp[c];
            const double sum = x[c] + y;
            comp[c] = (sum - x[c]) - y;
            x[c] = sum;
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw DivergenceError("integrate: state became non-finite at t=" +
                                          std::to_string(sol.times_[n + 1]),
                                      sol.times_[n + 1]);
            }
        }
        std::copy(x.begin(), x.end(), sol.values_.begin() + static_cast<std::ptrdiff_t>((n + 1) * dim));
        committed = n + 1;
    }

    // Slope at the final node closes the last Hermite segment.
    std::span<double> deriv_last(sol.derivatives_.data() + steps * dim, dim);
    if (steps > 0) {
        std::copy_n(sol.derivatives_.data() + (steps - 1) * dim, dim, deriv_last.begin());
    }
    eval_rhs(sol.times_[steps], x, k1);
    std::copy(k1.begin(), k1.end(), deriv_last.begin());
    return sol;
}

}  // namespace hkdelay
