#include "hkdelay/history.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hkdelay {

HistoryFunction::HistoryFunction(std::vector<double> times, PointSet values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty()) {
        throw InvalidArgument("HistoryFunction: need at least one sample");
    }
    if (times_.size() != values_.size()) {
        throw InvalidArgument("HistoryFunction: time and value counts differ");
    }
    if (times_.back() != 0.0) {
        throw InvalidArgument("HistoryFunction: last sample must be at t=0");
    }
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (!std::isfinite(times_[k])) {
            throw InvalidArgument("HistoryFunction: non-finite sample time");
        }
        if (k > 0 && !(times_[k] > times_[k - 1])) {
            throw InvalidArgument("HistoryFunction: sample times must be strictly increasing");
        }
    }
    require_finite(values_.coords(), "HistoryFunction values");
}

HistoryFunction HistoryFunction::constant(const Vec& value, double tau) {
    if (tau == 0.0) {
        return HistoryFunction({0.0}, PointSet::from_points({value}));
    }
    return HistoryFunction({-tau, 0.0}, PointSet::from_points({value, value}));
}

HistoryFunction HistoryFunction::linear(const Vec& at_start, const Vec& at_zero, double tau) {
    if (tau == 0.0) {
        return HistoryFunction({0.0}, PointSet::from_points({at_zero}));
    }
    return HistoryFunction({-tau, 0.0}, PointSet::from_points({at_start, at_zero}));
}

void HistoryFunction::eval_into(double t, std::span<double> out) const {
    const double lo = times_.front();
    // Allow a few ulps of slack so lookups at exactly -tau computed as t - tau succeed.
    const double slack = 1e-12 * std::max(1.0, std::abs(lo));
    if (!(t >= lo - slack) || !(t <= slack)) {
        throw OutOfRange("history_eval: t=" + std::to_string(t) + " outside [" +
                         std::to_string(lo) + ", 0]");
    }
    const std::size_t d = dim();
    if (t <= lo) {
        auto v = values_[0];
        std::copy(v.begin(), v.end(), out.begin());
        return;
    }
    if (t >= 0.0) {
        auto v = values_[times_.size() - 1];
        std::copy(v.begin(), v.end(), out.begin());
        return;
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    const std::size_t k = hi - 1;
    auto a = values_[k];
    if (t == times_[k]) {
        std::copy(a.begin(), a.end(), out.begin());
        return;
    }
    auto b = values_[hi];
    const double theta = (t - times_[k]) / (times_[hi] - times_[k]);
    for (std::size_t c = 0; c < d; ++c) {
        out[c] = a[c] + theta * (b[c] - a[c]);
    }
}

Vec HistoryFunction::operator()(double t) const {
    Vec out(dim());
    eval_into(t, out);
    return out;
}

double HistoryFunction::max_slope() const {
    double best = 0.0;
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        const double s = distance(values_[k], values_[k + 1]) / (times_[k + 1] - times_[k]);
        best = std::max(best, s);
    }
    return best;
}

double HistoryFunction::max_norm(std::size_t interior_points) const {
    double best = 0.0;
    Vec buf(dim());
    for (std::size_t k = 0; k < times_.size(); ++k) {
        best = std::max(best, norm(values_[k]));
        if (k + 1 == times_.size()) {
            break;
        }
        auto a = values_[k];
        auto b = values_[k + 1];
        for (std::size_t j = 1; j <= interior_points; ++j) {
            const double theta = static_cast<double>(j) / static_cast<double>(interior_points + 1);
            for (std::size_t c = 0; c < dim(); ++c) {
                buf[c] = a[c] + theta * (b[c] - a[c]);
            }
            best = std::max(best, norm(buf));
        }
    }
    return best;
}

HistoryFunction HistoryFunction::shifted(std::span<const double> offset) const {
    if (offset.size() != dim()) {
        throw InvalidArgument("HistoryFunction::shifted: offset dimension mismatch");
    }
    PointSet moved = values_;
    for (std::size_t k = 0; k < moved.size(); ++k) {
        auto r = moved.row(k);
        for (std::size_t c = 0; c < dim(); ++c) {
            r[c] += offset[c];
        }
    }
    return HistoryFunction(times_, std::move(moved));
}

Vec history_eval(const HistoryFunction& h, double t) { return h(t); }

}  // namespace hkdelay
