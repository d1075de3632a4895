#include "hkdelay/types.hpp"

#include <cmath>
#include <string>

namespace hkdelay {

PointSet::PointSet(std::size_t dim, std::size_t count) : dim_(dim), coords_(dim * count, 0.0) {
    if (dim == 0) {
        throw InvalidArgument("PointSet: dimension must be at least 1");
    }
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim == 0) {
        throw InvalidArgument("PointSet: dimension must be at least 1");
    }
    if (coords_.size() % dim != 0) {
        throw InvalidArgument("PointSet: coordinate count is not a multiple of the dimension");
    }
}

PointSet PointSet::from_points(const std::vector<Vec>& points) {
    if (points.empty()) {
        throw InvalidArgument("PointSet: need at least one point to infer the dimension");
    }
    const std::size_t dim = points.front().size();
    std::vector<double> coords;
    coords.reserve(dim * points.size());
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw InvalidArgument("PointSet: points have mismatched dimensions");
        }
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointSet(dim, std::move(coords));
}

Vec PointSet::point(std::size_t i) const {
    auto r = (*this)[i];
    return Vec(r.begin(), r.end());
}

double distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double norm(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        acc += a[c] * b[c];
    }
    return acc;
}

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string(what) + ": non-finite component");
        }
    }
}

double point_set_diameter(const PointSet& points) {
    const std::size_t n = points.size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(points[i], points[j]);
            if (d > best) {
                best = d;
            }
        }
    }
    return best;
}

DelayConfig::DelayConfig(double leader_delay, double follower_delay)
    : tau1(leader_delay), tau2(follower_delay) {
    if (!std::isfinite(tau1) || !std::isfinite(tau2) || tau1 < 0.0 || tau2 < 0.0) {
        throw InvalidArgument("DelayConfig: delays must be finite and non-negative");
    }
}

}  // namespace hkdelay
