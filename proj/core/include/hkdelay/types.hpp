#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hkdelay {

/// A single opinion vector in R^d.
using Vec = std::vector<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class UnsupportedInput : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised by the integrator when the state stops being finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double blow_up_time)
        : Error(what), blow_up_time_(blow_up_time) {}

    double blow_up_time() const noexcept { return blow_up_time_; }

private:
    double blow_up_time_;
};

/// Row-major set of points sharing one dimension. Row i is point i.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t dim, std::size_t count);
    PointSet(std::size_t dim, std::vector<double> coords);

    static PointSet from_points(const std::vector<Vec>& points);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<double> row(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

    std::span<const double> coords() const noexcept { return coords_; }
    std::span<double> coords() noexcept { return coords_; }

    Vec point(std::size_t i) const;

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

/// Euclidean distance; components are accumulated in index order.
double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);

/// Throws InvalidArgument naming `what` if any component is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

/// Largest pairwise distance within the point set (0 for fewer than two points).
double point_set_diameter(const PointSet& points);

struct DelayConfig {
    double tau1 = 0.0;  ///< lag with which leader opinions are observed
    double tau2 = 0.0;  ///< lag with which follower opinions are observed

    DelayConfig() = default;
    DelayConfig(double leader_delay, double follower_delay);

    double tau() const noexcept { return tau1 > tau2 ? tau1 : tau2; }
};

}  // namespace hkdelay
