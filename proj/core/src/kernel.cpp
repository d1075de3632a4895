#include "hkdelay/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hkdelay/types.hpp"

namespace hkdelay {
namespace {

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw InvalidArgument(std::string("Kernel: ") + what + " must be finite and positive");
    }
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double diff = y[c] - x[c];
        acc += diff * diff;
    }
    return acc;
}

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

Kernel::Kernel(Params params, double sup_bound, double lipschitz)
    : params_(std::move(params)), sup_bound_(sup_bound), lipschitz_(lipschitz) {}

Kernel::Kernel() : Kernel(ConstantParams{1.0}, 1.0, 0.0) {}

Kernel Kernel::constant(double c) {
    require_positive(c, "constant c");
    return Kernel(ConstantParams{c}, c, 0.0);
}

Kernel Kernel::inverse_power(double c, double beta) {
    require_positive(c, "inverse-power c");
    require_positive(beta, "inverse-power beta");
    // sup |d/dr c(1+r^2)^-beta| is attained at r^2 = 1/(2 beta + 1).
    const double r = 1.0 / std::sqrt(2.0 * beta + 1.0);
    const double lip = 2.0 * beta * c * r * std::pow(1.0 + r * r, -beta - 1.0);
    return Kernel(InversePowerParams{c, beta}, c, lip);
}

Kernel Kernel::truncated_exponential(double c, double sigma, double floor) {
    require_positive(c, "truncated-exponential c");
    require_positive(sigma, "truncated-exponential sigma");
    require_positive(floor, "truncated-exponential floor");
    // sup |d/dr c exp(-r^2/sigma^2)| is attained at r = sigma/sqrt(2).
    const double lip = c * std::sqrt(2.0) * std::exp(-0.5) / sigma;
    return Kernel(TruncatedExponentialParams{c, sigma, floor}, c + floor, lip);
}

Kernel Kernel::custom(CustomParams params) {
    if (!params.fn) {
        throw InvalidArgument("Kernel: custom kernel needs a callable");
    }
    require_positive(params.sup_bound, "custom sup bound");
    if (!std::isfinite(params.lipschitz) || params.lipschitz < 0.0) {
        throw InvalidArgument("Kernel: custom Lipschitz constant must be finite and non-negative");
    }
    const double sup = params.sup_bound;
    const double lip = params.lipschitz;
    return Kernel(std::move(params), sup, lip);
}

KernelFamily Kernel::family() const noexcept {
    return std::visit(Overloaded{
                          [](const ConstantParams&) { return KernelFamily::constant; },
                          [](const InversePowerParams&) { return KernelFamily::inverse_power; },
                          [](const TruncatedExponentialParams&) {
                              return KernelFamily::truncated_exponential;
                          },
                          [](const CustomParams&) { return KernelFamily::custom; },
                      },
                      params_);
}

double Kernel::of_squared_distance(double r2) const {
    switch (params_.index()) {
        case 0:
            return std::get<ConstantParams>(params_).c;
        case 1: {
            const auto& p = std::get<InversePowerParams>(params_);
            return p.c * std::pow(1.0 + r2, -p.beta);
        }
        case 2: {
            const auto& p = std::get<TruncatedExponentialParams>(params_);
            return p.c * std::exp(-r2 / (p.sigma * p.sigma)) + p.floor;
        }
        default:
            throw UnsupportedInput("Kernel: custom kernels have no radial profile");
    }
}

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const {
    if (const auto* custom = std::get_if<CustomParams>(&params_)) {
        return custom->fn(x, y);
    }
    return of_squared_distance(squared_distance(x, y));
}

std::string Kernel::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const ConstantParams& p) { os << "constant(c=" << p.c << ")"; },
                   [&](const InversePowerParams& p) {
                       os << "inverse_power(c=" << p.c << ", beta=" << p.beta << ")";
                   },
                   [&](const TruncatedExponentialParams& p) {
                       os << "truncated_exponential(c=" << p.c << ", sigma=" << p.sigma
                          << ", floor=" << p.floor << ")";
                   },
                   [&](const CustomParams& p) { os << p.name; },
               },
               params_);
    return os.str();
}

namespace {

struct LatticeMin {
    double value;
    double a;
    double b;
};

LatticeMin diagonal_lattice_min(const Kernel& k, std::size_t dim, double a_lo, double a_hi,
                                double b_lo, double b_hi) {
    constexpr int kPoints = 33;
    const double unit = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<double> z1(dim), z2(dim);
    LatticeMin best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (int i = 0; i < kPoints; ++i) {
        const double a = a_lo + (a_hi - a_lo) * i / (kPoints - 1);
        std::fill(z1.begin(), z1.end(), a * unit);
        for (int j = 0; j < kPoints; ++j) {
            const double b = b_lo + (b_hi - b_lo) * j / (kPoints - 1);
            std::fill(z2.begin(), z2.end(), b * unit);
            const double v = k(z1, z2);
            if (v < best.value) {
                best = {v, a, b};
            }
        }
    }
    return best;
}

}  // namespace

double kernel_min_on_ball(const Kernel& k, double radius, std::size_t dim) {
    if (!std::isfinite(radius) || radius < 0.0) {
        throw InvalidArgument("kernel_min_on_ball: radius must be finite and non-negative");
    }
    if (dim == 0) {
        throw InvalidArgument("kernel_min_on_ball: dimension must be at least 1");
    }
    if (k.is_radial()) {
        const double sep = 2.0 * radius;
        return k.of_squared_distance(sep * sep);
    }

    const LatticeMin coarse = diagonal_lattice_min(k, dim, -radius, radius, -radius, radius);
    const double cell = 2.0 * radius / 32.0;
    const LatticeMin fine = diagonal_lattice_min(
        k, dim, std::max(-radius, coarse.a - cell), std::min(radius, coarse.a + cell),
        std::max(-radius, coarse.b - cell), std::min(radius, coarse.b + cell));
    const double result = std::min(coarse.value, fine.value);
    if (!(result > 0.0) || !std::isfinite(result)) {
        throw ConfigError("kernel_min_on_ball: kernel is not strictly positive on the ball");
    }
    return result;
}

}  // namespace hkdelay
