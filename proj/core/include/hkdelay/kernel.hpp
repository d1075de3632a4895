#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>

namespace hkdelay {

enum class KernelFamily { constant, inverse_power, truncated_exponential, custom };

/// k(x,y) = c
struct ConstantParams {
    double c = 1.0;
};

/// k(x,y) = c / (1 + |x-y|^2)^beta
struct InversePowerParams {
    double c = 1.0;
    double beta = 1.0;
};

/// k(x,y) = c * exp(-|x-y|^2 / sigma^2) + floor
struct TruncatedExponentialParams {
    double c = 1.0;
    double sigma = 1.0;
    double floor = 0.1;
};

/// Arbitrary user kernel; the caller vouches for positivity and the declared bounds.
struct CustomParams {
    std::function<double(std::span<const double>, std::span<const double>)> fn;
    double sup_bound = 0.0;
    double lipschitz = 0.0;
    std::string name = "custom";
};

/// Positive, bounded, Lipschitz influence function. Immutable value type.
///
/// The three builtin families depend on x and y only through |x-y| and are
/// non-increasing in it, which lets the ball minimum be taken in closed form.
class Kernel {
public:
    using Params = std::variant<ConstantParams, InversePowerParams, TruncatedExponentialParams,
                                CustomParams>;

    /// The unit constant kernel.
    Kernel();

    static Kernel constant(double c);
    static Kernel inverse_power(double c, double beta);
    static Kernel truncated_exponential(double c, double sigma, double floor);
    static Kernel custom(CustomParams params);

    double operator()(std::span<const double> x, std::span<const double> y) const;

    /// Weight as a function of squared separation. Only valid for radial families.
    double of_squared_distance(double r2) const;

    double sup_bound() const noexcept { return sup_bound_; }
    double lipschitz_const() const noexcept { return lipschitz_; }
    KernelFamily family() const noexcept;
    bool is_radial() const noexcept { return family() != KernelFamily::custom; }
    const Params& params() const noexcept { return params_; }
    std::string describe() const;

private:
    Kernel(Params params, double sup_bound, double lipschitz);

    Params params_;
    double sup_bound_;
    double lipschitz_;
};

/// Positive lower bound of k(z1,z2) over |z1|,|z2| <= radius.
///
/// Radial families: exact value at separation 2*radius. Custom kernels: a
/// 33x33 lattice over the diagonal slice z1 = a*e, z2 = b*e (e the normalized
/// all-ones direction, a,b in [-radius, radius]) followed by one 33x33
/// refinement around the argmin; the refinement must not raise the minimum.
double kernel_min_on_ball(const Kernel& k, double radius, std::size_t dim = 1);

}  // namespace hkdelay
