#include "hkdelay/interaction.hpp"

namespace hkdelay {

void accumulate_attraction(const Kernel& k, std::span<const double> x, const AtomView& atoms,
                           std::span<double> out) {
    const std::size_t d = atoms.dim;
    const bool radial = k.is_radial();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const double* y = atoms.coords.data() + j * d;
        double weight;
        if (radial) {
            double r2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = y[c] - x[c];
                r2 += diff * diff;
            }
            weight = k.of_squared_distance(r2);
        } else {
            weight = k(x, std::span<const double>(y, d));
        }
        const double coef = atoms.weights[j] * weight;
        for (std::size_t c = 0; c < d; ++c) {
            out[c] += coef * (y[c] - x[c]);
        }
    }
}

}  // namespace hkdelay
