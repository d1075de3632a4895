#pragma once

#include <span>

#include "hkdelay/kernel.hpp"
#include "hkdelay/types.hpp"

namespace hkdelay {

/// Non-owning view of weighted atoms stored row-major.
struct AtomView {
    std::span<const double> coords;
    std::span<const double> weights;
    std::size_t dim = 1;

    std::size_t size() const noexcept { return weights.size(); }
    std::span<const double> operator[](std::size_t j) const { return coords.subspan(j * dim, dim); }
};

/// out += sum_j w_j k(x, y_j) (y_j - x).
///
/// This is the single arithmetic path behind every right-hand side in the
/// library: particle sums use w_j = 1/m or 1/N, measure integrals use the
/// atom weights, so uniform empirical measures reproduce particle runs
/// bit for bit.
void accumulate_attraction(const Kernel& k, std::span<const double> x, const AtomView& atoms,
                           std::span<double> out);

}  // namespace hkdelay
